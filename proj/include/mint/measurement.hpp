#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mint/operator_core.hpp"

namespace mint {

enum class Party { alice, bob };

std::string party_name(Party p);
Party parse_party(const std::string& name);

struct LabeledElement {
    std::string label;
    HermitianOperator op;
};

/// A discrete POVM: PSD elements summing to the identity. The bipartite
/// dimensions d_A, d_B are optional metadata (0 means unspecified) with
/// composite index alpha * d_B + beta.
struct Measurement {
    Eigen::Index dim = 0;
    std::vector<LabeledElement> elements;
    Eigen::Index d_A = 0;
    Eigen::Index d_B = 0;

    std::size_t size() const { return elements.size(); }
    const HermitianOperator& element(std::size_t i) const { return elements[i].op; }
    const std::string& label(std::size_t i) const { return elements[i].label; }
    std::optional<std::size_t> index_of(const std::string& label) const;
};

struct ValidationReport {
    bool pass = false;
    double completeness_residual = 0.0;
    std::vector<double> min_eigenvalues;
    bool labels_unique = true;
    bool dims_consistent = true;
};

/// One product state alpha ox beta with its label.
struct ProductVector {
    std::string label;
    CVector alice;
    CVector bob;

    CVector full() const { return tensor_product(alice, bob); }
};

/// An orthonormal family of product states on C^{d_A} ox C^{d_B}.
struct ProductBasis {
    Eigen::Index d_A = 0;
    Eigen::Index d_B = 0;
    std::vector<ProductVector> vectors;

    Eigen::Index dim() const { return d_A * d_B; }
    std::size_t size() const { return vectors.size(); }
    std::vector<CVector> full_vectors() const;
    std::vector<std::string> labels() const;
};

struct BasisReport {
    bool pass = false;
    double worst_overlap = 0.0;
    double worst_norm_deviation = 0.0;
    bool complete = false;
};

/// Surjective grouping of fine outcomes into coarse ones.
struct CoarseGrainMap {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::string> labels;
};

ValidationReport validate(const Measurement& m, const Tolerances& tol = {});
BasisReport validate(const ProductBasis& basis, const Tolerances& tol = {});

/// Requires orthonormality (overlap tolerance 1e-12) and throws BasisError
/// otherwise; used where a basis is a precondition rather than input data.
void require_orthonormal(const std::vector<CVector>& vectors, double tol = 1e-12);

Measurement coarse_grain(const Measurement& m, const CoarseGrainMap& map,
                         const Tolerances& tol = {});

/// Second-stage composition: outcome (i, j) has element
/// sqrt(E_i) F^(i)_j sqrt(E_i), labeled "i/j". A map coarse-grains the
/// composed outcomes in the same call.
Measurement compose(const Measurement& first, const std::vector<Measurement>& second,
                    const std::optional<CoarseGrainMap>& map = std::nullopt,
                    const Tolerances& tol = {});

/// Rank-one projective measurement onto an orthonormal basis.
Measurement von_neumann(const std::vector<CVector>& basis,
                        const std::vector<std::string>& labels = {},
                        const Tolerances& tol = {});
Measurement von_neumann(const ProductBasis& basis, const Tolerances& tol = {});

/// True when every element is proportional to the identity.
bool is_trivial(const Measurement& m);

/// Born probabilities tr(E_i rho); rho must be PSD with unit trace.
std::vector<double> outcome_probabilities(const Measurement& m, const HermitianOperator& rho,
                                          const Tolerances& tol = {});

/// Element-wise comparison after matching outcomes by label.
struct MeasurementDistance {
    bool same_labels = false;
    double max_residual = 0.0;
};
MeasurementDistance measurement_distance(const Measurement& a, const Measurement& b);

}  // namespace mint
