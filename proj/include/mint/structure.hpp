#pragma once

#include "mint/measurement.hpp"
#include "mint/progress.hpp"

namespace mint {

/// A sum-of-tensor-products presentation of a bipartite PSD operator.
struct ProductDecomposition {
    std::vector<std::pair<HermitianOperator, HermitianOperator>> terms;

    HermitianOperator reconstruct() const;
};

/// Splits a bipartite PSD operator into a single tensor factor pair via the
/// realignment rank test; factors are PSD with tr(alice) = 1.
ProductDecomposition factor_product(const HermitianOperator& e, Eigen::Index d_A,
                                    Eigen::Index d_B, const Tolerances& tol = {});

struct DisturbanceReport {
    bool non_disturbing = false;
    double worst_off_diagonal = 0.0;
    std::string worst_element;
    std::size_t worst_j = 0;
    std::size_t worst_k = 0;
};

/// Checks <psi|E|phi> = 0 (within 1e-9) for every element E and every pair
/// of distinct states; S need not be complete.
DisturbanceReport is_non_disturbing(const Measurement& m, const std::vector<CVector>& states);
DisturbanceReport is_non_disturbing(const Measurement& m, const ProductBasis& basis);

struct MuTildeBound {
    double value = 0.0;
    /// single-term decompositions give the exact product-case value
    bool exact = false;
};

/// max_j mu(a_j ox b_j) over the decomposition's terms: an upper bound on
/// the product-decomposition progress, exact for single-term inputs.
MuTildeBound mu_tilde_upper(const HermitianOperator& e, const ProductDecomposition& decomp,
                            const ProgressFunction& mu, const Tolerances& tol = {});

/// Unrolls per-element product decompositions into the fine-grained product
/// measurement; the returned map coarse-grains it back onto the source.
struct FineGrained {
    Measurement fine;
    CoarseGrainMap by_source;
};
FineGrained sep_to_product_stage(const Measurement& m,
                                 const std::vector<ProductDecomposition>& decomps,
                                 const Tolerances& tol = {});

/// The local projective measurement extracted from a product non-disturbing
/// first stage: eigenprojectors of the first nontrivial local factor.
struct LocalExtraction {
    Party party = Party::alice;
    Measurement local_measurement;
    std::vector<double> progress_values;
    bool trivial = false;
    std::size_t source_element = 0;
};

LocalExtraction extract_local_nondisturbing(const Measurement& m1, const ProductBasis& basis,
                                            const ProgressFunction& mu, double mu0,
                                            const Tolerances& tol = {});

/// Real vector space of Hermitian local operators a with
/// <psi_j|(a ox id)|psi_k> = 0 for all j != k (Bob: id ox a). Contains the
/// identity for any orthonormal S, so dimension >= 1.
struct DiagonalitySpace {
    Eigen::Index dimension = 0;
    std::vector<HermitianOperator> basis;

    bool contains(const HermitianOperator& a, double tol = 1e-8) const;
};
DiagonalitySpace local_diagonality_space(const ProductBasis& basis, Party party,
                                         const Tolerances& tol = {});

}  // namespace mint
