#pragma once

#include <map>
#include <string>
#include <vector>

#include "mint/interpolation.hpp"
#include "mint/measurement.hpp"
#include "mint/progress.hpp"
#include "mint/structure.hpp"

namespace mint {

/// Node of a finite LOCC protocol tree. Internal nodes carry the acting
/// party and one local Kraus operator per child; leaves carry an outcome
/// label and nothing else. Classical communication is implicit: a child
/// index is the message announced for that Kraus outcome.
struct ProtocolNode {
    Party party = Party::alice;
    std::vector<CMatrix> kraus;
    std::vector<ProtocolNode> children;
    std::string label;

    bool is_leaf() const { return children.empty(); }
};

struct ProtocolTree {
    Eigen::Index d_A = 0;
    Eigen::Index d_B = 0;
    ProtocolNode root;
};

/// Checks dimensions, per-node local Kraus completeness (within
/// tol.completeness) and leaf label uniqueness; throws on violation.
void validate_tree(const ProtocolTree& t, const Tolerances& tol = {});

/// One POVM element per leaf: (A'+ A') ox (B'+ B') with A', B' the
/// accumulated Kraus products along the root path and + the adjoint.
/// Validates as a Measurement.
Measurement leaf_povm(const ProtocolTree& t, const Tolerances& tol = {});

/// Assignment of every leaf label to a target outcome label.
struct OutcomePartition {
    std::map<std::string, std::string> leaf_to_outcome;
};

struct ImplementsReport {
    bool implements = false;
    double max_residual = 0.0;
    std::string worst_outcome;
};

/// True when, for every element of m, the leaf elements mapped to it by the
/// partition sum to that element within tol.completeness.
ImplementsReport implements(const ProtocolTree& t, const Measurement& m,
                            const OutcomePartition& partition, const Tolerances& tol = {});

struct DiscriminationReport {
    bool discriminates = false;
    OutcomePartition partition;
    /// max over leaves of the second-largest overlap <psi|P_w|psi>
    double worst_leakage = 0.0;
    std::string worst_leaf;
};

/// True when every nonzero leaf element annihilates all but exactly one
/// basis state (overlaps below 1e-9 count as zero). The returned partition
/// maps each leaf to its surviving state.
DiscriminationReport discriminates(const ProtocolTree& t, const ProductBasis& basis,
                                   const Tolerances& tol = {});

/// Same criterion element-wise for an arbitrary measurement, e.g. a
/// completed chain; the tree overload delegates to this on its leaf POVM.
DiscriminationReport discriminates(const Measurement& m, const ProductBasis& basis,
                                   const Tolerances& tol = {});

/// One completion measurement per leaf label, all on the full space.
using CompletionFamily = std::map<std::string, Measurement>;

/// Chain of the protocol followed per-leaf by the family measurement:
/// fine has one element sqrt(P_w) M_j sqrt(P_w) per (leaf, outcome) pair
/// labeled "w/j"; chain coarse-grains fine onto the target outcome labels
/// in order of first appearance.
struct CompletedChain {
    Measurement fine;
    Measurement chain;
};

CompletedChain complete_with_family(const ProtocolTree& t, const CompletionFamily& family,
                                    const Tolerances& tol = {});

/// The node v' found by the zero-progress subtree search: its path from the
/// root (child indices), the acting party, the local POVM at v', the
/// accumulated operators applied upon reaching it, the induced progress
/// lambda = max over local elements, and the largest progress value that the
/// search classified as zero (the decision margin).
struct InterpolationNode {
    std::vector<std::size_t> path;
    Party party = Party::alice;
    Measurement local_measurement;
    HermitianOperator applied_alice;
    HermitianOperator applied_bob;
    double lambda = 0.0;
    double margin = 0.0;
};

/// Walks the subtree of zero-progress nodes (mu <= 1e-9 counts as zero) and
/// returns the first node, in preorder, with a child of nonzero progress.
InterpolationNode find_interpolation_node(const ProtocolTree& t, const ProgressFunction& mu,
                                          const Tolerances& tol = {});

/// Interpolates the local measurement at v' under the induced progress
/// function and reassembles a product epsilon-interpolation of the completed
/// chain: deviating branches keep their accumulated elements ("dev:<path>"),
/// the v' branches become the interpolated elements ("v:<i>"), and every
/// second stage continues the original protocol plus its completions.
/// Requires epsilon in (0, min{lambda, mu0}) and mu >= mu0 on every nonzero
/// leaf element.
InterpolationResult interpolate_protocol(const ProtocolTree& t, const CompletionFamily& family,
                                         const ProgressFunction& mu, double mu0,
                                         double epsilon, const Tolerances& tol = {});

/// One-round LOCC first stage recovered from a verified interpolation:
/// the extracted local projective measurement as a protocol tree (leaves
/// "L0", "L1", ...), one copy of the target measurement per leaf, and the
/// residual of the completed chain against the target.
struct ProtocolDecomposition {
    ProtocolTree m1_protocol;
    CompletionFamily m2;
    LocalExtraction extraction;
    double completion_residual = 0.0;
};

ProtocolDecomposition decompose_from_interpolation(const Measurement& m,
                                                   const InterpolationResult& result,
                                                   const ProductBasis& basis,
                                                   const ProgressFunction& mu, double mu0,
                                                   const Tolerances& tol = {});

/// Seeded random protocol tree of the given depth: every internal node
/// draws a Haar-random isometric Kraus set with 2 or 3 outcomes, so
/// per-node completeness holds by construction.
ProtocolTree random_tree(Eigen::Index d_A, Eigen::Index d_B, int depth, unsigned seed);

}  // namespace mint
