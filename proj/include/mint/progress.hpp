#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mint/measurement.hpp"
#include "mint/operator_core.hpp"

namespace mint {

/// A progress function: continuous on nonzero PSD operators, zero at the
/// identity, scale invariant, and quasiconvex under addition. Instances may
/// carry a closed-form solver for the interpolation constant; callers fall
/// back to bracketed bisection when no solver is attached.
class ProgressFunction {
  public:
    using Evaluator = std::function<double(const HermitianOperator&)>;
    /// Returns c >= 0 with mu(c * id + F) == target, or nullopt to decline.
    using Solver = std::function<std::optional<double>(const HermitianOperator&, double)>;

    ProgressFunction(Eigen::Index dim, Evaluator eval, std::string descriptor);

    double operator()(const HermitianOperator& e) const;

    Eigen::Index dim() const { return dim_; }
    const std::string& descriptor() const { return descriptor_; }

    void set_solver(Solver solver) { solver_ = std::move(solver); }
    const Solver& solver() const { return solver_; }

  private:
    Eigen::Index dim_ = 0;
    Evaluator eval_;
    std::string descriptor_;
    Solver solver_;
};

/// Discrimination progress against a complete orthonormal basis:
/// mu(E) = max_k <psi_k|E|psi_k> / tr(E) - 1/n. Ships with the closed-form
/// interpolation solver.
ProgressFunction example_mu(const std::vector<CVector>& basis);
ProgressFunction example_mu(const ProductBasis& basis);

/// Threshold below which the example progress function certifies that some
/// basis state is annihilated: mu0 = 1 / (n (n - 1)).
struct ThresholdCertificate {
    Eigen::Index n = 0;
    double mu0 = 0.0;
};
ThresholdCertificate threshold_example_mu(Eigen::Index n);

/// Progress induced on one party's local operators partway through a
/// protocol: mu'(x) = mu((sqrt(a) x sqrt(a)) ox b) for Alice, mirrored for
/// Bob. a and b are the accumulated local POVM factors at the node.
ProgressFunction induced_mu(const ProgressFunction& mu, const HermitianOperator& applied_alice,
                            const HermitianOperator& applied_bob, Party party,
                            const Tolerances& tol = {});

struct AxiomReport {
    bool pass = false;
    double identity_value = 0.0;
    double max_scale_violation = 0.0;
    double max_quasiconvex_violation = 0.0;
    /// Sampled |mu(E + dH) - mu(E)| / d; reported only, never asserted
    /// (continuity is not decidable from samples).
    double lipschitz_constant = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Spot-checks the progress-function axioms on seeded random PSD inputs.
AxiomReport check_axioms(const ProgressFunction& mu, std::size_t samples, std::uint64_t seed);

/// Random PSD operator G^dag G from a seeded complex Gaussian G.
HermitianOperator random_psd(Eigen::Index dim, std::uint64_t seed);

}  // namespace mint
