#include "mint/progress.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace mint {

ProgressFunction::ProgressFunction(Eigen::Index dim, Evaluator eval, std::string descriptor)
    : dim_(dim), eval_(std::move(eval)), descriptor_(std::move(descriptor)) {
    if (dim_ <= 0) {
        throw DimensionError("progress function needs a positive dimension");
    }
    if (!eval_) {
        throw DomainError("progress function needs an evaluator");
    }
}

double ProgressFunction::operator()(const HermitianOperator& e) const {
    if (e.dim() != dim_) {
        throw DimensionError("progress function defined on dimension " +
                             std::to_string(dim_) + ", got " + std::to_string(e.dim()));
    }
    if (e.is_zero()) {
        throw ZeroOperatorError("progress of the zero operator is undefined");
    }
    if (e.trace() <= 0.0) {
        throw DomainError("progress input must be PSD and nonzero");
    }
    return eval_(e);
}

ProgressFunction example_mu(const std::vector<CVector>& basis) {
    if (basis.empty()) {
        throw DomainError("example progress function needs a nonempty basis");
    }
    const Eigen::Index dim = basis.front().size();
    if (static_cast<Eigen::Index>(basis.size()) != dim) {
        throw BasisError("example progress function needs a complete basis", 0.0);
    }
    require_orthonormal(basis);
    const double n = static_cast<double>(basis.size());
    auto states = basis;
    auto eval = [states, n](const HermitianOperator& e) {
        double best = 0.0;
        for (const auto& psi : states) {
            best = std::max(best, (psi.adjoint() * e.mat() * psi).value().real());
        }
        return best / e.trace() - 1.0 / n;
    };
    ProgressFunction mu(dim, eval, "example:" + std::to_string(basis.size()));
    // mu(c id + F) = (n m - s) / (n (c n + s)) with m = max_k <psi_k|F|psi_k>
    // and s = tr F, so the target t > 0 is hit at c = (m - t s - s/n) / (n t).
    mu.set_solver([states, n](const HermitianOperator& f, double target)
                      -> std::optional<double> {
        if (target <= 0.0) {
            return std::nullopt;
        }
        double m = 0.0;
        for (const auto& psi : states) {
            m = std::max(m, (psi.adjoint() * f.mat() * psi).value().real());
        }
        const double s = f.trace();
        const double c = (m - target * s - s / n) / (n * target);
        return std::max(c, 0.0);
    });
    return mu;
}

ProgressFunction example_mu(const ProductBasis& basis) {
    return example_mu(basis.full_vectors());
}

ThresholdCertificate threshold_example_mu(Eigen::Index n) {
    if (n < 2) {
        throw DomainError("threshold needs at least two states");
    }
    return {n, 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1))};
}

ProgressFunction induced_mu(const ProgressFunction& mu, const HermitianOperator& applied_alice,
                            const HermitianOperator& applied_bob, Party party,
                            const Tolerances& tol) {
    tol.validate();
    const Eigen::Index d_A = applied_alice.dim();
    const Eigen::Index d_B = applied_bob.dim();
    if (d_A * d_B != mu.dim()) {
        throw DimensionError("applied factors do not multiply up to the progress dimension");
    }
    const Eigen::Index local_dim = party == Party::alice ? d_A : d_B;
    const HermitianOperator& acting = party == Party::alice ? applied_alice : applied_bob;
    const HermitianOperator& idle = party == Party::alice ? applied_bob : applied_alice;
    const HermitianOperator root = matrix_sqrt(acting, tol);

    auto lift = [root, idle, party](const HermitianOperator& x) {
        const CMatrix conj = root.mat() * x.mat() * root.mat();
        const HermitianOperator local(conj);
        return party == Party::alice ? tensor_product(local, idle)
                                     : tensor_product(idle, local);
    };
    auto eval = [mu, lift](const HermitianOperator& x) { return mu(lift(x)); };
    ProgressFunction out(local_dim, eval,
                         mu.descriptor() + "|induced:" + party_name(party));

    const bool at_identity =
        max_abs(applied_alice.mat() - CMatrix::Identity(d_A, d_A)) <= 1e-12 &&
        max_abs(applied_bob.mat() - CMatrix::Identity(d_B, d_B)) <= 1e-12;
    if (at_identity && mu.solver()) {
        // With identity factors the lift of c id_local + x is
        // c id + lift(x), so the base solver applies verbatim.
        auto base = mu.solver();
        out.set_solver([base, lift](const HermitianOperator& x,
                                    double target) -> std::optional<double> {
            return base(lift(x), target);
        });
    }
    return out;
}

HermitianOperator random_psd(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            g(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    return HermitianOperator(g.adjoint() * g);
}

AxiomReport check_axioms(const ProgressFunction& mu, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) {
        throw DomainError("check_axioms needs at least one sample");
    }
    AxiomReport rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.identity_value = mu(HermitianOperator::identity(mu.dim()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const HermitianOperator e = random_psd(mu.dim(), rng());
        const HermitianOperator f = random_psd(mu.dim(), rng());
        const double mu_e = mu(e);
        const double mu_f = mu(f);
        for (double t : {1e-3, 1e3}) {
            const HermitianOperator te(t * e.mat());
            rep.max_scale_violation =
                std::max(rep.max_scale_violation, std::abs(mu(te) - mu_e));
        }
        const HermitianOperator sum(e.mat() + f.mat());
        rep.max_quasiconvex_violation = std::max(
            rep.max_quasiconvex_violation, mu(sum) - std::max(mu_e, mu_f));
        CMatrix g(mu.dim(), mu.dim());
        for (Eigen::Index r = 0; r < mu.dim(); ++r) {
            for (Eigen::Index c = 0; c < mu.dim(); ++c) {
                g(r, c) = Complex(gauss(rng), gauss(rng));
            }
        }
        const CMatrix h = 0.5 * (g + g.adjoint().eval()) / std::max(1e-12, max_abs(g));
        for (double delta : {1e-4, 1e-6}) {
            const HermitianOperator shifted(e.mat() + delta * h);
            rep.lipschitz_constant = std::max(
                rep.lipschitz_constant, std::abs(mu(shifted) - mu_e) / delta);
        }
    }
    rep.max_quasiconvex_violation = std::max(rep.max_quasiconvex_violation, 0.0);
    rep.pass = std::abs(rep.identity_value) <= 1e-9 &&
               rep.max_scale_violation <= 1e-9 &&
               rep.max_quasiconvex_violation <= 1e-9;
    return rep;
}

}  // namespace mint
