#include "mint/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mint {

namespace {

constexpr double bracket_cap = 1e12;
// c_i below this is floating-point dust from the target == mu(F_i) endpoint
// and takes the exact c_i = 0 branch of the construction.
constexpr double c_snap = 1e-13;

/// Inverse square root of a positive definite operator; unlike pinv_sqrt no
/// eigenvalue is dropped, so tiny-but-positive spectra stay invertible.
HermitianOperator inv_sqrt_pd(const HermitianOperator& m, const Tolerances& tol) {
    const Spectrum s = eigendecompose(m);
    RVector inv(s.eigenvalues.size());
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        if (!(s.eigenvalues(i) > 0.0)) {
            throw DomainError("inverse square root of a singular operator");
        }
        inv(i) = 1.0 / std::sqrt(s.eigenvalues(i));
    }
    return HermitianOperator(
        s.eigenvectors * inv.asDiagonal() * s.eigenvectors.adjoint(), tol);
}

bool is_von_neumann_target(const Measurement& m) {
    if (static_cast<Eigen::Index>(m.size()) != m.dim) {
        return false;
    }
    for (const auto& el : m.elements) {
        const CMatrix& e = el.op.mat();
        if (std::abs(el.op.trace() - 1.0) > 1e-8 || max_abs(e * e - e) > 1e-8) {
            return false;
        }
    }
    return true;
}

}  // namespace

double solve_c(const ProgressFunction& mu, const HermitianOperator& f, double target,
               const Tolerances& tol) {
    tol.validate();
    if (f.dim() != mu.dim()) {
        throw DimensionError("solve_c operator dimension does not match the progress function");
    }
    if (target < 0.0) {
        throw DomainError("solve_c target must be non-negative");
    }
    const double mu_f = mu(f);
    if (target > mu_f + 1e-9) {
        throw TargetUnreachableError("target " + std::to_string(target) +
                                         " exceeds mu(F) = " + std::to_string(mu_f),
                                     target, mu_f);
    }
    if (std::abs(target - mu_f) <= tol.root_find) {
        return 0.0;
    }
    const CMatrix id = CMatrix::Identity(f.dim(), f.dim());
    auto value = [&](double c) { return mu(HermitianOperator(c * id + f.mat(), tol)); };
    if (mu.solver()) {
        if (const auto c = mu.solver()(f, target)) {
            const double cc = std::max(*c, 0.0);
            if (std::abs(value(cc) - target) <= std::max(tol.root_find, 1e-10)) {
                return cc;
            }
        }
    }
    double lo = 0.0;
    double hi = 1.0;
    double v_hi = value(hi);
    while (v_hi - target > tol.root_find && hi < bracket_cap) {
        lo = hi;
        hi *= 2.0;
        v_hi = value(hi);
    }
    if (std::abs(v_hi - target) <= tol.root_find) {
        return hi;
    }
    if (v_hi > target) {
        throw BracketError("mu(c id + F) stays above the target up to c = 1e12");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double v = value(mid);
        if (std::abs(v - target) <= tol.root_find) {
            return mid;
        }
        if (v > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw BracketError("bisection failed to converge to the interpolation constant");
}

InterpolationResult interpolate_kkb(const Measurement& m, const ProgressFunction& mu,
                                    double epsilon, const Tolerances& tol) {
    tol.validate();
    if (mu.dim() != m.dim) {
        throw DimensionError("progress function dimension does not match the measurement");
    }
    if (!validate(m, tol).pass) {
        throw DomainError("interpolation needs a valid measurement");
    }
    if (epsilon < 0.0) {
        throw EpsilonRangeError("epsilon must be non-negative", 0.0, 0.0);
    }
    const std::size_t k = m.size();
    std::vector<double> mu_f(k, 0.0);
    std::vector<bool> zero(k, false);
    double lambda = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        zero[i] = m.element(i).is_zero();
        if (!zero[i]) {
            mu_f[i] = mu(m.element(i));
            lambda = std::max(lambda, mu_f[i]);
        }
    }
    if (epsilon > lambda + 1e-9) {
        throw EpsilonRangeError("epsilon " + std::to_string(epsilon) +
                                    " exceeds lambda = " + std::to_string(lambda),
                                0.0, lambda);
    }

    std::vector<double> c_i(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (zero[i]) {
            continue;
        }
        const double target = std::min(epsilon, mu_f[i]);
        c_i[i] = solve_c(mu, m.element(i), target, tol);
        if (c_i[i] < c_snap) {
            c_i[i] = 0.0;
        }
    }
    const double c = 1.0 / (1.0 + std::accumulate(c_i.begin(), c_i.end(), 0.0));

    const CMatrix id = CMatrix::Identity(m.dim, m.dim);
    InterpolationResult result;
    result.c_constants = c_i;
    result.m1.dim = m.dim;
    result.m1.d_A = m.d_A;
    result.m1.d_B = m.d_B;
    for (std::size_t i = 0; i < k; ++i) {
        result.m1.elements.push_back(
            {m.label(i), HermitianOperator(c * (c_i[i] * id + m.element(i).mat()), tol)});
    }
    for (std::size_t i = 0; i < k; ++i) {
        Measurement second;
        second.dim = m.dim;
        second.d_A = m.d_A;
        second.d_B = m.d_B;
        if (c_i[i] == 0.0) {
            for (std::size_t j = 0; j < k; ++j) {
                second.elements.push_back(
                    {m.label(j), i == j ? HermitianOperator::identity(m.dim)
                                        : HermitianOperator::zero(m.dim)});
            }
        } else {
            // E_i^{-1/2} = c^{-1/2} (c_i id + F_i)^{-1/2}, so the outer c
            // cancels: E^(i)_j = (c_i + delta_ij) G F_j G with
            // G = (c_i id + F_i)^{-1/2}. This keeps the inversion conditioned
            // by c_i alone.
            const HermitianOperator g =
                inv_sqrt_pd(HermitianOperator(c_i[i] * id + m.element(i).mat(), tol), tol);
            for (std::size_t j = 0; j < k; ++j) {
                const double w = c_i[i] + (i == j ? 1.0 : 0.0);
                const CMatrix el = w * (g.mat() * m.element(j).mat() * g.mat());
                second.elements.push_back({m.label(j), HermitianOperator(el, tol)});
            }
        }
        result.m2_list.push_back(std::move(second));
    }
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::size_t> group;
        for (std::size_t i = 0; i < k; ++i) {
            group.push_back(i * k + j);
        }
        result.coarse_map.groups.push_back(std::move(group));
        result.coarse_map.labels.push_back(m.label(j));
    }
    result.epsilon_achieved = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (!result.m1.element(i).is_zero()) {
            result.epsilon_achieved =
                std::max(result.epsilon_achieved, mu(result.m1.element(i)));
        }
    }
    return result;
}

InterpolationReport verify_interpolation(const Measurement& target,
                                         const InterpolationResult& result,
                                         const ProgressFunction& mu,
                                         const Tolerances& tol) {
    tol.validate();
    InterpolationReport rep;
    const ValidationReport first = validate(result.m1, tol);
    rep.stages_valid = first.pass;
    rep.completeness_worst = first.completeness_residual;
    if (result.m2_list.size() != result.m1.size()) {
        rep.stages_valid = false;
    }
    for (const auto& second : result.m2_list) {
        const ValidationReport sr = validate(second, tol);
        rep.stages_valid = rep.stages_valid && sr.pass;
        rep.completeness_worst = std::max(rep.completeness_worst, sr.completeness_residual);
    }
    if (!rep.stages_valid) {
        return rep;
    }
    for (const auto& el : result.m1.elements) {
        if (!el.op.is_zero()) {
            rep.max_stage_mu = std::max(rep.max_stage_mu, mu(el.op));
        }
    }
    rep.mu_residual = std::abs(rep.max_stage_mu - result.epsilon_achieved);

    const Measurement fine = compose(result.m1, result.m2_list, std::nullopt, tol);
    const Measurement coarse = coarse_grain(fine, result.coarse_map, tol);
    const MeasurementDistance dist = measurement_distance(coarse, target);
    rep.composition_residual = dist.max_residual;

    rep.target_is_von_neumann = is_von_neumann_target(target);
    if (rep.target_is_von_neumann && dist.same_labels) {
        for (std::size_t g = 0; g < result.coarse_map.groups.size(); ++g) {
            const auto target_idx = target.index_of(result.coarse_map.labels[g]);
            if (!target_idx) {
                continue;
            }
            for (std::size_t idx : result.coarse_map.groups[g]) {
                const auto& composed = fine.element(idx);
                if (composed.is_zero()) {
                    continue;
                }
                const auto prop = proportional_to(composed, target.element(*target_idx));
                rep.proportionality_residual = std::max(
                    rep.proportionality_residual,
                    prop.proportional ? prop.relative_residual : 1.0);
            }
        }
    }

    rep.pass = rep.stages_valid && dist.same_labels && rep.mu_residual <= 1e-9 &&
               rep.composition_residual <= tol.completeness &&
               (!rep.target_is_von_neumann || rep.proportionality_residual <= 1e-8);
    return rep;
}

}  // namespace mint
