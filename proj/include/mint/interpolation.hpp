#pragma once

#include "mint/measurement.hpp"
#include "mint/progress.hpp"

namespace mint {

/// A two-stage realization of a target measurement: first stage m1 with
/// max_i mu(E_i) = epsilon_achieved, second stages m2_list conditioned on the
/// first outcome, and the coarse graining of (i, j) pairs back onto the
/// target outcomes.
struct InterpolationResult {
    Measurement m1;
    std::vector<Measurement> m2_list;
    CoarseGrainMap coarse_map;
    double epsilon_achieved = 0.0;
    std::vector<double> c_constants;
};

/// Solves mu(c * id + F) = target for c >= 0. target = mu(F) returns 0; a
/// closed-form solver attached to mu is used when available and checked
/// against the evaluator, with bracketed bisection (upper bound doubled up
/// to 1e12) as the generic path.
double solve_c(const ProgressFunction& mu, const HermitianOperator& f, double target,
               const Tolerances& tol = {});

/// Builds the epsilon-interpolation of m: E_i = c (c_i id + F_i) with c_i
/// chosen so mu(E_i) = min{epsilon, mu(F_i)}, c = (1 + sum c_i)^{-1}, and
/// second stages E^(i)_j = delta_ij id when c_i = 0, else
/// c (c_i + delta_ij) E_i^{-1/2} F_j E_i^{-1/2}.
InterpolationResult interpolate_kkb(const Measurement& m, const ProgressFunction& mu,
                                    double epsilon, const Tolerances& tol = {});

struct InterpolationReport {
    bool pass = false;
    bool stages_valid = false;
    double completeness_worst = 0.0;
    double max_stage_mu = 0.0;
    /// |max_stage_mu - epsilon_achieved|
    double mu_residual = 0.0;
    /// max entry of |compose-then-coarse-grain minus target|
    double composition_residual = 0.0;
    /// worst relative distance of a composed element from its target
    /// projector; only set when the target is von Neumann
    double proportionality_residual = 0.0;
    bool target_is_von_neumann = false;
};

/// Re-derives every interpolation invariant from scratch: stage validity,
/// realized progress, composed-and-coarse-grained equality with the target,
/// and (for von Neumann targets) proportionality of composed elements.
InterpolationReport verify_interpolation(const Measurement& target,
                                         const InterpolationResult& result,
                                         const ProgressFunction& mu,
                                         const Tolerances& tol = {});

}  // namespace mint
