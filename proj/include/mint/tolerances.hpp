#pragma once

#include "mint/errors.hpp"

namespace mint {

/// Numerical tolerances shared across the library.
///
/// hermiticity   largest allowed |M - M^dag| entry before symmetrization fails
/// psd_floor     most negative eigenvalue still accepted as "positive" (absolute)
/// completeness  largest allowed |sum E_i - id| entry
/// rank_cut      eigenvalues below rank_cut * lambda_max count as kernel
/// root_find     residual at which the interpolation-constant solve stops
struct Tolerances {
    double hermiticity = 1e-10;
    double psd_floor = -1e-9;
    double completeness = 1e-8;
    double rank_cut = 1e-8;
    double root_find = 1e-12;

    void validate() const {
        auto in_range = [](double x) { return x > 0.0 && x < 1e-3; };
        if (!in_range(hermiticity) || !in_range(completeness) || !in_range(rank_cut) ||
            !in_range(root_find) || !in_range(-psd_floor)) {
            throw DomainError("tolerance magnitudes must lie strictly between 0 and 1e-3");
        }
    }
};

}  // namespace mint
