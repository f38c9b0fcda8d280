#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mint/measurement.hpp"
#include "mint/operator_core.hpp"

namespace mint::testing {

inline CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    return m;
}

inline CMatrix random_hermitian_matrix(Eigen::Index dim, unsigned seed) {
    const CMatrix g = random_complex_matrix(dim, dim, seed);
    return 0.5 * (g + g.adjoint().eval());
}

inline CMatrix random_psd_matrix(Eigen::Index dim, unsigned seed) {
    const CMatrix g = random_complex_matrix(dim, dim, seed);
    return g.adjoint() * g;
}

inline CVector random_state(Eigen::Index dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v(i) = Complex(gauss(rng), gauss(rng));
    }
    return v / v.norm();
}

inline CVector unit_vector(Eigen::Index dim, Eigen::Index index) {
    CVector v = CVector::Zero(dim);
    v(index) = 1.0;
    return v;
}

inline std::vector<CVector> computational_states(Eigen::Index n) {
    std::vector<CVector> states;
    states.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        states.push_back(unit_vector(n, k));
    }
    return states;
}

inline double entrywise_distance(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Discrimination progress computed from first principles, kept independent
/// of the library evaluator so the two implementations check each other.
inline double oracle_mu(const std::vector<CVector>& states, const CMatrix& e) {
    double best = 0.0;
    for (const auto& psi : states) {
        const double overlap = (psi.adjoint() * e * psi)(0, 0).real();
        best = std::max(best, overlap);
    }
    const double trace = e.trace().real();
    return best / trace - 1.0 / static_cast<double>(states.size());
}

/// Plain doubling-plus-bisection root find for mu(c id + F) = target, with
/// no closed-form shortcut. Serves as the reference for the library solver.
inline double oracle_solve_c(const std::vector<CVector>& states, const CMatrix& f,
                             double target) {
    const Eigen::Index dim = f.rows();
    const CMatrix id = CMatrix::Identity(dim, dim);
    const auto value = [&](double c) { return oracle_mu(states, c * id + f); };
    double lo = 0.0;
    double hi = 1.0;
    while (value(hi) > target) {
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Principal square root through Eigen's solver directly, bypassing the
/// library routine, for use in composition cross-checks.
inline CMatrix oracle_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
           solver.eigenvectors().adjoint();
}

/// Dimension of the space of local Hermitian operators that keep the basis
/// states mutually unconnected, computed by ranking the real linear system
/// over the operator's independent entries.
inline Eigen::Index oracle_diagonality_dimension(const ProductBasis& basis, Party party) {
    const Eigen::Index d = party == Party::alice ? basis.d_A : basis.d_B;
    const Eigen::Index params = d * d;
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (j == k) {
                continue;
            }
            const auto& vj = basis.vectors[j];
            const auto& vk = basis.vectors[k];
            const Complex spectator = party == Party::alice
                                          ? (vj.bob.adjoint() * vk.bob)(0, 0)
                                          : (vj.alice.adjoint() * vk.alice)(0, 0);
            const CVector lj = party == Party::alice ? vj.alice : vj.bob;
            const CVector lk = party == Party::alice ? vk.alice : vk.bob;
            // Constraint <lj| a |lk> * spectator = 0 over the real
            // parametrization a = sum_p x_p (diagonal units, symmetric and
            // antisymmetric off-diagonal units).
            Eigen::VectorXd real_row(params);
            Eigen::VectorXd imag_row(params);
            Eigen::Index p = 0;
            const auto push = [&](const CMatrix& unit) {
                const Complex coeff = (lj.adjoint() * unit * lk)(0, 0) * spectator;
                real_row(p) = coeff.real();
                imag_row(p) = coeff.imag();
                ++p;
            };
            for (Eigen::Index r = 0; r < d; ++r) {
                CMatrix unit = CMatrix::Zero(d, d);
                unit(r, r) = 1.0;
                push(unit);
            }
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index c = r + 1; c < d; ++c) {
                    CMatrix sym = CMatrix::Zero(d, d);
                    sym(r, c) = 1.0;
                    sym(c, r) = 1.0;
                    push(sym);
                    CMatrix anti = CMatrix::Zero(d, d);
                    anti(r, c) = Complex(0.0, 1.0);
                    anti(c, r) = Complex(0.0, -1.0);
                    push(anti);
                }
            }
            rows.push_back(real_row);
            rows.push_back(imag_row);
        }
    }
    Eigen::MatrixXd system(static_cast<Eigen::Index>(rows.size()), params);
    for (Eigen::Index r = 0; r < system.rows(); ++r) {
        system.row(r) = rows[static_cast<std::size_t>(r)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
    const auto& sigma = svd.singularValues();
    const double cut = 1e-8 * std::max(1.0, sigma.size() > 0 ? sigma(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cut) {
            ++rank;
        }
    }
    return params - rank;
}

}  // namespace mint::testing
