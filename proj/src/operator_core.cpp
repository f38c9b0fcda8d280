#include "mint/operator_core.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace mint {

double max_abs(const CMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return m.cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(const CMatrix& m, const Tolerances& tol) {
    tol.validate();
    if (m.rows() != m.cols()) {
        throw DimensionError("Hermitian operator must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        throw DomainError("operator entries must be finite");
    }
    const double dev = max_abs(m - m.adjoint());
    if (dev > tol.hermiticity * std::max(1.0, max_abs(m))) {
        throw DomainError("matrix is not Hermitian: |M - M^dag| reaches " +
                          std::to_string(dev));
    }
    mat_ = 0.5 * (m + m.adjoint().eval());
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
    return HermitianOperator(CMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(CMatrix::Identity(dim, dim));
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(tensor_product(a.mat(), b.mat()));
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b) {
    return Eigen::kroneckerProduct(a, b);
}

CVector tensor_product(const CVector& a, const CVector& b) {
    return Eigen::kroneckerProduct(a, b);
}

Spectrum eigendecompose(const HermitianOperator& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m.mat());
    if (solver.info() != Eigen::Success) {
        throw DomainError("eigendecomposition failed to converge");
    }
    const Eigen::Index n = m.dim();
    Spectrum s;
    s.eigenvalues = solver.eigenvalues().reverse();
    s.eigenvectors = CMatrix(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return s;
}

PsdReport is_psd(const HermitianOperator& m, const Tolerances& tol) {
    tol.validate();
    if (m.dim() == 0) {
        return {true, 0.0};
    }
    const Spectrum s = eigendecompose(m);
    const double min_ev = s.eigenvalues(m.dim() - 1);
    return {min_ev >= tol.psd_floor, min_ev};
}

namespace {

RVector clamped_psd_eigenvalues(const Spectrum& s, const Tolerances& tol,
                                const char* context) {
    RVector ev = s.eigenvalues;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < tol.psd_floor) {
            throw DomainError(std::string(context) + ": eigenvalue " +
                              std::to_string(ev(i)) + " below the PSD floor");
        }
        if (ev(i) < 0.0) {
            ev(i) = 0.0;
        }
    }
    return ev;
}

}  // namespace

HermitianOperator matrix_sqrt(const HermitianOperator& m, const Tolerances& tol) {
    tol.validate();
    const Spectrum s = eigendecompose(m);
    RVector ev = clamped_psd_eigenvalues(s, tol, "matrix_sqrt");
    const CMatrix out = s.eigenvectors * ev.cwiseSqrt().asDiagonal() *
                        s.eigenvectors.adjoint();
    return HermitianOperator(out, tol);
}

HermitianOperator pinv_sqrt(const HermitianOperator& m, const Tolerances& tol) {
    tol.validate();
    const Spectrum s = eigendecompose(m);
    RVector ev = clamped_psd_eigenvalues(s, tol, "pinv_sqrt");
    const double cut = tol.rank_cut * (ev.size() > 0 ? ev(0) : 0.0);
    RVector inv = RVector::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut && ev(i) > 0.0) {
            inv(i) = 1.0 / std::sqrt(ev(i));
        }
    }
    const CMatrix out = s.eigenvectors * inv.asDiagonal() * s.eigenvectors.adjoint();
    return HermitianOperator(out, tol);
}

HermitianOperator support_projector(const HermitianOperator& m, const Tolerances& tol) {
    tol.validate();
    const Spectrum s = eigendecompose(m);
    RVector ev = clamped_psd_eigenvalues(s, tol, "support_projector");
    const double cut = tol.rank_cut * (ev.size() > 0 ? ev(0) : 0.0);
    CMatrix out = CMatrix::Zero(m.dim(), m.dim());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > cut && ev(i) > 0.0) {
            out += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
        }
    }
    return HermitianOperator(out, tol);
}

std::vector<SpectralProjector> spectral_projectors(const HermitianOperator& m,
                                                   const Tolerances& tol) {
    tol.validate();
    const Spectrum s = eigendecompose(m);
    const Eigen::Index n = m.dim();
    std::vector<SpectralProjector> out;
    if (n == 0) {
        return out;
    }
    const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
    const double gap = 1e-8 * scale;
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && s.eigenvalues(stop - 1) - s.eigenvalues(stop) <= gap) {
            ++stop;
        }
        CMatrix proj = CMatrix::Zero(n, n);
        double mean = 0.0;
        for (Eigen::Index i = start; i < stop; ++i) {
            proj += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
            mean += s.eigenvalues(i);
        }
        mean /= static_cast<double>(stop - start);
        out.push_back({mean, HermitianOperator(proj, tol)});
        start = stop;
    }
    return out;
}

ProportionalityReport proportional_to(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("proportional_to: dimension mismatch");
    }
    ProportionalityReport rep;
    const double norm_a = a.mat().norm();
    const double norm_b = b.mat().norm();
    if (norm_a <= 1e-14) {
        rep.proportional = true;
        rep.factor = 0.0;
        rep.relative_residual = 0.0;
        return rep;
    }
    if (norm_b <= 1e-14) {
        rep.proportional = false;
        rep.relative_residual = 1.0;
        return rep;
    }
    const double t = (b.mat().adjoint() * a.mat()).trace().real() / (norm_b * norm_b);
    rep.factor = t;
    rep.relative_residual = (a.mat() - t * b.mat()).norm() / norm_a;
    rep.proportional = rep.relative_residual <= 1e-9;
    return rep;
}

}  // namespace mint
