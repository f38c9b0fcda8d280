#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mint/errors.hpp"
#include "mint/tolerances.hpp"

namespace mint {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Largest entry magnitude, 0 for empty matrices.
double max_abs(const CMatrix& m);

/// A finite Hermitian matrix. Construction symmetrizes the input and rejects
/// matrices whose anti-Hermitian part exceeds the hermiticity tolerance.
class HermitianOperator {
  public:
    HermitianOperator() = default;
    explicit HermitianOperator(const CMatrix& m, const Tolerances& tol = {});

    static HermitianOperator zero(Eigen::Index dim);
    static HermitianOperator identity(Eigen::Index dim);

    Eigen::Index dim() const { return mat_.rows(); }
    const CMatrix& mat() const { return mat_; }

    double trace() const { return mat_.trace().real(); }
    bool is_zero(double floor = 1e-14) const { return max_abs(mat_) <= floor; }

  private:
    CMatrix mat_;
};

/// Eigenvalues in descending order with matching eigenvector columns.
struct Spectrum {
    RVector eigenvalues;
    CMatrix eigenvectors;
};

struct PsdReport {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

/// One clustered eigenspace: representative eigenvalue plus its projector.
struct SpectralProjector {
    double eigenvalue = 0.0;
    HermitianOperator projector;
};

/// Kronecker product in Alice-major convention: the composite index of
/// |alpha> ox |beta> is alpha * dim_B + beta.
HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);
CMatrix tensor_product(const CMatrix& a, const CMatrix& b);
CVector tensor_product(const CVector& a, const CVector& b);

Spectrum eigendecompose(const HermitianOperator& m);

/// PSD check by smallest eigenvalue against tol.psd_floor.
PsdReport is_psd(const HermitianOperator& m, const Tolerances& tol = {});

/// Principal square root. Eigenvalues inside [psd_floor, 0) are clamped to
/// zero; anything below psd_floor raises DomainError.
HermitianOperator matrix_sqrt(const HermitianOperator& m, const Tolerances& tol = {});

/// Inverse square root on the support: eigenvalues below
/// rank_cut * lambda_max are treated as kernel and pseudo-inverted to zero.
HermitianOperator pinv_sqrt(const HermitianOperator& m, const Tolerances& tol = {});

/// Orthogonal projector onto the support (same rank cut as pinv_sqrt).
HermitianOperator support_projector(const HermitianOperator& m, const Tolerances& tol = {});

/// Eigenprojectors with eigenvalues clustered at relative gap
/// 1e-8 * max(1, |lambda|_max), ordered by descending eigenvalue.
std::vector<SpectralProjector> spectral_projectors(const HermitianOperator& m,
                                                   const Tolerances& tol = {});

/// Best scalar t minimizing |a - t b|_F; returns false when a is not
/// proportional to b within relative Frobenius distance 1e-9. The zero
/// operator is proportional to everything (t = 0).
struct ProportionalityReport {
    bool proportional = false;
    double factor = 0.0;
    double relative_residual = 0.0;
};
ProportionalityReport proportional_to(const HermitianOperator& a, const HermitianOperator& b);

}  // namespace mint
