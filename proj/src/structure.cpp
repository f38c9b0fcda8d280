#include "mint/structure.hpp"

#include <algorithm>
#include <cmath>

namespace mint {

namespace {

/// Hilbert-Schmidt orthonormal Hermitian basis of d x d matrices: diagonal
/// units, then symmetric and antisymmetric pair combinations.
std::vector<CMatrix> hermitian_basis(Eigen::Index d) {
    std::vector<CMatrix> basis;
    basis.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index p = 0; p < d; ++p) {
        CMatrix m = CMatrix::Zero(d, d);
        m(p, p) = 1.0;
        basis.push_back(m);
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index p = 0; p < d; ++p) {
        for (Eigen::Index q = p + 1; q < d; ++q) {
            CMatrix sym = CMatrix::Zero(d, d);
            sym(p, q) = inv_sqrt2;
            sym(q, p) = inv_sqrt2;
            basis.push_back(sym);
            CMatrix anti = CMatrix::Zero(d, d);
            anti(p, q) = Complex(0.0, inv_sqrt2);
            anti(q, p) = Complex(0.0, -inv_sqrt2);
            basis.push_back(anti);
        }
    }
    return basis;
}

HermitianOperator lift_local(const HermitianOperator& a, Party party, Eigen::Index d_A,
                             Eigen::Index d_B) {
    return party == Party::alice
               ? tensor_product(a, HermitianOperator::identity(d_B))
               : tensor_product(HermitianOperator::identity(d_A), a);
}

}  // namespace

HermitianOperator ProductDecomposition::reconstruct() const {
    if (terms.empty()) {
        throw DomainError("empty product decomposition");
    }
    CMatrix sum;
    for (const auto& [a, b] : terms) {
        const CMatrix term = tensor_product(a.mat(), b.mat());
        if (sum.size() == 0) {
            sum = term;
        } else {
            if (sum.rows() != term.rows()) {
                throw DimensionError("product decomposition mixes dimensions");
            }
            sum += term;
        }
    }
    return HermitianOperator(sum);
}

ProductDecomposition factor_product(const HermitianOperator& e, Eigen::Index d_A,
                                    Eigen::Index d_B, const Tolerances& tol) {
    tol.validate();
    if (d_A <= 0 || d_B <= 0 || e.dim() != d_A * d_B) {
        throw DimensionError("factor_product dimensions do not multiply up");
    }
    if (e.is_zero()) {
        throw ZeroOperatorError("cannot factor the zero operator");
    }
    if (!is_psd(e, tol).psd) {
        throw DomainError("factor_product input must be PSD");
    }
    // Realignment: R[(alpha, alpha'), (beta, beta')] = E[(alpha, beta), (alpha', beta')]
    // is rank one exactly when E is a tensor product.
    CMatrix r(d_A * d_A, d_B * d_B);
    for (Eigen::Index a1 = 0; a1 < d_A; ++a1) {
        for (Eigen::Index a2 = 0; a2 < d_A; ++a2) {
            for (Eigen::Index b1 = 0; b1 < d_B; ++b1) {
                for (Eigen::Index b2 = 0; b2 < d_B; ++b2) {
                    r(a1 * d_A + a2, b1 * d_B + b2) = e.mat()(a1 * d_B + b1, a2 * d_B + b2);
                }
            }
        }
    }
    Eigen::JacobiSVD<CMatrix> svd(r);
    const auto& sigma = svd.singularValues();
    const double ratio = sigma.size() > 1 && sigma(0) > 0.0 ? sigma(1) / sigma(0) : 0.0;
    if (ratio > tol.rank_cut) {
        throw NotProductError("operator is not a tensor product (singular-value ratio " +
                                  std::to_string(ratio) + ")",
                              ratio);
    }
    // Recover the Alice factor from the partial trace (PSD by construction,
    // so no phase fixing is needed), then the Bob factor by least squares.
    CMatrix a = CMatrix::Zero(d_A, d_A);
    for (Eigen::Index a1 = 0; a1 < d_A; ++a1) {
        for (Eigen::Index a2 = 0; a2 < d_A; ++a2) {
            Complex acc = 0.0;
            for (Eigen::Index b = 0; b < d_B; ++b) {
                acc += e.mat()(a1 * d_B + b, a2 * d_B + b);
            }
            a(a1, a2) = acc;
        }
    }
    a /= a.trace();
    CMatrix b = CMatrix::Zero(d_B, d_B);
    const double a_norm2 = a.squaredNorm();
    for (Eigen::Index b1 = 0; b1 < d_B; ++b1) {
        for (Eigen::Index b2 = 0; b2 < d_B; ++b2) {
            Complex acc = 0.0;
            for (Eigen::Index a1 = 0; a1 < d_A; ++a1) {
                for (Eigen::Index a2 = 0; a2 < d_A; ++a2) {
                    acc += std::conj(a(a1, a2)) * e.mat()(a1 * d_B + b1, a2 * d_B + b2);
                }
            }
            b(b1, b2) = acc / a_norm2;
        }
    }
    ProductDecomposition decomp;
    decomp.terms.emplace_back(HermitianOperator(a, tol), HermitianOperator(b, tol));
    const double residual = max_abs(decomp.reconstruct().mat() - e.mat());
    if (residual > 1e-8 * std::max(1.0, max_abs(e.mat()))) {
        throw NotProductError("factor reconstruction residual " + std::to_string(residual),
                              ratio);
    }
    return decomp;
}

DisturbanceReport is_non_disturbing(const Measurement& m, const std::vector<CVector>& states) {
    for (const auto& psi : states) {
        if (psi.size() != m.dim) {
            throw DimensionError("state dimension does not match the measurement");
        }
    }
    require_orthonormal(states, 1e-9);
    DisturbanceReport rep;
    for (const auto& el : m.elements) {
        for (std::size_t j = 0; j < states.size(); ++j) {
            for (std::size_t k = j + 1; k < states.size(); ++k) {
                const double off =
                    std::abs((states[j].adjoint() * el.op.mat() * states[k]).value());
                if (off > rep.worst_off_diagonal) {
                    rep.worst_off_diagonal = off;
                    rep.worst_element = el.label;
                    rep.worst_j = j;
                    rep.worst_k = k;
                }
            }
        }
    }
    rep.non_disturbing = rep.worst_off_diagonal <= 1e-9;
    return rep;
}

DisturbanceReport is_non_disturbing(const Measurement& m, const ProductBasis& basis) {
    return is_non_disturbing(m, basis.full_vectors());
}

MuTildeBound mu_tilde_upper(const HermitianOperator& e, const ProductDecomposition& decomp,
                            const ProgressFunction& mu, const Tolerances& tol) {
    tol.validate();
    for (const auto& [a, b] : decomp.terms) {
        if (a.is_zero() || b.is_zero()) {
            throw DomainError("decomposition terms must be nonzero");
        }
        if (!is_psd(a, tol).psd || !is_psd(b, tol).psd) {
            throw DomainError("decomposition terms must be PSD");
        }
    }
    const HermitianOperator sum = decomp.reconstruct();
    const double residual = max_abs(sum.mat() - e.mat());
    if (residual > tol.completeness * std::max(1.0, max_abs(e.mat()))) {
        throw DomainError("decomposition does not reconstruct the operator (residual " +
                          std::to_string(residual) + ")");
    }
    MuTildeBound bound;
    bound.exact = decomp.terms.size() == 1;
    for (const auto& [a, b] : decomp.terms) {
        bound.value = std::max(bound.value, mu(tensor_product(a, b)));
    }
    return bound;
}

FineGrained sep_to_product_stage(const Measurement& m,
                                 const std::vector<ProductDecomposition>& decomps,
                                 const Tolerances& tol) {
    tol.validate();
    if (decomps.size() != m.size()) {
        throw DomainError("need one product decomposition per element");
    }
    FineGrained out;
    out.fine.dim = m.dim;
    out.fine.d_A = m.d_A;
    out.fine.d_B = m.d_B;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double residual =
            max_abs(decomps[i].reconstruct().mat() - m.element(i).mat());
        if (residual > tol.completeness * std::max(1.0, max_abs(m.element(i).mat()))) {
            throw DomainError("decomposition of element '" + m.label(i) +
                              "' does not reconstruct it");
        }
        std::vector<std::size_t> group;
        for (std::size_t t = 0; t < decomps[i].terms.size(); ++t) {
            const auto& [a, b] = decomps[i].terms[t];
            const std::string label =
                decomps[i].terms.size() == 1 ? m.label(i)
                                             : m.label(i) + "." + std::to_string(t);
            group.push_back(out.fine.elements.size());
            out.fine.elements.push_back({label, tensor_product(a, b)});
        }
        out.by_source.groups.push_back(std::move(group));
        out.by_source.labels.push_back(m.label(i));
    }
    return out;
}

LocalExtraction extract_local_nondisturbing(const Measurement& m1, const ProductBasis& basis,
                                            const ProgressFunction& mu, double mu0,
                                            const Tolerances& tol) {
    tol.validate();
    if (mu0 <= 0.0) {
        throw DomainError("mu0 must be strictly positive");
    }
    if (!validate(basis, tol).pass) {
        throw DomainError("extraction needs a valid complete product basis");
    }
    if (m1.dim != basis.dim() || mu.dim() != m1.dim) {
        throw DimensionError("extraction dimensions do not match");
    }
    const auto states = basis.full_vectors();

    std::vector<ProductDecomposition> factors;
    factors.reserve(m1.size());
    for (const auto& el : m1.elements) {
        try {
            factors.push_back(factor_product(el.op, basis.d_A, basis.d_B, tol));
        } catch (const NotProductError& err) {
            throw FactorizationError("first-stage element '" + el.label +
                                     "' is not a tensor product: " + err.what());
        }
    }

    const DisturbanceReport disturbance = is_non_disturbing(m1, states);
    if (!disturbance.non_disturbing) {
        throw DisturbanceError("first stage disturbs the basis: |<psi_" +
                               std::to_string(disturbance.worst_j) + "|E|psi_" +
                               std::to_string(disturbance.worst_k) + ">| = " +
                               std::to_string(disturbance.worst_off_diagonal) +
                               " at element '" + disturbance.worst_element + "'");
    }

    for (std::size_t i = 0; i < m1.size(); ++i) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            const double lambda_ik =
                (states[k].adjoint() * m1.element(i).mat() * states[k]).value().real();
            if (lambda_ik <= 1e-9) {
                throw ThresholdError("<psi_" + std::to_string(k) + "|E_" +
                                         std::to_string(i) +
                                         "|psi_" + std::to_string(k) +
                                         "> is not strictly positive",
                                     i, k);
            }
        }
    }

    for (Party party : {Party::alice, Party::bob}) {
        const Eigen::Index local_dim = party == Party::alice ? basis.d_A : basis.d_B;
        const HermitianOperator local_id = HermitianOperator::identity(local_dim);
        for (std::size_t i = 0; i < m1.size(); ++i) {
            const HermitianOperator& factor = party == Party::alice
                                                  ? factors[i].terms.front().first
                                                  : factors[i].terms.front().second;
            if (proportional_to(factor, local_id).proportional) {
                continue;
            }
            const auto clusters = spectral_projectors(factor, tol);
            if (clusters.size() < 2) {
                continue;
            }
            LocalExtraction extraction;
            extraction.party = party;
            extraction.trivial = false;
            extraction.source_element = i;
            extraction.local_measurement.dim = local_dim;
            for (std::size_t eta = 0; eta < clusters.size(); ++eta) {
                const HermitianOperator lifted =
                    lift_local(clusters[eta].projector, party, basis.d_A, basis.d_B);
                for (std::size_t j = 0; j < states.size(); ++j) {
                    for (std::size_t k = j + 1; k < states.size(); ++k) {
                        const double off = std::abs(
                            (states[j].adjoint() * lifted.mat() * states[k]).value());
                        if (off > 1e-8) {
                            throw DisturbanceError(
                                "extracted projector " + std::to_string(eta) +
                                " of element '" + m1.label(i) +
                                "' is not diagonal for the basis (off-diagonal " +
                                std::to_string(off) + ")");
                        }
                    }
                }
                const double progress = mu(lifted);
                if (progress < mu0 - 1e-9) {
                    throw DomainError("extracted projector progress " +
                                      std::to_string(progress) +
                                      " falls below the threshold " + std::to_string(mu0));
                }
                extraction.progress_values.push_back(progress);
                extraction.local_measurement.elements.push_back(
                    {std::to_string(eta), clusters[eta].projector});
            }
            return extraction;
        }
    }

    LocalExtraction trivial;
    trivial.party = Party::alice;
    trivial.trivial = true;
    trivial.local_measurement.dim = basis.d_A;
    trivial.local_measurement.elements.push_back(
        {"0", HermitianOperator::identity(basis.d_A)});
    trivial.progress_values.push_back(0.0);
    return trivial;
}

bool DiagonalitySpace::contains(const HermitianOperator& a, double tol) const {
    const double norm = a.mat().norm();
    if (norm <= 1e-14) {
        return true;
    }
    CMatrix residual = a.mat();
    for (const auto& b : basis) {
        const Complex coeff = (b.mat().adjoint() * a.mat()).trace() / b.mat().squaredNorm();
        residual -= coeff * b.mat();
    }
    return residual.norm() / norm <= tol;
}

DiagonalitySpace local_diagonality_space(const ProductBasis& basis, Party party,
                                         const Tolerances& tol) {
    tol.validate();
    if (!validate(basis, tol).pass) {
        throw DomainError("diagonality space needs a valid complete product basis");
    }
    const Eigen::Index d = party == Party::alice ? basis.d_A : basis.d_B;
    const auto herm = hermitian_basis(d);
    const std::size_t n = basis.size();
    const std::size_t pairs = n * (n - 1) / 2;

    DiagonalitySpace space;
    if (pairs == 0) {
        space.dimension = d * d;
        for (const auto& b : herm) {
            space.basis.emplace_back(b, tol);
        }
        return space;
    }

    Eigen::MatrixXd constraints(2 * pairs, herm.size());
    std::size_t row = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto& vj = basis.vectors[j];
            const auto& vk = basis.vectors[k];
            const Complex idle = party == Party::alice ? vj.bob.dot(vk.bob)
                                                       : vj.alice.dot(vk.alice);
            for (std::size_t m = 0; m < herm.size(); ++m) {
                const Complex acting = party == Party::alice
                                           ? (vj.alice.adjoint() * herm[m] * vk.alice).value()
                                           : (vj.bob.adjoint() * herm[m] * vk.bob).value();
                const Complex entry = acting * idle;
                constraints(row, m) = entry.real();
                constraints(row + 1, m) = entry.imag();
            }
            row += 2;
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double cut = sigma.size() > 0 ? 1e-8 * sigma(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cut && sigma(i) > 0.0) {
            ++rank;
        }
    }
    space.dimension = static_cast<Eigen::Index>(herm.size()) - rank;
    for (Eigen::Index col = rank; col < svd.matrixV().cols(); ++col) {
        CMatrix a = CMatrix::Zero(d, d);
        for (std::size_t m = 0; m < herm.size(); ++m) {
            a += svd.matrixV()(static_cast<Eigen::Index>(m), col) * herm[m];
        }
        space.basis.emplace_back(a, tol);
    }
    return space;
}

}  // namespace mint
