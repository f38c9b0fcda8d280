#include "mint/fixtures.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <regex>
#include <utility>

#include "mint/errors.hpp"

namespace mint {

namespace {

CVector unit_vector(Eigen::Index dim, Eigen::Index k) {
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    return v;
}

/// (|x> + sign |y>) / sqrt(2)
CVector two_level(Eigen::Index dim, Eigen::Index x, Eigen::Index y, double sign) {
    CVector v = CVector::Zero(dim);
    v(x) = 1.0 / std::numbers::sqrt2;
    v(y) = sign / std::numbers::sqrt2;
    return v;
}

CVector embed(const CVector& v, Eigen::Index dim) {
    CVector out = CVector::Zero(dim);
    out.head(v.size()) = v;
    return out;
}

void require_tile_unitary(const CMatrix& u, Eigen::Index n, const std::string& name) {
    if (u.rows() != n || u.cols() != n) {
        throw DimensionError(name + " must be " + std::to_string(n) + "x" + std::to_string(n) +
                             ", got " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()));
    }
    if (max_abs(CMatrix(u.adjoint() * u - CMatrix::Identity(n, n))) > 1e-12) {
        throw DomainError(name + " is not unitary");
    }
    if (u.cwiseAbs().minCoeff() < 1e-12) {
        throw DomainError(name + " has a zero entry; every tile state must overlap every basis state");
    }
}

std::vector<ProductVector> domino_vectors(Eigen::Index d) {
    std::vector<ProductVector> v;
    v.push_back({"psi1", unit_vector(d, 1), unit_vector(d, 1)});
    v.push_back({"psi2+", unit_vector(d, 0), two_level(d, 0, 1, +1.0)});
    v.push_back({"psi2-", unit_vector(d, 0), two_level(d, 0, 1, -1.0)});
    v.push_back({"psi3+", unit_vector(d, 2), two_level(d, 1, 2, +1.0)});
    v.push_back({"psi3-", unit_vector(d, 2), two_level(d, 1, 2, -1.0)});
    v.push_back({"psi4+", two_level(d, 1, 2, +1.0), unit_vector(d, 0)});
    v.push_back({"psi4-", two_level(d, 1, 2, -1.0), unit_vector(d, 0)});
    v.push_back({"psi5+", two_level(d, 0, 1, +1.0), unit_vector(d, 2)});
    v.push_back({"psi5-", two_level(d, 0, 1, -1.0), unit_vector(d, 2)});
    return v;
}

CMatrix rank_one_projector(const CVector& v) { return v * v.adjoint(); }

ProtocolNode leaf_node(std::string label) {
    ProtocolNode n;
    n.label = std::move(label);
    return n;
}

ProtocolNode internal_node(Party party, std::vector<CMatrix> kraus,
                           std::vector<ProtocolNode> children) {
    ProtocolNode n;
    n.party = party;
    n.kraus = std::move(kraus);
    n.children = std::move(children);
    return n;
}

HermitianOperator identity16() { return HermitianOperator::identity(16); }

}  // namespace

CMatrix fourier_unitary(Eigen::Index n) {
    if (n <= 0) throw DimensionError("Fourier dimension must be positive");
    CMatrix u(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                                 static_cast<double>(n);
            u(j, k) = scale * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    return u;
}

ProductBasis domino_basis() {
    ProductBasis basis;
    basis.d_A = 3;
    basis.d_B = 3;
    basis.vectors = domino_vectors(3);
    return basis;
}

ProductBasis augmented_domino_basis() {
    return augmented_domino_basis(fourier_unitary(3), fourier_unitary(4));
}

ProductBasis augmented_domino_basis(const CMatrix& u3, const CMatrix& u4) {
    require_tile_unitary(u3, 3, "u3");
    require_tile_unitary(u4, 4, "u4");
    ProductBasis basis;
    basis.d_A = 4;
    basis.d_B = 4;
    basis.vectors = domino_vectors(4);
    for (Eigen::Index i = 0; i < 3; ++i) {
        basis.vectors.push_back(
            {"psi6_" + std::to_string(i), embed(u3.col(i), 4), unit_vector(4, 3)});
    }
    for (Eigen::Index j = 0; j < 4; ++j) {
        basis.vectors.push_back({"psi7_" + std::to_string(j), unit_vector(4, 3), u4.col(j)});
    }
    return basis;
}

ProductBasis computational_basis(Eigen::Index d_A, Eigen::Index d_B) {
    if (d_A <= 0 || d_B <= 0) throw DimensionError("computational basis needs positive dimensions");
    ProductBasis basis;
    basis.d_A = d_A;
    basis.d_B = d_B;
    for (Eigen::Index i = 0; i < d_A; ++i) {
        for (Eigen::Index j = 0; j < d_B; ++j) {
            basis.vectors.push_back({std::to_string(i) + "," + std::to_string(j),
                                     unit_vector(d_A, i), unit_vector(d_B, j)});
        }
    }
    return basis;
}

ProtocolTree peel_off_tree(bool extended) {
    return peel_off_tree(extended, fourier_unitary(3), fourier_unitary(4));
}

ProtocolTree peel_off_tree(bool extended, const CMatrix& u3, const CMatrix& u4) {
    require_tile_unitary(u3, 3, "u3");
    require_tile_unitary(u4, 4, "u4");
    const CMatrix last = rank_one_projector(unit_vector(4, 3));
    const CMatrix rest = CMatrix::Identity(4, 4) - last;

    ProtocolNode bob_last;
    ProtocolNode alice_last;
    if (extended) {
        std::vector<CMatrix> alice_tiles;
        std::vector<ProtocolNode> alice_leaves;
        for (Eigen::Index i = 0; i < 3; ++i) {
            alice_tiles.push_back(rank_one_projector(embed(u3.col(i), 4)));
            alice_leaves.push_back(leaf_node("psi6_" + std::to_string(i)));
        }
        alice_tiles.push_back(last);
        alice_leaves.push_back(leaf_node("a3-dead"));
        bob_last = internal_node(Party::alice, std::move(alice_tiles), std::move(alice_leaves));

        std::vector<CMatrix> bob_tiles;
        std::vector<ProtocolNode> bob_leaves;
        for (Eigen::Index j = 0; j < 4; ++j) {
            bob_tiles.push_back(rank_one_projector(u4.col(j)));
            bob_leaves.push_back(leaf_node("psi7_" + std::to_string(j)));
        }
        alice_last = internal_node(Party::bob, std::move(bob_tiles), std::move(bob_leaves));
    } else {
        bob_last = leaf_node("bob-3");
        alice_last = leaf_node("alice-3");
    }

    ProtocolNode bob_round = internal_node(Party::bob, {rest, last},
                                           {leaf_node("domino-block"), std::move(bob_last)});

    ProtocolTree t;
    t.d_A = 4;
    t.d_B = 4;
    t.root = internal_node(Party::alice, {rest, last},
                           {std::move(bob_round), std::move(alice_last)});
    return t;
}

CompletionFamily peel_off_family(bool extended) {
    return peel_off_family(extended, fourier_unitary(3), fourier_unitary(4));
}

CompletionFamily peel_off_family(bool extended, const CMatrix& u3, const CMatrix& u4) {
    const ProductBasis basis = augmented_domino_basis(u3, u4);
    const CMatrix last = rank_one_projector(unit_vector(4, 3));
    const CMatrix rest = CMatrix::Identity(4, 4) - last;
    const Tolerances tol;

    Measurement block;
    block.dim = 16;
    block.d_A = 4;
    block.d_B = 4;
    for (std::size_t k = 0; k < 9; ++k) {
        const ProductVector& pv = basis.vectors[k];
        block.elements.push_back({pv.label, HermitianOperator(rank_one_projector(pv.full()), tol)});
    }
    // The block leaf projects onto span{0,1,2} ox span{0,1,2}, where the nine
    // domino projectors already resolve the identity; the orthogonal rest is
    // dead weight and is folded into the first outcome to keep the label set
    // fixed.
    const CMatrix block_rest = CMatrix::Identity(16, 16) - tensor_product(rest, rest);
    block.elements[0].op =
        HermitianOperator(CMatrix(block.elements[0].op.mat() + block_rest), tol);

    CompletionFamily family;
    family["domino-block"] = std::move(block);

    if (extended) {
        for (Eigen::Index i = 0; i < 3; ++i) {
            const std::string label = "psi6_" + std::to_string(i);
            Measurement m;
            m.dim = 16;
            m.d_A = 4;
            m.d_B = 4;
            m.elements.push_back({label, identity16()});
            family[label] = std::move(m);
        }
        Measurement dead;
        dead.dim = 16;
        dead.d_A = 4;
        dead.d_B = 4;
        dead.elements.push_back({"psi6_0", identity16()});
        family["a3-dead"] = std::move(dead);
        for (Eigen::Index j = 0; j < 4; ++j) {
            const std::string label = "psi7_" + std::to_string(j);
            Measurement m;
            m.dim = 16;
            m.d_A = 4;
            m.d_B = 4;
            m.elements.push_back({label, identity16()});
            family[label] = std::move(m);
        }
        return family;
    }

    Measurement bob3;
    bob3.dim = 16;
    bob3.d_A = 4;
    bob3.d_B = 4;
    for (Eigen::Index i = 0; i < 3; ++i) {
        CMatrix e = tensor_product(rank_one_projector(embed(u3.col(i), 4)),
                                   CMatrix::Identity(4, 4));
        if (i == 0) e += tensor_product(last, CMatrix::Identity(4, 4));
        bob3.elements.push_back({"psi6_" + std::to_string(i), HermitianOperator(e, tol)});
    }
    family["bob-3"] = std::move(bob3);

    Measurement alice3;
    alice3.dim = 16;
    alice3.d_A = 4;
    alice3.d_B = 4;
    for (Eigen::Index j = 0; j < 4; ++j) {
        CMatrix e = tensor_product(CMatrix::Identity(4, 4), rank_one_projector(u4.col(j)));
        alice3.elements.push_back({"psi7_" + std::to_string(j), HermitianOperator(e, tol)});
    }
    family["alice-3"] = std::move(alice3);
    return family;
}

Measurement bell_measurement() {
    const double r = 1.0 / std::numbers::sqrt2;
    CVector phi_p(4), phi_m(4), psi_p(4), psi_m(4);
    phi_p << r, 0, 0, r;
    phi_m << r, 0, 0, -r;
    psi_p << 0, r, r, 0;
    psi_m << 0, r, -r, 0;
    Measurement m = von_neumann({phi_p, phi_m, psi_p, psi_m}, {"phi+", "phi-", "psi+", "psi-"});
    m.d_A = 2;
    m.d_B = 2;
    return m;
}

Measurement random_povm(Eigen::Index dim, std::size_t outcomes, unsigned seed) {
    if (dim <= 0) throw DimensionError("random_povm needs a positive dimension");
    if (outcomes == 0) throw DomainError("random_povm needs at least one outcome");
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<CMatrix> gram;
    CMatrix s = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < outcomes; ++i) {
        CMatrix g(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
            for (Eigen::Index c = 0; c < dim; ++c) {
                g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
            }
        }
        gram.push_back(CMatrix(g.adjoint() * g));
        s += gram.back();
    }
    const Tolerances tol;
    const CMatrix whiten = pinv_sqrt(HermitianOperator(s, tol), tol).mat();
    Measurement m;
    m.dim = dim;
    for (std::size_t i = 0; i < outcomes; ++i) {
        m.elements.push_back(
            {std::to_string(i), HermitianOperator(CMatrix(whiten * gram[i] * whiten), tol)});
    }
    return m;
}

FixtureObject fixture(const std::string& name) {
    if (name == "domino") return domino_basis();
    if (name == "augmented-domino") return augmented_domino_basis();
    if (name == "peel-off") return peel_off_tree(false);
    if (name == "peel-off-extended") return peel_off_tree(true);
    if (name == "peel-off-m2") return peel_off_family(false);
    if (name == "peel-off-extended-m2") return peel_off_family(true);
    if (name == "bell") return bell_measurement();
    static const std::regex computational("^computational-([0-9]+)x([0-9]+)$");
    std::smatch match;
    if (std::regex_match(name, match, computational)) {
        return computational_basis(std::stol(match[1].str()), std::stol(match[2].str()));
    }
    throw DomainError("unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
    return {"domino",      "augmented-domino",     "peel-off", "peel-off-extended",
            "peel-off-m2", "peel-off-extended-m2", "bell",     "computational-<dA>x<dB>"};
}

}  // namespace mint
