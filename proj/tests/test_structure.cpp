#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/SVD>

#include "doctest.h"
#include "mint/fixtures.hpp"
#include "mint/structure.hpp"
#include "test_helpers.hpp"

using namespace mint;
using namespace mint::testing;

namespace {

HermitianOperator level_projector(Eigen::Index dim, Eigen::Index level) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(level, level) = 1.0;
    return HermitianOperator(m);
}

CMatrix realign(const CMatrix& e, Eigen::Index d_A, Eigen::Index d_B) {
    CMatrix r(d_A * d_A, d_B * d_B);
    for (Eigen::Index a1 = 0; a1 < d_A; ++a1) {
        for (Eigen::Index a2 = 0; a2 < d_A; ++a2) {
            for (Eigen::Index b1 = 0; b1 < d_B; ++b1) {
                for (Eigen::Index b2 = 0; b2 < d_B; ++b2) {
                    r(a1 * d_A + a2, b1 * d_B + b2) = e(a1 * d_B + b1, a2 * d_B + b2);
                }
            }
        }
    }
    return r;
}

Measurement two_element(const HermitianOperator& e, Eigen::Index d_A, Eigen::Index d_B) {
    const CMatrix complement = CMatrix::Identity(e.dim(), e.dim()) - e.mat();
    Measurement m{e.dim(), {{"in", e}, {"out", HermitianOperator(complement)}}, d_A, d_B};
    return m;
}

}  // namespace

TEST_CASE("product factorization recovers tensor factors") {
    SUBCASE("a product of projectors splits exactly") {
        const auto e = tensor_product(level_projector(2, 0), level_projector(2, 0));
        const auto decomp = factor_product(e, 2, 2);
        REQUIRE(decomp.terms.size() == 1);
        CHECK(decomp.terms[0].first.trace() == doctest::Approx(1.0));
        CHECK(entrywise_distance(decomp.reconstruct().mat(), e.mat()) <= 1e-10);
        CHECK(entrywise_distance(decomp.terms[0].first.mat(),
                                 level_projector(2, 0).mat()) <= 1e-10);
    }
    SUBCASE("the identity splits into normalized local identities") {
        const auto e = HermitianOperator::identity(4);
        const auto decomp = factor_product(e, 2, 2);
        REQUIRE(decomp.terms.size() == 1);
        const auto& [a, b] = decomp.terms[0];
        CHECK(proportional_to(a, HermitianOperator::identity(2)).proportional);
        CHECK(a.trace() == doctest::Approx(1.0));
        CHECK(proportional_to(b, HermitianOperator::identity(2)).factor ==
              doctest::Approx(2.0));
        CHECK(entrywise_distance(decomp.reconstruct().mat(), e.mat()) <= 1e-10);
    }
    SUBCASE("random products on asymmetric dimensions rebuild") {
        for (unsigned seed = 0; seed < 6; ++seed) {
            const HermitianOperator a(random_psd_matrix(3, 700 + seed));
            const HermitianOperator b(random_psd_matrix(2, 730 + seed));
            const auto e = tensor_product(a, b);
            const auto decomp = factor_product(e, 3, 2);
            REQUIRE(decomp.terms.size() == 1);
            CHECK(entrywise_distance(decomp.reconstruct().mat(), e.mat()) <=
                  1e-8 * max_abs(e.mat()));
        }
    }
    SUBCASE("an entangled projector is flagged with its singular ratio") {
        const auto bell = bell_measurement();
        const auto& e = bell.element(0);

        const CMatrix r = realign(e.mat(), 2, 2);
        Eigen::JacobiSVD<CMatrix> svd(r);
        const double reference_ratio = svd.singularValues()(1) / svd.singularValues()(0);
        CHECK(reference_ratio == doctest::Approx(1.0).epsilon(1e-12));

        CHECK_THROWS_AS(factor_product(e, 2, 2), NotProductError);
        try {
            factor_product(e, 2, 2);
        } catch (const NotProductError& err) {
            CHECK(err.singular_ratio == doctest::Approx(reference_ratio).epsilon(1e-9));
        }
    }
    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(factor_product(HermitianOperator::zero(4), 2, 2),
                        ZeroOperatorError);
        CMatrix neg = CMatrix::Identity(4, 4);
        neg(0, 0) = -1.0;
        CHECK_THROWS_AS(factor_product(HermitianOperator(neg), 2, 2), DomainError);
        CHECK_THROWS_AS(factor_product(HermitianOperator::identity(4), 2, 3),
                        DimensionError);
    }
}

TEST_CASE("disturbance detection checks every off-diagonal matrix element") {
    SUBCASE("the trivial measurement never disturbs") {
        const Measurement trivial{9, {{"0", HermitianOperator::identity(9)}}, 3, 3};
        CHECK(is_non_disturbing(trivial, domino_basis()).non_disturbing);
    }
    SUBCASE("the first peel-off round preserves the augmented basis") {
        const auto p3 = level_projector(4, 3);
        const HermitianOperator rest(CMatrix(CMatrix::Identity(4, 4) - p3.mat()));
        const auto id4 = HermitianOperator::identity(4);
        const Measurement round{16,
                                {{"rest", tensor_product(rest, id4)},
                                 {"last", tensor_product(p3, id4)}},
                                4,
                                4};
        const auto report = is_non_disturbing(round, augmented_domino_basis());
        CHECK(report.non_disturbing);
        CHECK(report.worst_off_diagonal <= 1e-12);
    }
    SUBCASE("a corner projector disturbs the domino states") {
        const auto corner =
            tensor_product(level_projector(3, 0), level_projector(3, 0));
        const auto report = is_non_disturbing(two_element(corner, 3, 3), domino_basis());
        CHECK_FALSE(report.non_disturbing);
        CHECK(report.worst_off_diagonal == doctest::Approx(0.5).epsilon(1e-12));
        const bool hits_horizontal_pair =
            (report.worst_j == 1 && report.worst_k == 2) ||
            (report.worst_j == 2 && report.worst_k == 1);
        CHECK(hits_horizontal_pair);
    }
}

TEST_CASE("the product progress bound is exact on single terms") {
    const auto basis = computational_basis(2, 2);
    const auto mu = example_mu(basis);

    SUBCASE("single-term decompositions evaluate the element itself") {
        const HermitianOperator a(random_psd_matrix(2, 800));
        const HermitianOperator b(random_psd_matrix(2, 801));
        const auto e = tensor_product(a, b);
        const ProductDecomposition decomp{{{a, b}}};
        const auto bound = mu_tilde_upper(e, decomp, mu);
        CHECK(bound.exact);
        CHECK(bound.value == doctest::Approx(mu(e)).epsilon(1e-12));
    }
    SUBCASE("the identity has no progress to bound") {
        const auto id2 = HermitianOperator::identity(2);
        const ProductDecomposition decomp{{{id2, id2}}};
        const auto bound = mu_tilde_upper(HermitianOperator::identity(4), decomp, mu);
        CHECK(bound.value == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("multi-term decompositions bound the element progress from above") {
        const auto p0 = level_projector(2, 0);
        const auto p1 = level_projector(2, 1);
        const auto e = HermitianOperator(
            CMatrix(tensor_product(p0, p0).mat() + tensor_product(p1, p1).mat()));
        const ProductDecomposition decomp{{{p0, p0}, {p1, p1}}};
        const auto bound = mu_tilde_upper(e, decomp, mu);
        CHECK_FALSE(bound.exact);
        CHECK(mu(e) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(bound.value == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(bound.value >= mu(e));
    }
}

TEST_CASE("separable elements unroll into a finer product measurement") {
    const auto p0 = level_projector(2, 0);
    const auto p1 = level_projector(2, 1);
    const HermitianOperator e(CMatrix(0.5 * (tensor_product(p0, p0).mat() +
                                             tensor_product(p1, p1).mat())));
    const auto m = two_element(e, 2, 2);
    const std::vector<ProductDecomposition> decomps = {
        ProductDecomposition{{{HermitianOperator(CMatrix(0.5 * p0.mat())), p0},
                              {HermitianOperator(CMatrix(0.5 * p1.mat())), p1}}},
        ProductDecomposition{{{p0, p1},
                              {p1, p0},
                              {HermitianOperator(CMatrix(0.5 * p0.mat())), p0},
                              {HermitianOperator(CMatrix(0.5 * p1.mat())), p1}}}};

    const auto fine = sep_to_product_stage(m, decomps);
    CHECK(fine.fine.size() == 6);
    CHECK(validate(fine.fine).pass);
    const auto back = coarse_grain(fine.fine, fine.by_source);
    const auto dist = measurement_distance(back, m);
    CHECK(dist.same_labels);
    CHECK(dist.max_residual <= 1e-10);
}

TEST_CASE("local extraction pulls a projective measurement from a product stage") {
    const auto basis = computational_basis(2, 2);
    const auto mu = example_mu(basis);
    const double mu0 = threshold_example_mu(4).mu0;
    const auto id2 = HermitianOperator::identity(2);

    SUBCASE("a diagonal Alice factor yields her eigenprojectors") {
        CMatrix top = CMatrix::Zero(2, 2);
        top(0, 0) = 0.75;
        top(1, 1) = 0.25;
        const CMatrix bottom = CMatrix::Identity(2, 2) - top;
        const Measurement m1{4,
                             {{"0", tensor_product(HermitianOperator(top), id2)},
                              {"1", tensor_product(HermitianOperator(bottom), id2)}},
                             2,
                             2};
        const auto extraction = extract_local_nondisturbing(m1, basis, mu, mu0);
        CHECK_FALSE(extraction.trivial);
        CHECK(extraction.party == Party::alice);
        REQUIRE(extraction.local_measurement.size() == 2);
        CHECK(entrywise_distance(extraction.local_measurement.element(0).mat(),
                                 level_projector(2, 0).mat()) <= 1e-10);
        CHECK(entrywise_distance(extraction.local_measurement.element(1).mat(),
                                 level_projector(2, 1).mat()) <= 1e-10);
        REQUIRE(extraction.progress_values.size() == 2);
        for (const double v : extraction.progress_values) {
            CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
            CHECK(v >= mu0 - 1e-9);
        }
    }
    SUBCASE("an all-trivial stage is reported as such") {
        const HermitianOperator half(CMatrix(0.5 * CMatrix::Identity(4, 4)));
        const Measurement m1{4, {{"0", half}, {"1", half}}, 2, 2};
        const auto extraction = extract_local_nondisturbing(m1, basis, mu, mu0);
        CHECK(extraction.trivial);
    }
    SUBCASE("vanishing state weights violate the positivity requirement") {
        const auto aug = augmented_domino_basis();
        const auto mu16 = example_mu(aug);
        const auto p3 = level_projector(4, 3);
        const HermitianOperator rest(CMatrix(CMatrix::Identity(4, 4) - p3.mat()));
        const auto id4 = HermitianOperator::identity(4);
        const Measurement m1{16,
                             {{"last", tensor_product(p3, id4)},
                              {"rest", tensor_product(rest, id4)}},
                             4,
                             4};
        CHECK_THROWS_AS(
            extract_local_nondisturbing(m1, aug, mu16, threshold_example_mu(16).mu0),
            ThresholdError);
    }
    SUBCASE("a disturbing stage is rejected") {
        const auto dom = domino_basis();
        const auto mu9 = example_mu(dom);
        CMatrix skew = CMatrix::Zero(3, 3);
        skew(0, 0) = 0.75;
        skew(1, 1) = 0.25;
        skew(2, 2) = 0.5;
        const HermitianOperator a(skew);
        const HermitianOperator rest(CMatrix(CMatrix::Identity(3, 3) - skew));
        const auto id3 = HermitianOperator::identity(3);
        const Measurement m1{9,
                             {{"0", tensor_product(a, id3)},
                              {"1", tensor_product(rest, id3)}},
                             3,
                             3};
        CHECK_THROWS_AS(
            extract_local_nondisturbing(m1, dom, mu9, threshold_example_mu(9).mu0),
            DisturbanceError);
    }
}

TEST_CASE("diagonality spaces have the dimensions the bases force") {
    SUBCASE("the computational basis allows every diagonal operator") {
        const auto basis = computational_basis(2, 2);
        CHECK(oracle_diagonality_dimension(basis, Party::alice) == 2);
        const auto space = local_diagonality_space(basis, Party::alice);
        CHECK(space.dimension == 2);
        for (const auto& op : space.basis) {
            CHECK(std::abs(op.mat()(0, 1)) <= 1e-9);
        }
        CMatrix z = CMatrix::Zero(2, 2);
        z(0, 0) = 1.0;
        z(1, 1) = -1.0;
        CHECK(space.contains(HermitianOperator(z)));
        CHECK(space.contains(HermitianOperator::identity(2)));
        CMatrix x = CMatrix::Zero(2, 2);
        x(0, 1) = 1.0;
        x(1, 0) = 1.0;
        CHECK_FALSE(space.contains(HermitianOperator(x)));
    }
    SUBCASE("the domino basis pins both parties to the identity") {
        const auto basis = domino_basis();
        for (const Party party : {Party::alice, Party::bob}) {
            CHECK(oracle_diagonality_dimension(basis, party) == 1);
            const auto space = local_diagonality_space(basis, party);
            CHECK(space.dimension == 1);
            REQUIRE(space.basis.size() == 1);
            CHECK(proportional_to(space.basis[0], HermitianOperator::identity(3))
                      .proportional);
        }
    }
    SUBCASE("the augmented basis opens exactly one extra direction for Alice") {
        const auto basis = augmented_domino_basis();
        CHECK(oracle_diagonality_dimension(basis, Party::alice) == 2);
        const auto space = local_diagonality_space(basis, Party::alice);
        CHECK(space.dimension == 2);
        CHECK(space.contains(level_projector(4, 3)));
        CHECK(space.contains(HermitianOperator::identity(4)));
    }
    SUBCASE("Bob's side of the augmented basis agrees with the oracle") {
        const auto basis = augmented_domino_basis();
        const auto expected = oracle_diagonality_dimension(basis, Party::bob);
        const auto space = local_diagonality_space(basis, Party::bob);
        CHECK(space.dimension == expected);
    }
    SUBCASE("every returned basis operator satisfies the defining constraints") {
        const auto basis = augmented_domino_basis();
        const auto space = local_diagonality_space(basis, Party::alice);
        const auto full = basis.full_vectors();
        const auto id4 = HermitianOperator::identity(4);
        for (const auto& op : space.basis) {
            const auto lifted = tensor_product(op, id4);
            for (std::size_t j = 0; j < full.size(); ++j) {
                for (std::size_t k = 0; k < full.size(); ++k) {
                    if (j == k) {
                        continue;
                    }
                    const Complex overlap =
                        (full[j].adjoint() * lifted.mat() * full[k])(0, 0);
                    CHECK(std::abs(overlap) <= 1e-8);
                }
            }
        }
    }
}
