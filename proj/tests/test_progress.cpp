#include <cmath>
#include <vector>

#include "doctest.h"
#include "mint/fixtures.hpp"
#include "mint/progress.hpp"
#include "test_helpers.hpp"

using namespace mint;
using namespace mint::testing;

namespace {

HermitianOperator projector_on(const CVector& psi) {
    return HermitianOperator(CMatrix(psi * psi.adjoint()));
}

HermitianOperator last_level_projector(Eigen::Index dim) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(dim - 1, dim - 1) = 1.0;
    return HermitianOperator(m);
}

}  // namespace

TEST_CASE("discrimination progress matches its defining formula") {
    const auto states = computational_states(4);
    const auto mu = example_mu(states);

    SUBCASE("the identity makes no progress") {
        CHECK(mu(HermitianOperator::identity(4)) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("a basis-state projector makes maximal progress") {
        CHECK(mu(projector_on(states[2])) == doctest::Approx(0.75));
    }
    SUBCASE("a diagonal two-level operator") {
        const auto mu2 = example_mu(computational_states(2));
        CMatrix e = CMatrix::Zero(2, 2);
        e(0, 0) = 0.75;
        e(1, 1) = 0.25;
        CHECK(mu2(HermitianOperator(e)) == doctest::Approx(0.25));
    }
    SUBCASE("the zero operator is out of domain") {
        CHECK_THROWS_AS(mu(HermitianOperator::zero(4)), ZeroOperatorError);
    }
    SUBCASE("values stay between zero and one minus one over n") {
        for (unsigned seed = 0; seed < 20; ++seed) {
            const HermitianOperator e(random_psd_matrix(4, 100 + seed));
            const double v = mu(e);
            CHECK(v >= -1e-12);
            CHECK(v <= 0.75 + 1e-12);
        }
    }
    SUBCASE("scaling the identity still makes no progress") {
        for (const double t : {0.5, 2.0, 17.0}) {
            const HermitianOperator e(CMatrix(t * CMatrix::Identity(4, 4)));
            CHECK(mu(e) == doctest::Approx(0.0).epsilon(1e-15));
        }
    }
    SUBCASE("the evaluator agrees with an independent computation") {
        for (unsigned seed = 0; seed < 10; ++seed) {
            const CMatrix e = random_psd_matrix(4, 200 + seed);
            CHECK(mu(HermitianOperator(e)) ==
                  doctest::Approx(oracle_mu(states, e)).epsilon(1e-12));
        }
    }
    SUBCASE("metadata is recorded") {
        CHECK(mu.dim() == 4);
        CHECK_FALSE(mu.descriptor().empty());
    }
    SUBCASE("the product-basis overload matches the flat one") {
        const auto basis = computational_basis(2, 2);
        const auto mu_basis = example_mu(basis);
        const HermitianOperator e(random_psd_matrix(4, 300));
        CHECK(mu_basis(e) == doctest::Approx(mu(e)).epsilon(1e-12));
    }
}

TEST_CASE("the progress threshold certifies an annihilated state") {
    SUBCASE("closed-form values") {
        CHECK(threshold_example_mu(2).mu0 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(threshold_example_mu(9).mu0 == doctest::Approx(1.0 / 72.0).epsilon(1e-15));
        CHECK(threshold_example_mu(16).mu0 == doctest::Approx(1.0 / 240.0).epsilon(1e-15));
        CHECK(threshold_example_mu(16).n == 16);
    }
    SUBCASE("degenerate sizes are rejected") {
        CHECK_THROWS_AS(threshold_example_mu(1), DomainError);
        CHECK_THROWS_AS(threshold_example_mu(0), DomainError);
    }
    SUBCASE("operators annihilating a basis state sit at or above the threshold") {
        for (unsigned seed = 0; seed < 60; ++seed) {
            const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 4);
            const auto states = computational_states(n);
            const auto mu = example_mu(states);
            const double mu0 = threshold_example_mu(n).mu0;
            CMatrix cut = CMatrix::Identity(n, n);
            cut(seed % n, seed % n) = 0.0;
            const CMatrix e = cut * random_psd_matrix(n, 400 + seed) * cut;
            CHECK(mu(HermitianOperator(e)) >= mu0 - 1e-9);
        }
    }
}

TEST_CASE("induced progress conjugates by the applied operators") {
    const auto basis = augmented_domino_basis();
    const auto mu = example_mu(basis);
    const auto id4 = HermitianOperator::identity(4);
    const auto p3 = last_level_projector(4);
    const HermitianOperator rest(CMatrix(CMatrix::Identity(4, 4) - p3.mat()));

    SUBCASE("identity history reduces to the base function on lifted operators") {
        const auto induced = induced_mu(mu, id4, id4, Party::alice);
        for (unsigned seed = 0; seed < 5; ++seed) {
            const HermitianOperator a(random_psd_matrix(4, 500 + seed));
            CHECK(induced(a) ==
                  doctest::Approx(mu(tensor_product(a, id4))).epsilon(1e-12));
        }
    }
    SUBCASE("the first peel-off outcomes have the documented progress") {
        const auto induced = induced_mu(mu, id4, id4, Party::alice);
        CHECK(induced(rest) == doctest::Approx(1.0 / 48.0).epsilon(1e-12));
        CHECK(induced(p3) == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
        CHECK(induced(rest) ==
              doctest::Approx(oracle_mu(basis.full_vectors(),
                                        tensor_product(rest, id4).mat()))
                  .epsilon(1e-12));
    }
    SUBCASE("Bob's side mirrors the conjugation") {
        const auto induced = induced_mu(mu, id4, id4, Party::bob);
        const HermitianOperator b(random_psd_matrix(4, 510));
        CHECK(induced(b) == doctest::Approx(mu(tensor_product(id4, b))).epsilon(1e-12));
    }
    SUBCASE("history that kills the operator puts it out of domain") {
        const auto induced = induced_mu(mu, p3, id4, Party::alice);
        CHECK_THROWS_AS(induced(rest), ZeroOperatorError);
    }
}

TEST_CASE("axiom spot checks pass for real progress functions and flag fakes") {
    SUBCASE("the discrimination progress satisfies all axioms") {
        const auto mu = example_mu(computational_states(4));
        const auto report = check_axioms(mu, 200, 7);
        CHECK(report.pass);
        CHECK(std::abs(report.identity_value) <= 1e-9);
        CHECK(report.max_scale_violation <= 1e-9);
        CHECK(report.max_quasiconvex_violation <= 1e-9);
        CHECK(report.samples == 200);
        CHECK(report.seed == 7);
    }
    SUBCASE("the trace is not scale invariant and fails") {
        const ProgressFunction fake(
            4, [](const HermitianOperator& e) { return e.trace(); }, "trace");
        const auto report = check_axioms(fake, 200, 7);
        CHECK_FALSE(report.pass);
        CHECK(report.max_scale_violation > 1e-9);
    }
    SUBCASE("the constant zero function satisfies the axioms vacuously") {
        const ProgressFunction flat(
            4, [](const HermitianOperator&) { return 0.0; }, "flat");
        CHECK(check_axioms(flat, 200, 7).pass);
    }
}

TEST_CASE("random positive operators are seeded deterministically") {
    const auto a = random_psd(5, 99);
    const auto b = random_psd(5, 99);
    const auto c = random_psd(5, 100);
    CHECK(entrywise_distance(a.mat(), b.mat()) == 0.0);
    CHECK(entrywise_distance(a.mat(), c.mat()) > 1e-6);
    CHECK(is_psd(a).psd);
}
