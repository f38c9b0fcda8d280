#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "mint/fixtures.hpp"
#include "mint/measurement.hpp"
#include "test_helpers.hpp"

using namespace mint;
using namespace mint::testing;

namespace {

HermitianOperator diagonal(std::initializer_list<double> entries) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(entries.size()),
                              static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (const double e : entries) {
        m(i, i) = e;
        ++i;
    }
    return HermitianOperator(m);
}

Measurement computational_povm(Eigen::Index n) {
    return von_neumann(computational_states(n));
}

}  // namespace

TEST_CASE("measurement validation accepts POVMs and reports defects") {
    SUBCASE("the computational measurement passes") {
        const auto report = validate(computational_povm(2));
        CHECK(report.pass);
        CHECK(report.completeness_residual <= 1e-15);
        CHECK(report.labels_unique);
        CHECK(report.dims_consistent);
    }
    SUBCASE("an incomplete element set fails with the exact residual") {
        const Measurement m{2, {{"0", diagonal({1, 0})}, {"1", diagonal({0, 0.5})}}, 0, 0};
        const auto report = validate(m);
        CHECK_FALSE(report.pass);
        CHECK(report.completeness_residual == doctest::Approx(0.5));
    }
    SUBCASE("duplicate labels are flagged") {
        const Measurement m{2, {{"a", diagonal({1, 0})}, {"a", diagonal({0, 1})}}, 0, 0};
        const auto report = validate(m);
        CHECK_FALSE(report.pass);
        CHECK_FALSE(report.labels_unique);
    }
    SUBCASE("a negative element fails the positivity check") {
        const Measurement m{2, {{"0", diagonal({2, 1})}, {"1", diagonal({-1, 0})}}, 0, 0};
        const auto report = validate(m);
        CHECK_FALSE(report.pass);
        REQUIRE(report.min_eigenvalues.size() == 2);
        CHECK(report.min_eigenvalues[1] == doctest::Approx(-1.0));
    }
    SUBCASE("an element of the wrong dimension is flagged, not summed") {
        const Measurement m{2, {{"0", diagonal({1, 1})}, {"1", diagonal({0, 0, 0})}}, 0, 0};
        const auto report = validate(m);
        CHECK_FALSE(report.pass);
        CHECK_FALSE(report.dims_consistent);
    }
}

TEST_CASE("basis validation measures orthonormality and completeness") {
    SUBCASE("the computational product basis is complete and orthonormal") {
        const auto report = validate(computational_basis(2, 2));
        CHECK(report.pass);
        CHECK(report.complete);
        CHECK(report.worst_overlap <= 1e-15);
        CHECK(report.worst_norm_deviation <= 1e-15);
    }
    SUBCASE("a repeated vector fails") {
        ProductBasis basis = computational_basis(2, 2);
        basis.vectors[1] = basis.vectors[0];
        basis.vectors[1].label = "copy";
        const auto report = validate(basis);
        CHECK_FALSE(report.pass);
        CHECK(report.worst_overlap == doctest::Approx(1.0));
    }
    SUBCASE("an orthonormal but short family is incomplete") {
        ProductBasis basis = computational_basis(2, 2);
        basis.vectors.pop_back();
        const auto report = validate(basis);
        CHECK_FALSE(report.complete);
    }
    SUBCASE("require_orthonormal throws on overlap") {
        std::vector<CVector> vectors = {unit_vector(2, 0), unit_vector(2, 0)};
        CHECK_THROWS_AS(require_orthonormal(vectors), BasisError);
    }
}

TEST_CASE("coarse graining sums groups of outcomes") {
    const auto m = computational_povm(3);

    SUBCASE("a two-block partition merges the first pair") {
        const CoarseGrainMap map{{{0, 1}, {2}}, {"low", "high"}};
        const auto coarse = coarse_grain(m, map);
        REQUIRE(coarse.size() == 2);
        CHECK(coarse.label(0) == "low");
        CHECK(entrywise_distance(coarse.element(0).mat(), diagonal({1, 1, 0}).mat()) <= 1e-15);
        CHECK(entrywise_distance(coarse.element(1).mat(), diagonal({0, 0, 1}).mat()) <= 1e-15);
    }
    SUBCASE("singleton groups reproduce the measurement") {
        const CoarseGrainMap map{{{0}, {1}, {2}}, {"0", "1", "2"}};
        const auto coarse = coarse_grain(m, map);
        const auto dist = measurement_distance(coarse, m);
        CHECK(dist.same_labels);
        CHECK(dist.max_residual <= 1e-15);
    }
    SUBCASE("a single group gives the trivial measurement") {
        const CoarseGrainMap map{{{0, 1, 2}}, {"all"}};
        const auto coarse = coarse_grain(m, map);
        REQUIRE(coarse.size() == 1);
        CHECK(is_trivial(coarse));
    }
    SUBCASE("non-partitions are rejected") {
        CHECK_THROWS_AS(coarse_grain(m, CoarseGrainMap{{{0, 1}, {1, 2}}, {"a", "b"}}),
                        PartitionError);
        CHECK_THROWS_AS(coarse_grain(m, CoarseGrainMap{{{0, 1}}, {"a"}}), PartitionError);
        CHECK_THROWS_AS(coarse_grain(m, CoarseGrainMap{{{0, 1}, {2, 3}}, {"a", "b"}}),
                        PartitionError);
    }
}

TEST_CASE("composition applies second stages inside the first") {
    SUBCASE("a trivial first stage passes the second stage through") {
        const Measurement trivial{2, {{"0", HermitianOperator::identity(2)}}, 0, 0};
        const auto target = computational_povm(2);
        const auto composed = compose(trivial, {target});
        REQUIRE(composed.size() == 2);
        CHECK(composed.label(0) == "0/0");
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(entrywise_distance(composed.element(j).mat(), target.element(j).mat()) <=
                  1e-15);
        }
    }
    SUBCASE("diagonal first stage against computational second stages") {
        const Measurement first{
            2, {{"0", diagonal({0.75, 0.25})}, {"1", diagonal({0.25, 0.75})}}, 0, 0};
        const auto second = computational_povm(2);
        const auto composed = compose(first, {second, second});
        REQUIRE(composed.size() == 4);
        CHECK(entrywise_distance(composed.element(0).mat(), diagonal({0.75, 0}).mat()) <=
              1e-12);
        CHECK(entrywise_distance(composed.element(1).mat(), diagonal({0, 0.25}).mat()) <=
              1e-12);
        CHECK(entrywise_distance(composed.element(2).mat(), diagonal({0.25, 0}).mat()) <=
              1e-12);
        CHECK(entrywise_distance(composed.element(3).mat(), diagonal({0, 0.75}).mat()) <=
              1e-12);
        CHECK(validate(composed).pass);
    }
    SUBCASE("composing two computational stages and merging by the second index") {
        const auto comp = computational_povm(2);
        const CoarseGrainMap by_second{{{0, 2}, {1, 3}}, {"0", "1"}};
        const auto merged = compose(comp, {comp, comp}, by_second);
        const auto dist = measurement_distance(merged, comp);
        CHECK(dist.same_labels);
        CHECK(dist.max_residual <= 1e-12);
    }
    SUBCASE("an inline map agrees with composing then coarse graining") {
        const auto first = random_povm(3, 2, 5);
        const std::vector<Measurement> second = {random_povm(3, 2, 6), random_povm(3, 3, 7)};
        const CoarseGrainMap map{{{0, 2}, {1, 3, 4}}, {"a", "b"}};
        const auto inline_map = compose(first, second, map);
        const auto two_step = coarse_grain(compose(first, second), map);
        const auto dist = measurement_distance(inline_map, two_step);
        CHECK(dist.same_labels);
        CHECK(dist.max_residual <= 1e-12);
    }
    SUBCASE("stage counts must match") {
        const auto comp = computational_povm(2);
        CHECK_THROWS_AS(compose(comp, {comp}), DimensionError);
    }
}

TEST_CASE("von Neumann measurements project onto basis lines") {
    SUBCASE("computational basis") {
        const auto m = computational_povm(2);
        CHECK(entrywise_distance(m.element(0).mat(), diagonal({1, 0}).mat()) <= 1e-15);
        CHECK(entrywise_distance(m.element(1).mat(), diagonal({0, 1}).mat()) <= 1e-15);
    }
    SUBCASE("balanced superpositions give the half matrices") {
        CVector plus(2), minus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
        const auto m = von_neumann({plus, minus}, {"+", "-"});
        CMatrix expected_plus(2, 2);
        expected_plus << 0.5, 0.5, 0.5, 0.5;
        CMatrix expected_minus(2, 2);
        expected_minus << 0.5, -0.5, -0.5, 0.5;
        CHECK(entrywise_distance(m.element(0).mat(), expected_plus) <= 1e-15);
        CHECK(entrywise_distance(m.element(1).mat(), expected_minus) <= 1e-15);
        CHECK(m.label(0) == "+");
    }
    SUBCASE("a product basis carries its labels and local dimensions") {
        const auto m = von_neumann(computational_basis(2, 3));
        CHECK(m.dim == 6);
        CHECK(m.d_A == 2);
        CHECK(m.d_B == 3);
        CHECK(m.label(0) == "0,0");
        CHECK(validate(m).pass);
    }
    SUBCASE("non-orthonormal input is rejected") {
        CHECK_THROWS_AS(von_neumann({unit_vector(2, 0), unit_vector(2, 0)}), BasisError);
    }
}

TEST_CASE("triviality means every element is a multiple of the identity") {
    CHECK(is_trivial(Measurement{2, {{"0", HermitianOperator::identity(2)}}, 0, 0}));
    const Measurement split{
        2,
        {{"0", HermitianOperator(CMatrix(CMatrix::Identity(2, 2) / 3.0))},
         {"1", HermitianOperator(CMatrix(2.0 * CMatrix::Identity(2, 2) / 3.0))}},
        0,
        0};
    CHECK(is_trivial(split));
    CHECK_FALSE(is_trivial(computational_povm(2)));
}

TEST_CASE("outcome probabilities are Born weights") {
    const auto m = computational_povm(2);
    SUBCASE("a basis state concentrates on its own outcome") {
        const auto probs = outcome_probabilities(m, diagonal({1, 0}));
        REQUIRE(probs.size() == 2);
        CHECK(probs[0] == doctest::Approx(1.0));
        CHECK(probs[1] == doctest::Approx(0.0));
    }
    SUBCASE("probabilities sum to one on random states") {
        const CVector psi = random_state(2, 71);
        const HermitianOperator rho(CMatrix(psi * psi.adjoint()));
        const auto probs = outcome_probabilities(m, rho);
        CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(probs[0] >= 0.0);
        CHECK(probs[1] >= 0.0);
    }
    SUBCASE("composition preserves total probability") {
        const auto composed = compose(m, {m, m});
        const CVector psi = random_state(2, 72);
        const HermitianOperator rho(CMatrix(psi * psi.adjoint()));
        double total = 0.0;
        for (const double p : outcome_probabilities(composed, rho)) {
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("states must be unit-trace and positive") {
        CHECK_THROWS_AS(outcome_probabilities(m, diagonal({2, 0})), DomainError);
        CHECK_THROWS_AS(outcome_probabilities(m, diagonal({2, -1})), DomainError);
    }
}

TEST_CASE("measurement distance matches outcomes by label") {
    const auto m = computational_povm(2);
    SUBCASE("label order does not matter") {
        Measurement shuffled = m;
        std::swap(shuffled.elements[0], shuffled.elements[1]);
        const auto dist = measurement_distance(m, shuffled);
        CHECK(dist.same_labels);
        CHECK(dist.max_residual <= 1e-15);
    }
    SUBCASE("different label sets never compare") {
        Measurement renamed = m;
        renamed.elements[0].label = "x";
        CHECK_FALSE(measurement_distance(m, renamed).same_labels);
    }
    SUBCASE("element differences appear in the residual") {
        Measurement bumped = m;
        bumped.elements[0].op = diagonal({0.9, 0});
        const auto dist = measurement_distance(m, bumped);
        CHECK(dist.same_labels);
        CHECK(dist.max_residual == doctest::Approx(0.1));
    }
}
