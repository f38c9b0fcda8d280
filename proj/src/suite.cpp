#include "mint/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "mint/errors.hpp"
#include "mint/fixtures.hpp"
#include "mint/interpolation.hpp"
#include "mint/measurement.hpp"
#include "mint/progress.hpp"
#include "mint/protocol.hpp"
#include "mint/structure.hpp"

namespace mint::suite {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<CVector> computational_states(Eigen::Index n) {
    std::vector<CVector> states;
    for (Eigen::Index k = 0; k < n; ++k) {
        CVector v = CVector::Zero(n);
        v(k) = 1.0;
        states.push_back(std::move(v));
    }
    return states;
}

CMatrix haar_unitary(Eigen::Index d, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix g(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
    }
    return Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(d, d);
}

void criterion_engine(CriterionResult& r) {
    const auto start = std::chrono::steady_clock::now();
    double worst_mu_err = 0.0;
    double worst_completeness = 0.0;
    double worst_composition = 0.0;
    bool verified = true;
    int runs = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index dim = 2 + trial % 7;
        const std::size_t outcomes = 2 + trial % 4;
        const Measurement m = random_povm(dim, outcomes, 1000u + static_cast<unsigned>(trial));
        const ProgressFunction mu = example_mu(computational_states(dim));
        double lambda = 0.0;
        for (const auto& el : m.elements) {
            if (!el.op.is_zero()) lambda = std::max(lambda, mu(el.op));
        }
        for (const double eps : {0.0, lambda / 2.0, lambda}) {
            const InterpolationResult result = interpolate_kkb(m, mu, eps);
            const double target = std::min(eps, lambda);
            double realized = 0.0;
            for (const auto& el : result.m1.elements) {
                if (!el.op.is_zero()) realized = std::max(realized, mu(el.op));
            }
            worst_mu_err = std::max(worst_mu_err, std::abs(realized - target));
            const InterpolationReport rep = verify_interpolation(m, result, mu);
            worst_completeness = std::max(worst_completeness, rep.completeness_worst);
            worst_composition = std::max(worst_composition, rep.composition_residual);
            verified = verified && rep.pass;
            ++runs;
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.pass = verified && worst_mu_err <= 1e-9 && worst_completeness <= 1e-8 &&
             worst_composition <= 1e-8 && elapsed < 10.0;
    r.detail = std::to_string(runs) + " interpolations, max |mu-target| " + num(worst_mu_err) +
               ", completeness " + num(worst_completeness) + ", composition " +
               num(worst_composition) + ", " + num(elapsed) + " s";
}

void criterion_worked_example(CriterionResult& r) {
    const auto states = computational_states(2);
    const Measurement m = von_neumann(states, {"0", "1"});
    const ProgressFunction mu = example_mu(states);
    const InterpolationResult result = interpolate_kkb(m, mu, 0.25);

    // Independent bisection oracle on the raw evaluator; mu(c id + F) is
    // strictly decreasing in c, so the bracket [lo, hi] keeps the root.
    const CMatrix id = CMatrix::Identity(2, 2);
    auto oracle = [&](const HermitianOperator& f, double target) {
        double lo = 0.0;
        double hi = 1.0;
        while (mu(HermitianOperator(hi * id + f.mat())) > target) {
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo > 1e-13) {
            const double mid = 0.5 * (lo + hi);
            (mu(HermitianOperator(mid * id + f.mat())) > target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double c0 = oracle(m.element(0), 0.25);
    const double c1 = oracle(m.element(1), 0.25);

    CMatrix expected(2, 2);
    expected << 0.75, 0.0, 0.0, 0.25;
    const double matrix_err = max_abs(CMatrix(result.m1.element(0).mat() - expected));
    const double c_err = std::max({std::abs(result.c_constants[0] - 0.5),
                                   std::abs(result.c_constants[1] - 0.5),
                                   std::abs(c0 - 0.5), std::abs(c1 - 0.5)});
    r.pass = result.c_constants.size() == 2 && c_err <= 1e-10 && matrix_err <= 1e-10;
    r.detail = "|c - 1/2| " + num(c_err) + " (oracle " + num(std::abs(c0 - 0.5)) +
               "), |E1 - diag(3/4,1/4)| " + num(matrix_err);
}

void criterion_threshold(CriterionResult& r) {
    const std::vector<Eigen::Index> dims = {2, 9, 16};
    const std::vector<double> expected = {0.5, 1.0 / 72.0, 1.0 / 240.0};
    double worst_mu0_err = 0.0;
    std::vector<ProgressFunction> mus;
    std::vector<double> mu0s;
    for (std::size_t t = 0; t < dims.size(); ++t) {
        const ThresholdCertificate cert = threshold_example_mu(dims[t]);
        worst_mu0_err = std::max(worst_mu0_err, std::abs(cert.mu0 - expected[t]));
        mus.push_back(example_mu(computational_states(dims[t])));
        mu0s.push_back(cert.mu0);
    }
    double worst_margin = 1.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t t = static_cast<std::size_t>(k) % dims.size();
        const Eigen::Index n = dims[t];
        const Eigen::Index idx = (k / 3) % n;
        CMatrix cut = CMatrix::Identity(n, n);
        cut(idx, idx) = 0.0;
        const HermitianOperator psd = random_psd(n, 2000u + static_cast<unsigned>(k));
        const HermitianOperator e(CMatrix(cut * psd.mat() * cut));
        worst_margin = std::min(worst_margin, mus[t](e) - mu0s[t]);
    }
    r.pass = worst_mu0_err <= 1e-15 && worst_margin >= -1e-9;
    r.detail = "|mu0 - expected| " + num(worst_mu0_err) + ", min(mu - mu0) " +
               num(worst_margin) + " over 1000 operators";
}

void criterion_figure_pipeline(CriterionResult& r) {
    const ProductBasis basis = augmented_domino_basis();
    const BasisReport brep = validate(basis);
    bool pass = brep.pass && brep.complete && brep.worst_overlap <= 1e-12;

    const ProtocolTree tree = peel_off_tree(false);
    const Measurement leaves = leaf_povm(tree);
    CMatrix sum = CMatrix::Zero(16, 16);
    for (const auto& el : leaves.elements) sum += el.op.mat();
    const double sum_err = max_abs(CMatrix(sum - CMatrix::Identity(16, 16)));
    pass = pass && sum_err <= 1e-10;
    pass = pass && is_non_disturbing(leaves, basis).non_disturbing;

    const CompletedChain chain = complete_with_family(peel_off_tree(true), peel_off_family(true));
    const DiscriminationReport disc = discriminates(chain.fine, basis);
    std::set<std::string> covered;
    for (const auto& el : chain.fine.elements) {
        if (!el.op.is_zero(1e-12)) covered.insert(disc.partition.leaf_to_outcome.at(el.label));
    }
    pass = pass && disc.discriminates && disc.worst_leakage <= 1e-9 && covered.size() == 16;

    const Measurement vn = von_neumann(basis);
    const MeasurementDistance dist = measurement_distance(chain.chain, vn);
    pass = pass && dist.same_labels && dist.max_residual <= 1e-8;

    const DiscriminationReport unfinished = discriminates(tree, basis);
    const ImplementsReport impl = implements(tree, vn, unfinished.partition);
    pass = pass && !unfinished.discriminates && !impl.implements;

    r.pass = pass;
    r.detail = "overlap " + num(brep.worst_overlap) + ", |sum - id| " + num(sum_err) +
               ", leakage " + num(disc.worst_leakage) + ", chain residual " +
               num(dist.max_residual) + ", " + std::to_string(covered.size()) +
               "/16 states resolved";
}

void criterion_round_trip(CriterionResult& r) {
    const ProductBasis basis = augmented_domino_basis();
    const Measurement vn = von_neumann(basis);
    const ProgressFunction mu = example_mu(basis);
    const double mu0 = threshold_example_mu(16).mu0;
    const double eps = 1.0 / 480.0;

    const InterpolationResult result =
        interpolate_protocol(peel_off_tree(false), peel_off_family(false), mu, mu0, eps);
    const InterpolationReport rep = verify_interpolation(vn, result, mu);
    bool pass = rep.pass && std::abs(result.epsilon_achieved - eps) <= 1e-9;

    bool all_product = true;
    for (const auto& el : result.m1.elements) {
        if (el.op.is_zero(1e-12)) continue;
        try {
            factor_product(el.op, 4, 4);
        } catch (const NotProductError&) {
            all_product = false;
        }
    }
    pass = pass && all_product;

    const ProtocolDecomposition dec = decompose_from_interpolation(vn, result, basis, mu, mu0);
    double worst_progress = 1.0;
    for (const auto& el : leaf_povm(dec.m1_protocol).elements) {
        if (el.op.is_zero(1e-12)) continue;
        worst_progress = std::min(worst_progress, mu(el.op));
    }
    pass = pass && worst_progress >= mu0 - 1e-9 && dec.completion_residual <= 1e-8;

    r.pass = pass;
    r.detail = std::string("verified ") + (rep.pass ? "yes" : "no") + ", product stage " +
               (all_product ? "yes" : "no") + ", min leaf mu " + num(worst_progress) +
               " vs mu0 " + num(mu0) + ", completion residual " +
               num(dec.completion_residual);
}

void criterion_diagonality(CriterionResult& r) {
    const ProductBasis dom = domino_basis();
    const DiagonalitySpace da = local_diagonality_space(dom, Party::alice);
    const DiagonalitySpace db = local_diagonality_space(dom, Party::bob);

    const ProductBasis aug = augmented_domino_basis();
    const DiagonalitySpace fa = local_diagonality_space(aug, Party::alice);
    CMatrix last = CMatrix::Zero(4, 4);
    last(3, 3) = 1.0;
    const bool has_last = fa.contains(HermitianOperator(last));

    r.pass = da.dimension == 1 && db.dimension == 1 && fa.dimension == 2 && has_last;
    r.detail = "domino dims (" + std::to_string(da.dimension) + "," +
               std::to_string(db.dimension) + "), augmented Alice dim " +
               std::to_string(fa.dimension) + ", |3><3| in span: " + (has_last ? "yes" : "no");
}

void criterion_axioms(CriterionResult& r) {
    const ProgressFunction mu = example_mu(computational_states(4));
    const AxiomReport rep = check_axioms(mu, 1000, 7);

    const ProgressFunction broken(
        4, [](const HermitianOperator& e) { return e.trace(); }, "trace");
    const AxiomReport broken_rep = check_axioms(broken, 200, 7);

    r.pass = rep.pass && rep.samples == 1000 && !broken_rep.pass;
    r.detail = "identity " + num(rep.identity_value) + ", scale " +
               num(rep.max_scale_violation) + ", quasiconvex " +
               num(rep.max_quasiconvex_violation) + "; trace evaluator flagged: " +
               (broken_rep.pass ? "no" : "yes");
}

void criterion_discrimination_trees(CriterionResult& r) {
    bool pass = true;
    double worst_leakage = 0.0;
    for (int k = 0; k < 50; ++k) {
        std::mt19937 rng(4000u + static_cast<unsigned>(k));
        const Eigen::Index d_A = 2 + k % 2;
        const Eigen::Index d_B = 2 + (k / 2) % 2;
        const CMatrix a = haar_unitary(d_A, rng);
        std::vector<CMatrix> b;
        for (Eigen::Index i = 0; i < d_A; ++i) b.push_back(haar_unitary(d_B, rng));

        ProductBasis basis;
        basis.d_A = d_A;
        basis.d_B = d_B;
        auto build = [&](bool shift) {
            ProtocolTree t;
            t.d_A = d_A;
            t.d_B = d_B;
            t.root.party = Party::alice;
            for (Eigen::Index i = 0; i < d_A; ++i) {
                t.root.kraus.push_back(a.col(i) * a.col(i).adjoint());
                ProtocolNode round;
                round.party = Party::bob;
                const CMatrix& local = b[(i + (shift ? 1 : 0)) % d_A];
                for (Eigen::Index j = 0; j < d_B; ++j) {
                    round.kraus.push_back(local.col(j) * local.col(j).adjoint());
                    ProtocolNode leaf;
                    leaf.label = std::to_string(i) + "," + std::to_string(j);
                    round.children.push_back(std::move(leaf));
                }
                t.root.children.push_back(std::move(round));
            }
            return t;
        };
        for (Eigen::Index i = 0; i < d_A; ++i) {
            for (Eigen::Index j = 0; j < d_B; ++j) {
                basis.vectors.push_back({std::to_string(i) + "," + std::to_string(j),
                                         a.col(i), b[i].col(j)});
            }
        }
        const Measurement vn = von_neumann(basis);

        const ProtocolTree honest = build(false);
        const DiscriminationReport d1 = discriminates(honest, basis);
        const ImplementsReport i1 = implements(honest, vn, d1.partition);
        bool labels_match = true;
        for (const auto& [leaf, outcome] : d1.partition.leaf_to_outcome) {
            labels_match = labels_match && leaf == outcome;
        }
        pass = pass && d1.discriminates && i1.implements && labels_match;
        worst_leakage = std::max(worst_leakage, d1.worst_leakage);

        const ProtocolTree corrupted = build(true);
        const DiscriminationReport d2 = discriminates(corrupted, basis);
        const ImplementsReport i2 = implements(corrupted, vn, d2.partition);
        pass = pass && !d2.discriminates && !i2.implements;
    }
    r.pass = pass;
    r.detail = "50 trees both directions, honest leakage " + num(worst_leakage);
}

CriterionResult timed(int id, const std::string& name,
                      const std::function<void(CriterionResult&)>& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

std::vector<CriterionResult> run_all() {
    return {
        timed(1, "interpolation engine", criterion_engine),
        timed(2, "worked example", criterion_worked_example),
        timed(3, "progress threshold", criterion_threshold),
        timed(4, "peel-off pipeline", criterion_figure_pipeline),
        timed(5, "decomposition round trip", criterion_round_trip),
        timed(6, "diagonality witness", criterion_diagonality),
        timed(7, "progress axioms", criterion_axioms),
        timed(8, "discrimination trees", criterion_discrimination_trees),
    };
}

}  // namespace mint::suite
