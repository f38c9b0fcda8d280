#include "mint/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "mint/errors.hpp"
#include "mint/fixtures.hpp"
#include "mint/interpolation.hpp"
#include "mint/json_io.hpp"
#include "mint/measurement.hpp"
#include "mint/progress.hpp"
#include "mint/protocol.hpp"
#include "mint/structure.hpp"
#include "mint/suite.hpp"
#include "mint/tolerances.hpp"

namespace mint {

namespace {

using nlohmann::json;

constexpr const char* tool_version = "0.1.0";

struct Report {
    std::string command;
    std::string status = "pass";
    json metrics = json::object();
    json artifacts = json::object();
    std::optional<std::int64_t> seed;

    void fail_unless(bool ok) {
        if (!ok) status = "fail";
    }
};

void emit(const Report& rep, std::ostream& out) {
    json doc{{"command", rep.command},
             {"status", rep.status},
             {"metrics", rep.metrics},
             {"artifacts", rep.artifacts},
             {"tool_version", tool_version}};
    if (rep.seed) doc["seed"] = *rep.seed;
    out << doc.dump(2) << '\n';
}

/// Runs one subcommand body under the shared error policy: IoError reports
/// status "error" with exit 2, every other library error with exit 1.
template <typename Fn>
int guarded(Report& rep, std::ostream& out, std::ostream& err, Fn&& body) {
    try {
        body(rep);
        err << rep.command << ": " << rep.status << '\n';
        emit(rep, out);
        return rep.status == "pass" ? 0 : 1;
    } catch (const IoError& e) {
        rep.status = "error";
        rep.artifacts["error"] = json{{"message", e.what()}};
        err << rep.command << ": " << e.what() << '\n';
        emit(rep, out);
        return 2;
    } catch (const Error& e) {
        rep.status = "error";
        rep.artifacts["error"] = json{{"message", e.what()}};
        err << rep.command << ": " << e.what() << '\n';
        emit(rep, out);
        return 1;
    }
}

Measurement load_measurement(const std::string& path, std::ostream& err) {
    const Measurement m = io::measurement_from_json(io::read_json_file(path));
    err << "loaded measurement: dim " << m.dim << ", " << m.size() << " elements\n";
    return m;
}

ProductBasis load_basis(const std::string& path, std::ostream& err) {
    const ProductBasis b = io::basis_from_json(io::read_json_file(path));
    err << "loaded basis: " << b.d_A << " x " << b.d_B << ", " << b.size() << " states\n";
    return b;
}

ProtocolTree load_tree(const std::string& path, std::ostream& err) {
    const ProtocolTree t = io::tree_from_json(io::read_json_file(path));
    err << "loaded protocol: " << t.d_A << " x " << t.d_B << '\n';
    return t;
}

void run_povm_validate(Report& rep, const std::string& path, const Tolerances& tol,
                       std::ostream& err) {
    const Measurement m = load_measurement(path, err);
    const ValidationReport v = validate(m, tol);
    double min_eig = 0.0;
    if (!v.min_eigenvalues.empty()) {
        min_eig = *std::min_element(v.min_eigenvalues.begin(), v.min_eigenvalues.end());
    }
    rep.metrics["dim"] = m.dim;
    rep.metrics["elements"] = m.size();
    rep.metrics["completeness_residual"] = v.completeness_residual;
    rep.metrics["min_eigenvalue"] = min_eig;
    rep.metrics["labels_unique"] = v.labels_unique ? 1.0 : 0.0;
    rep.fail_unless(v.pass);
}

void run_basis_validate(Report& rep, const std::string& path, const Tolerances& tol,
                        std::ostream& err) {
    const ProductBasis b = load_basis(path, err);
    const BasisReport v = validate(b, tol);
    rep.metrics["d_A"] = b.d_A;
    rep.metrics["d_B"] = b.d_B;
    rep.metrics["vectors"] = b.size();
    rep.metrics["worst_overlap"] = v.worst_overlap;
    rep.metrics["worst_norm_deviation"] = v.worst_norm_deviation;
    rep.metrics["complete"] = v.complete ? 1.0 : 0.0;
    rep.fail_unless(v.pass);
}

void fill_verification_metrics(Report& rep, const InterpolationReport& v) {
    rep.metrics["max_stage_mu"] = v.max_stage_mu;
    rep.metrics["mu_residual"] = v.mu_residual;
    rep.metrics["completeness_worst"] = v.completeness_worst;
    rep.metrics["composition_residual"] = v.composition_residual;
    rep.metrics["proportionality_residual"] = v.proportionality_residual;
}

void run_interpolate(Report& rep, const std::string& m_path, const std::string& basis_path,
                     double epsilon, const std::string& out_path, const Tolerances& tol,
                     std::ostream& err) {
    const Measurement m = load_measurement(m_path, err);
    const ProductBasis basis = load_basis(basis_path, err);
    const ProgressFunction mu = example_mu(basis);
    const InterpolationResult result = interpolate_kkb(m, mu, epsilon, tol);
    const InterpolationReport v = verify_interpolation(m, result, mu, tol);
    json doc = io::to_json(result);
    doc["verification"] = io::to_json(v);
    if (!out_path.empty()) io::write_json_file(out_path, doc);
    rep.artifacts["result"] = std::move(doc);
    rep.metrics["epsilon_achieved"] = result.epsilon_achieved;
    rep.metrics["stages"] = result.m2_list.size();
    fill_verification_metrics(rep, v);
    rep.fail_unless(v.pass);
}

void run_non_disturbing(Report& rep, const std::string& m_path, const std::string& basis_path,
                        std::ostream& err) {
    const Measurement m = load_measurement(m_path, err);
    const ProductBasis basis = load_basis(basis_path, err);
    const DisturbanceReport v = is_non_disturbing(m, basis);
    rep.metrics["worst_off_diagonal"] = v.worst_off_diagonal;
    if (!v.non_disturbing) {
        rep.artifacts["worst"] = json{{"element", v.worst_element},
                                      {"state_j", v.worst_j},
                                      {"state_k", v.worst_k}};
    }
    rep.fail_unless(v.non_disturbing);
}

void run_diagonality(Report& rep, const std::string& basis_path, const std::string& party,
                     const Tolerances& tol, std::ostream& err) {
    const ProductBasis basis = load_basis(basis_path, err);
    const DiagonalitySpace space = local_diagonality_space(basis, parse_party(party), tol);
    rep.metrics["dimension"] = space.dimension;
    json ops = json::array();
    for (const auto& op : space.basis) ops.push_back(io::matrix_to_json(op.mat()));
    rep.artifacts["operators"] = std::move(ops);
}

void run_extract(Report& rep, const std::string& stage_path, const std::string& basis_path,
                 bool epsilon_check, const Tolerances& tol, std::ostream& err) {
    const Measurement m1 = load_measurement(stage_path, err);
    const ProductBasis basis = load_basis(basis_path, err);
    const ProgressFunction mu = example_mu(basis);
    const double mu0 = threshold_example_mu(static_cast<Eigen::Index>(basis.size())).mu0;
    const LocalExtraction ex = extract_local_nondisturbing(m1, basis, mu, mu0, tol);
    double min_progress = 0.0;
    if (!ex.progress_values.empty()) {
        min_progress = *std::min_element(ex.progress_values.begin(), ex.progress_values.end());
    }
    rep.metrics["party"] = ex.party == Party::alice ? 0.0 : 1.0;
    rep.metrics["outcomes"] = ex.local_measurement.size();
    rep.metrics["trivial"] = ex.trivial ? 1.0 : 0.0;
    rep.metrics["mu0"] = mu0;
    rep.metrics["min_progress"] = min_progress;
    rep.artifacts["local_measurement"] = io::to_json(ex.local_measurement);
    rep.fail_unless(!ex.trivial);
    if (epsilon_check) rep.fail_unless(min_progress >= mu0 - 1e-9);
}

void run_protocol_povm(Report& rep, const std::string& tree_path, const std::string& out_path,
                       const Tolerances& tol, std::ostream& err) {
    const ProtocolTree t = load_tree(tree_path, err);
    const Measurement m = leaf_povm(t, tol);
    const ValidationReport v = validate(m, tol);
    json doc = io::to_json(m);
    if (!out_path.empty()) io::write_json_file(out_path, doc);
    rep.artifacts["povm"] = std::move(doc);
    rep.metrics["leaves"] = m.size();
    rep.metrics["dim"] = m.dim;
    rep.metrics["completeness_residual"] = v.completeness_residual;
    rep.fail_unless(v.pass);
}

void run_protocol_discriminate(Report& rep, const std::string& tree_path,
                               const std::string& basis_path, const Tolerances& tol,
                               std::ostream& err) {
    const ProtocolTree t = load_tree(tree_path, err);
    const ProductBasis basis = load_basis(basis_path, err);
    const DiscriminationReport v = discriminates(t, basis, tol);
    rep.metrics["discriminates"] = v.discriminates ? 1.0 : 0.0;
    rep.metrics["worst_leakage"] = v.worst_leakage;
    json partition = json::object();
    for (const auto& [leaf, outcome] : v.partition.leaf_to_outcome) partition[leaf] = outcome;
    rep.artifacts["partition"] = std::move(partition);
    rep.fail_unless(v.discriminates);
}

void run_protocol_interpolate(Report& rep, const std::string& tree_path,
                              const std::string& family_path, const std::string& basis_path,
                              double epsilon, const std::string& out_path, const Tolerances& tol,
                              std::ostream& err) {
    const ProtocolTree t = load_tree(tree_path, err);
    const CompletionFamily family = io::family_from_json(io::read_json_file(family_path));
    err << "loaded completion family: " << family.size() << " leaves\n";
    const ProductBasis basis = load_basis(basis_path, err);
    const ProgressFunction mu = example_mu(basis);
    const double mu0 = threshold_example_mu(static_cast<Eigen::Index>(basis.size())).mu0;
    const InterpolationResult result = interpolate_protocol(t, family, mu, mu0, epsilon, tol);
    const Measurement chain = complete_with_family(t, family, tol).chain;
    const InterpolationReport v = verify_interpolation(chain, result, mu, tol);
    json doc = io::to_json(result);
    doc["verification"] = io::to_json(v);
    if (!out_path.empty()) io::write_json_file(out_path, doc);
    rep.artifacts["result"] = std::move(doc);
    rep.metrics["epsilon_achieved"] = result.epsilon_achieved;
    rep.metrics["mu0"] = mu0;
    fill_verification_metrics(rep, v);
    rep.fail_unless(v.pass);
}

void run_fixtures(Report& rep, const std::string& name, const std::string& out_path,
                  std::ostream& err) {
    FixtureObject obj = [&] {
        try {
            return fixture(name);
        } catch (const DomainError& e) {
            // An unknown name is a usage problem, not a computation failure.
            throw IoError(e.what());
        }
    }();
    const char* kind = "";
    json doc;
    if (const auto* basis = std::get_if<ProductBasis>(&obj)) {
        kind = "basis";
        doc = io::to_json(*basis);
    } else if (const auto* m = std::get_if<Measurement>(&obj)) {
        kind = "measurement";
        doc = io::to_json(*m);
    } else if (const auto* t = std::get_if<ProtocolTree>(&obj)) {
        kind = "protocol";
        doc = io::to_json(*t);
    } else {
        kind = "completion-family";
        doc = io::to_json(std::get<CompletionFamily>(obj));
    }
    err << "fixture " << name << " (" << kind << ")\n";
    if (!out_path.empty()) io::write_json_file(out_path, doc);
    rep.artifacts["fixture"] = std::move(doc);
    rep.artifacts["info"] = json{{"name", name}, {"kind", kind}};
}

void run_suite(Report& rep, std::ostream& err) {
    const auto results = suite::run_all();
    json criteria = json::array();
    int passed = 0;
    for (const auto& r : results) {
        err << "criterion " << r.id << " (" << r.name << "): " << (r.pass ? "pass" : "FAIL")
            << " [" << r.detail << "]\n";
        criteria.push_back(json{{"id", r.id},
                                {"name", r.name},
                                {"pass", r.pass},
                                {"detail", r.detail},
                                {"seconds", r.seconds}});
        rep.metrics["criterion_" + std::to_string(r.id)] = r.pass ? 1.0 : 0.0;
        if (r.pass) ++passed;
    }
    rep.metrics["passed"] = passed;
    rep.metrics["total"] = results.size();
    rep.artifacts["criteria"] = std::move(criteria);
    rep.fail_unless(passed == static_cast<int>(results.size()));
}

void run_report_check(Report& rep, const std::string& path, std::ostream& err) {
    const json doc = io::read_json_file(path);
    bool ok = doc.is_object();
    ok = ok && doc.contains("command") && doc.at("command").is_string();
    bool status_ok = false;
    if (ok && doc.contains("status") && doc.at("status").is_string()) {
        const std::string s = doc.at("status").get<std::string>();
        status_ok = s == "pass" || s == "fail" || s == "error";
    }
    ok = ok && status_ok;
    bool metrics_ok = ok && doc.contains("metrics") && doc.at("metrics").is_object();
    if (metrics_ok) {
        for (const auto& [key, value] : doc.at("metrics").items()) {
            (void)key;
            if (!value.is_number() || !std::isfinite(value.get<double>())) {
                metrics_ok = false;
                break;
            }
        }
    }
    ok = ok && metrics_ok;
    ok = ok && doc.contains("tool_version") && doc.at("tool_version").is_string();
    if (doc.contains("artifacts")) ok = ok && doc.at("artifacts").is_object();
    if (doc.contains("seed")) ok = ok && doc.at("seed").is_number_integer();
    err << "checked report " << path << '\n';
    rep.metrics["valid"] = ok ? 1.0 : 0.0;
    rep.fail_unless(ok);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"bipartite measurement interpolation toolkit"};
    app.require_subcommand(1);

    Tolerances tol;
    app.add_option("--tolerance-hermiticity", tol.hermiticity, "Hermiticity tolerance")
        ->envname("MINT_TOLERANCE_HERMITICITY");
    app.add_option("--tolerance-psd-floor", tol.psd_floor, "PSD eigenvalue floor (negative)")
        ->envname("MINT_TOLERANCE_PSD_FLOOR");
    app.add_option("--tolerance-completeness", tol.completeness, "Completeness tolerance")
        ->envname("MINT_TOLERANCE_COMPLETENESS");
    app.add_option("--tolerance-rank-cut", tol.rank_cut, "Relative kernel cutoff")
        ->envname("MINT_TOLERANCE_RANK_CUT");
    app.add_option("--tolerance-root-find", tol.root_find, "Root-finding residual")
        ->envname("MINT_TOLERANCE_ROOT_FIND");
    std::int64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed recorded in the report");

    int code = 0;
    auto dispatch = [&](const std::string& command, auto body) {
        return [&, command, body] {
            try {
                tol.validate();
            } catch (const DomainError& e) {
                err << "error: " << e.what() << '\n';
                code = 2;
                return;
            }
            Report rep;
            rep.command = command;
            if (seed_opt->count() > 0) rep.seed = seed;
            code = guarded(rep, out, err, body);
        };
    };

    auto* povm = app.add_subcommand("povm", "POVM operations");
    povm->fallthrough();
    povm->require_subcommand(1);
    {
        auto* validate_cmd = povm->add_subcommand("validate", "Validate a measurement document");
        validate_cmd->fallthrough();
        auto file = std::make_shared<std::string>();
        validate_cmd->add_option("file", *file, "Measurement JSON")->required();
        validate_cmd->callback(dispatch("povm validate", [&tol, &err, file](Report& rep) {
            run_povm_validate(rep, *file, tol, err);
        }));
    }

    auto* basis = app.add_subcommand("basis", "Product basis operations");
    basis->fallthrough();
    basis->require_subcommand(1);
    {
        auto* validate_cmd = basis->add_subcommand("validate", "Validate a basis document");
        validate_cmd->fallthrough();
        auto file = std::make_shared<std::string>();
        validate_cmd->add_option("file", *file, "Basis JSON")->required();
        validate_cmd->callback(dispatch("basis validate", [&tol, &err, file](Report& rep) {
            run_basis_validate(rep, *file, tol, err);
        }));
    }

    {
        auto* cmd = app.add_subcommand("interpolate", "Epsilon-interpolate a measurement");
        cmd->fallthrough();
        auto m_path = std::make_shared<std::string>();
        auto basis_path = std::make_shared<std::string>();
        auto progress = std::make_shared<std::string>("example");
        auto epsilon = std::make_shared<double>(0.0);
        auto out_path = std::make_shared<std::string>();
        cmd->add_option("--measurement", *m_path, "Target measurement JSON")->required();
        cmd->add_option("--basis", *basis_path, "Basis JSON for the progress function")
            ->required();
        cmd->add_option("--progress", *progress, "Progress function name")
            ->check(CLI::IsMember({"example"}));
        cmd->add_option("--epsilon", *epsilon, "Progress bound")->required();
        cmd->add_option("--out", *out_path, "Write the result document here");
        cmd->callback(dispatch("interpolate",
                               [&tol, &err, m_path, basis_path, epsilon, out_path](Report& rep) {
                                   run_interpolate(rep, *m_path, *basis_path, *epsilon, *out_path,
                                                   tol, err);
                               }));
    }

    auto* analyze = app.add_subcommand("analyze", "Structural analyses");
    analyze->fallthrough();
    analyze->require_subcommand(1);
    {
        auto* cmd = analyze->add_subcommand("non-disturbing", "Check S-diagonality");
        cmd->fallthrough();
        auto m_path = std::make_shared<std::string>();
        auto basis_path = std::make_shared<std::string>();
        cmd->add_option("--measurement", *m_path, "Measurement JSON")->required();
        cmd->add_option("--basis", *basis_path, "Basis JSON")->required();
        cmd->callback(dispatch("analyze non-disturbing", [&err, m_path, basis_path](Report& rep) {
            run_non_disturbing(rep, *m_path, *basis_path, err);
        }));
    }
    {
        auto* cmd = analyze->add_subcommand("diagonality", "Local diagonality space");
        cmd->fallthrough();
        auto basis_path = std::make_shared<std::string>();
        auto party = std::make_shared<std::string>("alice");
        cmd->add_option("--basis", *basis_path, "Basis JSON")->required();
        cmd->add_option("--party", *party, "alice or bob")
            ->check(CLI::IsMember({"alice", "bob"}));
        cmd->callback(dispatch("analyze diagonality", [&tol, &err, basis_path, party](Report& rep) {
            run_diagonality(rep, *basis_path, *party, tol, err);
        }));
    }
    {
        auto* cmd = analyze->add_subcommand("extract", "Extract a local first stage");
        cmd->fallthrough();
        auto stage_path = std::make_shared<std::string>();
        auto basis_path = std::make_shared<std::string>();
        auto epsilon_check = std::make_shared<bool>(false);
        cmd->add_option("--stage", *stage_path, "First-stage measurement JSON")->required();
        cmd->add_option("--basis", *basis_path, "Basis JSON")->required();
        cmd->add_flag("--epsilon-check", *epsilon_check, "Assert extracted progress >= mu0");
        cmd->callback(dispatch("analyze extract",
                               [&tol, &err, stage_path, basis_path, epsilon_check](Report& rep) {
                                   run_extract(rep, *stage_path, *basis_path, *epsilon_check, tol,
                                               err);
                               }));
    }

    auto* protocol = app.add_subcommand("protocol", "Protocol tree operations");
    protocol->fallthrough();
    protocol->require_subcommand(1);
    {
        auto* cmd = protocol->add_subcommand("povm", "Leaf POVM of a protocol tree");
        cmd->fallthrough();
        auto tree_path = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        cmd->add_option("tree", *tree_path, "Protocol JSON")->required();
        cmd->add_option("--out", *out_path, "Write the POVM document here");
        cmd->callback(dispatch("protocol povm", [&tol, &err, tree_path, out_path](Report& rep) {
            run_protocol_povm(rep, *tree_path, *out_path, tol, err);
        }));
    }
    {
        auto* cmd = protocol->add_subcommand("discriminate", "Discrimination check");
        cmd->fallthrough();
        auto tree_path = std::make_shared<std::string>();
        auto basis_path = std::make_shared<std::string>();
        cmd->add_option("tree", *tree_path, "Protocol JSON")->required();
        cmd->add_option("--basis", *basis_path, "Basis JSON")->required();
        cmd->callback(
            dispatch("protocol discriminate", [&tol, &err, tree_path, basis_path](Report& rep) {
                run_protocol_discriminate(rep, *tree_path, *basis_path, tol, err);
            }));
    }
    {
        auto* cmd = protocol->add_subcommand("interpolate", "Interpolate a completed chain");
        cmd->fallthrough();
        auto tree_path = std::make_shared<std::string>();
        auto family_path = std::make_shared<std::string>();
        auto basis_path = std::make_shared<std::string>();
        auto epsilon = std::make_shared<double>(0.0);
        auto out_path = std::make_shared<std::string>();
        cmd->add_option("tree", *tree_path, "Protocol JSON")->required();
        cmd->add_option("--m2", *family_path, "Completion family JSON")->required();
        cmd->add_option("--basis", *basis_path, "Basis JSON")->required();
        cmd->add_option("--epsilon", *epsilon, "Progress bound")->required();
        cmd->add_option("--out", *out_path, "Write the result document here");
        cmd->callback(dispatch(
            "protocol interpolate",
            [&tol, &err, tree_path, family_path, basis_path, epsilon, out_path](Report& rep) {
                run_protocol_interpolate(rep, *tree_path, *family_path, *basis_path, *epsilon,
                                         *out_path, tol, err);
            }));
    }

    {
        auto* cmd = app.add_subcommand("fixtures", "Emit a catalog fixture");
        cmd->fallthrough();
        auto name = std::make_shared<std::string>();
        auto out_path = std::make_shared<std::string>();
        cmd->add_option("name", *name, "Fixture name")->required();
        cmd->add_option("--out", *out_path, "Write the fixture document here");
        cmd->callback(dispatch("fixtures", [&err, name, out_path](Report& rep) {
            run_fixtures(rep, *name, *out_path, err);
        }));
    }

    {
        auto* cmd = app.add_subcommand("suite", "Run the acceptance suite");
        cmd->fallthrough();
        auto scale = std::make_shared<std::string>("desk");
        cmd->add_option("--scale", *scale, "Problem scale")->check(CLI::IsMember({"desk"}));
        cmd->callback(dispatch("suite", [&err](Report& rep) { run_suite(rep, err); }));
    }

    auto* report_cmd = app.add_subcommand("report", "Report utilities");
    report_cmd->require_subcommand(1);
    {
        auto* cmd = report_cmd->add_subcommand("check", "Validate a report document");
        cmd->fallthrough();
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file, "Report JSON")->required();
        cmd->callback(dispatch("report check", [&err, file](Report& rep) {
            run_report_check(rep, *file, err);
        }));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        err << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    }
    return code;
}

}  // namespace mint
