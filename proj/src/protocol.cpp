#include "mint/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>

namespace mint {

namespace {

std::string path_string(const std::vector<std::size_t>& path) {
    if (path.empty()) {
        return "root";
    }
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) {
            s += '.';
        }
        s += std::to_string(path[i]);
    }
    return s;
}

struct LeafRecord {
    std::vector<std::size_t> path;
    std::string label;
    CMatrix a_acc;
    CMatrix b_acc;
};

HermitianOperator accumulated_element(const CMatrix& a_acc, const CMatrix& b_acc,
                                      const Tolerances& tol) {
    return HermitianOperator(tensor_product((a_acc.adjoint() * a_acc).eval(),
                                            (b_acc.adjoint() * b_acc).eval()),
                             tol);
}

void collect_leaves(const ProtocolNode& node, const CMatrix& a_acc, const CMatrix& b_acc,
                    std::vector<std::size_t>& path, std::vector<LeafRecord>& out) {
    if (node.is_leaf()) {
        out.push_back({path, node.label, a_acc, b_acc});
        return;
    }
    for (std::size_t k = 0; k < node.children.size(); ++k) {
        const CMatrix a =
            node.party == Party::alice ? (node.kraus[k] * a_acc).eval() : a_acc;
        const CMatrix b = node.party == Party::bob ? (node.kraus[k] * b_acc).eval() : b_acc;
        path.push_back(k);
        collect_leaves(node.children[k], a, b, path, out);
        path.pop_back();
    }
}

std::vector<LeafRecord> leaf_records(const ProtocolTree& t) {
    std::vector<LeafRecord> out;
    std::vector<std::size_t> path;
    collect_leaves(t.root, CMatrix::Identity(t.d_A, t.d_A),
                   CMatrix::Identity(t.d_B, t.d_B), path, out);
    return out;
}

void check_node(const ProtocolNode& node, Eigen::Index d_A, Eigen::Index d_B,
                std::vector<std::size_t>& path, std::set<std::string>& labels,
                const Tolerances& tol) {
    if (node.is_leaf()) {
        if (node.label.empty()) {
            throw DomainError("leaf at " + path_string(path) + " has no label");
        }
        if (!node.kraus.empty()) {
            throw DomainError("leaf '" + node.label + "' carries Kraus operators");
        }
        if (!labels.insert(node.label).second) {
            throw DomainError("duplicate leaf label '" + node.label + "'");
        }
        return;
    }
    const Eigen::Index d = node.party == Party::alice ? d_A : d_B;
    if (node.kraus.size() != node.children.size()) {
        throw DomainError("node at " + path_string(path) + " has " +
                          std::to_string(node.kraus.size()) + " Kraus operators for " +
                          std::to_string(node.children.size()) + " children");
    }
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& k : node.kraus) {
        if (k.rows() != d || k.cols() != d) {
            throw DimensionError("Kraus operator at node " + path_string(path) +
                                 " does not act on the " + party_name(node.party) +
                                 " space");
        }
        if (!k.allFinite()) {
            throw DomainError("Kraus operator at node " + path_string(path) +
                              " has non-finite entries");
        }
        sum += k.adjoint() * k;
    }
    const double residual = max_abs(sum - CMatrix::Identity(d, d));
    if (residual > tol.completeness) {
        throw DomainError("local Kraus set at node " + path_string(path) +
                          " is incomplete (residual " + std::to_string(residual) + ")");
    }
    for (std::size_t k = 0; k < node.children.size(); ++k) {
        path.push_back(k);
        check_node(node.children[k], d_A, d_B, path, labels, tol);
        path.pop_back();
    }
}

bool is_von_neumann(const Measurement& m) {
    if (static_cast<Eigen::Index>(m.size()) != m.dim) {
        return false;
    }
    for (const auto& el : m.elements) {
        const CMatrix& e = el.op.mat();
        if (std::abs(el.op.trace() - 1.0) > 1e-8 || max_abs(e * e - e) > 1e-8) {
            return false;
        }
    }
    return true;
}

/// Per-branch assembly of a second-stage POVM from the continuation sums
/// T_j: elements pinv_sqrt(E) T_j pinv_sqrt(E), with the kernel of E
/// completing the first listed target outcome.
Measurement branch_second_stage(const std::string& branch_label,
                                const HermitianOperator& element,
                                const std::vector<CMatrix>& continuation,
                                const std::vector<std::string>& targets, Eigen::Index dim,
                                Eigen::Index d_A, Eigen::Index d_B, const Tolerances& tol) {
    Measurement second;
    second.dim = dim;
    second.d_A = d_A;
    second.d_B = d_B;
    const HermitianOperator pinv = pinv_sqrt(element, tol);
    const HermitianOperator proj = support_projector(element, tol);
    const CMatrix rest = CMatrix::Identity(dim, dim) - proj.mat();
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const CMatrix& t_j = continuation[j];
        const bool nonzero = max_abs(t_j) > 1e-14;
        if (nonzero) {
            const double support_residual =
                max_abs(t_j - (proj.mat() * t_j * proj.mat()).eval());
            if (support_residual > 1e-8 * std::max(1.0, max_abs(t_j))) {
                throw Error("continuation for outcome '" + targets[j] +
                            "' leaves the support of first-stage element '" + branch_label +
                            "' (residual " + std::to_string(support_residual) + ")");
            }
        }
        CMatrix el = nonzero ? (pinv.mat() * t_j * pinv.mat()).eval()
                             : CMatrix::Zero(dim, dim);
        if (j == 0) {
            el += rest;
        }
        if (max_abs(el) > 1e-14 || j == 0) {
            second.elements.push_back({targets[j], HermitianOperator(el, tol)});
        }
    }
    return second;
}

}  // namespace

void validate_tree(const ProtocolTree& t, const Tolerances& tol) {
    tol.validate();
    if (t.d_A <= 0 || t.d_B <= 0) {
        throw DimensionError("protocol tree needs positive local dimensions");
    }
    std::vector<std::size_t> path;
    std::set<std::string> labels;
    check_node(t.root, t.d_A, t.d_B, path, labels, tol);
}

Measurement leaf_povm(const ProtocolTree& t, const Tolerances& tol) {
    validate_tree(t, tol);
    Measurement m;
    m.dim = t.d_A * t.d_B;
    m.d_A = t.d_A;
    m.d_B = t.d_B;
    for (const auto& rec : leaf_records(t)) {
        m.elements.push_back({rec.label, accumulated_element(rec.a_acc, rec.b_acc, tol)});
    }
    const ValidationReport report = validate(m, tol);
    if (!report.pass) {
        throw DomainError("leaf POVM does not validate (completeness residual " +
                          std::to_string(report.completeness_residual) + ")");
    }
    return m;
}

ImplementsReport implements(const ProtocolTree& t, const Measurement& m,
                            const OutcomePartition& partition, const Tolerances& tol) {
    const Measurement leaves = leaf_povm(t, tol);
    if (m.dim != leaves.dim) {
        throw DimensionError("measurement dimension does not match the protocol");
    }
    std::map<std::string, CMatrix> sums;
    for (const auto& el : m.elements) {
        sums.emplace(el.label, CMatrix::Zero(m.dim, m.dim));
    }
    for (const auto& el : leaves.elements) {
        const auto it = partition.leaf_to_outcome.find(el.label);
        if (it == partition.leaf_to_outcome.end()) {
            throw PartitionError("partition does not cover leaf '" + el.label + "'");
        }
        const auto target = sums.find(it->second);
        if (target == sums.end()) {
            throw PartitionError("partition maps leaf '" + el.label +
                                 "' to unknown outcome '" + it->second + "'");
        }
        target->second += el.op.mat();
    }
    for (const auto& [leaf, outcome] : partition.leaf_to_outcome) {
        if (!leaves.index_of(leaf).has_value()) {
            throw PartitionError("partition names unknown leaf '" + leaf + "'");
        }
    }
    ImplementsReport report;
    for (const auto& el : m.elements) {
        const double residual = max_abs(sums.at(el.label) - el.op.mat());
        if (residual > report.max_residual) {
            report.max_residual = residual;
            report.worst_outcome = el.label;
        }
    }
    report.implements = report.max_residual <= tol.completeness;
    return report;
}

DiscriminationReport discriminates(const Measurement& m, const ProductBasis& basis,
                                   const Tolerances& tol) {
    if (!validate(basis, tol).pass) {
        throw DomainError("discrimination needs a valid complete product basis");
    }
    if (!validate(m, tol).pass) {
        throw DomainError("discrimination needs a valid measurement");
    }
    if (m.dim != basis.dim()) {
        throw DimensionError("basis dimension does not match the measurement");
    }
    const auto states = basis.full_vectors();
    const auto labels = basis.labels();

    DiscriminationReport report;
    report.discriminates = true;
    for (const auto& el : m.elements) {
        if (el.op.is_zero(1e-12)) {
            report.partition.leaf_to_outcome[el.label] = labels.front();
            continue;
        }
        std::size_t best = 0;
        double best_v = -1.0;
        double second_v = 0.0;
        std::size_t survivors = 0;
        for (std::size_t k = 0; k < states.size(); ++k) {
            const double v =
                (states[k].adjoint() * el.op.mat() * states[k]).value().real();
            if (v > 1e-9) {
                ++survivors;
            }
            if (v > best_v) {
                second_v = best_v;
                best_v = v;
                best = k;
            } else if (v > second_v) {
                second_v = v;
            }
        }
        second_v = std::max(second_v, 0.0);
        if (second_v > report.worst_leakage) {
            report.worst_leakage = second_v;
            report.worst_leaf = el.label;
        }
        if (survivors != 1) {
            report.discriminates = false;
        }
        report.partition.leaf_to_outcome[el.label] = labels[best];
    }
    return report;
}

DiscriminationReport discriminates(const ProtocolTree& t, const ProductBasis& basis,
                                   const Tolerances& tol) {
    return discriminates(leaf_povm(t, tol), basis, tol);
}

CompletedChain complete_with_family(const ProtocolTree& t, const CompletionFamily& family,
                                    const Tolerances& tol) {
    const Measurement leaves = leaf_povm(t, tol);
    std::vector<Measurement> seconds;
    std::vector<std::string> targets;
    std::set<std::string> seen;
    seconds.reserve(leaves.size());
    for (const auto& el : leaves.elements) {
        const auto it = family.find(el.label);
        if (it == family.end()) {
            throw DomainError("no completion measurement for leaf '" + el.label + "'");
        }
        if (it->second.dim != leaves.dim) {
            throw DimensionError("completion for leaf '" + el.label +
                                 "' acts on the wrong space");
        }
        if (!validate(it->second, tol).pass) {
            throw DomainError("completion for leaf '" + el.label +
                              "' is not a valid measurement");
        }
        for (const auto& outcome : it->second.elements) {
            if (seen.insert(outcome.label).second) {
                targets.push_back(outcome.label);
            }
        }
        seconds.push_back(it->second);
    }
    CoarseGrainMap map;
    map.labels = targets;
    map.groups.assign(targets.size(), {});
    std::size_t flat = 0;
    for (const auto& second : seconds) {
        for (const auto& outcome : second.elements) {
            const auto pos =
                std::find(targets.begin(), targets.end(), outcome.label) - targets.begin();
            map.groups[static_cast<std::size_t>(pos)].push_back(flat);
            ++flat;
        }
    }
    CompletedChain chain;
    chain.fine = compose(leaves, seconds, std::nullopt, tol);
    chain.chain = coarse_grain(chain.fine, map, tol);
    return chain;
}

namespace {

struct NodeSearch {
    const ProgressFunction& mu;
    const Tolerances& tol;
    Eigen::Index d_A;
    Eigen::Index d_B;
    double margin = 0.0;
    double worst_leaf = 0.0;
    bool any_candidate = false;
    std::optional<InterpolationNode> found;

    double progress(const HermitianOperator& el) const {
        return el.is_zero(1e-12) ? 0.0 : mu(el);
    }

    void visit(const ProtocolNode& node, const CMatrix& a_acc, const CMatrix& b_acc,
               std::vector<std::size_t>& path) {
        if (found || node.is_leaf()) {
            return;
        }
        const std::size_t k = node.children.size();
        std::vector<CMatrix> a_child(k);
        std::vector<CMatrix> b_child(k);
        std::vector<double> child_mu(k, 0.0);
        bool any_nonzero = false;
        for (std::size_t i = 0; i < k; ++i) {
            a_child[i] =
                node.party == Party::alice ? (node.kraus[i] * a_acc).eval() : a_acc;
            b_child[i] = node.party == Party::bob ? (node.kraus[i] * b_acc).eval() : b_acc;
            child_mu[i] = progress(accumulated_element(a_child[i], b_child[i], tol));
            any_nonzero = any_nonzero || child_mu[i] > 1e-9;
        }
        if (!any_nonzero) {
            for (std::size_t i = 0; i < k; ++i) {
                margin = std::max(margin, child_mu[i]);
                if (node.children[i].is_leaf()) {
                    worst_leaf = std::max(worst_leaf, child_mu[i]);
                } else {
                    path.push_back(i);
                    visit(node.children[i], a_child[i], b_child[i], path);
                    path.pop_back();
                }
            }
            return;
        }
        any_candidate = true;
        InterpolationNode candidate;
        candidate.path = path;
        candidate.party = node.party;
        const Eigen::Index local = node.party == Party::alice ? d_A : d_B;
        candidate.local_measurement.dim = local;
        for (std::size_t i = 0; i < k; ++i) {
            candidate.local_measurement.elements.push_back(
                {std::to_string(i),
                 HermitianOperator((node.kraus[i].adjoint() * node.kraus[i]).eval(), tol)});
        }
        candidate.applied_alice = HermitianOperator((a_acc.adjoint() * a_acc).eval(), tol);
        candidate.applied_bob = HermitianOperator((b_acc.adjoint() * b_acc).eval(), tol);
        const ProgressFunction induced = induced_mu(mu, candidate.applied_alice,
                                                    candidate.applied_bob, candidate.party,
                                                    tol);
        double lambda = 0.0;
        for (const auto& el : candidate.local_measurement.elements) {
            if (!el.op.is_zero(1e-12)) {
                lambda = std::max(lambda, induced(el.op));
            }
        }
        if (lambda > 1e-9) {
            candidate.lambda = lambda;
            found = std::move(candidate);
        }
    }
};

}  // namespace

InterpolationNode find_interpolation_node(const ProtocolTree& t, const ProgressFunction& mu,
                                          const Tolerances& tol) {
    validate_tree(t, tol);
    if (mu.dim() != t.d_A * t.d_B) {
        throw DimensionError("progress function dimension does not match the protocol");
    }
    NodeSearch search{mu, tol, t.d_A, t.d_B, 0.0, 0.0, false, std::nullopt};
    std::vector<std::size_t> path;
    search.visit(t.root, CMatrix::Identity(t.d_A, t.d_A), CMatrix::Identity(t.d_B, t.d_B),
                 path);
    if (!search.found) {
        const double worst = std::max(search.worst_leaf, search.margin);
        if (search.any_candidate) {
            throw NoProgressError(
                "induced progress vanishes at every zero-progress node with a "
                "nonzero-progress child (worst mu " +
                    std::to_string(worst) + ")",
                worst);
        }
        throw NoProgressError("no leaf of the protocol achieves nonzero progress (worst "
                              "leaf mu " +
                                  std::to_string(worst) + ")",
                              worst);
    }
    search.found->margin = search.margin;
    return *search.found;
}

InterpolationResult interpolate_protocol(const ProtocolTree& t, const CompletionFamily& family,
                                         const ProgressFunction& mu, double mu0,
                                         double epsilon, const Tolerances& tol) {
    if (mu0 <= 0.0) {
        throw DomainError("mu0 must be strictly positive");
    }
    const Measurement leaves = leaf_povm(t, tol);
    const Eigen::Index dim = leaves.dim;
    if (mu.dim() != dim) {
        throw DimensionError("progress function dimension does not match the protocol");
    }
    for (const auto& el : leaves.elements) {
        if (el.op.is_zero(1e-12)) {
            continue;
        }
        const double v = mu(el.op);
        if (v < mu0 - 1e-9) {
            throw DomainError("leaf '" + el.label + "' has progress " + std::to_string(v) +
                              " below the threshold " + std::to_string(mu0) +
                              "; the protocol POVM must achieve mu >= mu0 everywhere");
        }
    }

    const InterpolationNode node = find_interpolation_node(t, mu, tol);
    const double bound = std::min(node.lambda, mu0);
    if (!(epsilon > 0.0) || epsilon >= bound) {
        throw EpsilonRangeError("epsilon must lie in the open interval (0, " +
                                    std::to_string(bound) + ")",
                                0.0, bound);
    }
    const ProgressFunction induced =
        induced_mu(mu, node.applied_alice, node.applied_bob, node.party, tol);
    const InterpolationResult local =
        interpolate_kkb(node.local_measurement, induced, epsilon, tol);
    const std::vector<double>& c_i = local.c_constants;
    double c_sum = 0.0;
    for (const double v : c_i) {
        c_sum += v;
    }
    const double c = 1.0 / (1.0 + c_sum);

    // Target outcome labels in order of first appearance, then the
    // conditioned continuation sqrt(P_w) M_j sqrt(P_w) per leaf.
    const auto records = leaf_records(t);
    std::vector<std::string> targets;
    std::set<std::string> seen;
    for (const auto& rec : records) {
        const auto it = family.find(rec.label);
        if (it == family.end()) {
            throw DomainError("no completion measurement for leaf '" + rec.label + "'");
        }
        if (it->second.dim != dim) {
            throw DimensionError("completion for leaf '" + rec.label +
                                 "' acts on the wrong space");
        }
        if (!validate(it->second, tol).pass) {
            throw DomainError("completion for leaf '" + rec.label +
                              "' is not a valid measurement");
        }
        for (const auto& outcome : it->second.elements) {
            if (seen.insert(outcome.label).second) {
                targets.push_back(outcome.label);
            }
        }
    }
    std::vector<std::vector<CMatrix>> leaf_t(records.size());
    for (std::size_t w = 0; w < records.size(); ++w) {
        leaf_t[w].assign(targets.size(), CMatrix::Zero(dim, dim));
        const HermitianOperator element =
            accumulated_element(records[w].a_acc, records[w].b_acc, tol);
        if (element.is_zero(1e-14)) {
            continue;
        }
        const CMatrix root = matrix_sqrt(element, tol).mat();
        const Measurement& second = family.at(records[w].label);
        for (const auto& outcome : second.elements) {
            const auto pos =
                std::find(targets.begin(), targets.end(), outcome.label) - targets.begin();
            leaf_t[w][static_cast<std::size_t>(pos)] += root * outcome.op.mat() * root;
        }
    }
    auto continuation = [&](const std::vector<std::size_t>& prefix) {
        std::vector<CMatrix> sum(targets.size(), CMatrix::Zero(dim, dim));
        for (std::size_t w = 0; w < records.size(); ++w) {
            const auto& p = records[w].path;
            if (p.size() < prefix.size() ||
                !std::equal(prefix.begin(), prefix.end(), p.begin())) {
                continue;
            }
            for (std::size_t j = 0; j < targets.size(); ++j) {
                sum[j] += leaf_t[w][j];
            }
        }
        return sum;
    };

    InterpolationResult result;
    result.c_constants = c_i;
    result.m1.dim = dim;
    result.m1.d_A = t.d_A;
    result.m1.d_B = t.d_B;

    // Branches that deviate from the path to v' keep their accumulated
    // elements and continue the protocol unmodified.
    CMatrix a_acc = CMatrix::Identity(t.d_A, t.d_A);
    CMatrix b_acc = CMatrix::Identity(t.d_B, t.d_B);
    const ProtocolNode* cursor = &t.root;
    std::vector<std::size_t> prefix;
    for (const std::size_t step : node.path) {
        for (std::size_t k = 0; k < cursor->children.size(); ++k) {
            if (k == step) {
                continue;
            }
            const CMatrix a =
                cursor->party == Party::alice ? (cursor->kraus[k] * a_acc).eval() : a_acc;
            const CMatrix b =
                cursor->party == Party::bob ? (cursor->kraus[k] * b_acc).eval() : b_acc;
            const HermitianOperator element = accumulated_element(a, b, tol);
            if (element.is_zero(1e-12)) {
                continue;
            }
            prefix.push_back(k);
            const std::string label = "dev:" + path_string(prefix);
            result.m1.elements.push_back({label, element});
            result.m2_list.push_back(branch_second_stage(label, element,
                                                         continuation(prefix), targets, dim,
                                                         t.d_A, t.d_B, tol));
            prefix.pop_back();
        }
        a_acc = cursor->party == Party::alice ? (cursor->kraus[step] * a_acc).eval() : a_acc;
        b_acc = cursor->party == Party::bob ? (cursor->kraus[step] * b_acc).eval() : b_acc;
        prefix.push_back(step);
        cursor = &cursor->children[step];
    }

    // The round at v' is replaced by its interpolation; each branch's second
    // stage blends the child continuations with weights c (c_i + delta).
    const HermitianOperator& acting =
        node.party == Party::alice ? node.applied_alice : node.applied_bob;
    const HermitianOperator& idle =
        node.party == Party::alice ? node.applied_bob : node.applied_alice;
    const CMatrix acting_root = matrix_sqrt(acting, tol).mat();
    const std::size_t k_local = node.local_measurement.size();
    std::vector<std::vector<CMatrix>> child_t(k_local);
    for (std::size_t i = 0; i < k_local; ++i) {
        prefix.push_back(i);
        child_t[i] = continuation(prefix);
        prefix.pop_back();
    }
    for (std::size_t i = 0; i < k_local; ++i) {
        const CMatrix local_el =
            acting_root * local.m1.element(i).mat() * acting_root;
        const CMatrix full = node.party == Party::alice
                                 ? tensor_product(local_el, idle.mat())
                                 : tensor_product(idle.mat(), local_el);
        const HermitianOperator element(full, tol);
        std::vector<CMatrix> blended(targets.size(), CMatrix::Zero(dim, dim));
        for (std::size_t ip = 0; ip < k_local; ++ip) {
            const double w = c * (c_i[i] + (i == ip ? 1.0 : 0.0));
            if (w == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < targets.size(); ++j) {
                blended[j] += w * child_t[ip][j];
            }
        }
        const std::string label = "v:" + local.m1.label(i);
        result.m1.elements.push_back({label, element});
        result.m2_list.push_back(branch_second_stage(label, element, blended, targets, dim,
                                                     t.d_A, t.d_B, tol));
    }

    result.coarse_map.labels = targets;
    result.coarse_map.groups.assign(targets.size(), {});
    std::size_t flat = 0;
    for (const auto& second : result.m2_list) {
        for (const auto& outcome : second.elements) {
            const auto pos =
                std::find(targets.begin(), targets.end(), outcome.label) - targets.begin();
            result.coarse_map.groups[static_cast<std::size_t>(pos)].push_back(flat);
            ++flat;
        }
    }
    result.epsilon_achieved = 0.0;
    for (const auto& el : result.m1.elements) {
        if (!el.op.is_zero(1e-12)) {
            result.epsilon_achieved = std::max(result.epsilon_achieved, mu(el.op));
        }
    }
    return result;
}

ProtocolDecomposition decompose_from_interpolation(const Measurement& m,
                                                   const InterpolationResult& result,
                                                   const ProductBasis& basis,
                                                   const ProgressFunction& mu, double mu0,
                                                   const Tolerances& tol) {
    tol.validate();
    if (mu0 <= 0.0) {
        throw DomainError("mu0 must be strictly positive");
    }
    if (!validate(m, tol).pass) {
        throw DomainError("decomposition target must be a valid measurement");
    }
    if (!is_von_neumann(m)) {
        throw DomainError("decomposition target must be a von Neumann measurement");
    }
    if (!(result.epsilon_achieved >= 0.0) || result.epsilon_achieved >= mu0) {
        throw EpsilonRangeError("interpolation progress " +
                                    std::to_string(result.epsilon_achieved) +
                                    " must stay below the threshold " + std::to_string(mu0),
                                0.0, mu0);
    }
    const InterpolationReport report = verify_interpolation(m, result, mu, tol);
    if (!report.pass) {
        throw DomainError("interpolation does not verify against the target measurement");
    }

    Measurement first;
    first.dim = result.m1.dim;
    first.d_A = basis.d_A;
    first.d_B = basis.d_B;
    for (const auto& el : result.m1.elements) {
        if (!el.op.is_zero(1e-12)) {
            first.elements.push_back(el);
        }
    }
    if (first.elements.empty()) {
        throw DomainError("first stage has no nonzero elements");
    }

    ProtocolDecomposition decomposition;
    decomposition.extraction = extract_local_nondisturbing(first, basis, mu, mu0, tol);
    if (decomposition.extraction.trivial) {
        throw TrivialExtractionError(
            "every first-stage factor is proportional to the identity; the measurement "
            "admits no nontrivial local first stage");
    }

    decomposition.m1_protocol.d_A = basis.d_A;
    decomposition.m1_protocol.d_B = basis.d_B;
    decomposition.m1_protocol.root.party = decomposition.extraction.party;
    const Measurement& local = decomposition.extraction.local_measurement;
    for (std::size_t eta = 0; eta < local.size(); ++eta) {
        decomposition.m1_protocol.root.kraus.push_back(local.element(eta).mat());
        ProtocolNode leaf;
        leaf.label = "L" + std::to_string(eta);
        decomposition.m1_protocol.root.children.push_back(std::move(leaf));
        decomposition.m2.emplace("L" + std::to_string(eta), m);
    }

    const CompletedChain completed =
        complete_with_family(decomposition.m1_protocol, decomposition.m2, tol);
    const MeasurementDistance distance = measurement_distance(completed.chain, m);
    if (!distance.same_labels || distance.max_residual > tol.completeness) {
        throw DomainError("completed chain fails to reproduce the measurement (residual " +
                          std::to_string(distance.max_residual) + ")");
    }
    decomposition.completion_residual = distance.max_residual;
    return decomposition;
}

namespace {

ProtocolNode random_node(Eigen::Index d_A, Eigen::Index d_B, int remaining,
                         std::mt19937& rng, std::size_t& counter) {
    if (remaining == 0) {
        ProtocolNode leaf;
        leaf.label = "w" + std::to_string(counter++);
        return leaf;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    ProtocolNode node;
    node.party = rng() % 2 == 0 ? Party::alice : Party::bob;
    const Eigen::Index d = node.party == Party::alice ? d_A : d_B;
    const Eigen::Index branches = 2 + static_cast<Eigen::Index>(rng() % 2);
    CMatrix g(branches * d, branches * d);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index col = 0; col < g.cols(); ++col) {
            g(r, col) = Complex(gauss(rng), gauss(rng));
        }
    }
    const Eigen::HouseholderQR<CMatrix> qr(g);
    const CMatrix isometry =
        qr.householderQ() * CMatrix::Identity(branches * d, d);
    for (Eigen::Index k = 0; k < branches; ++k) {
        node.kraus.push_back(isometry.block(k * d, 0, d, d));
        node.children.push_back(random_node(d_A, d_B, remaining - 1, rng, counter));
    }
    return node;
}

}  // namespace

ProtocolTree random_tree(Eigen::Index d_A, Eigen::Index d_B, int depth, unsigned seed) {
    if (d_A <= 0 || d_B <= 0 || depth < 0) {
        throw DomainError("random_tree needs positive dimensions and non-negative depth");
    }
    std::mt19937 rng(seed);
    std::size_t counter = 0;
    ProtocolTree t;
    t.d_A = d_A;
    t.d_B = d_B;
    t.root = random_node(d_A, d_B, depth, rng, counter);
    return t;
}

}  // namespace mint
