#include "mint/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mint {

std::string party_name(Party p) {
    return p == Party::alice ? "alice" : "bob";
}

Party parse_party(const std::string& name) {
    if (name == "alice") {
        return Party::alice;
    }
    if (name == "bob") {
        return Party::bob;
    }
    throw DomainError("unknown party '" + name + "', expected alice or bob");
}

std::optional<std::size_t> Measurement::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (elements[i].label == label) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<CVector> ProductBasis::full_vectors() const {
    std::vector<CVector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        out.push_back(v.full());
    }
    return out;
}

std::vector<std::string> ProductBasis::labels() const {
    std::vector<std::string> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        out.push_back(v.label);
    }
    return out;
}

ValidationReport validate(const Measurement& m, const Tolerances& tol) {
    tol.validate();
    ValidationReport rep;
    rep.dims_consistent = m.dim > 0;
    for (const auto& el : m.elements) {
        if (el.op.dim() != m.dim) {
            rep.dims_consistent = false;
        }
    }
    if (m.d_A > 0 && m.d_B > 0 && m.d_A * m.d_B != m.dim) {
        rep.dims_consistent = false;
    }
    std::set<std::string> seen;
    for (const auto& el : m.elements) {
        if (!seen.insert(el.label).second) {
            rep.labels_unique = false;
        }
    }
    if (!rep.dims_consistent || m.elements.empty()) {
        rep.pass = false;
        rep.completeness_residual = 1.0;
        return rep;
    }
    bool all_psd = true;
    CMatrix sum = CMatrix::Zero(m.dim, m.dim);
    for (const auto& el : m.elements) {
        const PsdReport psd = is_psd(el.op, tol);
        rep.min_eigenvalues.push_back(psd.min_eigenvalue);
        all_psd = all_psd && psd.psd;
        sum += el.op.mat();
    }
    rep.completeness_residual = max_abs(sum - CMatrix::Identity(m.dim, m.dim));
    rep.pass = all_psd && rep.labels_unique &&
               rep.completeness_residual <= tol.completeness;
    return rep;
}

BasisReport validate(const ProductBasis& basis, const Tolerances& tol) {
    tol.validate();
    BasisReport rep;
    if (basis.d_A <= 0 || basis.d_B <= 0) {
        return rep;
    }
    const Eigen::Index dim = basis.dim();
    bool shapes_ok = true;
    for (const auto& v : basis.vectors) {
        if (v.alice.size() != basis.d_A || v.bob.size() != basis.d_B) {
            shapes_ok = false;
        }
    }
    if (!shapes_ok || basis.vectors.empty()) {
        return rep;
    }
    for (const auto& v : basis.vectors) {
        rep.worst_norm_deviation = std::max(
            {rep.worst_norm_deviation, std::abs(v.alice.norm() - 1.0),
             std::abs(v.bob.norm() - 1.0)});
    }
    const auto full = basis.full_vectors();
    for (std::size_t j = 0; j < full.size(); ++j) {
        for (std::size_t k = j + 1; k < full.size(); ++k) {
            rep.worst_overlap =
                std::max(rep.worst_overlap, std::abs(full[j].dot(full[k])));
        }
    }
    rep.complete = static_cast<Eigen::Index>(full.size()) == dim;
    rep.pass = rep.worst_overlap <= 1e-9 && rep.worst_norm_deviation <= 1e-10 &&
               rep.complete;
    return rep;
}

void require_orthonormal(const std::vector<CVector>& vectors, double tol) {
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        const double norm_dev = std::abs(vectors[j].norm() - 1.0);
        if (norm_dev > tol) {
            throw BasisError("state " + std::to_string(j) + " is not normalized", norm_dev);
        }
        for (std::size_t k = j + 1; k < vectors.size(); ++k) {
            if (vectors[j].size() != vectors[k].size()) {
                throw DimensionError("state family mixes dimensions");
            }
            const double overlap = std::abs(vectors[j].dot(vectors[k]));
            if (overlap > tol) {
                throw BasisError("states " + std::to_string(j) + " and " +
                                     std::to_string(k) + " are not orthogonal",
                                 overlap);
            }
        }
    }
}

Measurement coarse_grain(const Measurement& m, const CoarseGrainMap& map,
                         const Tolerances& tol) {
    tol.validate();
    if (map.groups.size() != map.labels.size()) {
        throw PartitionError("coarse-grain map needs one label per group");
    }
    std::vector<bool> used(m.size(), false);
    for (const auto& group : map.groups) {
        for (std::size_t idx : group) {
            if (idx >= m.size()) {
                throw PartitionError("coarse-grain index " + std::to_string(idx) +
                                     " out of range");
            }
            if (used[idx]) {
                throw PartitionError("coarse-grain index " + std::to_string(idx) +
                                     " listed twice");
            }
            used[idx] = true;
        }
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw PartitionError("coarse-grain map does not cover every outcome");
    }
    Measurement out;
    out.dim = m.dim;
    out.d_A = m.d_A;
    out.d_B = m.d_B;
    for (std::size_t g = 0; g < map.groups.size(); ++g) {
        CMatrix sum = CMatrix::Zero(m.dim, m.dim);
        for (std::size_t idx : map.groups[g]) {
            sum += m.element(idx).mat();
        }
        out.elements.push_back({map.labels[g], HermitianOperator(sum, tol)});
    }
    return out;
}

Measurement compose(const Measurement& first, const std::vector<Measurement>& second,
                    const std::optional<CoarseGrainMap>& map, const Tolerances& tol) {
    tol.validate();
    if (second.size() != first.size()) {
        throw DimensionError("compose needs one second stage per first-stage outcome");
    }
    Measurement out;
    out.dim = first.dim;
    out.d_A = first.d_A;
    out.d_B = first.d_B;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (second[i].dim != first.dim) {
            throw DimensionError("second stage " + std::to_string(i) +
                                 " acts on the wrong dimension");
        }
        const HermitianOperator root = matrix_sqrt(first.element(i), tol);
        for (std::size_t j = 0; j < second[i].size(); ++j) {
            const CMatrix el = root.mat() * second[i].element(j).mat() * root.mat();
            out.elements.push_back(
                {first.label(i) + "/" + second[i].label(j), HermitianOperator(el, tol)});
        }
    }
    if (map) {
        return coarse_grain(out, *map, tol);
    }
    return out;
}

Measurement von_neumann(const std::vector<CVector>& basis,
                        const std::vector<std::string>& labels, const Tolerances& tol) {
    tol.validate();
    if (basis.empty()) {
        throw DomainError("von_neumann needs at least one basis vector");
    }
    const Eigen::Index dim = basis.front().size();
    if (static_cast<Eigen::Index>(basis.size()) != dim) {
        throw BasisError("von_neumann needs a complete basis", 0.0);
    }
    require_orthonormal(basis);
    if (!labels.empty() && labels.size() != basis.size()) {
        throw DomainError("von_neumann labels must match the basis size");
    }
    Measurement out;
    out.dim = dim;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const CMatrix proj = basis[i] * basis[i].adjoint();
        const std::string label = labels.empty() ? std::to_string(i) : labels[i];
        out.elements.push_back({label, HermitianOperator(proj, tol)});
    }
    return out;
}

Measurement von_neumann(const ProductBasis& basis, const Tolerances& tol) {
    Measurement out = von_neumann(basis.full_vectors(), basis.labels(), tol);
    out.d_A = basis.d_A;
    out.d_B = basis.d_B;
    return out;
}

bool is_trivial(const Measurement& m) {
    const HermitianOperator id = HermitianOperator::identity(m.dim);
    return std::all_of(m.elements.begin(), m.elements.end(), [&](const LabeledElement& el) {
        return proportional_to(el.op, id).proportional;
    });
}

std::vector<double> outcome_probabilities(const Measurement& m, const HermitianOperator& rho,
                                          const Tolerances& tol) {
    tol.validate();
    if (rho.dim() != m.dim) {
        throw DimensionError("state dimension does not match the measurement");
    }
    if (!is_psd(rho, tol).psd || std::abs(rho.trace() - 1.0) > 1e-9) {
        throw DomainError("outcome_probabilities needs a unit-trace PSD state");
    }
    std::vector<double> probs;
    probs.reserve(m.size());
    for (const auto& el : m.elements) {
        probs.push_back((el.op.mat() * rho.mat()).trace().real());
    }
    return probs;
}

MeasurementDistance measurement_distance(const Measurement& a, const Measurement& b) {
    MeasurementDistance dist;
    if (a.size() != b.size() || a.dim != b.dim) {
        dist.max_residual = 1.0;
        return dist;
    }
    dist.same_labels = true;
    for (const auto& el : a.elements) {
        const auto idx = b.index_of(el.label);
        if (!idx) {
            dist.same_labels = false;
            dist.max_residual = 1.0;
            return dist;
        }
        dist.max_residual = std::max(
            dist.max_residual, max_abs(el.op.mat() - b.element(*idx).mat()));
    }
    return dist;
}

}  // namespace mint
