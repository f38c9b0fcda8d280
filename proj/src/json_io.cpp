#include "mint/json_io.hpp"

#include <fstream>

#include "mint/errors.hpp"

namespace mint::io {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw IoError("complex numbers must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
    return out;
}

CVector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw IoError("vector must be a non-empty array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
    return v;
}

const json& field(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw IoError(std::string("missing field '") + key + "'");
    }
    return doc.at(key);
}

Eigen::Index int_field(const json& doc, const char* key) {
    const json& j = field(doc, key);
    if (!j.is_number_integer()) throw IoError(std::string("field '") + key + "' must be an integer");
    return j.get<Eigen::Index>();
}

std::string string_field(const json& doc, const char* key) {
    const json& j = field(doc, key);
    if (!j.is_string()) throw IoError(std::string("field '") + key + "' must be a string");
    return j.get<std::string>();
}

/// Rethrows construction failures as document errors so the caller can
/// distinguish bad files (IoError) from bad mathematics (other errors).
template <typename Fn>
auto as_document(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw IoError(std::string("invalid ") + what + " document: " + e.what());
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid ") + what + " document: " + e.what());
    }
}

json node_to_json(const ProtocolNode& node) {
    if (node.is_leaf()) return json{{"label", node.label}};
    json kraus = json::array();
    for (const auto& k : node.kraus) kraus.push_back(matrix_to_json(k));
    json children = json::array();
    for (const auto& c : node.children) children.push_back(node_to_json(c));
    return json{{"party", node.party == Party::alice ? "A" : "B"},
                {"kraus", std::move(kraus)},
                {"children", std::move(children)}};
}

ProtocolNode node_from_json(const json& j) {
    if (!j.is_object()) throw IoError("protocol nodes must be objects");
    ProtocolNode node;
    if (j.contains("label")) {
        if (j.contains("kraus") || j.contains("children")) {
            throw IoError("a leaf carries only a label");
        }
        node.label = string_field(j, "label");
        return node;
    }
    const std::string party = string_field(j, "party");
    if (party == "A") {
        node.party = Party::alice;
    } else if (party == "B") {
        node.party = Party::bob;
    } else {
        throw IoError("party must be \"A\" or \"B\"");
    }
    for (const auto& k : field(j, "kraus")) node.kraus.push_back(matrix_from_json(k));
    for (const auto& c : field(j, "children")) node.children.push_back(node_from_json(c));
    if (node.kraus.empty() || node.kraus.size() != node.children.size()) {
        throw IoError("internal nodes need one Kraus operator per child");
    }
    return node;
}

json coarse_map_to_json(const CoarseGrainMap& map) {
    json groups = json::array();
    for (const auto& g : map.groups) groups.push_back(g);
    return json{{"groups", std::move(groups)}, {"labels", map.labels}};
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& doc) {
    if (!doc.is_array() || doc.empty()) throw IoError("matrix must be a non-empty array of rows");
    const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
    if (cols == 0) throw IoError("matrix rows must be non-empty arrays");
    CMatrix m(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < doc.size(); ++r) {
        if (!doc[r].is_array() || doc[r].size() != cols) {
            throw IoError("matrix rows have unequal length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(doc[r][c]);
        }
    }
    return m;
}

json to_json(const Measurement& m) {
    json elements = json::array();
    for (const auto& el : m.elements) {
        elements.push_back(json{{"label", el.label}, {"matrix", matrix_to_json(el.op.mat())}});
    }
    json doc{{"dim", m.dim}, {"elements", std::move(elements)}};
    if (m.d_A > 0) doc["d_A"] = m.d_A;
    if (m.d_B > 0) doc["d_B"] = m.d_B;
    return doc;
}

json to_json(const ProductBasis& basis) {
    json vectors = json::array();
    for (const auto& v : basis.vectors) {
        vectors.push_back(json{{"label", v.label},
                               {"alice", vector_to_json(v.alice)},
                               {"bob", vector_to_json(v.bob)}});
    }
    return json{{"d_A", basis.d_A}, {"d_B", basis.d_B}, {"vectors", std::move(vectors)}};
}

json to_json(const ProtocolTree& t) {
    return json{{"d_A", t.d_A}, {"d_B", t.d_B}, {"root", node_to_json(t.root)}};
}

json to_json(const CompletionFamily& family) {
    json doc = json::object();
    for (const auto& [leaf, m] : family) doc[leaf] = to_json(m);
    return doc;
}

json to_json(const InterpolationResult& result) {
    json m2 = json::array();
    for (const auto& m : result.m2_list) m2.push_back(to_json(m));
    return json{{"m1", to_json(result.m1)},
                {"m2_list", std::move(m2)},
                {"coarse_map", coarse_map_to_json(result.coarse_map)},
                {"c_constants", result.c_constants},
                {"epsilon_achieved", result.epsilon_achieved}};
}

json to_json(const InterpolationReport& report) {
    return json{{"pass", report.pass},
                {"stages_valid", report.stages_valid},
                {"completeness_worst", report.completeness_worst},
                {"max_stage_mu", report.max_stage_mu},
                {"mu_residual", report.mu_residual},
                {"composition_residual", report.composition_residual},
                {"proportionality_residual", report.proportionality_residual},
                {"target_is_von_neumann", report.target_is_von_neumann}};
}

Measurement measurement_from_json(const json& doc) {
    return as_document("measurement", [&] {
        Measurement m;
        m.dim = int_field(doc, "dim");
        if (m.dim <= 0) throw IoError("dim must be positive");
        if (doc.contains("d_A")) m.d_A = int_field(doc, "d_A");
        if (doc.contains("d_B")) m.d_B = int_field(doc, "d_B");
        const Tolerances tol;
        for (const auto& el : field(doc, "elements")) {
            const CMatrix mat = matrix_from_json(field(el, "matrix"));
            if (mat.rows() != m.dim || mat.cols() != m.dim) {
                throw IoError("element matrix does not match dim");
            }
            m.elements.push_back({string_field(el, "label"), HermitianOperator(mat, tol)});
        }
        if (m.elements.empty()) throw IoError("a measurement needs at least one element");
        return m;
    });
}

ProductBasis basis_from_json(const json& doc) {
    return as_document("basis", [&] {
        ProductBasis basis;
        basis.d_A = int_field(doc, "d_A");
        basis.d_B = int_field(doc, "d_B");
        if (basis.d_A <= 0 || basis.d_B <= 0) throw IoError("basis dimensions must be positive");
        for (const auto& v : field(doc, "vectors")) {
            ProductVector pv{string_field(v, "label"), vector_from_json(field(v, "alice")),
                             vector_from_json(field(v, "bob"))};
            if (pv.alice.size() != basis.d_A || pv.bob.size() != basis.d_B) {
                throw IoError("basis vector does not match the declared dimensions");
            }
            basis.vectors.push_back(std::move(pv));
        }
        if (basis.vectors.empty()) throw IoError("a basis needs at least one vector");
        return basis;
    });
}

ProtocolTree tree_from_json(const json& doc) {
    return as_document("protocol", [&] {
        ProtocolTree t;
        t.d_A = int_field(doc, "d_A");
        t.d_B = int_field(doc, "d_B");
        if (t.d_A <= 0 || t.d_B <= 0) throw IoError("protocol dimensions must be positive");
        t.root = node_from_json(field(doc, "root"));
        return t;
    });
}

CompletionFamily family_from_json(const json& doc) {
    return as_document("completion family", [&] {
        if (!doc.is_object() || doc.empty()) {
            throw IoError("a completion family maps leaf labels to measurements");
        }
        CompletionFamily family;
        for (const auto& [leaf, m] : doc.items()) family[leaf] = measurement_from_json(m);
        return family;
    });
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace mint::io
