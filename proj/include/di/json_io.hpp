#pragma once

// JSON input parsing and report serialization shared by the command-line
// tool and the integration tests. Reports use ordered JSON throughout so
// that a fixed input, seed, and engine version always produce the same
// bytes.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "di/cycles.hpp"
#include "di/graded.hpp"

namespace di {

using Json = nlohmann::ordered_json;

inline constexpr const char* engine_version = "0.1.0";

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Serialization of core values.

inline Json to_json(const Polynomial& p) { return p.str(); }

inline Json to_json(const PolyMatrix& m) {
    Json rows = Json::array();
    for (size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const std::vector<Coeff>& v) {
    Json out = Json::array();
    for (auto& c : v) out.push_back(c.str());
    return out;
}

// ---------------------------------------------------------------------------
// Problem files.

struct FieldSpec {
    long characteristic = 0;
};

inline FieldSpec parse_field_flag(const std::string& text) {
    if (text == "qq" || text.empty()) return {0};
    if (text.rfind("fp:", 0) == 0) {
        long p = 0;
        size_t used = 0;
        try {
            p = std::stol(text.substr(3), &used);
        } catch (const std::exception&) {
            throw InputError("field: '" + text.substr(3) + "' is not a prime");
        }
        if (used != text.size() - 3 || p < 2)
            throw InputError("field: '" + text.substr(3) + "' is not a prime");
        return {p};
    }
    throw InputError("field: expected 'qq' or 'fp:<prime>', got '" + text + "'");
}

inline OrderKind parse_order_flag(const std::string& text) {
    if (text == "degrevlex" || text.empty()) return OrderKind::degrevlex;
    if (text == "lex") return OrderKind::lex;
    if (text == "deglex") return OrderKind::deglex;
    throw InputError("order: expected degrevlex, lex, or deglex");
}

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw InputError("unknown field '" + it.key() + "' in " + where);
    }
}

// One linear form over the input coordinates, as a rational row.
inline QRow linear_row(const Polynomial& p, size_t n) {
    QRow row(n, 0);
    for (auto& t : p.terms()) {
        if (total_degree(t.first) != 1)
            throw InputError("cycle equations must be homogeneous linear forms: '" +
                             p.str() + "'");
        for (size_t v = 0; v < n; ++v)
            if (t.first[v] == 1) row[v] = t.second.rat();
    }
    return row;
}

}  // namespace detail

// A parsed pair problem: equations in user coordinates plus the options
// needed to build the adapted model.
struct PairProblem {
    int ambient = 0;
    QMat eqX, eqY;
    std::vector<std::vector<std::string>> phi;  // optional offset entries
    bool has_phi = false;
};

inline PairProblem parse_pair_problem(const Json& j) {
    detail::reject_unknown_keys(j, {"version", "kind", "ambient", "vars", "X", "Y", "phi"},
                                "problem file");
    if (!j.contains("ambient") || !j["ambient"].is_number_integer())
        throw InputError("problem file needs an integer 'ambient'");
    PairProblem prob;
    prob.ambient = j["ambient"].get<int>();
    if (prob.ambient < 0) throw InputError("'ambient' must be nonnegative");
    std::vector<std::string> vars;
    if (j.contains("vars")) {
        for (auto& v : j["vars"]) vars.push_back(v.get<std::string>());
        if (static_cast<int>(vars.size()) != prob.ambient)
            throw InputError("'vars' must list exactly 'ambient' names");
    } else {
        for (int i = 1; i <= prob.ambient; ++i) vars.push_back("u" + std::to_string(i));
    }
    RingPtr input_ring = make_ring(vars, 0);
    auto read_eqs = [&](const char* key) {
        QMat rows;
        if (!j.contains(key) || !j[key].is_array())
            throw InputError(std::string("problem file needs an array '") + key + "'");
        for (auto& text : j[key]) {
            Polynomial p = parse_poly(text.get<std::string>(), input_ring);
            rows.push_back(detail::linear_row(p, static_cast<size_t>(prob.ambient)));
        }
        return rows;
    };
    prob.eqX = read_eqs("X");
    prob.eqY = read_eqs("Y");
    if (j.contains("phi")) {
        prob.has_phi = true;
        for (auto& row : j["phi"]) {
            std::vector<std::string> r;
            for (auto& e : row) r.push_back(e.get<std::string>());
            prob.phi.push_back(std::move(r));
        }
    }
    return prob;
}

// The quantization offset of a pair problem, parsed in the adapted ring.
inline PolyMatrix parse_phi(const PairProblem& prob, const LinearCyclePair& pair) {
    size_t c = static_cast<size_t>(pair.p + pair.r);
    size_t t = static_cast<size_t>(pair.q + pair.s);
    PolyMatrix phi(pair.ring, c, t);
    if (!prob.has_phi) return phi;
    if (prob.phi.size() != c)
        throw InputError("'phi' must have one row per conormal direction");
    for (size_t i = 0; i < c; ++i) {
        if (prob.phi[i].size() != t)
            throw InputError("'phi' must have one column per tangent coordinate");
        for (size_t j = 0; j < t; ++j)
            phi.at(i, j) = parse_poly(prob.phi[i][j], pair.ring);
    }
    return phi;
}

// A diagonal-reduction problem: one cycle in the inner affine space.
struct DiagProblem {
    int ambient = 0;
    QMat eqX;
};

inline DiagProblem parse_diag_problem(const Json& j) {
    detail::reject_unknown_keys(j, {"version", "kind", "ambient", "vars", "X"},
                                "diagonal problem file");
    if (!j.contains("ambient") || !j["ambient"].is_number_integer())
        throw InputError("problem file needs an integer 'ambient'");
    DiagProblem prob;
    prob.ambient = j["ambient"].get<int>();
    if (prob.ambient < 1) throw InputError("'ambient' must be positive");
    std::vector<std::string> vars;
    if (j.contains("vars")) {
        for (auto& v : j["vars"]) vars.push_back(v.get<std::string>());
        if (static_cast<int>(vars.size()) != prob.ambient)
            throw InputError("'vars' must list exactly 'ambient' names");
    } else {
        for (int i = 1; i <= prob.ambient; ++i) vars.push_back("u" + std::to_string(i));
    }
    RingPtr input_ring = make_ring(vars, 0);
    if (!j.contains("X") || !j["X"].is_array())
        throw InputError("diagonal problem file needs an array 'X'");
    for (auto& text : j["X"]) {
        Polynomial p = parse_poly(text.get<std::string>(), input_ring);
        prob.eqX.push_back(detail::linear_row(p, static_cast<size_t>(prob.ambient)));
    }
    return prob;
}

struct GradedProblem {
    GradedBundleMap map;
};

inline GradedProblem parse_graded_problem(const Json& j, long characteristic) {
    detail::reject_unknown_keys(
        j, {"version", "kind", "proj_dim", "source_twists", "target_twists", "matrix"},
        "graded problem file");
    for (const char* key : {"proj_dim", "source_twists", "target_twists", "matrix"})
        if (!j.contains(key))
            throw InputError(std::string("graded problem file needs '") + key + "'");
    int n = j["proj_dim"].get<int>();
    RingPtr R = graded_ring(n, characteristic);
    std::vector<long> src, tgt;
    for (auto& a : j["source_twists"]) src.push_back(a.get<long>());
    for (auto& b : j["target_twists"]) tgt.push_back(b.get<long>());
    LineBundleSum A = line_bundle_sum(R, src);
    LineBundleSum B = line_bundle_sum(R, tgt);
    PolyMatrix m(R, tgt.size(), src.size());
    if (j["matrix"].size() != tgt.size())
        throw InputError("'matrix' must have one row per target twist");
    for (size_t i = 0; i < tgt.size(); ++i) {
        if (j["matrix"][i].size() != src.size())
            throw InputError("'matrix' rows must have one entry per source twist");
        for (size_t jj = 0; jj < src.size(); ++jj)
            m.at(i, jj) = parse_poly(j["matrix"][i][jj].get<std::string>(), R);
    }
    try {
        return GradedProblem{make_graded_map(A, B, std::move(m))};
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Report assembly.

inline Json report_header(const std::string& kind, const Json& inputs, uint64_t seed) {
    Json rep;
    rep["engine"] = "derived-intersect";
    rep["version"] = engine_version;
    rep["kind"] = kind;
    rep["seed"] = seed;
    rep["inputs"] = inputs;
    return rep;
}

inline Json pair_summary(const LinearCyclePair& pair) {
    Json j;
    j["ambient"] = pair.n;
    j["blocks"] = {pair.p, pair.q, pair.r, pair.s};
    j["excess_rank"] = pair.r;
    Json frame = Json::array();
    for (auto& row : pair.frame) {
        Json r = Json::array();
        for (auto& e : row) r.push_back(e.get_str());
        frame.push_back(std::move(r));
    }
    j["frame"] = frame;
    return j;
}

// Required-key validation of an emitted report, used by the schema
// round-trip tests and by the CLI before writing anything.
inline bool validate_report(const Json& rep, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (const char* key : {"engine", "version", "kind", "seed", "inputs", "verdict"})
        if (!rep.contains(key)) return fail(std::string("missing key '") + key + "'");
    if (!rep["verdict"].is_string()) return fail("'verdict' must be a string");
    std::string kind = rep["kind"].get<std::string>();
    std::vector<std::string> kinds = {"tor",   "excess", "ak",          "formality",
                                      "split", "diag",   "graded-split"};
    bool known = false;
    for (auto& k : kinds)
        if (k == kind) known = true;
    if (!known) return fail("unknown kind '" + kind + "'");
    if (!rep.contains("results") || !rep["results"].is_object())
        return fail("missing object 'results'");
    return true;
}

}  // namespace di
