#pragma once

// JSON and CSV encodings of the library's value types. JSON objects keep
// insertion order and doubles round-trip, so identical inputs serialize to
// identical bytes; reports never embed timestamps.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "carleman/conditions.hpp"
#include "carleman/experiments.hpp"
#include "carleman/matrix.hpp"
#include "carleman/quotient.hpp"
#include "carleman/sequence.hpp"

namespace carleman {

inline Json to_json(const DefiningSequence& m) {
    return Json{{"label", m.label}, {"k_max", m.k_max()}, {"log_m", m.log_m}};
}

inline DefiningSequence sequence_from_json(const Json& j) {
    DefiningSequence m;
    m.label = j.at("label").get<std::string>();
    m.log_m = j.at("log_m").get<std::vector<double>>();
    if (j.at("k_max").get<std::size_t>() != m.k_max())
        throw std::domain_error("sequence: k_max does not match log_m length");
    detail::validate_sequence(m);
    return m;
}

inline Json to_json(const AssociatedFunction& f) {
    Json sat = Json::array();
    for (bool b : f.saturated) sat.push_back(b);
    return Json{{"u", f.u_grid}, {"log_t", f.log_t}, {"saturated", sat}};
}

inline Json to_json(const ConditionReport& r) {
    return Json{{"condition", to_string(r.condition)},
                {"verdict", to_string(r.verdict)},
                {"witness", r.witness}};
}

inline Json to_json(const Expansion& e) {
    Json terms = Json::array();
    for (const auto& t : e.terms) terms.push_back(Json{{"sign", t.sign}, {"blocks", t.blocks}});
    return Json{{"word", Json{{"letters", e.word.letters}, {"d", e.word.d}}},
                {"terms", terms}};
}

inline Json to_json(const FiniteMatrix& a) {
    Json entries = Json::array();
    for (const auto& z : a.data()) entries.push_back(Json::array({z.real(), z.imag()}));
    return Json{{"d", a.dim()}, {"W", a.window()}, {"entries", entries}};
}

inline FiniteMatrix matrix_from_json(const Json& j) {
    const int d = j.at("d").get<int>();
    const int w = j.at("W").get<int>();
    FiniteMatrix a(d, w);
    const auto& entries = j.at("entries");
    if (entries.size() != a.data().size())
        throw std::domain_error("matrix: entry count does not match (2W+1)^d squared");
    for (std::size_t i = 0; i < a.data().size(); ++i)
        a.data()[i] = Complex(entries[i][0].get<double>(), entries[i][1].get<double>());
    return a;
}

inline Json to_json(const FitResult& f) {
    return Json{{"c_prime", f.c_prime},
                {"gamma_prime", f.gamma_prime},
                {"r_squared", f.r_squared},
                {"n_used", f.n_used}};
}

inline Json to_json(const DecayProfile& p) {
    return Json{{"offsets", p.offsets},
                {"values", p.values},
                {"measured_halfwidth", p.measured_halfwidth}};
}

inline Json to_json(const SandwichReport& r) {
    return Json{{"weighted_c1", r.weighted_c1},
                {"carleman", r.carleman},
                {"weighted_cinf", r.weighted_cinf},
                {"first_inclusion_ok", r.first_inclusion_ok},
                {"measured_c", r.measured_c},
                {"conclusive", r.conclusive}};
}

inline Json to_json(const WitnessReport& r) {
    Json nodes = Json::array();
    for (const auto& n : r.nodes)
        nodes.push_back(Json{{"j", n.j},
                             {"u_slope", n.u_slope},
                             {"u", n.u},
                             {"node_log_error", n.node_log_error}});
    return Json{{"applicable", r.applicable},
                {"nodes", nodes},
                {"reduced_j", r.reduced_j},
                {"truncated", r.truncated},
                {"delta_norms", r.delta_norms},
                {"c_prime", r.c_prime},
                {"symbol_derivatives", r.symbol_derivatives},
                {"k_lower_estimate", r.k_lower_estimate}};
}

inline Json to_json(const DemkoReport& r) {
    return Json{{"lambda", r.lambda},
                {"b_norm_estimate", r.b_norm_estimate},
                {"cond_one", r.cond_one},
                {"input_fit", to_json(r.input_fit)},
                {"inverse_fit", to_json(r.inverse_fit)}};
}

/// CSV with columns offset,value; %.17g keeps doubles round-trippable.
inline void write_profile_csv(std::ostream& os, const DecayProfile& p) {
    os << "offset,value\n";
    char buf[64];
    for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.values[i]);
        os << p.offsets[i] << ',' << buf << '\n';
    }
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

} // namespace carleman
