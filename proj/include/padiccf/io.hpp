#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "padiccf/metrics.hpp"
#include "padiccf/moebius.hpp"
#include "padiccf/stream.hpp"

namespace padiccf {

// Insertion-ordered documents keep serialization byte-stable run to run.
using Json = nlohmann::ordered_json;

// Numerator and denominator travel as decimal strings; JSON numbers would
// silently lose precision past 2^53.
inline Json json_of(const Rational& q) {
    return Json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

namespace detail {

inline Json json_integer(const Integer& n) {
    if (n.fits_slong_p()) return Json(n.get_si());
    return Json(n.get_str());
}

}  // namespace detail

inline Json json_of(const ExpansionResult& r) {
    Json j;
    j["p"] = detail::json_integer(r.p);
    j["algo"] = name_of(r.algo);
    if (r.branch) j["branch"] = detail::json_integer(*r.branch);
    Json terms = Json::array();
    for (const Rational& t : r.terms) terms.push_back(json_of(t));
    j["terms"] = std::move(terms);
    j["terminated"] = r.terminated;
    if (r.nonterminating_cycle) j["nonterminating_cycle"] = *r.nonterminating_cycle;
    return j;
}

inline Json json_of(const EngineEvent& e) {
    return Json{{"type", name_of(e.kind)}, {"index", e.index}, {"quotient", json_of(e.quotient)}};
}

inline Json events_json(const RunTrace& t) {
    Json events = Json::array();
    for (const EngineEvent& e : t.events) events.push_back(json_of(e));
    return events;
}

inline Json trace_json(const RunTrace& t, const Integer& p, Algorithm algo) {
    Json j;
    j["p"] = detail::json_integer(p);
    j["algo"] = name_of(algo);
    j["status"] = name_of(t.status);
    j["inputs_consumed"] = t.inputs_consumed;
    j["outputs_emitted"] = t.outputs_emitted;
    j["events"] = events_json(t);
    return j;
}

// One plotted point of an input-against-output staircase.
struct StaircasePoint {
    size_t trial = 0;
    size_t output_index = 0;
    size_t input_index = 0;  // inputs consumed when the output appeared
};

struct BilinearStaircasePoint {
    size_t trial = 0;
    size_t output_index = 0;
    size_t alpha_inputs = 0;
    size_t beta_inputs = 0;
};

inline void append_staircase(std::vector<StaircasePoint>& out, size_t trial,
                             const RunTrace& t) {
    size_t inputs = 0;
    for (const EngineEvent& e : t.events) {
        switch (e.kind) {
            case EngineEvent::Kind::ConsumedInput:
            case EngineEvent::Kind::ConsumedAlphaInput:
            case EngineEvent::Kind::ConsumedBetaInput: ++inputs; break;
            case EngineEvent::Kind::EmittedOutput:
                out.push_back({trial, e.index, inputs});
                break;
            default: break;
        }
    }
}

inline void append_bilinear_staircase(std::vector<BilinearStaircasePoint>& out, size_t trial,
                                      const RunTrace& t) {
    size_t a = 0, b = 0;
    for (const EngineEvent& e : t.events) {
        switch (e.kind) {
            // A collapse run keeps consuming one stream under its own tag,
            // so the split stays faithful to the physical inputs.
            case EngineEvent::Kind::ConsumedAlphaInput: ++a; break;
            case EngineEvent::Kind::ConsumedBetaInput: ++b; break;
            case EngineEvent::Kind::EmittedOutput:
                out.push_back({trial, e.index, a, b});
                break;
            default: break;
        }
    }
}

inline void write_staircase_csv(std::ostream& os, const std::vector<StaircasePoint>& rows) {
    os << "trial,output_index,input_index\n";
    for (const StaircasePoint& r : rows)
        os << r.trial << ',' << r.output_index << ',' << r.input_index << '\n';
}

inline void write_bilinear_staircase_csv(std::ostream& os,
                                         const std::vector<BilinearStaircasePoint>& rows) {
    os << "trial,output_index,alpha_inputs,beta_inputs\n";
    for (const BilinearStaircasePoint& r : rows)
        os << r.trial << ',' << r.output_index << ',' << r.alpha_inputs << ',' << r.beta_inputs
           << '\n';
}

// Exact fractions in the value columns; the consumer decides how to round.
inline void write_frequency_csv(std::ostream& os, const std::vector<FrequencyReport>& reports) {
    os << "target,k,expected,observed,samples,positions\n";
    for (const FrequencyReport& r : reports)
        os << r.target << ',' << r.k << ',' << to_string(r.expected) << ','
           << to_string(r.observed()) << ',' << r.samples << ',' << r.positions << '\n';
}

}  // namespace padiccf
