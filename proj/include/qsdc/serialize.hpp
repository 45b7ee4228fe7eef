// JSON serialization of session transcripts and verdicts. The transcript
// document is the contract consumed by the harness and external analysis
// scripts; field order and formatting are deterministic.
#pragma once

#include <string>

#include <json.hpp>

#include "qsdc/protocol.hpp"

namespace qsdc {

using Json = nlohmann::ordered_json;

inline Json to_json(const SessionConfig& c) {
    return Json{{"seed", c.seed},
                {"n_message_bits", c.n_message_bits},
                {"test_pairs", c.test_pairs},
                {"noise_p", c.noise_p},
                {"adversary", adversary_name(c.adversary)},
                {"mismatch_threshold", c.mismatch_threshold},
                {"attack_probability", c.attack_probability}};
}

inline Json to_json(const ChannelVerdict& v) {
    return Json{{"accept", v.accept},
                {"z_compared", v.z_compared},
                {"z_mismatch", v.z_mismatch},
                {"x_compared", v.x_compared},
                {"x_mismatch", v.x_mismatch},
                {"insufficient_statistics", v.insufficient_statistics}};
}

inline Json to_json(const ClassicalMsg& msg) {
    return std::visit(
        [](const auto& m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BellOutcomeMsg>) {
                const int ij = bell_label(m.ij);
                return Json{{"type", "bell_outcome"},
                            {"index", m.index},
                            {"ij", std::string{char('0' + (ij >> 1)), char('0' + (ij & 1))}}};
            } else if constexpr (std::is_same_v<T, BasisRevealMsg>) {
                return Json{{"type", "basis_reveal"}, {"pair", m.pair}, {"basis", basis_name(m.basis)}};
            } else if constexpr (std::is_same_v<T, OutcomeRevealMsg>) {
                return Json{{"type", "outcome_reveal"}, {"pair", m.pair}, {"bit", m.bit}};
            } else {
                return Json{{"type", "verdict"}, {"accept", m.accept}};
            }
        },
        msg);
}

inline Json to_json(const SessionTranscript& t) {
    Json j{{"config", to_json(t.config)},
           {"rng_algorithm", t.rng_algorithm},
           {"verdict", to_json(t.verdict)},
           {"sent_bits", t.sent_bits},
           {"received_bits", t.received_bits}};
    if (t.eve_bits) j["eve_bits"] = *t.eve_bits;
    Json log = Json::array();
    for (const ClassicalMsg& m : t.classical_log) log.push_back(to_json(m));
    j["classical_log"] = std::move(log);
    return j;
}

inline std::string transcript_json_text(const SessionTranscript& t) {
    return to_json(t).dump(2) + "\n";
}

} // namespace qsdc
