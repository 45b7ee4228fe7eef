// Leakage aggregation over repeated session transcripts.
#pragma once

#include <span>
#include <stdexcept>

#include "qsdc/protocol.hpp"

namespace qsdc {

// Aggregates Eve/Alice bit accuracies and the empirical detection
// probability over transcripts sharing a config up to seed.
inline LeakageReport leakage_report(std::span<const SessionTranscript> transcripts) {
    if (transcripts.empty()) throw std::invalid_argument("leakage_report: no transcripts");
    LeakageReport r;
    long rejected = 0;
    long eve_correct = 0, alice_correct = 0;
    for (const SessionTranscript& t : transcripts) {
        r.compared_rounds += t.verdict.z_compared + t.verdict.x_compared;
        if (!t.verdict.accept) {
            ++rejected;
            continue;
        }
        r.message_bits += static_cast<long>(t.sent_bits.size());
        for (std::size_t i = 0; i < t.sent_bits.size(); ++i) {
            if (t.received_bits[i] == t.sent_bits[i]) ++alice_correct;
            if (t.eve_bits && (*t.eve_bits)[i] != '?') {
                ++r.eve_claimed_bits;
                if ((*t.eve_bits)[i] == t.sent_bits[i]) ++eve_correct;
            }
        }
    }
    r.detection_probability = double(rejected) / double(transcripts.size());
    r.alice_bit_accuracy = r.message_bits ? double(alice_correct) / double(r.message_bits) : 0.0;
    r.eve_bit_accuracy = r.eve_claimed_bits ? double(eve_correct) / double(r.eve_claimed_bits) : 0.0;
    return r;
}

} // namespace qsdc
