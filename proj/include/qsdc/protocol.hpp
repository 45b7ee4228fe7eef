// The two-phase protocol: EPR distribution with channel verification, then
// message transmission by teleportation with public Bell-outcome broadcast
// and Alice-side correction and decoding.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qsdc/adversary.hpp"
#include "qsdc/qcore.hpp"
#include "qsdc/rng.hpp"

namespace qsdc {

struct SessionConfig {
    std::uint64_t seed = 1;
    int n_message_bits = 0;
    int test_pairs = 0;
    double noise_p = 0.0; // per-half Pauli-flip probability on B in transit
    Adversary adversary = Adversary::None;
    double mismatch_threshold = 0.05;
    double attack_probability = 1.0; // fraction of pairs Eve attacks

    void validate() const {
        if (n_message_bits < 0 || test_pairs < 0)
            throw std::invalid_argument("config: counts must be nonnegative");
        if (noise_p < 0.0 || noise_p > 1.0)
            throw std::invalid_argument("config: noise_p must be in [0,1]");
        if (mismatch_threshold < 0.0 || mismatch_threshold >= 0.5)
            throw std::invalid_argument("config: mismatch_threshold must be in [0, 0.5)");
        if (attack_probability < 0.0 || attack_probability > 1.0)
            throw std::invalid_argument("config: attack_probability must be in [0,1]");
    }
};

// Messages on the public classical channel, in broadcast order. Reveal
// messages for the same pair appear Alice first, then Bob.
struct BellOutcomeMsg {
    int index; // message position
    BellKind ij;
};
struct BasisRevealMsg {
    int pair;
    MeasBasis basis;
};
struct OutcomeRevealMsg {
    int pair;
    int bit;
};
struct VerdictMsg {
    bool accept;
};
using ClassicalMsg = std::variant<BellOutcomeMsg, BasisRevealMsg, OutcomeRevealMsg, VerdictMsg>;

struct ChannelVerdict {
    bool accept = false;
    long z_compared = 0;
    long z_mismatch = 0;
    long x_compared = 0;
    long x_mismatch = 0;
    bool insufficient_statistics = false;

    double z_rate() const { return z_compared ? double(z_mismatch) / double(z_compared) : 0.0; }
    double x_rate() const { return x_compared ? double(x_mismatch) / double(x_compared) : 0.0; }
};

struct SessionTranscript {
    SessionConfig config;
    std::string rng_algorithm;
    ChannelVerdict verdict;
    std::string sent_bits;                 // "0"/"1" characters
    std::string received_bits;
    std::optional<std::string> eve_bits;   // '?' marks a no-claim position
    std::vector<ClassicalMsg> classical_log;
};

// --- Distribution ---

// Distributes n |Phi+>_AB pairs. Per pair: the adversary (if any, and if the
// attack-probability draw fires) acts while B is in transit, then channel
// noise applies an X and a Z flip to B independently with probability
// noise_p each.
inline std::vector<PairInstance> distribute_pairs(int n, Adversary adversary, double noise_p,
                                                  Rng& rng, double attack_probability = 1.0) {
    if (n < 0) throw std::invalid_argument("distribute_pairs: n must be nonnegative");
    std::vector<PairInstance> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        PairInstance pair{make_bell(BellKind::PhiPlus, 'A', 'B'), {}};
        if (adversary != Adversary::None && rng.bernoulli(attack_probability)) {
            switch (adversary) {
                case Adversary::Swap: pair = swap_attack_distribute(rng); break;
                case Adversary::Ghz: pair = ghz_attack_distribute(); break;
                case Adversary::InterceptResend: pair = intercept_resend_distribute(rng); break;
                default: break;
            }
        }
        if (noise_p > 0.0) {
            const bool flip_x = rng.bernoulli(noise_p);
            const bool flip_z = rng.bernoulli(noise_p);
            if (flip_x) pair.state = apply_single(pair.state, 'B', pauli_x());
            if (flip_z) pair.state = apply_single(pair.state, 'B', pauli_z());
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

// --- Channel verification ---

namespace detail {

inline void tally(ChannelVerdict& v, MeasBasis basis, int a, int b) {
    if (basis == MeasBasis::Z) {
        ++v.z_compared;
        if (a != b) ++v.z_mismatch;
    } else {
        ++v.x_compared;
        if (a != b) ++v.x_mismatch;
    }
}

inline void finish_verdict(ChannelVerdict& v, double threshold, bool require_both_bases) {
    if (require_both_bases && (v.z_compared == 0 || v.x_compared == 0)) {
        v.accept = false;
        v.insufficient_statistics = true;
        return;
    }
    v.accept = v.z_rate() <= threshold && v.x_rate() <= threshold;
}

} // namespace detail

// Random-basis correlation test. Each party independently picks Z or X per
// pair; both measure, then bases are revealed and only same-basis rounds are
// compared. A mismatch on any compared round of a perfect channel indicates
// tampering. Zero compared rounds in either basis (with pairs present) is
// reported as a reject with the insufficient-statistics flag.
// Reveal messages are appended to `log` when given; pair ids start at
// `pair_id_offset`.
inline ChannelVerdict verify_channel(std::span<PairInstance> pairs, double threshold, Rng& rng,
                                     std::vector<ClassicalMsg>* log = nullptr,
                                     int pair_id_offset = 0) {
    ChannelVerdict verdict;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const int id = pair_id_offset + static_cast<int>(i);
        const MeasBasis basis_a = rng.next_bit() ? MeasBasis::X : MeasBasis::Z;
        const MeasBasis basis_b = rng.next_bit() ? MeasBasis::X : MeasBasis::Z;
        SingleMeasurement ma = measure_single(pairs[i].state, 'A', basis_a, rng);
        SingleMeasurement mb = measure_single(ma.state, 'B', basis_b, rng);
        pairs[i].state = std::move(mb.state);
        if (log) {
            log->push_back(BasisRevealMsg{id, basis_a});
            log->push_back(BasisRevealMsg{id, basis_b});
        }
        if (basis_a != basis_b) continue;
        if (log) {
            log->push_back(OutcomeRevealMsg{id, ma.outcome});
            log->push_back(OutcomeRevealMsg{id, mb.outcome});
        }
        detail::tally(verdict, basis_a, ma.outcome, mb.outcome);
    }
    detail::finish_verdict(verdict, threshold, !pairs.empty());
    return verdict;
}

// Verification variant where both parties measure the same per-round basis,
// so every pair yields one compared round. Used by the detection-curve
// experiments, where the variable of interest is the compared-round count.
inline ChannelVerdict matched_basis_verify(std::span<PairInstance> pairs, double threshold,
                                           Rng& rng, std::optional<MeasBasis> forced_basis = {}) {
    ChannelVerdict verdict;
    for (PairInstance& pair : pairs) {
        const MeasBasis basis =
            forced_basis ? *forced_basis : (rng.next_bit() ? MeasBasis::X : MeasBasis::Z);
        SingleMeasurement ma = measure_single(pair.state, 'A', basis, rng);
        SingleMeasurement mb = measure_single(ma.state, 'B', basis, rng);
        pair.state = std::move(mb.state);
        detail::tally(verdict, basis, ma.outcome, mb.outcome);
    }
    detail::finish_verdict(verdict, threshold, false);
    return verdict;
}

// --- Bell-inequality test ---

struct ChshEstimate {
    double s = 0.0;
    double half_width = 0.0; // 4-sigma normal-approximation half width
    bool low_confidence = false;
    long rounds_per_correlator = 0;
};

inline constexpr std::array<std::pair<double, double>, 4> chsh_angles() {
    // a = 0, a' = pi/2, b = pi/4, b' = -pi/4; S = E(a,b)+E(a,b')+E(a',b)-E(a',b')
    constexpr double pi = 3.14159265358979323846;
    return {{{0.0, pi / 4}, {0.0, -pi / 4}, {pi / 2, pi / 4}, {pi / 2, -pi / 4}}};
}

inline constexpr std::array<double, 4> chsh_signs() { return {1.0, 1.0, 1.0, -1.0}; }

// Exact expectation path: S from the four correlators of one pair state.
inline double chsh_exact(const StateVector& pair_state) {
    const auto angles = chsh_angles();
    const auto signs = chsh_signs();
    double s = 0.0;
    for (int t = 0; t < 4; ++t)
        s += signs[t] * expectation_correlator(pair_state, 'A', 'B', angles[t].first,
                                               angles[t].second);
    return s;
}

// Sampling path: consumes the given pairs, one measurement round each,
// split equally over the four correlators in order.
inline ChshEstimate chsh_test(std::span<PairInstance> pairs, Rng& rng) {
    const long per = static_cast<long>(pairs.size()) / 4;
    ChshEstimate est;
    est.rounds_per_correlator = per;
    est.low_confidence = per < 100;
    if (per == 0) return est;

    const auto angles = chsh_angles();
    const auto signs = chsh_signs();
    double var_sum = 0.0;
    std::size_t next = 0;
    for (int t = 0; t < 4; ++t) {
        // Measure O(theta) by rotating its eigenbasis onto Z: O(t) = R_y(t) Z R_y(t)^+.
        auto rotation = [](double theta) {
            const double c = std::cos(theta / 2), s = std::sin(theta / 2);
            return Mat2(c, s, -s, c); // R_y(-theta)
        };
        const Mat2 ra = rotation(angles[t].first);
        const Mat2 rb = rotation(angles[t].second);
        double sum = 0.0;
        for (long i = 0; i < per; ++i, ++next) {
            StateVector s1 = apply_single(pairs[next].state, 'A', ra);
            StateVector s2 = apply_single(s1, 'B', rb);
            SingleMeasurement ma = measure_single(s2, 'A', MeasBasis::Z, rng);
            SingleMeasurement mb = measure_single(ma.state, 'B', MeasBasis::Z, rng);
            pairs[next].state = std::move(mb.state);
            sum += (ma.outcome == mb.outcome) ? 1.0 : -1.0;
        }
        const double e = sum / double(per);
        est.s += signs[t] * e;
        var_sum += std::max(0.0, 1.0 - e * e) / double(per);
    }
    est.half_width = 4.0 * std::sqrt(var_sum);
    return est;
}

// --- Message transmission ---

struct TeleportOutcome {
    BellKind ij = BellKind::PhiPlus;
    StateVector residual = StateVector::scalar();
};

// Bob encodes the bit on qubit C, joins it with his half of the pair and
// Bell-measures (B,C). The outcome ij goes on the public channel; the
// residual keeps every remaining qubit, including Eve's.
inline TeleportOutcome teleport_bit(const PairInstance& pair, int bit, Rng& rng) {
    StateVector joint = tensor(pair.state, encode_bit(bit, 'C'));
    BellMeasurement m = bell_measure(joint, 'B', 'C', rng);
    return {m.kind, std::move(m.state)};
}

// Deterministic variant projecting onto a chosen Bell outcome; used by the
// exhaustive teleportation-identity tests.
inline TeleportOutcome teleport_bit_forced(const PairInstance& pair, int bit, BellKind forced) {
    StateVector joint = tensor(pair.state, encode_bit(bit, 'C'));
    BellProjection p = project_bell(joint, 'B', 'C', forced);
    if (!p.possible())
        throw std::invalid_argument("teleport_bit_forced: outcome has zero probability");
    return {forced, p.collapsed()};
}

struct DecodeResult {
    int bit = 0;
    StateVector residual = StateVector::scalar();
};

// Alice applies U_ij^-1 to her qubit and reads it out in the X basis.
inline DecodeResult correct_and_decode(const StateVector& state, BellKind ij, Rng& rng,
                                       QubitLabel qubit = 'A') {
    const QubitLabel q = state.num_qubits() == 1 ? state.labels().front() : qubit;
    StateVector corrected = apply_single(state, q, pauli_correction_inverse(ij));
    SingleMeasurement m = measure_single(corrected, q, MeasBasis::X, rng);
    return {m.outcome, std::move(m.state)};
}

// --- Full session ---

// Runs one session: distribute test_pairs + n_message_bits pairs, verify the
// channel on the first test_pairs of them, and on accept teleport a seeded
// random message (or the caller-supplied bits). On reject the transcript
// carries the verdict and no message phase; constructing new pairs is the
// caller's loop, not the protocol's.
inline SessionTranscript run_session(const SessionConfig& config,
                                     std::optional<std::string> message = {}) {
    config.validate();
    if (message && static_cast<int>(message->size()) != config.n_message_bits)
        throw std::invalid_argument("run_session: message length must equal n_message_bits");

    SessionTranscript t;
    t.config = config;
    t.rng_algorithm = std::string(Rng::algorithm_name);

    Rng rng(config.seed);
    std::vector<PairInstance> pairs =
        distribute_pairs(config.test_pairs + config.n_message_bits, config.adversary,
                         config.noise_p, rng, config.attack_probability);

    if (config.test_pairs > 0) {
        t.verdict = verify_channel(std::span(pairs).subspan(0, config.test_pairs),
                                   config.mismatch_threshold, rng, &t.classical_log, 0);
    } else {
        t.verdict.accept = true; // verification skipped
    }
    t.classical_log.push_back(VerdictMsg{t.verdict.accept});
    if (!t.verdict.accept) return t;

    std::string sent;
    if (message) {
        sent = *message;
        for (char c : sent)
            if (c != '0' && c != '1')
                throw std::invalid_argument("run_session: message must be 0/1 characters");
    } else {
        for (int i = 0; i < config.n_message_bits; ++i) sent.push_back(rng.next_bit() ? '1' : '0');
    }

    std::string received;
    std::string eve;
    bool any_claim_possible = config.adversary != Adversary::None;
    for (int i = 0; i < config.n_message_bits; ++i) {
        PairInstance& pair = pairs[static_cast<std::size_t>(config.test_pairs + i)];
        const int bit = sent[static_cast<std::size_t>(i)] - '0';
        TeleportOutcome tp = teleport_bit(pair, bit, rng);
        t.classical_log.push_back(BellOutcomeMsg{i, tp.ij});
        DecodeResult d = correct_and_decode(tp.residual, tp.ij, rng);
        received.push_back(d.bit ? '1' : '0');
        if (any_claim_possible) {
            std::optional<int> claim = eve_decode(config.adversary, pair.eve, d.residual, tp.ij, rng);
            eve.push_back(claim ? (*claim ? '1' : '0') : '?');
        }
    }
    t.sent_bits = std::move(sent);
    t.received_bits = std::move(received);
    if (any_claim_possible) t.eve_bits = std::move(eve);
    return t;
}

} // namespace qsdc
