// Minimal dense state-vector engine over small labeled qubit registers:
// Bell/GHZ construction, single-qubit unitaries, Z/X measurement and
// Bell-basis measurement with collapse.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsdc/rng.hpp"

namespace qsdc {

using Amp = std::complex<double>;
using QubitLabel = char;

inline constexpr double kNormTol = 1e-10;       // norms, fidelities
inline constexpr double kAlgebraTol = 1e-12;    // exact algebraic identities
inline constexpr int kMaxQubits = 8;            // the protocol needs at most 5

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// The four Bell states. The enum value is the two-bit classical label ij
// broadcast after a Bell measurement: PhiPlus=00, PhiMinus=01, PsiPlus=10,
// PsiMinus=11, in the order of the teleportation decomposition.
enum class BellKind : std::uint8_t {
    PhiPlus = 0,    // (|00> + |11>)/sqrt2
    PhiMinus = 1,   // (|00> - |11>)/sqrt2
    PsiPlus = 2,    // (|01> + |10>)/sqrt2
    PsiMinus = 3,   // (|01> - |10>)/sqrt2
};

inline constexpr std::array<BellKind, 4> all_bell_kinds = {
    BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};

inline int bell_label(BellKind k) { return static_cast<int>(k); }

inline BellKind bell_from_label(int ij) {
    if (ij < 0 || ij > 3) throw std::invalid_argument("bell label out of range");
    return static_cast<BellKind>(ij);
}

inline std::string bell_name(BellKind k) {
    switch (k) {
        case BellKind::PhiPlus: return "Phi+";
        case BellKind::PhiMinus: return "Phi-";
        case BellKind::PsiPlus: return "Psi+";
        case BellKind::PsiMinus: return "Psi-";
    }
    throw std::logic_error("bad BellKind");
}

enum class MeasBasis : std::uint8_t { Z = 0, X = 1 };

inline std::string basis_name(MeasBasis b) { return b == MeasBasis::Z ? "Z" : "X"; }

// Column-major-free tiny 2x2 complex matrix, indexed m(row, col).
struct Mat2 {
    std::array<Amp, 4> a{};

    constexpr Mat2() = default;
    constexpr Mat2(Amp m00, Amp m01, Amp m10, Amp m11) : a{m00, m01, m10, m11} {}

    constexpr Amp operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 2 + c)]; }

    Mat2 adjoint() const {
        return Mat2(std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3]));
    }

    Mat2 operator*(const Mat2& o) const {
        return Mat2(a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
                    a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]);
    }

    bool is_unitary(double tol = kNormTol) const {
        Mat2 p = adjoint() * (*this);
        return std::abs(p.a[0] - 1.0) < tol && std::abs(p.a[3] - 1.0) < tol &&
               std::abs(p.a[1]) < tol && std::abs(p.a[2]) < tol;
    }
};

inline constexpr Mat2 kIdentity2{1.0, 0.0, 0.0, 1.0};

// Teleportation correction unitaries, indexed by the Bell outcome label ij.
//   U_00 = I          U_01 = diag(1, -1)
//   U_10 = antidiag(1, 1)   U_11 = [[0, 1], [-1, 0]]
inline Mat2 pauli_correction(BellKind k) {
    switch (k) {
        case BellKind::PhiPlus: return Mat2(1, 0, 0, 1);
        case BellKind::PhiMinus: return Mat2(1, 0, 0, -1);
        case BellKind::PsiPlus: return Mat2(0, 1, 1, 0);
        case BellKind::PsiMinus: return Mat2(0, 1, -1, 0);
    }
    throw std::logic_error("bad BellKind");
}

inline Mat2 pauli_correction_inverse(BellKind k) {
    // U_00, U_01, U_10 are involutions; U_11^-1 = [[0, -1], [1, 0]].
    if (k == BellKind::PsiMinus) return Mat2(0, -1, 1, 0);
    return pauli_correction(k);
}

inline Mat2 pauli_x() { return Mat2(0, 1, 1, 0); }
inline Mat2 pauli_z() { return Mat2(1, 0, 0, -1); }

// Normalized pure state over an ordered register of labeled qubits.
//
// Basis index convention: the label at position 0 is the most significant
// bit of the index, so printed kets read left to right. For labels [A,B]
// index 2 is |10> = |1>_A |0>_B.
//
// Values are immutable after construction; operations return new states.
// Measuring the last qubit yields the zero-qubit scalar state.
class StateVector {
public:
    StateVector(std::vector<QubitLabel> labels, std::vector<Amp> amps)
        : labels_(std::move(labels)), amps_(std::move(amps)) {
        const std::size_t n = labels_.size();
        if (n > static_cast<std::size_t>(kMaxQubits))
            throw std::invalid_argument("register larger than " + std::to_string(kMaxQubits) + " qubits");
        if (amps_.size() != (std::size_t{1} << n))
            throw std::invalid_argument("amplitude count must be 2^n");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (labels_[i] == labels_[j]) throw std::invalid_argument("duplicate qubit label");
        double norm2 = 0.0;
        for (const Amp& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw std::invalid_argument("non-finite amplitude");
            norm2 += std::norm(a);
        }
        if (std::abs(norm2 - 1.0) > kNormTol)
            throw std::invalid_argument("state is not normalized");
    }

    // Zero-qubit scalar state, the residue of measuring out a full register.
    static StateVector scalar() { return StateVector(private_tag{}, {}, {Amp{1.0, 0.0}}); }

    int num_qubits() const { return static_cast<int>(labels_.size()); }
    const std::vector<QubitLabel>& labels() const { return labels_; }
    const std::vector<Amp>& amplitudes() const { return amps_; }
    std::size_t dim() const { return amps_.size(); }
    Amp amplitude(std::size_t index) const { return amps_.at(index); }

    bool has_label(QubitLabel q) const {
        return std::find(labels_.begin(), labels_.end(), q) != labels_.end();
    }

    // Position of a label in ket order (0 = most significant index bit).
    int position_of(QubitLabel q) const {
        auto it = std::find(labels_.begin(), labels_.end(), q);
        if (it == labels_.end())
            throw std::invalid_argument(std::string("unknown qubit label '") + q + "'");
        return static_cast<int>(it - labels_.begin());
    }

    double norm2() const {
        double s = 0.0;
        for (const Amp& a : amps_) s += std::norm(a);
        return s;
    }

private:
    struct private_tag {};
    StateVector(private_tag, std::vector<QubitLabel> labels, std::vector<Amp> amps)
        : labels_(std::move(labels)), amps_(std::move(amps)) {}

    friend StateVector unchecked_state(std::vector<QubitLabel>, std::vector<Amp>);

    std::vector<QubitLabel> labels_;
    std::vector<Amp> amps_;
};

// Trusted constructor for operation results whose normalization is
// guaranteed by construction (projection followed by exact renormalization).
inline StateVector unchecked_state(std::vector<QubitLabel> labels, std::vector<Amp> amps) {
    return StateVector(StateVector::private_tag{}, std::move(labels), std::move(amps));
}

namespace detail {

// Bit shift of the qubit at register position p in an n-qubit index.
inline int shift_of(int n, int pos) { return n - 1 - pos; }

inline std::size_t insert_bit(std::size_t r, int shift, std::size_t bit) {
    const std::size_t low = r & ((std::size_t{1} << shift) - 1);
    return ((r >> shift) << (shift + 1)) | (bit << shift) | low;
}

inline std::size_t remove_bit(std::size_t i, int shift) {
    const std::size_t low = i & ((std::size_t{1} << shift) - 1);
    return ((i >> (shift + 1)) << shift) | low;
}

// Z/X eigenvector components; X outcome 0 is "+", 1 is "-".
inline std::array<Amp, 2> basis_vector(MeasBasis basis, int outcome) {
    if (basis == MeasBasis::Z)
        return outcome == 0 ? std::array<Amp, 2>{1.0, 0.0} : std::array<Amp, 2>{0.0, 1.0};
    return outcome == 0 ? std::array<Amp, 2>{kInvSqrt2, kInvSqrt2}
                        : std::array<Amp, 2>{kInvSqrt2, -kInvSqrt2};
}

inline std::array<Amp, 4> bell_vector(BellKind k) {
    switch (k) {
        case BellKind::PhiPlus: return {kInvSqrt2, 0.0, 0.0, kInvSqrt2};
        case BellKind::PhiMinus: return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
        case BellKind::PsiPlus: return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
        case BellKind::PsiMinus: return {0.0, kInvSqrt2, -kInvSqrt2, 0.0};
    }
    throw std::logic_error("bad BellKind");
}

} // namespace detail

// --- State constructors ---

inline StateVector make_bell(BellKind kind, QubitLabel a, QubitLabel b) {
    if (a == b) throw std::invalid_argument("make_bell: labels must be distinct");
    auto v = detail::bell_vector(kind);
    return unchecked_state({a, b}, {v[0], v[1], v[2], v[3]});
}

// (|000> + |111>)/sqrt2
inline StateVector make_ghz3(QubitLabel a, QubitLabel b, QubitLabel c) {
    if (a == b || a == c || b == c) throw std::invalid_argument("make_ghz3: labels must be distinct");
    std::vector<Amp> amps(8, Amp{0.0, 0.0});
    amps[0] = kInvSqrt2;
    amps[7] = kInvSqrt2;
    return unchecked_state({a, b, c}, std::move(amps));
}

// Z or X eigenstate of a single qubit.
inline StateVector make_basis_state(MeasBasis basis, int outcome, QubitLabel label) {
    auto v = detail::basis_vector(basis, outcome);
    return unchecked_state({label}, {v[0], v[1]});
}

// Message encoding: bit 0 -> |+>, bit 1 -> |->.
inline StateVector encode_bit(int bit, QubitLabel label = 'C') {
    if (bit != 0 && bit != 1) throw std::invalid_argument("encode_bit: bit must be 0 or 1");
    return make_basis_state(MeasBasis::X, bit, label);
}

// --- Register operations ---

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    for (QubitLabel q : b.labels())
        if (a.has_label(q))
            throw std::invalid_argument(std::string("tensor: overlapping label '") + q + "'");
    if (a.num_qubits() + b.num_qubits() > kMaxQubits)
        throw std::invalid_argument("tensor: combined register too large");
    std::vector<QubitLabel> labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    const std::size_t nb = b.dim();
    std::vector<Amp> amps(a.dim() * nb);
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < nb; ++j) amps[i * nb + j] = a.amplitude(i) * b.amplitude(j);
    return unchecked_state(std::move(labels), std::move(amps));
}

inline StateVector apply_single(const StateVector& state, QubitLabel q, const Mat2& u) {
    if (!u.is_unitary()) throw std::invalid_argument("apply_single: matrix is not unitary");
    const int n = state.num_qubits();
    const int sh = detail::shift_of(n, state.position_of(q));
    const std::size_t stride = std::size_t{1} << sh;
    std::vector<Amp> amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        const Amp a0 = amps[i];
        const Amp a1 = amps[i | stride];
        amps[i] = u(0, 0) * a0 + u(0, 1) * a1;
        amps[i | stride] = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return unchecked_state(state.labels(), std::move(amps));
}

// Deterministic projection of one qubit onto a Z/X eigenstate. The measured
// qubit is removed from the register and the remainder renormalized.
// `state` is empty when the outcome has (numerically) zero probability.
struct SingleProjection {
    double probability = 0.0;
    std::optional<StateVector> state;

    bool possible() const { return state.has_value(); }
    const StateVector& collapsed() const { return *state; }
};

inline SingleProjection project_single(const StateVector& state, QubitLabel q, MeasBasis basis,
                                       int outcome) {
    const int n = state.num_qubits();
    if (n == 0) throw std::invalid_argument("project_single: empty register");
    const int sh = detail::shift_of(n, state.position_of(q));
    const auto e = detail::basis_vector(basis, outcome);
    const std::size_t rdim = state.dim() >> 1;
    std::vector<Amp> reduced(rdim, Amp{0.0, 0.0});
    for (std::size_t r = 0; r < rdim; ++r)
        for (std::size_t bit = 0; bit < 2; ++bit)
            reduced[r] += std::conj(e[bit]) * state.amplitude(detail::insert_bit(r, sh, bit));
    double p = 0.0;
    for (const Amp& c : reduced) p += std::norm(c);

    SingleProjection out;
    out.probability = p;
    if (p > 1e-12) {
        const double inv = 1.0 / std::sqrt(p);
        for (Amp& c : reduced) c *= inv;
        std::vector<QubitLabel> labels = state.labels();
        labels.erase(labels.begin() + state.position_of(q));
        out.state = unchecked_state(std::move(labels), std::move(reduced));
    }
    return out;
}

struct SingleMeasurement {
    int outcome = 0;
    StateVector state = StateVector::scalar();
};

// Born-rule sampled measurement; the measured qubit is removed.
inline SingleMeasurement measure_single(const StateVector& state, QubitLabel q, MeasBasis basis,
                                        Rng& rng) {
    SingleProjection p0 = project_single(state, q, basis, 0);
    SingleProjection p1 = project_single(state, q, basis, 1);
    if (p0.probability + p1.probability < 1e-10)
        throw std::logic_error("measure_single: total probability vanished on a normalized state");
    int outcome;
    if (!p1.possible()) {
        outcome = 0;
    } else if (!p0.possible()) {
        outcome = 1;
    } else {
        outcome = rng.next_double() < p0.probability / (p0.probability + p1.probability) ? 0 : 1;
    }
    return {outcome, outcome == 0 ? p0.collapsed() : p1.collapsed()};
}

// Deterministic projection of two qubits onto one Bell state. Unlike
// project_single the measured pair stays in the register, left in the
// outcome Bell state, so a holder can keep operating on it.
struct BellProjection {
    double probability = 0.0;
    std::optional<StateVector> state;

    bool possible() const { return state.has_value(); }
    const StateVector& collapsed() const { return *state; }
};

inline BellProjection project_bell(const StateVector& state, QubitLabel qa, QubitLabel qb,
                                   BellKind kind) {
    if (qa == qb) throw std::invalid_argument("project_bell: labels must be distinct");
    const int n = state.num_qubits();
    if (n < 2) throw std::invalid_argument("project_bell: need at least two qubits");
    const int sa = detail::shift_of(n, state.position_of(qa));
    const int sb = detail::shift_of(n, state.position_of(qb));
    const auto bell = detail::bell_vector(kind);

    const int hi = std::max(sa, sb), lo = std::min(sa, sb);
    const std::size_t rdim = state.dim() >> 2;
    std::vector<Amp> reduced(rdim, Amp{0.0, 0.0});
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const std::size_t ba = (i >> sa) & 1, bb = (i >> sb) & 1;
        const std::size_t r = detail::remove_bit(detail::remove_bit(i, hi), lo);
        reduced[r] += std::conj(bell[ba * 2 + bb]) * state.amplitude(i);
    }
    double p = 0.0;
    for (const Amp& c : reduced) p += std::norm(c);

    BellProjection out;
    out.probability = p;
    if (p > 1e-12) {
        const double inv = 1.0 / std::sqrt(p);
        std::vector<Amp> amps(state.dim());
        for (std::size_t i = 0; i < state.dim(); ++i) {
            const std::size_t ba = (i >> sa) & 1, bb = (i >> sb) & 1;
            const std::size_t r = detail::remove_bit(detail::remove_bit(i, hi), lo);
            amps[i] = bell[ba * 2 + bb] * reduced[r] * inv;
        }
        out.state = unchecked_state(state.labels(), std::move(amps));
    }
    return out;
}

struct BellMeasurement {
    BellKind kind = BellKind::PhiPlus;
    StateVector state = StateVector::scalar();
};

// Bell-basis measurement of two named qubits, sampled by Born probabilities.
// Implemented by projection with the four Bell projectors.
inline BellMeasurement bell_measure(const StateVector& state, QubitLabel qa, QubitLabel qb,
                                    Rng& rng) {
    std::array<BellProjection, 4> proj;
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        proj[k] = project_bell(state, qa, qb, static_cast<BellKind>(k));
        total += proj[k].probability;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::logic_error("bell_measure: Bell projector probabilities do not sum to 1");
    const double u = rng.next_double() * total;
    double acc = 0.0;
    int last = -1;
    for (int k = 0; k < 4; ++k) {
        if (!proj[k].possible()) continue;
        last = k;
        acc += proj[k].probability;
        if (u < acc) break;
    }
    if (last < 0) throw std::logic_error("bell_measure: no possible outcome");
    return {static_cast<BellKind>(last), proj[last].collapsed()};
}

// --- Observables ---

// <psi| O(angle_a) (x) O(angle_b) |psi> over two named qubits, where
// O(t) = cos t * sigma_z + sin t * sigma_x. Real, in [-1, 1].
inline double expectation_correlator(const StateVector& state, QubitLabel qa, QubitLabel qb,
                                     double angle_a, double angle_b) {
    auto observable = [](double t) {
        return Mat2(std::cos(t), std::sin(t), std::sin(t), -std::cos(t));
    };
    StateVector phi = apply_single(apply_single(state, qa, observable(angle_a)), qb, observable(angle_b));
    Amp acc{0.0, 0.0};
    for (std::size_t i = 0; i < state.dim(); ++i)
        acc += std::conj(state.amplitude(i)) * phi.amplitude(i);
    return acc.real();
}

inline Amp inner_product(const StateVector& a, const StateVector& b) {
    if (a.labels() != b.labels())
        throw std::invalid_argument("inner_product: registers must have identical label order");
    Amp acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amplitude(i)) * b.amplitude(i);
    return acc;
}

// |<a|b>|^2, insensitive to global phase.
inline double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

} // namespace qsdc
