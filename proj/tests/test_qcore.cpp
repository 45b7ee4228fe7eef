#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qsdc/qcore.hpp"

#include <cmath>

using namespace qsdc;

namespace {

StateVector from_oracle(std::vector<QubitLabel> labels, const oracle::Vec& v) {
    std::vector<Amp> amps(v.begin(), v.end());
    return StateVector(std::move(labels), std::move(amps));
}

bool amps_close(const StateVector& s, const oracle::Vec& v, double tol = kAlgebraTol) {
    if (s.dim() != v.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(s.amplitude(i) - Amp(v[i])) > tol) return false;
    return true;
}

} // namespace

TEST_CASE("correction matrices are unitary inverse pairs") {
    for (BellKind k : all_bell_kinds) {
        const Mat2 u = pauli_correction(k);
        const Mat2 ui = pauli_correction_inverse(k);
        REQUIRE(u.is_unitary(kAlgebraTol));
        REQUIRE(ui.is_unitary(kAlgebraTol));
        const Mat2 p = ui * u;
        REQUIRE(std::abs(p(0, 0) - 1.0) < kAlgebraTol);
        REQUIRE(std::abs(p(1, 1) - 1.0) < kAlgebraTol);
        REQUIRE(std::abs(p(0, 1)) < kAlgebraTol);
        REQUIRE(std::abs(p(1, 0)) < kAlgebraTol);
    }
}

TEST_CASE("bell state amplitudes") {
    REQUIRE(amps_close(make_bell(BellKind::PhiPlus, 'A', 'B'),
                       {oracle::kR2, 0.0, 0.0, oracle::kR2}));
    REQUIRE(amps_close(make_bell(BellKind::PsiMinus, 'A', 'B'),
                       {0.0, oracle::kR2, -oracle::kR2, 0.0}));
    for (BellKind k : all_bell_kinds)
        REQUIRE(amps_close(make_bell(k, 'A', 'B'), oracle::bell(bell_label(k))));
    REQUIRE_THROWS_AS(make_bell(BellKind::PhiPlus, 'A', 'A'), std::invalid_argument);
}

TEST_CASE("bell states in the X basis") {
    auto xprod = [](int a, int b) {
        return tensor(make_basis_state(MeasBasis::X, a, 'A'), make_basis_state(MeasBasis::X, b, 'B'));
    };
    const StateVector phi_plus = make_bell(BellKind::PhiPlus, 'A', 'B');
    const StateVector psi_plus = make_bell(BellKind::PsiPlus, 'A', 'B');
    const StateVector psi_minus = make_bell(BellKind::PsiMinus, 'A', 'B');

    // Phi+ = (|++> + |-->)/sqrt2
    REQUIRE(std::abs(inner_product(xprod(0, 0), phi_plus) - kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(1, 1), phi_plus) - kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(0, 1), phi_plus)) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(1, 0), phi_plus)) < kAlgebraTol);

    // Psi+ = (|++> - |-->)/sqrt2: equal outcomes, relative phase -1 on |-->
    REQUIRE(std::abs(inner_product(xprod(0, 0), psi_plus) - kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(1, 1), psi_plus) + kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(0, 1), psi_plus)) < kAlgebraTol);

    // Psi- = (|-+> - |+->)/sqrt2, an exact equality, not just up to phase
    REQUIRE(std::abs(inner_product(xprod(1, 0), psi_minus) - kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(0, 1), psi_minus) + kInvSqrt2) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(0, 0), psi_minus)) < kAlgebraTol);
    REQUIRE(std::abs(inner_product(xprod(1, 1), psi_minus)) < kAlgebraTol);
}

TEST_CASE("ghz construction and single-qubit projections") {
    const StateVector g = make_ghz3('A', 'B', 'F');
    REQUIRE(amps_close(g, oracle::ghz3()));
    REQUIRE_THROWS_AS(make_ghz3('A', 'A', 'F'), std::invalid_argument);

    SECTION("X projections of the first qubit leave Bell pairs") {
        SingleProjection plus = project_single(g, 'A', MeasBasis::X, 0);
        REQUIRE(plus.probability == Catch::Approx(0.5).margin(kAlgebraTol));
        REQUIRE(fidelity(plus.collapsed(), make_bell(BellKind::PhiPlus, 'B', 'F')) >
                1.0 - kNormTol);

        SingleProjection minus = project_single(g, 'A', MeasBasis::X, 1);
        REQUIRE(minus.probability == Catch::Approx(0.5).margin(kAlgebraTol));
        REQUIRE(fidelity(minus.collapsed(), make_bell(BellKind::PhiMinus, 'B', 'F')) >
                1.0 - kNormTol);
    }
    SECTION("Z projection pins both remaining qubits") {
        SingleProjection zero = project_single(g, 'A', MeasBasis::Z, 0);
        REQUIRE(zero.probability == Catch::Approx(0.5).margin(kAlgebraTol));
        REQUIRE(amps_close(zero.collapsed(), {1.0, 0.0, 0.0, 0.0}));
    }
}

TEST_CASE("bit encoding and X readout") {
    REQUIRE(amps_close(encode_bit(0), {kInvSqrt2, kInvSqrt2}));
    REQUIRE(amps_close(encode_bit(1), {kInvSqrt2, -kInvSqrt2}));
    REQUIRE_THROWS_AS(encode_bit(2), std::invalid_argument);

    Rng rng(5);
    for (int b = 0; b < 2; ++b) {
        SingleMeasurement m = measure_single(encode_bit(b), 'C', MeasBasis::X, rng);
        REQUIRE(m.outcome == b);
        REQUIRE(m.state.num_qubits() == 0);
    }
}

TEST_CASE("tensor product") {
    const StateVector joint = tensor(make_bell(BellKind::PhiPlus, 'A', 'B'), encode_bit(0, 'C'));
    REQUIRE(amps_close(joint, {0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5}));
    REQUIRE(amps_close(joint, oracle::kron(oracle::bell(0), oracle::xeig(0))));
    REQUIRE(joint.labels() == std::vector<QubitLabel>{'A', 'B', 'C'});

    const StateVector z00 = tensor(make_basis_state(MeasBasis::Z, 0, 'A'),
                                   make_basis_state(MeasBasis::Z, 0, 'B'));
    REQUIRE(amps_close(z00, {1.0, 0.0, 0.0, 0.0}));
    REQUIRE(std::abs(joint.norm2() - 1.0) < kNormTol);

    REQUIRE_THROWS_AS(tensor(encode_bit(0, 'A'), encode_bit(0, 'A')), std::invalid_argument);
}

TEST_CASE("single-qubit unitaries") {
    const StateVector plus = encode_bit(0, 'C');
    SECTION("U_01 maps |+> to |->") {
        REQUIRE(amps_close(apply_single(plus, 'C', pauli_correction(BellKind::PhiMinus)),
                           {kInvSqrt2, -kInvSqrt2}));
    }
    SECTION("identity is a no-op") {
        REQUIRE(amps_close(apply_single(plus, 'C', kIdentity2), {kInvSqrt2, kInvSqrt2}));
    }
    SECTION("U_11 inverse round trip") {
        StateVector round = apply_single(apply_single(plus, 'C', pauli_correction(BellKind::PsiMinus)),
                                         'C', pauli_correction_inverse(BellKind::PsiMinus));
        REQUIRE(amps_close(round, {kInvSqrt2, kInvSqrt2}));
    }
    SECTION("errors") {
        REQUIRE_THROWS_AS(apply_single(plus, 'Q', kIdentity2), std::invalid_argument);
        REQUIRE_THROWS_AS(apply_single(plus, 'C', Mat2(1, 1, 0, 1)), std::invalid_argument);
    }
}

TEST_CASE("state construction validates") {
    REQUIRE_THROWS_AS(StateVector({'A', 'A'}, {1.0, 0.0, 0.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(StateVector({'A'}, {1.0, 0.0, 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(StateVector({'A'}, {0.5, 0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(StateVector({'A'}, {std::nan(""), 0.0}), std::invalid_argument);
    std::vector<QubitLabel> nine{'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I'};
    std::vector<Amp> amps(512, 0.0);
    amps[0] = 1.0;
    REQUIRE_THROWS_AS(StateVector(nine, amps), std::invalid_argument);
}

TEST_CASE("index convention: label 0 is the most significant bit") {
    const StateVector s({'A', 'B'}, {0.0, 0.0, 1.0, 0.0}); // |10> = |1>_A |0>_B
    Rng rng(1);
    SingleMeasurement ma = measure_single(s, 'A', MeasBasis::Z, rng);
    REQUIRE(ma.outcome == 1);
    SingleMeasurement mb = measure_single(ma.state, 'B', MeasBasis::Z, rng);
    REQUIRE(mb.outcome == 0);
}

TEST_CASE("single-qubit measurement") {
    SECTION("eigenstates give deterministic outcomes") {
        Rng rng(2);
        REQUIRE(measure_single(encode_bit(1, 'C'), 'C', MeasBasis::X, rng).outcome == 1);
        REQUIRE(measure_single(make_basis_state(MeasBasis::Z, 0, 'C'), 'C', MeasBasis::Z, rng).outcome == 0);
    }
    SECTION("bell pair Z statistics and collapse") {
        const StateVector pair = make_bell(BellKind::PhiPlus, 'A', 'B');
        SingleProjection p0 = project_single(pair, 'A', MeasBasis::Z, 0);
        SingleProjection p1 = project_single(pair, 'A', MeasBasis::Z, 1);
        REQUIRE(p0.probability == Catch::Approx(0.5).margin(kAlgebraTol));
        REQUIRE(p1.probability == Catch::Approx(0.5).margin(kAlgebraTol));
        REQUIRE(amps_close(p0.collapsed(), {1.0, 0.0}));
        REQUIRE(amps_close(p1.collapsed(), {0.0, 1.0}));

        Rng rng(3);
        int seen[2] = {0, 0};
        for (int t = 0; t < 100; ++t) {
            SingleMeasurement ma = measure_single(pair, 'A', MeasBasis::Z, rng);
            SingleMeasurement mb = measure_single(ma.state, 'B', MeasBasis::Z, rng);
            REQUIRE(ma.outcome == mb.outcome);
            ++seen[ma.outcome];
        }
        REQUIRE(seen[0] > 0);
        REQUIRE(seen[1] > 0);
    }
    SECTION("projection removes the qubit and renormalizes") {
        const StateVector pair = make_bell(BellKind::PhiPlus, 'A', 'B');
        SingleProjection p = project_single(pair, 'B', MeasBasis::Z, 1);
        REQUIRE(p.collapsed().labels() == std::vector<QubitLabel>{'A'});
        REQUIRE(std::abs(p.collapsed().norm2() - 1.0) < kNormTol);
    }
    SECTION("impossible outcome is flagged, not sampled") {
        SingleProjection p = project_single(encode_bit(0, 'C'), 'C', MeasBasis::X, 1);
        REQUIRE_FALSE(p.possible());
        REQUIRE(p.probability < 1e-12);
    }
}

TEST_CASE("bell projection and measurement") {
    SECTION("a bell pair is an eigenstate of its own projector") {
        const StateVector pair = make_bell(BellKind::PhiPlus, 'A', 'B');
        REQUIRE(project_bell(pair, 'A', 'B', BellKind::PhiPlus).probability ==
                Catch::Approx(1.0).margin(kAlgebraTol));
        REQUIRE_FALSE(project_bell(pair, 'A', 'B', BellKind::PsiPlus).possible());
        Rng rng(4);
        REQUIRE(bell_measure(pair, 'A', 'B', rng).kind == BellKind::PhiPlus);
    }

    SECTION("teleportation geometry: uniform outcomes, predicted residuals") {
        for (int b = 0; b < 2; ++b) {
            const StateVector joint =
                tensor(make_bell(BellKind::PhiPlus, 'A', 'B'), encode_bit(b, 'C'));
            for (BellKind k : all_bell_kinds) {
                BellProjection p = project_bell(joint, 'B', 'C', k);
                REQUIRE(p.probability == Catch::Approx(0.25).margin(kAlgebraTol));
                REQUIRE(p.collapsed().labels() == joint.labels());
                // measured pair stays, in the outcome state
                REQUIRE(project_bell(p.collapsed(), 'B', 'C', k).probability ==
                        Catch::Approx(1.0).margin(kAlgebraTol));

                // the remaining qubit matches the independent computation
                oracle::Vec red = oracle::project_pair(
                    oracle::kron(oracle::bell(0), oracle::xeig(b)), 3, 1, 2,
                    oracle::bell(bell_label(k)));
                StateVector expected = tensor(from_oracle({'A'}, oracle::normalized(red)),
                                              make_bell(k, 'B', 'C'));
                REQUIRE(fidelity(p.collapsed(), expected) > 1.0 - kNormTol);
            }
        }
    }

    SECTION("entanglement swap: the remote pair collapses to the measured kind") {
        const StateVector joint = tensor(make_bell(BellKind::PhiPlus, 'A', 'B'),
                                         make_bell(BellKind::PhiPlus, 'D', 'E'));
        for (BellKind k : all_bell_kinds) {
            BellProjection p = project_bell(joint, 'B', 'D', k);
            REQUIRE(p.probability == Catch::Approx(0.25).margin(kAlgebraTol));
            REQUIRE(project_bell(p.collapsed(), 'A', 'E', k).probability ==
                    Catch::Approx(1.0).margin(kAlgebraTol));

            // amplitude-exact, sign included
            const oracle::Vec be = oracle::bell(bell_label(k));
            std::vector<Amp> expected(16);
            for (int a = 0; a < 2; ++a)
                for (int bq = 0; bq < 2; ++bq)
                    for (int d = 0; d < 2; ++d)
                        for (int e2 = 0; e2 < 2; ++e2)
                            expected[static_cast<std::size_t>(a * 8 + bq * 4 + d * 2 + e2)] =
                                Amp(be[static_cast<std::size_t>(a * 2 + e2)] *
                                    be[static_cast<std::size_t>(bq * 2 + d)]);
            StateVector want({'A', 'B', 'D', 'E'}, std::move(expected));
            REQUIRE(fidelity(p.collapsed(), want) > 1.0 - kNormTol);
            REQUIRE(inner_product(want, p.collapsed()).real() > 0.999);
        }
    }

    SECTION("sampled bell measurement stays within the projector set") {
        Rng rng(6);
        const StateVector joint = tensor(make_bell(BellKind::PhiPlus, 'A', 'B'), encode_bit(1, 'C'));
        int counts[4] = {0, 0, 0, 0};
        for (int t = 0; t < 400; ++t) {
            BellMeasurement m = bell_measure(joint, 'B', 'C', rng);
            ++counts[bell_label(m.kind)];
            REQUIRE(std::abs(m.state.norm2() - 1.0) < kNormTol);
        }
        for (int k = 0; k < 4; ++k) REQUIRE(counts[k] > 55); // 100 expected, 4 sigma ~ 35
    }
}

TEST_CASE("pair correlators") {
    const StateVector pair = make_bell(BellKind::PhiPlus, 'A', 'B');
    const double pi = std::acos(-1.0);
    REQUIRE(expectation_correlator(pair, 'A', 'B', 0.0, 0.0) ==
            Catch::Approx(1.0).margin(kAlgebraTol));
    REQUIRE(expectation_correlator(pair, 'A', 'B', pi / 2, pi / 2) ==
            Catch::Approx(1.0).margin(kAlgebraTol));
    REQUIRE(expectation_correlator(pair, 'A', 'B', 0.0, pi / 4) ==
            Catch::Approx(std::cos(pi / 4)).margin(kAlgebraTol));

    // cross-validate the two independent implementations on assorted angles
    for (double ta : {0.3, 1.1, -0.7})
        for (double tb : {0.0, 2.2, -1.9}) {
            const double mine = expectation_correlator(pair, 'A', 'B', ta, tb);
            const double ref = oracle::expectation_pair(oracle::bell(0), 2, 0, 1,
                                                        oracle::obs(ta), oracle::obs(tb));
            REQUIRE(mine == Catch::Approx(ref).margin(kAlgebraTol));
            REQUIRE(std::abs(mine) <= 1.0 + kAlgebraTol);
        }
}

TEST_CASE("teleportation identity, all eight forced cases") {
    for (int b = 0; b < 2; ++b)
        for (BellKind k : all_bell_kinds) {
            const oracle::TeleportCase expect = oracle::teleport_case(b, bell_label(k));
            REQUIRE(expect.prob == Catch::Approx(0.25).margin(kAlgebraTol));
            REQUIRE(expect.fidelity == Catch::Approx(1.0).margin(kAlgebraTol));
            REQUIRE(expect.decoded == b);

            const StateVector joint =
                tensor(make_bell(BellKind::PhiPlus, 'A', 'B'), encode_bit(b, 'C'));
            BellProjection p = project_bell(joint, 'B', 'C', k);
            StateVector corrected = apply_single(p.collapsed(), 'A', pauli_correction_inverse(k));
            StateVector want = tensor(encode_bit(b, 'A'), make_bell(k, 'B', 'C'));
            REQUIRE(fidelity(corrected, want) > 1.0 - kNormTol);
        }
}

TEST_CASE("rng streams") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 5; ++i) {
        const std::uint64_t va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff);
    REQUIRE(Rng::derive(1, 0, 0) != Rng::derive(1, 0, 1));
    REQUIRE(Rng::derive(1, 0, 0) != Rng::derive(1, 1, 0));
    Rng d(7);
    for (int i = 0; i < 100; ++i) {
        const double u = d.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    REQUIRE(Rng::algorithm_name == std::string_view("splitmix64"));
}
