#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qkdlab/adversary/channel.hpp"
#include "qkdlab/protocol/bb84.hpp"
#include "qkdlab/protocol/pipeline.hpp"
#include "qkdlab/protocol/session.hpp"

using namespace qkdlab;
using namespace qkdlab::adversary;
using namespace qkdlab::protocol;
using std::numbers::pi;

namespace {

BasisSpec named(BasisAlias a) { return BasisSpec::named(a); }

PartyRecord golden_alice() {
    return {{1, 0, 1, 1, 0},
            {named(BasisAlias::Y), named(BasisAlias::HT), named(BasisAlias::Y), named(BasisAlias::HZ),
             named(BasisAlias::HT)}};
}

std::vector<BasisSpec> golden_bob() {
    return {named(BasisAlias::Y), named(BasisAlias::HT), named(BasisAlias::X), named(BasisAlias::HZ),
            named(BasisAlias::HZ)};
}

std::vector<oracle::Op> to_oracle(const std::vector<GateOp>& ops) {
    std::vector<oracle::Op> out;
    for (const auto& op : ops)
        out.push_back({std::string(gate_name(op.kind)), op.target, op.control ? static_cast<int>(*op.control) : -1,
                       op.theta});
    return out;
}

std::vector<double> exact(const Pipeline& p) {
    auto m = exact_marginals(p);
    EXPECT_TRUE(m.has_value());
    return m.value_or(std::vector<double>{});
}

/// P(1) of every key qubit from the oracle simulator, for pipelines without
/// intercepts.
std::vector<double> oracle_marginals(const Pipeline& p) {
    const auto v = oracle::run(to_oracle(p.to_circuit().ops), p.n_qubits);
    std::vector<double> out;
    for (std::size_t q = 0; q < p.key_qubits; ++q) out.push_back(oracle::p1(v, q));
    return out;
}

ShotHistogram histogram_with_p1(double p1, std::uint64_t shots, std::uint64_t seed) {
    const std::vector<Amplitude> amps = {std::sqrt(1.0 - p1), std::sqrt(p1)};
    return measure_all(StateVector::from_amplitudes(amps), shots, RngSeed{seed});
}

}  // namespace

TEST(InterceptResend, MatchingBasisIsInvisible) {
    EveConfig eve;
    eve.fixed.emplace(3, MeasurementBasis::equatorial(named(BasisAlias::HZ)));
    const Pipeline base = bb84_pipeline(golden_alice(), golden_bob());
    const Pipeline attacked = apply_intercept_resend(base, {3}, eve);
    ASSERT_EQ(attacked.intercepts.size(), 1u);
    const auto m = exact(attacked);
    EXPECT_NEAR(m[3], 1.0, 1e-12);
    EXPECT_NEAR(m[0], 1.0, 1e-12);
}

TEST(InterceptResend, QuarterTurnMismatchHalvesTheBit) {
    EveConfig eve;
    eve.fixed.emplace(0, MeasurementBasis::equatorial(named(BasisAlias::X)));
    const Pipeline p = apply_intercept_resend(bb84_pipeline(golden_alice(), golden_bob()), {0}, eve);
    EXPECT_NEAR(exact(p)[0], 0.5, 1e-12);
    const ShotHistogram h = run_pipeline(p, 8192, RngSeed{1});
    EXPECT_NEAR(marginal(h, 0).second, 0.5, 3 * 0.5 / std::sqrt(8192.0));
    EXPECT_EQ(marginal(h, 1).second, 0.0);
}

TEST(InterceptResend, ErrorMatchesSinSquaredOverTwo) {
    // Bob decodes in Alice's basis; Eve in a fixed basis at phase gap d.
    const double phases[] = {0.0, -pi / 2, pi / 4, pi};
    for (double pa : phases)
        for (double pe : phases) {
            Pipeline p = Pipeline::with_qubits(1);
            p.add_preparation(0, encode_ops(0, BasisSpec::from_phase(pa)));
            p.add_measurement_basis(0, decode_ops(BasisSpec::from_phase(pa)));
            EveConfig eve;
            eve.fixed.emplace(0, MeasurementBasis::equatorial(BasisSpec::from_phase(pe)));
            const double err = exact(apply_intercept_resend(p, {0}, eve))[0];
            EXPECT_NEAR(err, std::pow(std::sin(pa - pe), 2) / 2, 1e-12);
        }
}

TEST(InterceptResend, DiscardedQubitNeverReachesTheKey) {
    SessionConfig c;
    c.protocol = ProtocolKind::BB84_4;
    const PartyRecord a = golden_alice();
    c.bits = a.bits;
    c.bases = a.bases;
    c.bob_bases = golden_bob();
    c.seed = RngSeed{2024};
    const SessionResult clean = run_session(c);
    c.eve = EveConfig{};
    c.eve->attacked = {4};
    const SessionResult attacked = run_session(c);
    EXPECT_EQ(attacked.attacked, std::vector<std::size_t>{4});
    EXPECT_EQ(attacked.alice_key, clean.alice_key);
    EXPECT_EQ(attacked.bob_key, clean.bob_key);
    EXPECT_EQ(attacked.check_qber, clean.check_qber);
}

TEST(InterceptResend, RejectsBadInputs) {
    const Pipeline p = bb84_pipeline(golden_alice(), golden_bob());
    EveConfig eve;
    EXPECT_THROW(apply_intercept_resend(p, {0}, eve), std::invalid_argument);  // no basis
    eve.basis_set = {MeasurementBasis::computational()};
    EXPECT_THROW(apply_intercept_resend(p, {5}, eve), std::out_of_range);
    eve.attacked = {9};
    EXPECT_THROW(resolve_attacked(eve, 5, RngSeed{0}), std::out_of_range);
}

TEST(InterceptResend, AttackedFractionIsSeededBernoulli) {
    EveConfig eve;
    eve.attacked_fraction = 0.3;
    const auto a = resolve_attacked(eve, 10000, RngSeed{4});
    EXPECT_EQ(a, resolve_attacked(eve, 10000, RngSeed{4}));
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_NEAR(a.size() / 10000.0, 0.3, 3 * std::sqrt(0.3 * 0.7 / 10000.0));
    eve.attacked_fraction = 0.0;
    EXPECT_TRUE(resolve_attacked(eve, 50, RngSeed{4}).empty());
    eve.attacked_fraction.reset();
    eve.attacked = {3, 1, 3};
    EXPECT_EQ(resolve_attacked(eve, 5, RngSeed{4}), (std::vector<std::size_t>{1, 3}));
}

TEST(NoiseAttack, GoldenTargets) {
    NoiseAttackConfig cfg;
    cfg.targets = {{1, GateKind::X}, {3, GateKind::Z}, {4, GateKind::Y}};
    const Pipeline p = inject_controlled_pauli(bb84_pipeline(golden_alice(), golden_bob()), cfg);
    EXPECT_EQ(p.n_qubits, 6u);
    EXPECT_EQ(p.key_qubits, 5u);
    EXPECT_EQ(p.measured.size(), 5u);
    const auto m = oracle_marginals(p);
    EXPECT_NEAR(1.0 - m[1], 0.5, 1e-12);
    EXPECT_NEAR(1.0 - m[3], 1.0, 1e-12);
    EXPECT_NEAR(1.0 - m[4], std::pow(std::cos(pi / 8), 2), 1e-12);
    const auto lib = exact(p);
    for (std::size_t q = 0; q < 5; ++q) EXPECT_NEAR(lib[q], m[q], 1e-12);
}

TEST(NoiseAttack, ControlOffIsNeutral) {
    const Pipeline base = bb84_pipeline(golden_alice(), golden_bob());
    NoiseAttackConfig cfg;
    cfg.targets = {{0, GateKind::X}, {1, GateKind::Y}, {2, GateKind::Z}, {3, GateKind::X}, {4, GateKind::Y}};
    cfg.ancilla_value = 0;
    const Pipeline off = inject_controlled_pauli(base, cfg);
    const auto a = oracle_marginals(base), b = oracle_marginals(off);
    for (std::size_t q = 0; q < 5; ++q) EXPECT_NEAR(a[q], b[q], 1e-15);
    EXPECT_EQ(run_pipeline(base, 4096, RngSeed{8}), run_pipeline(off, 4096, RngSeed{8}));
}

TEST(NoiseAttack, FaultTolerantCases) {
    struct Case {
        std::vector<GateOp> prep, decode;
        GateKind gate;
    };
    const BasisSpec x = named(BasisAlias::X), y = named(BasisAlias::Y);
    const Case cases[] = {
        {encode_ops(0, x), decode_ops(x), GateKind::X},
        {encode_ops(0, y), decode_ops(y), GateKind::Y},
        {{}, {}, GateKind::Z},
    };
    for (const auto& c : cases) {
        Pipeline p = Pipeline::with_qubits(1);
        p.add_preparation(0, c.prep);
        p.add_measurement_basis(0, c.decode);
        NoiseAttackConfig cfg;
        cfg.targets = {{0, c.gate}};
        const Pipeline attacked = inject_controlled_pauli(p, cfg);
        EXPECT_NEAR(oracle_marginals(attacked)[0], oracle_marginals(p)[0], 1e-12) << gate_name(c.gate);
        EXPECT_NEAR(oracle_marginals(attacked)[0], 0.0, 1e-12);
    }
}

TEST(NoiseAttack, RejectsBadTargets) {
    const Pipeline base = bb84_pipeline(golden_alice(), golden_bob());
    NoiseAttackConfig cfg;
    EXPECT_EQ(inject_controlled_pauli(base, cfg).n_qubits, 5u);
    cfg.targets = {{5, GateKind::X}};
    EXPECT_THROW(inject_controlled_pauli(base, cfg), std::invalid_argument);
    cfg.targets = {{0, GateKind::H}};
    EXPECT_THROW(inject_controlled_pauli(base, cfg), std::invalid_argument);
}

TEST(ReadoutNoise, ZeroNoiseIsIdentity) {
    const ShotHistogram h = histogram_with_p1(0.3, 5000, 1);
    EXPECT_EQ(apply_readout_noise(h, ReadoutNoiseModel::uniform(1, 0.0, 0.0), RngSeed{2}), h);
}

TEST(ReadoutNoise, DeterministicCertainOneWithSmallP10) {
    const ShotHistogram h = histogram_with_p1(1.0, 8192, 1);
    const ShotHistogram n = apply_readout_noise(h, ReadoutNoiseModel::uniform(1, 0.0, 0.03), RngSeed{3});
    EXPECT_NEAR(marginal(n, 0).second, 0.97, 3 * std::sqrt(0.97 * 0.03 / 8192));
    EXPECT_EQ(n, apply_readout_noise(h, ReadoutNoiseModel::uniform(1, 0.0, 0.03), RngSeed{3}));
}

TEST(ReadoutNoise, FullyRandomizing) {
    for (double p : {0.0, 0.2, 1.0}) {
        const ShotHistogram n =
            apply_readout_noise(histogram_with_p1(p, 8192, 4), ReadoutNoiseModel::uniform(1, 0.5, 0.5), RngSeed{5});
        EXPECT_NEAR(marginal(n, 0).second, 0.5, 3 * 0.5 / std::sqrt(8192.0));
    }
}

TEST(ReadoutNoise, MarginalFormula) {
    Rng rng(RngSeed{6});
    for (int trial = 0; trial < 20; ++trial) {
        const double p = rng.uniform(), p01 = 0.2 * rng.uniform(), p10 = 0.2 * rng.uniform();
        const std::uint64_t shots = 20000;
        const ShotHistogram h = histogram_with_p1(p, shots, 10 + trial);
        const double observed_true = marginal(h, 0).second;
        const ShotHistogram n = apply_readout_noise(h, ReadoutNoiseModel::uniform(1, p01, p10), RngSeed{100u + trial});
        const double expect = (1 - p10) * observed_true + p01 * (1 - observed_true);
        // Conditional on the true counts, the flips are two binomials.
        const double var = (observed_true * p10 * (1 - p10) + (1 - observed_true) * p01 * (1 - p01)) / shots;
        EXPECT_NEAR(marginal(n, 0).second, expect, 3 * std::sqrt(var) + 1e-12);
    }
}

TEST(ReadoutNoise, ModelValidation) {
    ShotHistogram two;
    two.n_qubits = 2;
    two.shots = 1;
    two.counts = {{"01", 1}};
    EXPECT_THROW(apply_readout_noise(two, ReadoutNoiseModel::uniform(1, 0.1, 0.1), RngSeed{1}), std::invalid_argument);
    EXPECT_THROW(ReadoutNoiseModel::uniform(1, 1.5, 0.0).validate(), std::invalid_argument);
    const ReadoutNoiseModel m{{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
    const ReadoutNoiseModel s = m.slice(1, 2);
    EXPECT_EQ(s.p01, (std::vector<double>{0.2, 0.3}));
    EXPECT_EQ(s.p10, (std::vector<double>{0.5, 0.6}));
}

TEST(Calibration, NoiselessSingleQubit) {
    const CalibrationSet cal = build_calibration_set(1, ReadoutNoiseModel::uniform(1, 0, 0), 1000, RngSeed{1});
    ASSERT_EQ(cal.observed.size(), 2u);
    EXPECT_EQ(cal.observed.at("0").counts, (std::map<std::string, std::uint64_t>{{"0", 1000}}));
    EXPECT_EQ(cal.observed.at("1").counts, (std::map<std::string, std::uint64_t>{{"1", 1000}}));
}

TEST(Calibration, BinomialFlipRate) {
    const CalibrationSet cal = build_calibration_set(1, ReadoutNoiseModel::uniform(1, 0.1, 0.0), 8192, RngSeed{2});
    EXPECT_NEAR(marginal(cal.observed.at("0"), 0).second, 0.1, 3 * std::sqrt(0.09 / 8192));
}

TEST(Calibration, ModesAndCap) {
    const auto two = build_calibration_set(2, ReadoutNoiseModel::uniform(2, 0.05, 0.05), 100, RngSeed{3});
    EXPECT_EQ(two.mode, CalibrationMode::Full);
    EXPECT_EQ(two.observed.size(), 4u);
    for (const auto& [k, h] : two.observed) EXPECT_EQ(h.shots, 100u);
    const auto big = build_calibration_set(13, ReadoutNoiseModel::uniform(13, 0.05, 0.05), 100, RngSeed{3});
    EXPECT_EQ(big.mode, CalibrationMode::Tensored);
    EXPECT_EQ(big.observed.size(), 2u);
    EXPECT_THROW(build_calibration_set(13, ReadoutNoiseModel::uniform(13, 0.05, 0.05), 100, RngSeed{3},
                                       CalibrationMode::Full),
                 std::invalid_argument);
}
