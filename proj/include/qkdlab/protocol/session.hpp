#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qkdlab/adversary/channel.hpp"
#include "qkdlab/core/circuit.hpp"
#include "qkdlab/core/histogram.hpp"
#include "qkdlab/protocol/basis.hpp"
#include "qkdlab/protocol/pipeline.hpp"
#include "qkdlab/protocol/sarg04.hpp"
#include "qkdlab/protocol/sifting.hpp"

namespace qkdlab::protocol {

enum class ProtocolKind { BB84_2, BB84_4, SARG04_Paper, SARG04_Standard };

/// "BB84-2", "BB84-4", "SARG04-paper", "SARG04-standard".
std::string_view protocol_name(ProtocolKind p);
ProtocolKind parse_protocol(std::string_view name);
constexpr bool is_sarg04(ProtocolKind p) { return p == ProtocolKind::SARG04_Paper || p == ProtocolKind::SARG04_Standard; }

/// Statistics: one multi-shot run over all qubits, Bob's bit is the majority
/// outcome (ties read 0). Single-shot: every qubit is sent once.
enum class KeyMode { Statistics, SingleShot };
std::string_view key_mode_name(KeyMode m);
KeyMode parse_key_mode(std::string_view name);

enum class Backend { Ideal, ReadoutNoise };
std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view name);

/// Qubits per independent single-shot run.
inline constexpr std::size_t kSingleShotBlock = 8;

struct SessionConfig {
    ProtocolKind protocol = ProtocolKind::BB84_4;
    std::size_t n_bits = 0;  // 0: taken from the explicit bit list

    // Explicit records; missing ones are drawn from the seed.
    std::optional<std::vector<int>> bits;
    std::optional<std::vector<BasisSpec>> bases;      // BB84
    std::optional<std::vector<BasisSpec>> bob_bases;  // BB84
    std::optional<std::vector<int>> sarg_y;           // SARG04 basis bits
    std::optional<std::vector<int>> sarg_bob_y;       // SARG04 Bob reference bits

    std::vector<BasisSpec> basis_set;  // BB84 draw set; empty: protocol default
    std::uint64_t shots = 8192;
    RngSeed seed;
    KeyMode mode = KeyMode::Statistics;
    double check_fraction = 0.5;
    double qber_abort_threshold = 0.11;

    std::optional<adversary::EveConfig> eve;
    std::optional<adversary::NoiseAttackConfig> noise_attack;
    Backend backend = Backend::Ideal;
    std::optional<adversary::ReadoutNoiseModel> readout_noise;

    std::size_t qubit_count() const;

    /// Throws std::invalid_argument (or std::out_of_range for indices) on the
    /// first violated constraint.
    void validate() const;
};

/// Every random choice of a session fixed up front.
struct ResolvedSession {
    SessionConfig config;
    std::size_t n = 0;
    std::vector<int> bits;                          // x
    std::vector<int> key_bits;                      // Alice's key bit per qubit
    std::vector<std::string> alice_basis_names;
    std::vector<std::string> bob_basis_names;
    std::vector<std::vector<GateOp>> preparation;   // per qubit, target 0
    std::vector<MeasurementBasis> bob_measurement;  // per qubit
    std::vector<BasisSpec> alice_bases, bob_bases;  // BB84 only
    std::vector<int> y, bob_y;                      // SARG04 only
    std::vector<std::size_t> attacked;
    adversary::EveConfig eve;  // basis_set filled with the protocol default
    RngSeed eve_root;
};

ResolvedSession resolve_session(const SessionConfig& config);

/// Transmission pipeline for the listed qubits, renumbered 0..k-1 in the
/// given order. Eve taps and noise targets on those qubits are included.
Pipeline transmission_pipeline(const ResolvedSession& s, std::span<const std::size_t> qubits, RngSeed eve_seed);

/// The whole session as one circuit. Throws std::logic_error when Eve is
/// active and std::invalid_argument when it would exceed the qubit cap.
Circuit session_circuit(const ResolvedSession& s);

/// Exact P(1) of Bob's readout per qubit before readout noise.
std::vector<double> expected_marginals(const ResolvedSession& s);

struct SessionResult {
    ProtocolKind protocol = ProtocolKind::BB84_4;
    KeyMode mode = KeyMode::Statistics;
    std::size_t n_bits = 0;
    std::uint64_t shots = 0;
    RngSeed seed;

    std::vector<int> alice_bits;
    std::vector<std::string> alice_bases;
    std::vector<std::string> bob_bases;
    std::vector<std::size_t> attacked;

    std::vector<double> expected_p1;
    std::vector<double> observed_p1;
    std::vector<int> bob_bits;  // majority or single outcome, per qubit
    std::optional<ShotHistogram> histogram;  // statistics mode

    std::vector<std::optional<Sarg04Announcement>> announcements;  // SARG04 standard
    SiftResult sift;
    std::vector<int> alice_key, bob_key;
    std::vector<std::size_t> check_indices;  // qubit indices, increasing
    std::optional<double> check_qber;
    std::optional<double> sifted_qber;
    std::vector<int> final_key_alice, final_key_bob;
    bool aborted = false;
};

void to_json(nlohmann::json& j, const SessionResult& r);

SessionResult run_session(const SessionConfig& config);
SessionResult run_bb84_session(const SessionConfig& config);
SessionResult run_sarg04_session(const SessionConfig& config);

/// ceil(fraction * m) positions out of m, sampled without replacement and
/// returned increasing.
std::vector<std::size_t> choose_check_positions(std::size_t m, double fraction, RngSeed seed);

}  // namespace qkdlab::protocol
