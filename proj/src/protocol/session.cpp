#include "qkdlab/protocol/session.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qkdlab::protocol {

std::string_view protocol_name(ProtocolKind p) {
    switch (p) {
        case ProtocolKind::BB84_2: return "BB84-2";
        case ProtocolKind::BB84_4: return "BB84-4";
        case ProtocolKind::SARG04_Paper: return "SARG04-paper";
        case ProtocolKind::SARG04_Standard: return "SARG04-standard";
    }
    return "?";
}

ProtocolKind parse_protocol(std::string_view name) {
    for (auto p : {ProtocolKind::BB84_2, ProtocolKind::BB84_4, ProtocolKind::SARG04_Paper, ProtocolKind::SARG04_Standard}) {
        if (protocol_name(p) == name) return p;
    }
    throw std::invalid_argument("unknown protocol '" + std::string(name) +
                                "' (expected BB84-2, BB84-4, SARG04-paper or SARG04-standard)");
}

std::string_view key_mode_name(KeyMode m) { return m == KeyMode::Statistics ? "statistics" : "single-shot"; }

KeyMode parse_key_mode(std::string_view name) {
    if (name == "statistics") return KeyMode::Statistics;
    if (name == "single-shot") return KeyMode::SingleShot;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected statistics or single-shot)");
}

std::string_view backend_name(Backend b) { return b == Backend::Ideal ? "ideal" : "readout-noise"; }

Backend parse_backend(std::string_view name) {
    if (name == "ideal") return Backend::Ideal;
    if (name == "readout-noise") return Backend::ReadoutNoise;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected ideal or readout-noise)");
}

namespace {

template <class T>
void check_length(const std::optional<std::vector<T>>& v, std::size_t n, const char* what) {
    if (v && v->size() != n) {
        throw std::invalid_argument(std::string(what) + " has " + std::to_string(v->size()) + " entries, expected " +
                                    std::to_string(n));
    }
}

void check_bits(const std::optional<std::vector<int>>& v, const char* what) {
    if (!v) return;
    for (int b : *v) {
        if (b != 0 && b != 1) throw std::invalid_argument(std::string(what) + " entries must be 0 or 1");
    }
}

std::vector<BasisSpec> default_basis_set(ProtocolKind p) {
    return p == ProtocolKind::BB84_2 ? two_basis_set() : four_basis_set();
}

std::vector<int> draw_bits(std::size_t n, RngSeed seed) {
    Rng rng(seed);
    std::vector<int> out(n);
    for (auto& b : out) b = rng.bit();
    return out;
}

std::vector<BasisSpec> draw_bases(std::size_t n, const std::vector<BasisSpec>& set, RngSeed seed) {
    Rng rng(seed);
    std::vector<BasisSpec> out(n);
    for (auto& b : out) b = set[rng.below(set.size())];
    return out;
}

}  // namespace

std::size_t SessionConfig::qubit_count() const {
    if (n_bits) return n_bits;
    if (bits) return bits->size();
    if (bases) return bases->size();
    if (sarg_y) return sarg_y->size();
    return 0;
}

void SessionConfig::validate() const {
    const std::size_t n = qubit_count();
    if (n == 0) throw std::invalid_argument("n_bits must be at least 1 (or give explicit bits)");
    check_length(bits, n, "bits");
    check_bits(bits, "bits");
    if (is_sarg04(protocol)) {
        if (bases || bob_bases) throw std::invalid_argument("SARG04 takes reference bits, not BB84 bases");
        if (!basis_set.empty()) throw std::invalid_argument("basis_set applies to BB84 only");
        check_length(sarg_y, n, "bases");
        check_length(sarg_bob_y, n, "bob_bases");
        check_bits(sarg_y, "bases");
        check_bits(sarg_bob_y, "bob_bases");
    } else {
        if (sarg_y || sarg_bob_y) throw std::invalid_argument("BB84 takes bases, not SARG04 reference bits");
        check_length(bases, n, "bases");
        check_length(bob_bases, n, "bob_bases");
    }
    if (shots == 0) throw std::invalid_argument("shots must be at least 1");
    if (!(check_fraction >= 0.0 && check_fraction < 1.0)) throw std::invalid_argument("check_fraction must lie in [0, 1)");
    if (!(qber_abort_threshold >= 0.0 && qber_abort_threshold <= 0.5)) {
        throw std::invalid_argument("qber_abort_threshold must lie in [0, 0.5]");
    }
    if (protocol == ProtocolKind::SARG04_Standard && mode != KeyMode::SingleShot) {
        throw std::invalid_argument("SARG04-standard sifts on individual outcomes and needs single-shot mode");
    }
    const bool has_ancilla = noise_attack && !noise_attack->targets.empty();
    if (mode == KeyMode::Statistics && n + (has_ancilla ? 1 : 0) > kMaxQubits) {
        throw std::invalid_argument("statistics mode simulates all qubits jointly and is limited to " +
                                    std::to_string(kMaxQubits) + " qubits including the noise ancilla");
    }
    if (eve) {
        if (eve->attacked_fraction) {
            const double f = *eve->attacked_fraction;
            if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("eve.attacked_fraction must lie in [0, 1]");
        }
        for (std::size_t q : eve->attacked) {
            if (q >= n) throw std::out_of_range("eve attacks q[" + std::to_string(q) + "] of " + std::to_string(n));
        }
        for (const auto& [q, basis] : eve->fixed) {
            if (q >= n) throw std::out_of_range("eve fixed basis for q[" + std::to_string(q) + "] of " + std::to_string(n));
        }
    }
    if (noise_attack) {
        if (noise_attack->ancilla_value != 0 && noise_attack->ancilla_value != 1) {
            throw std::invalid_argument("noise_attack.ancilla_value must be 0 or 1");
        }
        for (const auto& t : noise_attack->targets) {
            if (t.qubit >= n) throw std::out_of_range("noise target q[" + std::to_string(t.qubit) + "] of " + std::to_string(n));
            if (t.gate != GateKind::X && t.gate != GateKind::Y && t.gate != GateKind::Z) {
                throw std::invalid_argument("noise attack gate must be CX, CY or CZ");
            }
        }
    }
    if (backend == Backend::ReadoutNoise) {
        if (!readout_noise) throw std::invalid_argument("backend readout-noise needs a readout_noise model");
        readout_noise->validate();
        if (readout_noise->n_qubits() != n) throw std::invalid_argument("readout_noise must cover every key qubit");
    } else if (readout_noise) {
        throw std::invalid_argument("readout_noise is only used by backend readout-noise");
    }
}

ResolvedSession resolve_session(const SessionConfig& config) {
    config.validate();
    ResolvedSession s;
    s.config = config;
    s.n = config.qubit_count();
    const RngSeed root = config.seed;
    s.bits = config.bits ? *config.bits : draw_bits(s.n, derive_seed(root, Stream::AliceBits));

    std::vector<MeasurementBasis> eve_default;
    if (is_sarg04(config.protocol)) {
        s.y = config.sarg_y ? *config.sarg_y : draw_bits(s.n, derive_seed(root, Stream::AliceBases));
        s.bob_y = config.sarg_bob_y ? *config.sarg_bob_y : draw_bits(s.n, derive_seed(root, Stream::BobBases));
        for (std::size_t i = 0; i < s.n; ++i) {
            s.preparation.push_back(sarg04_encode(s.bits[i], s.y[i]));
            s.bob_measurement.push_back(MeasurementBasis::sarg_reference(s.bob_y[i]));
            s.alice_basis_names.push_back(MeasurementBasis::sarg_reference(s.y[i]).name);
            s.bob_basis_names.push_back(s.bob_measurement.back().name);
        }
        s.key_bits = config.protocol == ProtocolKind::SARG04_Standard ? s.y : s.bits;
        eve_default = {MeasurementBasis::computational(), MeasurementBasis::sarg_reference(1)};
    } else {
        const auto set = config.basis_set.empty() ? default_basis_set(config.protocol) : config.basis_set;
        s.alice_bases = config.bases ? *config.bases : draw_bases(s.n, set, derive_seed(root, Stream::AliceBases));
        s.bob_bases = config.bob_bases ? *config.bob_bases : draw_bases(s.n, set, derive_seed(root, Stream::BobBases));
        for (std::size_t i = 0; i < s.n; ++i) {
            s.preparation.push_back(encode_ops(s.bits[i], s.alice_bases[i]));
            s.bob_measurement.push_back(MeasurementBasis::equatorial(s.bob_bases[i]));
            s.alice_basis_names.push_back(s.alice_bases[i].name());
            s.bob_basis_names.push_back(s.bob_bases[i].name());
        }
        s.key_bits = s.bits;
        for (const auto& b : set) eve_default.push_back(MeasurementBasis::equatorial(b));
    }

    if (config.eve) {
        s.eve = *config.eve;
        if (s.eve.basis_set.empty()) s.eve.basis_set = eve_default;
        s.eve_root = s.eve.seed.value_or(derive_seed(root, Stream::EveSelection));
        s.attacked = adversary::resolve_attacked(s.eve, s.n, derive_seed(s.eve_root, 0, 0));
    }
    return s;
}

Pipeline transmission_pipeline(const ResolvedSession& s, std::span<const std::size_t> qubits, RngSeed eve_seed) {
    if (qubits.empty()) throw std::invalid_argument("transmission pipeline needs at least one qubit");
    std::map<std::size_t, std::size_t> local;
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        if (qubits[j] >= s.n) throw std::out_of_range("qubit " + std::to_string(qubits[j]) + " is not in the session");
        if (!local.emplace(qubits[j], j).second) throw std::invalid_argument("duplicate qubit in transmission");
    }
    Pipeline p = Pipeline::with_qubits(qubits.size());
    for (std::size_t j = 0; j < qubits.size(); ++j) {
        p.add_preparation(j, s.preparation[qubits[j]]);
        p.add_measurement_basis(j, s.bob_measurement[qubits[j]].decode);
    }

    std::vector<std::size_t> tapped;
    adversary::EveConfig eve;
    eve.basis_set = s.eve.basis_set;
    for (std::size_t q : s.attacked) {
        auto it = local.find(q);
        if (it == local.end()) continue;
        tapped.push_back(it->second);
        if (auto f = s.eve.fixed.find(q); f != s.eve.fixed.end()) eve.fixed.emplace(it->second, f->second);
    }
    std::sort(tapped.begin(), tapped.end());
    p = adversary::apply_intercept_resend(std::move(p), tapped, eve);
    p.eve_seed = eve_seed;

    if (s.config.noise_attack) {
        adversary::NoiseAttackConfig noise;
        noise.ancilla_value = s.config.noise_attack->ancilla_value;
        for (const auto& t : s.config.noise_attack->targets) {
            if (auto it = local.find(t.qubit); it != local.end()) noise.targets.push_back({it->second, t.gate});
        }
        p = adversary::inject_controlled_pauli(std::move(p), noise);
    }
    return p;
}

Circuit session_circuit(const ResolvedSession& s) {
    if (!s.attacked.empty()) {
        throw std::logic_error("intercept-resend needs mid-circuit collapse; the session has no circuit form");
    }
    std::vector<std::size_t> all(s.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Pipeline p = transmission_pipeline(s, all, RngSeed{});
    if (p.n_qubits > kMaxQubits) throw std::invalid_argument("session exceeds the circuit qubit cap");
    return p.to_circuit();
}

std::vector<double> expected_marginals(const ResolvedSession& s) {
    std::vector<double> out(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
        const std::size_t q[1] = {i};
        out[i] = exact_marginals(transmission_pipeline(s, q, RngSeed{})).value().at(0);
    }
    return out;
}

std::vector<std::size_t> choose_check_positions(std::size_t m, double fraction, RngSeed seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("check fraction must lie in [0, 1)");
    const auto k = std::min(m, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m) - 1e-9)));
    std::vector<std::size_t> pos(m);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t j = 0; j < k; ++j) std::swap(pos[j], pos[j + rng.below(m - j)]);
    pos.resize(k);
    std::sort(pos.begin(), pos.end());
    return pos;
}

namespace {

/// Bob's raw readout per qubit, plus the joint histogram in statistics mode.
void transmit(const ResolvedSession& s, SessionResult& r) {
    const SessionConfig& c = s.config;
    const RngSeed root = c.seed;
    r.observed_p1.assign(s.n, 0.0);
    r.bob_bits.assign(s.n, 0);

    if (c.mode == KeyMode::Statistics) {
        std::vector<std::size_t> all(s.n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const Pipeline p = transmission_pipeline(s, all, derive_seed(s.eve_root, 1, 0));
        ShotHistogram h = run_pipeline(p, c.shots, derive_seed(root, Stream::Measurement, 0));
        if (c.backend == Backend::ReadoutNoise) {
            h = adversary::apply_readout_noise(h, *c.readout_noise, derive_seed(root, Stream::Readout, 0));
        }
        for (std::size_t i = 0; i < s.n; ++i) {
            r.observed_p1[i] = marginal(h, i).second;
            r.bob_bits[i] = r.observed_p1[i] > 0.5 ? 1 : 0;
        }
        r.histogram = std::move(h);
        return;
    }

    const std::size_t blocks = (s.n + kSingleShotBlock - 1) / kSingleShotBlock;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t first = b * kSingleShotBlock;
        const std::size_t count = std::min(kSingleShotBlock, s.n - first);
        std::vector<std::size_t> qs(count);
        std::iota(qs.begin(), qs.end(), first);
        const Pipeline p = transmission_pipeline(s, qs, derive_seed(s.eve_root, 1, b));
        ShotHistogram h = run_pipeline(p, 1, derive_seed(root, Stream::Measurement, b));
        if (c.backend == Backend::ReadoutNoise) {
            h = adversary::apply_readout_noise(h, c.readout_noise->slice(first, count),
                                               derive_seed(root, Stream::Readout, b));
        }
        const std::string& key = h.counts.begin()->first;
        for (std::size_t j = 0; j < count; ++j) {
            const int bit = key[count - 1 - j] == '1' ? 1 : 0;
            r.bob_bits[first + j] = bit;
            r.observed_p1[first + j] = bit;
        }
    }
}

}  // namespace

SessionResult run_session(const SessionConfig& config) {
    const ResolvedSession s = resolve_session(config);
    const SessionConfig& c = s.config;

    SessionResult r;
    r.protocol = c.protocol;
    r.mode = c.mode;
    r.n_bits = s.n;
    r.shots = c.mode == KeyMode::Statistics ? c.shots : 1;
    r.seed = c.seed;
    r.alice_bits = s.bits;
    r.alice_bases = s.alice_basis_names;
    r.bob_bases = s.bob_basis_names;
    r.attacked = s.attacked;
    r.expected_p1 = expected_marginals(s);
    transmit(s, r);

    std::vector<int> bob_key_bits = r.bob_bits;
    switch (c.protocol) {
        case ProtocolKind::BB84_2:
        case ProtocolKind::BB84_4: r.sift = sift_bb84(s.alice_bases, s.bob_bases); break;
        case ProtocolKind::SARG04_Paper: r.sift = sift_sarg04_paper(s.y, s.bob_y); break;
        case ProtocolKind::SARG04_Standard: {
            Rng announce(derive_seed(c.seed, Stream::Announcement));
            std::vector<SiftVerdict> verdicts(s.n);
            for (std::size_t i = 0; i < s.n; ++i) {
                const auto a = sarg04_announce(s.bits[i], s.y[i], announce);
                const auto deduced = sarg04_sift_standard(a, s.bob_y[i], r.bob_bits[i]);
                r.announcements.push_back(a);
                verdicts[i] = deduced ? SiftVerdict::Accepted : SiftVerdict::Discarded;
                bob_key_bits[i] = deduced.value_or(0);
            }
            r.sift = make_sift_result(std::move(verdicts));
            break;
        }
    }

    const auto& accepted = r.sift.accepted;
    for (std::size_t i : accepted) {
        r.alice_key.push_back(s.key_bits[i]);
        r.bob_key.push_back(bob_key_bits[i]);
    }
    const auto positions = choose_check_positions(accepted.size(), c.check_fraction, derive_seed(c.seed, Stream::CheckSubset));
    std::vector<bool> is_check(accepted.size(), false);
    for (std::size_t p : positions) {
        is_check[p] = true;
        r.check_indices.push_back(accepted[p]);
    }
    for (std::size_t p = 0; p < accepted.size(); ++p) {
        if (is_check[p]) continue;
        r.final_key_alice.push_back(r.alice_key[p]);
        r.final_key_bob.push_back(r.bob_key[p]);
    }
    if (!r.check_indices.empty()) r.check_qber = qber(s.key_bits, bob_key_bits, r.check_indices);
    if (!accepted.empty()) r.sifted_qber = qber(s.key_bits, bob_key_bits, accepted);
    r.aborted = r.check_qber && *r.check_qber > c.qber_abort_threshold;
    return r;
}

SessionResult run_bb84_session(const SessionConfig& config) {
    if (is_sarg04(config.protocol)) throw std::invalid_argument("run_bb84_session: protocol is SARG04");
    return run_session(config);
}

SessionResult run_sarg04_session(const SessionConfig& config) {
    if (!is_sarg04(config.protocol)) throw std::invalid_argument("run_sarg04_session: protocol is BB84");
    return run_session(config);
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void to_json(nlohmann::json& j, const SessionResult& r) {
    j = nlohmann::json::object();
    j["protocol"] = protocol_name(r.protocol);
    j["mode"] = key_mode_name(r.mode);
    j["n_bits"] = r.n_bits;
    j["shots"] = r.shots;
    j["seed"] = r.seed.value;
    j["alice_bits"] = r.alice_bits;
    j["alice_bases"] = r.alice_bases;
    j["bob_bases"] = r.bob_bases;
    j["eve_attacked"] = r.attacked;
    j["expected_p1"] = r.expected_p1;
    j["observed_p1"] = r.observed_p1;
    j["bob_bits"] = r.bob_bits;
    auto verdicts = nlohmann::json::array();
    for (auto v : r.sift.verdicts) verdicts.push_back(verdict_code(v));
    j["verdicts"] = verdicts;
    j["accepted"] = r.sift.accepted;
    if (!r.announcements.empty()) {
        auto pairs = nlohmann::json::array();
        for (const auto& a : r.announcements) {
            if (!a) {
                pairs.push_back(nullptr);
                continue;
            }
            pairs.push_back({{"z_state", a->z_state ? "|1>" : "|0>"}, {"x_state", a->x_state ? "|->" : "|+>"}});
        }
        j["announcements"] = pairs;
    }
    j["alice_key"] = r.alice_key;
    j["bob_key"] = r.bob_key;
    j["check_indices"] = r.check_indices;
    j["check_qber"] = optional_number(r.check_qber);
    j["sifted_qber"] = optional_number(r.sifted_qber);
    j["final_key_alice"] = r.final_key_alice;
    j["final_key_bob"] = r.final_key_bob;
    j["aborted"] = r.aborted;
}

}  // namespace qkdlab::protocol
