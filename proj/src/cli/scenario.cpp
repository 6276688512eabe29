#include "qkdlab/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace qkdlab::cli {

using nlohmann::json;
using protocol::BasisSpec;
using protocol::MeasurementBasis;

ConfigError::ConfigError(std::string pointer, const std::string& message)
    : std::runtime_error((pointer.empty() ? std::string("(root)") : pointer) + ": " + message), pointer_(std::move(pointer)) {}

bool Scenario::wants(const std::string& output) const {
    return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
}

namespace {

std::string child(const std::string& ptr, const std::string& key) {
    std::string escaped;
    for (char c : key) {
        if (c == '~') escaped += "~0";
        else if (c == '/') escaped += "~1";
        else escaped += c;
    }
    return ptr + "/" + escaped;
}

std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(child(ptr, key), "unknown key");
    }
}

const json& require_array(const json& j, const std::string& ptr, bool allow_empty = false) {
    if (!j.is_array()) throw ConfigError(ptr, "expected an array");
    if (!allow_empty && j.empty()) throw ConfigError(ptr, "must not be empty");
    return j;
}

std::string get_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) throw ConfigError(ptr, "expected a string");
    return j.get<std::string>();
}

std::uint64_t get_unsigned(const json& j, const std::string& ptr) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(ptr, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

std::uint64_t get_positive(const json& j, const std::string& ptr) {
    const auto v = get_unsigned(j, ptr);
    if (v == 0) throw ConfigError(ptr, "must be at least 1");
    return v;
}

double get_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw ConfigError(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(ptr, "must be finite");
    return v;
}

double get_probability(const json& j, const std::string& ptr) {
    const double v = get_number(j, ptr);
    if (v < 0.0 || v > 1.0) throw ConfigError(ptr, "must lie in [0, 1]");
    return v;
}

int get_bit(const json& j, const std::string& ptr) {
    const auto v = get_unsigned(j, ptr);
    if (v > 1) throw ConfigError(ptr, "expected 0 or 1");
    return static_cast<int>(v);
}

std::vector<int> get_bits(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_bit(j[i], child(ptr, i)));
    return out;
}

/// Alias name or phase in radians.
BasisSpec get_bb84_basis(const json& j, const std::string& ptr) {
    if (j.is_string()) {
        try {
            return BasisSpec::named(protocol::parse_alias(j.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(ptr, e.what());
        }
    }
    if (j.is_number()) return BasisSpec::from_phase(get_number(j, ptr));
    throw ConfigError(ptr, "expected a basis name (X, Y, HT, HZ) or a phase in radians");
}

std::vector<BasisSpec> get_bb84_bases(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    std::vector<BasisSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_bb84_basis(j[i], child(ptr, i)));
    return out;
}

/// SARG04 reference bit: 0 / "Z" or 1 / "X".
int get_sarg_basis(const json& j, const std::string& ptr) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "Z") return 0;
        if (s == "X") return 1;
        throw ConfigError(ptr, "expected \"Z\" or \"X\"");
    }
    return get_bit(j, ptr);
}

std::vector<int> get_sarg_bases(const json& j, const std::string& ptr) {
    require_array(j, ptr);
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_sarg_basis(j[i], child(ptr, i)));
    return out;
}

/// "Z" is the computational basis; anything else is an equatorial basis.
MeasurementBasis get_eve_basis(const json& j, const std::string& ptr) {
    if (j.is_string() && j.get<std::string>() == "Z") return MeasurementBasis::computational();
    return MeasurementBasis::equatorial(get_bb84_basis(j, ptr));
}

std::size_t get_index(const json& j, const std::string& ptr) { return static_cast<std::size_t>(get_unsigned(j, ptr)); }

adversary::EveConfig parse_eve(const json& j, const std::string& ptr) {
    require_object(j, ptr, {"attacked", "attacked_fraction", "strategy", "seed"});
    adversary::EveConfig eve;
    const bool has_list = j.contains("attacked");
    const bool has_fraction = j.contains("attacked_fraction");
    if (has_list == has_fraction) throw ConfigError(ptr, "give exactly one of attacked, attacked_fraction");
    if (has_list) {
        const auto p = child(ptr, "attacked");
        const json& a = require_array(j["attacked"], p, true);
        for (std::size_t i = 0; i < a.size(); ++i) eve.attacked.push_back(get_index(a[i], child(p, i)));
    } else {
        eve.attacked_fraction = get_probability(j["attacked_fraction"], child(ptr, "attacked_fraction"));
    }
    if (j.contains("seed")) eve.seed = RngSeed{get_unsigned(j["seed"], child(ptr, "seed"))};
    if (j.contains("strategy")) {
        const auto sp = child(ptr, "strategy");
        const json& s = j["strategy"];
        require_object(s, sp, {"type", "basis_set", "basis", "bases"});
        if (!s.contains("type")) throw ConfigError(sp, "missing key \"type\"");
        const auto type = get_string(s["type"], child(sp, "type"));
        if (type == "uniform") {
            if (s.contains("basis") || s.contains("bases")) throw ConfigError(sp, "uniform strategy takes basis_set only");
            if (s.contains("basis_set")) {
                const auto p = child(sp, "basis_set");
                const json& set = require_array(s["basis_set"], p);
                for (std::size_t i = 0; i < set.size(); ++i) eve.basis_set.push_back(get_eve_basis(set[i], child(p, i)));
            }
        } else if (type == "fixed") {
            if (s.contains("basis_set")) throw ConfigError(child(sp, "basis_set"), "fixed strategy takes basis or bases");
            if (s.contains("basis") == s.contains("bases")) throw ConfigError(sp, "give exactly one of basis, bases");
            if (has_fraction && s.contains("bases")) {
                throw ConfigError(child(sp, "bases"), "per-qubit bases need an explicit attacked list");
            }
            if (s.contains("basis")) {
                const auto b = get_eve_basis(s["basis"], child(sp, "basis"));
                eve.basis_set = {b};
            } else {
                const auto p = child(sp, "bases");
                const json& m = s["bases"];
                if (!m.is_object()) throw ConfigError(p, "expected an object mapping qubit index to basis");
                for (const auto& [key, value] : m.items()) {
                    const auto kp = child(p, key);
                    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
                        throw ConfigError(kp, "key must be a qubit index");
                    }
                    const std::size_t q = std::stoul(key);
                    if (std::find(eve.attacked.begin(), eve.attacked.end(), q) == eve.attacked.end()) {
                        throw ConfigError(kp, "qubit is not in the attacked list");
                    }
                    eve.fixed.emplace(q, get_eve_basis(value, kp));
                }
                for (std::size_t q : eve.attacked) {
                    if (!eve.fixed.count(q)) throw ConfigError(p, "missing basis for attacked qubit " + std::to_string(q));
                }
            }
        } else {
            throw ConfigError(child(sp, "type"), "expected \"uniform\" or \"fixed\"");
        }
    }
    return eve;
}

adversary::NoiseAttackConfig parse_noise(const json& j, const std::string& ptr) {
    require_object(j, ptr, {"targets", "ancilla_value"});
    adversary::NoiseAttackConfig cfg;
    if (!j.contains("targets")) throw ConfigError(ptr, "missing key \"targets\"");
    const auto tp = child(ptr, "targets");
    const json& targets = require_array(j["targets"], tp, true);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto p = child(tp, i);
        require_object(targets[i], p, {"qubit", "gate"});
        if (!targets[i].contains("qubit") || !targets[i].contains("gate")) throw ConfigError(p, "needs qubit and gate");
        adversary::NoiseTarget t;
        t.qubit = get_index(targets[i]["qubit"], child(p, "qubit"));
        const auto gate = get_string(targets[i]["gate"], child(p, "gate"));
        if (gate == "CX") t.gate = GateKind::X;
        else if (gate == "CY") t.gate = GateKind::Y;
        else if (gate == "CZ") t.gate = GateKind::Z;
        else throw ConfigError(child(p, "gate"), "expected CX, CY or CZ");
        cfg.targets.push_back(t);
    }
    if (j.contains("ancilla_value")) cfg.ancilla_value = get_bit(j["ancilla_value"], child(ptr, "ancilla_value"));
    return cfg;
}

std::vector<double> get_rates(const json& j, const std::string& ptr, std::size_t n) {
    if (j.is_number()) return std::vector<double>(n, get_probability(j, ptr));
    require_array(j, ptr);
    if (j.size() != n) throw ConfigError(ptr, "expected " + std::to_string(n) + " entries, one per key qubit");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_probability(j[i], child(ptr, i)));
    return out;
}

adversary::ReadoutNoiseModel parse_readout(const json& j, const std::string& ptr, std::size_t n) {
    require_object(j, ptr, {"p01", "p10"});
    adversary::ReadoutNoiseModel m = adversary::ReadoutNoiseModel::uniform(n, 0.0, 0.0);
    if (j.contains("p01")) m.p01 = get_rates(j["p01"], child(ptr, "p01"), n);
    if (j.contains("p10")) m.p10 = get_rates(j["p10"], child(ptr, "p10"), n);
    return m;
}

MitigationSpec parse_mitigation(const json& j, const std::string& ptr) {
    require_object(j, ptr, {"mode", "method"});
    MitigationSpec spec;
    if (j.contains("mode")) {
        const auto mode = get_string(j["mode"], child(ptr, "mode"));
        if (mode == "full") spec.mode = analysis::CalibrationMode::Full;
        else if (mode == "tensored") spec.mode = analysis::CalibrationMode::Tensored;
        else if (mode != "auto") throw ConfigError(child(ptr, "mode"), "expected full, tensored or auto");
    }
    if (j.contains("method")) {
        try {
            spec.method = analysis::parse_method(get_string(j["method"], child(ptr, "method")));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(child(ptr, "method"), e.what());
        }
    }
    return spec;
}

template <class F>
auto wrap(const std::string& ptr, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ptr, e.what());
    }
}

const std::set<std::string> kRootKeys = {
    "description", "protocol", "n_bits", "bits", "bases", "bob_bases", "basis_set", "shots", "seed", "mode",
    "check_fraction", "qber_abort_threshold", "backend", "eve", "noise_attack", "readout_noise", "mitigation",
    "outputs", "expected_p1"};

}  // namespace

std::uint64_t select_seed(const json& doc, std::optional<std::uint64_t> override_seed) {
    if (override_seed) return *override_seed;
    if (doc.is_object() && doc.contains("seed")) return get_unsigned(doc["seed"], "/seed");
    if (const char* env = std::getenv("QKDLAB_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || env[0] == '-') throw ConfigError("", "QKDLAB_SEED is not a nonnegative integer");
        return v;
    }
    return 0;
}

Scenario parse_scenario(const json& doc, std::optional<std::uint64_t> override_seed) {
    require_object(doc, "", kRootKeys);
    Scenario sc;
    auto& cfg = sc.session;

    if (!doc.contains("protocol")) throw ConfigError("", "missing key \"protocol\"");
    cfg.protocol = wrap("/protocol", [&] { return protocol::parse_protocol(get_string(doc["protocol"], "/protocol")); });
    const bool sarg = protocol::is_sarg04(cfg.protocol);

    if (doc.contains("n_bits")) cfg.n_bits = get_positive(doc["n_bits"], "/n_bits");
    if (doc.contains("bits")) cfg.bits = get_bits(doc["bits"], "/bits");
    if (doc.contains("bases")) {
        if (sarg) cfg.sarg_y = get_sarg_bases(doc["bases"], "/bases");
        else cfg.bases = get_bb84_bases(doc["bases"], "/bases");
    }
    if (doc.contains("bob_bases")) {
        if (sarg) cfg.sarg_bob_y = get_sarg_bases(doc["bob_bases"], "/bob_bases");
        else cfg.bob_bases = get_bb84_bases(doc["bob_bases"], "/bob_bases");
    }
    if (doc.contains("basis_set")) {
        if (sarg) throw ConfigError("/basis_set", "SARG04 always uses the Z and X bases");
        cfg.basis_set = get_bb84_bases(doc["basis_set"], "/basis_set");
    }
    if (doc.contains("shots")) cfg.shots = get_positive(doc["shots"], "/shots");
    cfg.seed = RngSeed{select_seed(doc, override_seed)};
    if (doc.contains("mode")) cfg.mode = wrap("/mode", [&] { return protocol::parse_key_mode(get_string(doc["mode"], "/mode")); });
    if (doc.contains("check_fraction")) cfg.check_fraction = get_number(doc["check_fraction"], "/check_fraction");
    if (doc.contains("qber_abort_threshold")) {
        cfg.qber_abort_threshold = get_number(doc["qber_abort_threshold"], "/qber_abort_threshold");
    }
    if (doc.contains("backend")) {
        cfg.backend = wrap("/backend", [&] { return protocol::parse_backend(get_string(doc["backend"], "/backend")); });
    }
    if (doc.contains("eve")) cfg.eve = parse_eve(doc["eve"], "/eve");
    if (doc.contains("noise_attack")) cfg.noise_attack = parse_noise(doc["noise_attack"], "/noise_attack");

    const std::size_t n = cfg.qubit_count();
    if (n == 0) throw ConfigError("", "give n_bits or an explicit bits list");
    if (cfg.eve) {
        for (std::size_t i = 0; i < cfg.eve->attacked.size(); ++i) {
            if (cfg.eve->attacked[i] >= n) throw ConfigError(child("/eve/attacked", i), "qubit index out of range");
        }
    }
    if (cfg.noise_attack) {
        for (std::size_t i = 0; i < cfg.noise_attack->targets.size(); ++i) {
            if (cfg.noise_attack->targets[i].qubit >= n) {
                throw ConfigError(child(child("/noise_attack/targets", i), "qubit"), "qubit index out of range");
            }
        }
    }
    if (doc.contains("readout_noise")) cfg.readout_noise = parse_readout(doc["readout_noise"], "/readout_noise", n);

    if (doc.contains("mitigation")) {
        sc.mitigation = parse_mitigation(doc["mitigation"], "/mitigation");
        if (cfg.backend != protocol::Backend::ReadoutNoise) {
            throw ConfigError("/mitigation", "mitigation needs backend readout-noise");
        }
        if (cfg.mode != protocol::KeyMode::Statistics) throw ConfigError("/mitigation", "mitigation needs statistics mode");
    }
    if (doc.contains("outputs")) {
        const json& outs = require_array(doc["outputs"], "/outputs", true);
        sc.outputs.clear();
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const auto p = child("/outputs", i);
            auto o = get_string(outs[i], p);
            if (std::find(kOutputKinds.begin(), kOutputKinds.end(), o) == kOutputKinds.end()) {
                throw ConfigError(p, "expected histogram, report, fidelity or qasm");
            }
            if (sc.wants(o)) throw ConfigError(p, "duplicate output");
            sc.outputs.push_back(std::move(o));
        }
    }
    if (sc.wants("qasm") && cfg.eve) throw ConfigError("/outputs", "qasm output is unavailable with eve: intercepts collapse mid-circuit");
    if (sc.wants("fidelity") && cfg.mode != protocol::KeyMode::Statistics) {
        throw ConfigError("/outputs", "fidelity output needs statistics mode");
    }
    if (doc.contains("expected_p1")) {
        const json& e = require_array(doc["expected_p1"], "/expected_p1");
        if (e.size() != n) throw ConfigError("/expected_p1", "expected " + std::to_string(n) + " entries");
        std::vector<double> v;
        for (std::size_t i = 0; i < e.size(); ++i) v.push_back(get_probability(e[i], child("/expected_p1", i)));
        sc.expected_p1 = std::move(v);
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("", e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError("", e.what());
    }
    return sc;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + " is not valid JSON: " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> override_seed) {
    return parse_scenario(read_json_file(path), override_seed);
}

}  // namespace qkdlab::cli
