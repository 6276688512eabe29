#include "qkdlab/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "qkdlab/analysis/mitigation.hpp"
#include "qkdlab/analysis/report.hpp"
#include "qkdlab/qasm/qasm.hpp"

namespace qkdlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir) {
    fs::create_directories(dir);
    if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
}

json mat_json(const Mat2& m) {
    auto rows = json::array();
    for (std::size_t r = 0; r < 2; ++r) {
        auto row = json::array();
        for (std::size_t c = 0; c < 2; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

/// Joint distribution of independent qubits with the given P(1).
std::vector<double> product_distribution(const std::vector<double>& p1) {
    std::vector<double> p(std::size_t{1} << p1.size(), 1.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t q = 0; q < p1.size(); ++q) p[i] *= (i >> q & 1U) ? p1[q] : 1.0 - p1[q];
    }
    return p;
}

json mitigation_json(const Scenario& sc, const protocol::SessionResult& result, const std::vector<double>& expected) {
    const auto& cfg = sc.session;
    const auto cal = adversary::build_calibration_set(result.n_bits, *cfg.readout_noise, cfg.shots,
                                                      derive_seed(cfg.seed, Stream::Calibration), sc.mitigation->mode);
    const auto m = analysis::build_confusion_matrix(cal);
    const auto mitigated = analysis::mitigate(*result.histogram, m, sc.mitigation->method);
    const auto ideal = product_distribution(expected);
    std::vector<double> p1;
    for (std::size_t q = 0; q < result.n_bits; ++q) p1.push_back(mitigated.marginal(q).second);
    return {{"mode", cal.mode == analysis::CalibrationMode::Full ? "full" : "tensored"},
            {"method", analysis::method_name(sc.mitigation->method)},
            {"calibration_shots", cfg.shots},
            {"tvd_raw", analysis::tvd(result.histogram->frequencies(), ideal)},
            {"tvd_mitigated", analysis::tvd(mitigated.probabilities(), ideal)},
            {"mitigated_p1", p1},
            {"mitigated_histogram", mitigated}};
}

}  // namespace

TomographyRun run_tomography(const protocol::ResolvedSession& session, std::size_t qubit) {
    if (qubit >= session.n) {
        throw std::out_of_range("qubit " + std::to_string(qubit) + " is out of range for a " + std::to_string(session.n) +
                                "-qubit scenario");
    }
    const auto& cfg = session.config;
    const RngSeed base = derive_seed(cfg.seed, Stream::Tomography, qubit);
    TomographyRun run;
    run.qubit = qubit;
    run.shots = cfg.shots;
    const std::size_t only[1] = {qubit};
    for (std::size_t k = 0; k < 3; ++k) {
        protocol::Pipeline p = protocol::transmission_pipeline(session, only, derive_seed(session.eve_root, 2, 3 * qubit + k));
        p.decode = analysis::tomography_rotation(analysis::kPauliAxes[k], 0);
        ShotHistogram h = protocol::run_pipeline(p, cfg.shots, derive_seed(base, 0, k));
        if (cfg.backend == protocol::Backend::ReadoutNoise) {
            h = adversary::apply_readout_noise(h, cfg.readout_noise->slice(qubit, 1), derive_seed(base, 1, k));
        }
        run.histograms[k] = std::move(h);
    }
    run.expectations = analysis::estimate_expectations(run.histograms[0], run.histograms[1], run.histograms[2], 0);
    run.reconstruction = analysis::reconstruct_rho(run.expectations);
    run.theoretical = analysis::pure_rho(session.preparation[qubit]);
    run.fidelity = analysis::fidelity(run.reconstruction.rho, run.theoretical);
    return run;
}

json tomography_json(const TomographyRun& run) {
    json settings = json::object();
    for (std::size_t k = 0; k < 3; ++k) settings[std::string(analysis::axis_name(analysis::kPauliAxes[k]))] = run.histograms[k];
    return {{"qubit", run.qubit},
            {"shots_per_setting", run.shots},
            {"settings", settings},
            {"expectations", {{"x", run.expectations.ex}, {"y", run.expectations.ey}, {"z", run.expectations.ez}}},
            {"bloch_norm", run.reconstruction.bloch_norm},
            {"rescaled", run.reconstruction.rescaled},
            {"rho", mat_json(run.reconstruction.rho.m)},
            {"rho_theoretical", mat_json(run.theoretical.m)},
            {"fidelity", run.fidelity}};
}

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir, std::optional<std::uint64_t> seed, std::ostream& out) {
    const Scenario sc = load_scenario(scenario_path, seed);
    ensure_dir(out_dir);
    const auto session = protocol::resolve_session(sc.session);
    const protocol::SessionResult result = protocol::run_session(sc.session);
    const std::vector<double> expected = sc.expected_p1 ? *sc.expected_p1 : result.expected_p1;

    auto rows = analysis::compare_to_expected(result, expected);
    json fidelity = json::array();
    if (sc.wants("fidelity")) {
        for (std::size_t q = 0; q < result.n_bits; ++q) {
            const auto t = run_tomography(session, q);
            rows[q].fidelity = t.fidelity;
            fidelity.push_back(tomography_json(t));
        }
        write_json(out_dir / "fidelity.json", fidelity);
    }

    json session_json = result;
    session_json["backend"] = protocol::backend_name(sc.session.backend);
    session_json["report"] = analysis::report_json(rows);
    write_json(out_dir / "session.json", session_json);

    if (sc.wants("histogram")) {
        if (result.histogram) write_json(out_dir / "histogram.json", *result.histogram);
        else out << "note: single-shot mode keeps no joint histogram; histogram.json not written\n";
    }
    if (sc.wants("report")) {
        std::ostringstream csv;
        analysis::write_report_csv(csv, rows);
        write_text(out_dir / "report.csv", csv.str());
    }
    if (sc.wants("qasm")) write_text(out_dir / "circuit.qasm", qasm::emit(protocol::session_circuit(session)));
    if (sc.mitigation) write_json(out_dir / "mitigation.json", mitigation_json(sc, result, expected));

    std::size_t passed = 0;
    for (const auto& r : rows) passed += r.pass ? 1 : 0;
    out << protocol::protocol_name(result.protocol) << ": " << result.n_bits << " qubits, " << result.shots
        << " shots, seed " << result.seed.value << "\n"
        << "sifted " << result.sift.accepted.size() << "/" << result.n_bits << ", check qber "
        << (result.check_qber ? analysis::format_real(*result.check_qber) : "n/a") << ", final key "
        << result.final_key_alice.size() << " bits\n"
        << "marginals within 3 sigma: " << passed << "/" << rows.size() << "\n";
    if (result.aborted) {
        out << "ABORT: check qber exceeds " << analysis::format_real(sc.session.qber_abort_threshold) << "\n";
        return kExitAbort;
    }
    return kExitOk;
}

int cmd_qasm_parse(const fs::path& file, std::ostream& out) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    const Circuit c = qasm::parse(text.str());
    run_circuit(c);
    out << "qubits: " << c.n_qubits << "\nops: " << c.ops.size() << "\nbarriers: " << c.barriers.size() << "\nmeasured:";
    for (std::size_t q : c.measured) out << ' ' << q;
    out << "\n";
    return kExitOk;
}

int cmd_qasm_emit(const fs::path& scenario, const std::optional<fs::path>& out_file, std::optional<std::uint64_t> seed,
                  std::ostream& out) {
    const Scenario sc = load_scenario(scenario, seed);
    const std::string text = qasm::emit(protocol::session_circuit(protocol::resolve_session(sc.session)));
    if (out_file) write_text(*out_file, text);
    else out << text;
    return kExitOk;
}

json::json_pointer resolve_parameter_path(const json& doc, const std::string& path) {
    if (path.empty()) throw ConfigError("/parameter", "empty parameter path");
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        tokens.push_back(path.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (tokens.back().empty()) throw ConfigError("/parameter", "empty segment in '" + path + "'");
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    auto is_index = [](const std::string& t) { return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }); };
    const json* cur = &doc;
    std::string pointer;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        const bool last = i + 1 == tokens.size();
        if (cur->is_object()) {
            if (t.find_first_of("~/") != std::string::npos) throw ConfigError("/parameter", "unsupported character in '" + path + "'");
            pointer += "/" + t;
            if (last) break;
            if (!cur->contains(t)) throw ConfigError("/parameter", "'" + path + "' does not resolve: no key '" + t + "'");
            cur = &(*cur)[t];
        } else if (cur->is_array()) {
            if (!is_index(t) || std::stoul(t) >= cur->size()) {
                throw ConfigError("/parameter", "'" + path + "' does not resolve: bad array index '" + t + "'");
            }
            pointer += "/" + t;
            if (last) break;
            cur = &(*cur)[std::stoul(t)];
        } else {
            throw ConfigError("/parameter", "'" + path + "' does not resolve: '" + t + "' indexes a scalar");
        }
    }
    return json::json_pointer(pointer);
}

namespace {

struct SweepRow {
    json value;
    double qber_mean = NAN;
    double qber_stderr = NAN;
    double sift_rate = 0.0;
    double raw_error_mean = 0.0;
};

SweepRow run_grid_point(json doc, const json::json_pointer& target, const json& value, std::size_t point,
                        std::size_t reps, RngSeed base) {
    doc[target] = value;
    SweepRow row;
    row.value = value;
    std::vector<double> qbers;
    for (std::size_t r = 0; r < reps; ++r) {
        doc["seed"] = derive_seed(base, Stream::Sweep, point * reps + r).value;
        const Scenario sc = parse_scenario(doc);
        const auto res = protocol::run_session(sc.session);
        if (res.sifted_qber) qbers.push_back(*res.sifted_qber);
        row.sift_rate += static_cast<double>(res.sift.accepted.size()) / static_cast<double>(res.n_bits);
        // Per-shot disagreement with Alice's bit over every qubit, sifted or not.
        double errors = 0.0;
        for (std::size_t i = 0; i < res.n_bits; ++i)
            errors += res.alice_bits[i] ? 1.0 - res.observed_p1[i] : res.observed_p1[i];
        row.raw_error_mean += errors / static_cast<double>(res.n_bits);
    }
    row.sift_rate /= static_cast<double>(reps);
    row.raw_error_mean /= static_cast<double>(reps);
    if (!qbers.empty()) {
        double mean = 0.0;
        for (double q : qbers) mean += q;
        mean /= static_cast<double>(qbers.size());
        double var = 0.0;
        for (double q : qbers) var += (q - mean) * (q - mean);
        row.qber_mean = mean;
        row.qber_stderr = qbers.size() > 1 ? std::sqrt(var / static_cast<double>(qbers.size() - 1) /
                                                       static_cast<double>(qbers.size()))
                                           : 0.0;
    }
    return row;
}

std::string cell(double v) { return std::isnan(v) ? "" : analysis::format_real(v); }

}  // namespace

int cmd_sweep(const fs::path& scenario, const fs::path& sweep_spec, const fs::path& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out) {
    json doc = read_json_file(scenario);
    const RngSeed base{select_seed(doc, seed)};
    parse_scenario(doc, base.value);  // the unmodified scenario must be valid too

    const json spec = read_json_file(sweep_spec);
    if (!spec.is_object()) throw ConfigError("", "sweep spec must be an object");
    for (const auto& [key, v] : spec.items()) {
        if (key != "parameter" && key != "values" && key != "repetitions") throw ConfigError("/" + key, "unknown key");
    }
    if (!spec.contains("parameter") || !spec["parameter"].is_string()) throw ConfigError("/parameter", "expected a string");
    if (!spec.contains("values") || !spec["values"].is_array()) throw ConfigError("/values", "expected an array");
    if (spec["values"].empty()) throw ConfigError("/values", "grid must not be empty");
    std::size_t reps = 1;
    if (spec.contains("repetitions")) {
        const json& r = spec["repetitions"];
        if (!r.is_number_unsigned() || r.get<std::uint64_t>() == 0) throw ConfigError("/repetitions", "expected a positive integer");
        reps = r.get<std::size_t>();
    }
    const std::string parameter = spec["parameter"].get<std::string>();
    const auto target = resolve_parameter_path(doc, parameter);
    ensure_dir(out_dir);

    std::vector<std::future<SweepRow>> jobs;
    const json& values = spec["values"];
    for (std::size_t g = 0; g < values.size(); ++g) {
        jobs.push_back(std::async(std::launch::async, run_grid_point, doc, target, values[g], g, reps, base));
    }
    std::ostringstream csv;
    csv << "parameter,qber_mean,qber_stderr,sift_rate,raw_error_mean\n";
    for (std::size_t g = 0; g < jobs.size(); ++g) {
        SweepRow row;
        try {
            row = jobs[g].get();
        } catch (const ConfigError& e) {
            throw ConfigError("/values/" + std::to_string(g), e.what());
        }
        const std::string v = row.value.is_string() ? row.value.get<std::string>() : row.value.dump();
        csv << v << ',' << cell(row.qber_mean) << ',' << cell(row.qber_stderr) << ',' << cell(row.sift_rate) << ','
            << cell(row.raw_error_mean) << '\n';
    }
    write_text(out_dir / "sweep.csv", csv.str());
    out << "sweep over " << parameter << ": " << values.size() << " points x " << reps << " repetitions\n";
    return kExitOk;
}

int cmd_tomo(const fs::path& scenario, std::size_t qubit, const fs::path& out_dir, std::optional<std::uint64_t> seed,
             std::ostream& out) {
    const Scenario sc = load_scenario(scenario, seed);
    const auto session = protocol::resolve_session(sc.session);
    const auto run = run_tomography(session, qubit);
    ensure_dir(out_dir);
    write_json(out_dir / "tomography.json", tomography_json(run));
    out << "q[" << qubit << "] fidelity " << analysis::format_real(run.fidelity) << " from 3 x " << run.shots
        << " shots" << (run.reconstruction.rescaled ? " (Bloch vector rescaled)" : "") << "\n";
    return kExitOk;
}

}  // namespace qkdlab::cli
