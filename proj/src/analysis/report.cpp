#include "qkdlab/analysis/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qkdlab::analysis {

std::vector<QubitComparison> compare_to_expected(std::span<const double> observed_p1, std::uint64_t shots,
                                                 std::span<const double> expected_p1) {
    if (expected_p1.empty()) throw std::invalid_argument("compare: empty expected table");
    if (expected_p1.size() != observed_p1.size()) {
        throw std::invalid_argument("compare: expected table has " + std::to_string(expected_p1.size()) +
                                    " rows for " + std::to_string(observed_p1.size()) + " qubits");
    }
    if (shots == 0) throw std::invalid_argument("compare: zero shots");
    std::vector<QubitComparison> rows;
    for (std::size_t q = 0; q < expected_p1.size(); ++q) {
        const double e = expected_p1[q];
        const double o = observed_p1[q];
        if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("compare: expected probability outside [0, 1]");
        // Simulated certainties land a few ulps off 0 or 1; their variance is
        // rounding noise, not a binomial spread.
        const double var = e * (1.0 - e);
        const double sigma = var > kCertainVariance ? std::sqrt(var / static_cast<double>(shots)) : 0.0;
        double z = 0.0;
        if (sigma > 0.0) {
            z = (o - e) / sigma;
        } else if (std::abs(o - e) > 1e-12) {
            z = o > e ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        }
        rows.push_back({q, e, o, z, std::abs(z) <= kPassSigma, std::nullopt});
    }
    return rows;
}

std::vector<QubitComparison> compare_to_expected(const protocol::SessionResult& result,
                                                 std::span<const double> expected_p1) {
    return compare_to_expected(result.observed_p1, result.shots, expected_p1);
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_report_csv(std::ostream& os, std::span<const QubitComparison> rows) {
    os << "qubit,expected_p1,observed_p1,zscore,pass,fidelity\n";
    for (const auto& r : rows) {
        os << r.qubit << ',' << format_real(r.expected_p1) << ',' << format_real(r.observed_p1) << ','
           << format_real(r.zscore) << ',' << (r.pass ? "true" : "false") << ','
           << (r.fidelity ? format_real(*r.fidelity) : "") << '\n';
    }
}

nlohmann::json report_json(std::span<const QubitComparison> rows) {
    auto out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"qubit", r.qubit},
                       {"expected_p1", r.expected_p1},
                       {"observed_p1", r.observed_p1},
                       {"zscore", std::isfinite(r.zscore) ? nlohmann::json(r.zscore) : nlohmann::json(nullptr)},
                       {"pass", r.pass},
                       {"fidelity", r.fidelity ? nlohmann::json(*r.fidelity) : nlohmann::json(nullptr)}});
    }
    return out;
}

}  // namespace qkdlab::analysis
