#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qkdlab/protocol/session.hpp"

namespace qkdlab::analysis {

/// One report row. zscore is +-inf when the binomial sigma is zero and the
/// observation differs from the expectation.
struct QubitComparison {
    std::size_t qubit = 0;
    double expected_p1 = 0.0;
    double observed_p1 = 0.0;
    double zscore = 0.0;
    bool pass = true;
    std::optional<double> fidelity;
};

inline constexpr double kPassSigma = 3.0;

/// p(1 - p) at or below this counts as a certain outcome (sigma = 0).
inline constexpr double kCertainVariance = 1e-12;

/// z = (observed - expected) / sqrt(expected (1 - expected) / shots); pass
/// iff |z| <= 3. Throws std::invalid_argument on an empty table, a length
/// mismatch, or zero shots.
std::vector<QubitComparison> compare_to_expected(std::span<const double> observed_p1, std::uint64_t shots,
                                                 std::span<const double> expected_p1);

/// Same, using the session's observed marginals and shot count.
std::vector<QubitComparison> compare_to_expected(const protocol::SessionResult& result,
                                                 std::span<const double> expected_p1);

/// Fixed column order: qubit,expected_p1,observed_p1,zscore,pass,fidelity.
/// Reals print with 17 significant digits; an absent fidelity is an empty
/// cell and an infinite z prints as inf or -inf.
void write_report_csv(std::ostream& os, std::span<const QubitComparison> rows);

/// Array of row objects; infinite z and absent fidelity become null.
nlohmann::json report_json(std::span<const QubitComparison> rows);

/// Round-trip decimal for a finite double, "inf"/"-inf"/"nan" otherwise.
std::string format_real(double v);

}  // namespace qkdlab::analysis
