#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace qkdlab {

using Amplitude = std::complex<double>;

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<Amplitude, 4> m{};

    constexpr Amplitude& operator()(std::size_t r, std::size_t c) { return m[2 * r + c]; }
    constexpr const Amplitude& operator()(std::size_t r, std::size_t c) const { return m[2 * r + c]; }

    static Mat2 identity();
    static Mat2 diag(Amplitude a, Amplitude b);

    Mat2 adjoint() const;
    Amplitude trace() const { return m[0] + m[3]; }
    Amplitude det() const { return m[0] * m[3] - m[1] * m[2]; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b);
    friend Mat2 operator+(const Mat2& a, const Mat2& b);
    friend Mat2 operator*(Amplitude s, const Mat2& a);
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest |a_ij - b_ij|.
double max_abs_diff(const Mat2& a, const Mat2& b);

enum class GateKind { I, X, Y, Z, H, S, Sdg, T, Tdg, P };

std::string_view gate_name(GateKind kind);

/// Parses the names used by gate_name (case-sensitive). Throws
/// std::invalid_argument on anything else.
GateKind parse_gate_kind(std::string_view name);

constexpr bool is_parameterized(GateKind kind) { return kind == GateKind::P; }

/// Matrices exactly as the lab notebook prints them. Note S = diag(1, -i),
/// the conjugate of the common convention; Sdg and Tdg are the adjoints.
/// P(theta) = diag(1, e^{i theta}).
///
/// Throws std::invalid_argument when theta is given for a fixed gate, when it
/// is missing for P, or when it is not finite.
Mat2 gate_matrix(GateKind kind, std::optional<double> theta = std::nullopt);

/// One (optionally controlled) single-qubit gate application.
struct GateOp {
    GateKind kind = GateKind::I;
    std::size_t target = 0;
    std::optional<std::size_t> control;
    double theta = 0.0;  // used only by P

    static GateOp single(GateKind kind, std::size_t target) { return {kind, target, std::nullopt, 0.0}; }
    static GateOp phase(double theta, std::size_t target) { return {GateKind::P, target, std::nullopt, theta}; }
    static GateOp controlled(GateKind kind, std::size_t control, std::size_t target) {
        return {kind, target, control, 0.0};
    }

    Mat2 matrix() const;
    std::string to_string() const;

    friend bool operator==(const GateOp&, const GateOp&) = default;
};

}  // namespace qkdlab
