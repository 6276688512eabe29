#include "qkdlab/core/gates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qkdlab {

Mat2 Mat2::identity() { return diag(1.0, 1.0); }

Mat2 Mat2::diag(Amplitude a, Amplitude b) {
    Mat2 r;
    r(0, 0) = a;
    r(1, 1) = b;
    return r;
}

Mat2 Mat2::adjoint() const {
    Mat2 r;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            r(i, j) = std::conj((*this)(j, i));
        }
    }
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
        }
    }
    return r;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (std::size_t k = 0; k < 4; ++k) r.m[k] = a.m[k] + b.m[k];
    return r;
}

Mat2 operator*(Amplitude s, const Mat2& a) {
    Mat2 r;
    for (std::size_t k = 0; k < 4; ++k) r.m[k] = s * a.m[k];
    return r;
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a.m[k] - b.m[k]));
    return d;
}

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::I: return "I";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::S: return "S";
        case GateKind::Sdg: return "Sdg";
        case GateKind::T: return "T";
        case GateKind::Tdg: return "Tdg";
        case GateKind::P: return "P";
    }
    return "?";
}

GateKind parse_gate_kind(std::string_view name) {
    for (GateKind k : {GateKind::I, GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S,
                       GateKind::Sdg, GateKind::T, GateKind::Tdg, GateKind::P}) {
        if (gate_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown gate name '" + std::string(name) + "'");
}

Mat2 gate_matrix(GateKind kind, std::optional<double> theta) {
    using std::numbers::pi;
    if (is_parameterized(kind) != theta.has_value()) {
        throw std::invalid_argument(is_parameterized(kind)
                                        ? "gate P requires an angle"
                                        : "gate " + std::string(gate_name(kind)) + " takes no angle");
    }
    const Amplitude i{0.0, 1.0};
    switch (kind) {
        case GateKind::I: return Mat2::identity();
        case GateKind::X: {
            Mat2 r;
            r(0, 1) = 1.0;
            r(1, 0) = 1.0;
            return r;
        }
        case GateKind::Y: {
            Mat2 r;
            r(0, 1) = -i;
            r(1, 0) = i;
            return r;
        }
        case GateKind::Z: return Mat2::diag(1.0, -1.0);
        case GateKind::H: {
            const double s = 1.0 / std::sqrt(2.0);
            Mat2 r;
            r(0, 0) = s;
            r(0, 1) = s;
            r(1, 0) = s;
            r(1, 1) = -s;
            return r;
        }
        // e^{-i pi/2} written out exactly; std::polar would leave a 6e-17 real part.
        case GateKind::S: return Mat2::diag(1.0, -i);
        case GateKind::Sdg: return Mat2::diag(1.0, i);
        case GateKind::T: return Mat2::diag(1.0, std::polar(1.0, pi / 4));
        case GateKind::Tdg: return Mat2::diag(1.0, std::polar(1.0, -pi / 4));
        case GateKind::P:
            if (!std::isfinite(*theta)) throw std::invalid_argument("gate P: non-finite angle");
            return Mat2::diag(1.0, std::polar(1.0, *theta));
    }
    throw std::invalid_argument("unknown gate kind");
}

Mat2 GateOp::matrix() const {
    return is_parameterized(kind) ? gate_matrix(kind, theta) : gate_matrix(kind);
}

std::string GateOp::to_string() const {
    std::ostringstream os;
    if (control) os << 'C';
    os << gate_name(kind);
    if (is_parameterized(kind)) os << '(' << theta << ')';
    os << ' ';
    if (control) os << "q[" << *control << "],";
    os << "q[" << target << ']';
    return os.str();
}

}  // namespace qkdlab
