#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qkdlab/core/circuit.hpp"

namespace qkdlab::qasm {

enum class ErrorKind { Syntax, UnknownGate, Range, Redeclaration };

std::string_view error_kind_name(ErrorKind kind);

/// Positions are 1-based and point at the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(ErrorKind kind, std::size_t line, std::size_t column, std::string message);

    ErrorKind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    ErrorKind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// Parses the OpenQASM 2.0 subset:
///
///   OPENQASM 2.0;  include "qelib1.inc";  qreg/creg
///   id h x y z s sdg t tdg u1(a) p(a) cx cy cz
///   barrier ...;   measure q[i] -> c[j];
///
/// Several qregs fold into one index space in declaration order (the second
/// register starts at the size of the first, and so on). Bare register
/// arguments broadcast. Angles accept integer/decimal literals, `pi`, unary
/// minus, + - * / and parentheses, evaluated left to right in double
/// precision. `if`, `gate`, `opaque` and `reset` are rejected, as is any gate
/// acting on an already-measured qubit.
Circuit parse(std::string_view source);

/// Canonical text: header, `qreg q[n];`, `creg c[m];` (only when something is
/// measured, m = n), one statement per line, `barrier q;` at each recorded
/// barrier, measurements last as `measure q[i] -> c[i];`. Angles that are
/// exactly k*pi/m (|k|, m <= 64) print in that form, others as %.17g.
/// LF line endings. Throws std::invalid_argument if the circuit is invalid.
std::string emit(const Circuit& circuit);

/// Angle spelling used by emit, exposed for tests.
std::string format_angle(double theta);

}  // namespace qkdlab::qasm
