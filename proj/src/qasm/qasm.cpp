#include "qkdlab/qasm/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace qkdlab::qasm {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::UnknownGate: return "unknown-gate";
        case ErrorKind::Range: return "range";
        case ErrorKind::Redeclaration: return "redeclaration";
    }
    return "?";
}

ParseError::ParseError(ErrorKind kind, std::size_t line, std::size_t column, std::string message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::string(error_kind_name(kind)) + " error: " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.type = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += advance();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                t.type = Tok::Number;
                lex_number(t);
            } else if (c == '"') {
                t.type = Tok::String;
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') t.text += advance();
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw ParseError(ErrorKind::Syntax, t.line, t.column, "unterminated string");
                }
                advance();
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                t.type = Tok::Symbol;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view(";,[](){}+-*/^").find(c) != std::string_view::npos) {
                t.type = Tok::Symbol;
                t.text = std::string(1, advance());
            } else {
                throw ParseError(ErrorKind::Syntax, t.line, t.column,
                                 std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            t.text += advance();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            t.text += advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) t.text += advance();
            digits();
        }
        if (t.text == ".") throw ParseError(ErrorKind::Syntax, t.line, t.column, "malformed number");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

struct Register {
    std::size_t offset = 0;
    std::size_t size = 0;
};

struct GateSpec {
    GateKind kind;
    std::size_t params;
    bool controlled;
};

const std::map<std::string, GateSpec, std::less<>>& gate_table() {
    static const std::map<std::string, GateSpec, std::less<>> table = {
        {"id", {GateKind::I, 0, false}},   {"h", {GateKind::H, 0, false}},   {"x", {GateKind::X, 0, false}},
        {"y", {GateKind::Y, 0, false}},    {"z", {GateKind::Z, 0, false}},   {"s", {GateKind::S, 0, false}},
        {"sdg", {GateKind::Sdg, 0, false}}, {"t", {GateKind::T, 0, false}},  {"tdg", {GateKind::Tdg, 0, false}},
        {"u1", {GateKind::P, 1, false}},   {"p", {GateKind::P, 1, false}},   {"cx", {GateKind::X, 0, true}},
        {"CX", {GateKind::X, 0, true}},    {"cy", {GateKind::Y, 0, true}},   {"cz", {GateKind::Z, 0, true}},
    };
    return table;
}

/// An argument resolved to absolute indices: one entry, or a whole register.
struct Operand {
    std::vector<std::size_t> indices;
    bool whole_register = false;
    const Token* token = nullptr;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Circuit run() {
        parse_header();
        while (peek().type != Tok::End) statement();
        if (n_qubits_ == 0) {
            const Token& t = peek();
            throw ParseError(ErrorKind::Syntax, t.line, t.column, "no quantum register declared");
        }
        circuit_.n_qubits = n_qubits_;
        circuit_.measured.assign(measured_.begin(), measured_.end());
        return std::move(circuit_);
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

    [[noreturn]] void fail(const Token& t, ErrorKind kind, const std::string& msg) const {
        throw ParseError(kind, t.line, t.column, msg);
    }

    bool is_symbol(std::string_view s) const { return peek().type == Tok::Symbol && peek().text == s; }

    const Token& expect_symbol(std::string_view s) {
        if (!is_symbol(s)) {
            const Token& t = peek();
            fail(t, ErrorKind::Syntax,
                 "expected '" + std::string(s) + "'" + (t.type == Tok::End ? " before end of input" : " near '" + t.text + "'"));
        }
        return next();
    }

    const Token& expect_ident() {
        if (peek().type != Tok::Ident) fail(peek(), ErrorKind::Syntax, "expected an identifier");
        return next();
    }

    std::size_t expect_index() {
        const Token& t = peek();
        if (t.type != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
            fail(t, ErrorKind::Syntax, "expected a non-negative integer");
        }
        next();
        return static_cast<std::size_t>(std::strtoull(t.text.c_str(), nullptr, 10));
    }

    void parse_header() {
        const Token& t = peek();
        if (t.type != Tok::Ident || t.text != "OPENQASM") fail(t, ErrorKind::Syntax, "expected 'OPENQASM 2.0;' header");
        next();
        const Token& v = peek();
        if (v.type != Tok::Number || std::strtod(v.text.c_str(), nullptr) != 2.0) {
            fail(v, ErrorKind::Syntax, "only OpenQASM 2.0 is supported");
        }
        next();
        expect_symbol(";");
    }

    void statement() {
        const Token& head = peek();
        if (head.type != Tok::Ident) fail(head, ErrorKind::Syntax, "expected a statement");
        const std::string& word = head.text;
        if (word == "include") {
            next();
            const Token& file = peek();
            if (file.type != Tok::String) fail(file, ErrorKind::Syntax, "expected a quoted file name");
            if (file.text != "qelib1.inc") fail(file, ErrorKind::Syntax, "only \"qelib1.inc\" may be included");
            next();
            expect_symbol(";");
        } else if (word == "qreg" || word == "creg") {
            declaration(word == "qreg");
        } else if (word == "barrier") {
            next();
            operand_list(true);
            expect_symbol(";");
            circuit_.barriers.push_back(circuit_.ops.size());
        } else if (word == "measure") {
            measure();
        } else if (word == "if" || word == "gate" || word == "opaque" || word == "reset" || word == "OPENQASM") {
            fail(head, ErrorKind::Syntax, "'" + word + "' statements are not supported");
        } else {
            gate_call();
        }
    }

    void declaration(bool quantum) {
        next();
        const Token& name = expect_ident();
        expect_symbol("[");
        const Token& size_tok = peek();
        const std::size_t size = expect_index();
        expect_symbol("]");
        expect_symbol(";");
        if (qregs_.count(name.text) || cregs_.count(name.text)) {
            fail(name, ErrorKind::Redeclaration, "register '" + name.text + "' already declared");
        }
        if (size == 0) fail(size_tok, ErrorKind::Range, "register size must be positive");
        if (quantum) {
            if (n_qubits_ + size > kMaxQubits) {
                fail(size_tok, ErrorKind::Range, "more than " + std::to_string(kMaxQubits) + " qubits declared");
            }
            qregs_[name.text] = {n_qubits_, size};
            n_qubits_ += size;
        } else {
            cregs_[name.text] = {n_clbits_, size};
            n_clbits_ += size;
        }
    }

    Operand operand(bool quantum) {
        const Token& name = expect_ident();
        const auto& regs = quantum ? qregs_ : cregs_;
        auto it = regs.find(name.text);
        if (it == regs.end()) {
            fail(name, ErrorKind::Syntax,
                 std::string(quantum ? "undeclared quantum register '" : "undeclared classical register '") +
                     name.text + "'");
        }
        Operand op;
        op.token = &name;
        if (is_symbol("[")) {
            next();
            const Token& idx_tok = peek();
            const std::size_t idx = expect_index();
            expect_symbol("]");
            if (idx >= it->second.size) {
                fail(idx_tok, ErrorKind::Range,
                     "index " + std::to_string(idx) + " out of range for register '" + name.text + "[" +
                         std::to_string(it->second.size) + "]'");
            }
            op.indices.push_back(it->second.offset + idx);
            op.token = &idx_tok;
        } else {
            op.whole_register = true;
            for (std::size_t k = 0; k < it->second.size; ++k) op.indices.push_back(it->second.offset + k);
        }
        return op;
    }

    std::vector<Operand> operand_list(bool quantum) {
        std::vector<Operand> ops;
        ops.push_back(operand(quantum));
        while (is_symbol(",")) {
            next();
            ops.push_back(operand(quantum));
        }
        return ops;
    }

    /// Number of broadcast iterations for a statement's operands.
    std::size_t broadcast_width(const std::vector<Operand>& ops, const Token& at) const {
        std::size_t width = 1;
        for (const auto& op : ops) {
            if (!op.whole_register) continue;
            if (width != 1 && op.indices.size() != width) fail(at, ErrorKind::Range, "register sizes differ in broadcast");
            width = op.indices.size();
        }
        return width;
    }

    static std::size_t pick(const Operand& op, std::size_t k) { return op.whole_register ? op.indices[k] : op.indices[0]; }

    void measure() {
        const Token& head = next();
        Operand q = operand(true);
        expect_symbol("->");
        Operand c = operand(false);
        expect_symbol(";");
        if (q.whole_register != c.whole_register || q.indices.size() != c.indices.size()) {
            fail(head, ErrorKind::Range, "measure operands have different sizes");
        }
        for (std::size_t qb : q.indices) measured_.insert(qb);
    }

    void gate_call() {
        const Token& name = next();
        auto it = gate_table().find(name.text);
        if (it == gate_table().end()) fail(name, ErrorKind::UnknownGate, "unknown gate '" + name.text + "'");
        const GateSpec spec = it->second;

        std::vector<double> params;
        if (is_symbol("(")) {
            next();
            if (!is_symbol(")")) {
                params.push_back(expression());
                while (is_symbol(",")) {
                    next();
                    params.push_back(expression());
                }
            }
            expect_symbol(")");
        }
        if (params.size() != spec.params) {
            fail(name, ErrorKind::Syntax,
                 "gate '" + name.text + "' takes " + std::to_string(spec.params) + " parameter(s), got " +
                     std::to_string(params.size()));
        }
        const std::size_t arity = spec.controlled ? 2 : 1;
        std::vector<Operand> args = operand_list(true);
        expect_symbol(";");
        if (args.size() != arity) {
            fail(name, ErrorKind::Syntax,
                 "gate '" + name.text + "' takes " + std::to_string(arity) + " qubit argument(s)");
        }
        const std::size_t width = broadcast_width(args, name);
        for (std::size_t k = 0; k < width; ++k) {
            GateOp op;
            op.kind = spec.kind;
            op.theta = params.empty() ? 0.0 : params[0];
            op.target = pick(args.back(), k);
            if (spec.controlled) {
                op.control = pick(args[0], k);
                if (*op.control == op.target) fail(*args[1].token, ErrorKind::Range, "control and target are the same qubit");
            }
            for (std::size_t q : {op.target, op.control.value_or(op.target)}) {
                if (measured_.count(q)) {
                    fail(name, ErrorKind::Syntax, "gate on q[" + std::to_string(q) + "] after its measurement");
                }
            }
            if (!std::isfinite(op.theta)) fail(name, ErrorKind::Range, "angle is not finite");
            circuit_.ops.push_back(op);
        }
    }

    // expression := term (('+'|'-') term)*
    double expression() {
        double v = term();
        while (is_symbol("+") || is_symbol("-")) {
            const bool plus = next().text == "+";
            const double rhs = term();
            v = plus ? v + rhs : v - rhs;
        }
        return v;
    }

    // term := unary (('*'|'/') unary)*
    double term() {
        double v = unary();
        while (is_symbol("*") || is_symbol("/")) {
            const bool mul = next().text == "*";
            const double rhs = unary();
            v = mul ? v * rhs : v / rhs;
        }
        return v;
    }

    double unary() {
        if (is_symbol("-")) {
            next();
            return -unary();
        }
        if (is_symbol("+")) {
            next();
            return unary();
        }
        return primary();
    }

    double primary() {
        const Token& t = peek();
        if (t.type == Tok::Number) {
            next();
            return std::strtod(t.text.c_str(), nullptr);
        }
        if (t.type == Tok::Ident && t.text == "pi") {
            next();
            return std::numbers::pi;
        }
        if (is_symbol("(")) {
            next();
            const double v = expression();
            expect_symbol(")");
            return v;
        }
        fail(t, ErrorKind::Syntax, "expected an angle expression");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, Register> qregs_;
    std::map<std::string, Register> cregs_;
    std::size_t n_qubits_ = 0;
    std::size_t n_clbits_ = 0;
    std::set<std::size_t> measured_;
    Circuit circuit_;
};

std::string_view emit_name(const GateOp& op) {
    if (op.control) {
        switch (op.kind) {
            case GateKind::X: return "cx";
            case GateKind::Y: return "cy";
            case GateKind::Z: return "cz";
            default: throw std::invalid_argument("emit: unsupported controlled gate");
        }
    }
    switch (op.kind) {
        case GateKind::I: return "id";
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::H: return "h";
        case GateKind::S: return "s";
        case GateKind::Sdg: return "sdg";
        case GateKind::T: return "t";
        case GateKind::Tdg: return "tdg";
        case GateKind::P: return "u1";
    }
    return "?";
}

}  // namespace

Circuit parse(std::string_view source) { return Parser(Lexer(source).run()).run(); }

std::string format_angle(double theta) {
    using std::numbers::pi;
    if (theta == 0.0) return "0";
    // Reproduce the parser's left-to-right evaluation of "k*pi/m" bit for bit.
    for (int m = 1; m <= 64; ++m) {
        const double k = std::nearbyint(theta * m / pi);
        if (k == 0.0 || std::abs(k) > 64.0) continue;
        if ((k * pi) / m != theta) continue;
        std::string s = k < 0 ? "-" : "";
        const long ak = static_cast<long>(std::abs(k));
        if (ak != 1) s += std::to_string(ak) + "*";
        s += "pi";
        if (m != 1) s += "/" + std::to_string(m);
        return s;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", theta);
    return buf;
}

std::string emit(const Circuit& circuit) {
    circuit.validate();
    std::ostringstream os;
    os << "OPENQASM 2.0;\n"
       << "include \"qelib1.inc\";\n"
       << "qreg q[" << circuit.n_qubits << "];\n";
    if (!circuit.measured.empty()) os << "creg c[" << circuit.n_qubits << "];\n";
    std::size_t b = 0;
    auto flush_barriers = [&](std::size_t upto) {
        while (b < circuit.barriers.size() && circuit.barriers[b] == upto) {
            os << "barrier q;\n";
            ++b;
        }
    };
    for (std::size_t k = 0; k < circuit.ops.size(); ++k) {
        flush_barriers(k);
        const GateOp& op = circuit.ops[k];
        os << emit_name(op);
        if (is_parameterized(op.kind)) os << '(' << format_angle(op.theta) << ')';
        os << ' ';
        if (op.control) os << "q[" << *op.control << "],";
        os << "q[" << op.target << "];\n";
    }
    flush_barriers(circuit.ops.size());
    for (std::size_t q : circuit.measured) os << "measure q[" << q << "] -> c[" << q << "];\n";
    return os.str();
}

}  // namespace qkdlab::qasm
