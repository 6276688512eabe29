#include "qkdlab/protocol/basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qkdlab::protocol {

using std::numbers::pi;

double alias_phase(BasisAlias a) {
    switch (a) {
        case BasisAlias::X: return 0.0;
        case BasisAlias::Y: return -pi / 2;
        case BasisAlias::HT: return pi / 4;
        case BasisAlias::HZ: return pi;
    }
    return 0.0;
}

std::string_view alias_name(BasisAlias a) {
    switch (a) {
        case BasisAlias::X: return "X";
        case BasisAlias::Y: return "Y";
        case BasisAlias::HT: return "HT";
        case BasisAlias::HZ: return "HZ";
    }
    return "?";
}

BasisAlias parse_alias(std::string_view name) {
    for (BasisAlias a : {BasisAlias::X, BasisAlias::Y, BasisAlias::HT, BasisAlias::HZ}) {
        if (alias_name(a) == name) return a;
    }
    throw std::invalid_argument("unknown basis '" + std::string(name) + "' (expected X, Y, HT or HZ)");
}

BasisSpec BasisSpec::named(BasisAlias a) { return BasisSpec{alias_phase(a), a}; }

std::string BasisSpec::name() const {
    if (alias) return std::string(alias_name(*alias));
    std::ostringstream os;
    os.precision(17);
    os << phase;
    return os.str();
}

bool BasisSpec::same_as(const BasisSpec& other) const {
    if (alias && other.alias) return *alias == *other.alias;
    return std::abs(phase - other.phase) <= 1e-12;
}

std::vector<BasisSpec> two_basis_set() { return {BasisSpec::named(BasisAlias::X), BasisSpec::named(BasisAlias::Y)}; }

std::vector<BasisSpec> four_basis_set() {
    return {BasisSpec::named(BasisAlias::X), BasisSpec::named(BasisAlias::Y), BasisSpec::named(BasisAlias::HT),
            BasisSpec::named(BasisAlias::HZ)};
}

namespace {

std::optional<GateOp> phase_gate(const BasisSpec& basis, bool inverse, std::size_t target) {
    if (basis.alias) {
        switch (*basis.alias) {
            case BasisAlias::X: return std::nullopt;
            case BasisAlias::Y: return GateOp::single(inverse ? GateKind::Sdg : GateKind::S, target);
            case BasisAlias::HT: return GateOp::single(inverse ? GateKind::Tdg : GateKind::T, target);
            case BasisAlias::HZ: return GateOp::single(GateKind::Z, target);
        }
    }
    if (basis.phase == 0.0) return std::nullopt;
    return GateOp::phase(inverse ? -basis.phase : basis.phase, target);
}

}  // namespace

std::vector<GateOp> encode_ops(int bit, const BasisSpec& basis, std::size_t target) {
    std::vector<GateOp> ops;
    if (bit) ops.push_back(GateOp::single(GateKind::X, target));
    ops.push_back(GateOp::single(GateKind::H, target));
    if (auto p = phase_gate(basis, false, target)) ops.push_back(*p);
    return ops;
}

std::vector<GateOp> decode_ops(const BasisSpec& basis, std::size_t target) {
    std::vector<GateOp> ops;
    if (auto p = phase_gate(basis, true, target)) ops.push_back(*p);
    ops.push_back(GateOp::single(GateKind::H, target));
    return ops;
}

MeasurementBasis MeasurementBasis::equatorial(const BasisSpec& basis) {
    return {basis.name(), decode_ops(basis), {encode_ops(0, basis), encode_ops(1, basis)}};
}

MeasurementBasis MeasurementBasis::computational() {
    return {"Z", {}, {std::vector<GateOp>{}, std::vector<GateOp>{GateOp::single(GateKind::X, 0)}}};
}

MeasurementBasis MeasurementBasis::sarg_reference(int y) {
    return y ? equatorial(BasisSpec::named(BasisAlias::X)) : computational();
}

std::vector<GateOp> retarget(std::vector<GateOp> ops, std::size_t target) {
    for (auto& op : ops) op.target = target;
    return ops;
}

}  // namespace qkdlab::protocol
