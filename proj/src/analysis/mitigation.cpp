#include "qkdlab/analysis/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace qkdlab::analysis {

namespace {

/// In-place product with a factor per qubit: bit q sees factor q.
void apply_factors(std::vector<double>& v, const std::vector<std::array<double, 4>>& factors, bool transpose) {
    for (std::size_t q = 0; q < factors.size(); ++q) {
        const auto& f = factors[q];
        const double a = f[0], b = transpose ? f[2] : f[1], c = transpose ? f[1] : f[2], d = f[3];
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i & bit) continue;
            const double x0 = v[i], x1 = v[i | bit];
            v[i] = a * x0 + b * x1;
            v[i | bit] = c * x0 + d * x1;
        }
    }
}

}  // namespace

double MitigationMatrix::at(std::size_t observed, std::size_t prepared) const {
    const std::size_t dim = dimension();
    if (observed >= dim || prepared >= dim) throw std::out_of_range("mitigation matrix index out of range");
    if (mode == CalibrationMode::Full) return dense[observed * dim + prepared];
    double v = 1.0;
    for (std::size_t q = 0; q < n_qubits; ++q) v *= factors[q][2 * (observed >> q & 1U) + (prepared >> q & 1U)];
    return v;
}

std::vector<double> MitigationMatrix::apply(std::span<const double> x) const {
    const std::size_t dim = dimension();
    if (x.size() != dim) throw std::invalid_argument("mitigation: vector length does not match the matrix");
    if (mode == CalibrationMode::Tensored) {
        std::vector<double> v(x.begin(), x.end());
        apply_factors(v, factors, false);
        return v;
    }
    std::vector<double> y(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
        const double* row = &dense[r * dim];
        y[r] = std::inner_product(row, row + dim, x.begin(), 0.0);
    }
    return y;
}

std::vector<double> MitigationMatrix::apply_transpose(std::span<const double> x) const {
    const std::size_t dim = dimension();
    if (x.size() != dim) throw std::invalid_argument("mitigation: vector length does not match the matrix");
    if (mode == CalibrationMode::Tensored) {
        std::vector<double> v(x.begin(), x.end());
        apply_factors(v, factors, true);
        return v;
    }
    std::vector<double> y(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
        if (x[r] == 0.0) continue;
        for (std::size_t c = 0; c < dim; ++c) y[c] += dense[r * dim + c] * x[r];
    }
    return y;
}

double MitigationMatrix::max_row_sum() const {
    const std::size_t dim = dimension();
    if (mode == CalibrationMode::Tensored) {
        double v = 1.0;
        for (const auto& f : factors) v *= std::max(f[0] + f[1], f[2] + f[3]);
        return v;
    }
    double best = 0.0;
    for (std::size_t r = 0; r < dim; ++r) best = std::max(best, std::accumulate(&dense[r * dim], &dense[r * dim] + dim, 0.0));
    return best;
}

void MitigationMatrix::validate() const {
    auto check_column = [](auto entry, std::size_t dim) {
        double sum = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            const double v = entry(r);
            if (!(v >= 0.0)) throw std::domain_error("mitigation matrix has a negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("mitigation matrix column does not sum to 1");
    };
    if (mode == CalibrationMode::Tensored) {
        if (factors.size() != n_qubits) throw std::domain_error("tensored mitigation needs one factor per qubit");
        for (const auto& f : factors) {
            for (std::size_t c = 0; c < 2; ++c) check_column([&](std::size_t r) { return f[2 * r + c]; }, 2);
        }
        return;
    }
    const std::size_t dim = dimension();
    if (dense.size() != dim * dim) throw std::domain_error("mitigation matrix has the wrong size");
    for (std::size_t c = 0; c < dim; ++c) check_column([&](std::size_t r) { return dense[r * dim + c]; }, dim);
}

MitigationMatrix build_confusion_matrix(const adversary::CalibrationSet& cal) {
    MitigationMatrix m;
    m.mode = cal.mode;
    m.n_qubits = cal.n_qubits;
    const std::size_t n = cal.n_qubits;
    const std::size_t dim = m.dimension();
    auto lookup = [&](std::size_t prepared) -> const ShotHistogram& {
        auto it = cal.observed.find(to_bitstring(prepared, n));
        if (it == cal.observed.end()) {
            throw std::invalid_argument("calibration set lacks prepared state " + to_bitstring(prepared, n));
        }
        if (it->second.shots == 0) throw std::invalid_argument("calibration histogram has zero shots");
        if (it->second.n_qubits != n) throw std::invalid_argument("calibration histogram has the wrong width");
        return it->second;
    };

    if (cal.mode == CalibrationMode::Full) {
        m.dense.assign(dim * dim, 0.0);
        for (std::size_t prep = 0; prep < dim; ++prep) {
            const auto freq = lookup(prep).frequencies();
            for (std::size_t obs = 0; obs < dim; ++obs) m.dense[obs * dim + prep] = freq[obs];
        }
    } else {
        const ShotHistogram& zeros = lookup(0);
        const ShotHistogram& ones = lookup(dim - 1);
        for (std::size_t q = 0; q < n; ++q) {
            const auto [z0, z1] = marginal(zeros, q);
            const auto [o0, o1] = marginal(ones, q);
            m.factors.push_back({z0, o0, z1, o1});
        }
    }
    m.validate();
    return m;
}

std::string_view method_name(MitigationMethod m) { return m == MitigationMethod::LeastSquares ? "lsq" : "inverse"; }

MitigationMethod parse_method(std::string_view name) {
    if (name == "lsq") return MitigationMethod::LeastSquares;
    if (name == "inverse") return MitigationMethod::RawInverse;
    throw std::invalid_argument("unknown mitigation method '" + std::string(name) + "' (expected lsq or inverse)");
}

std::vector<double> QuasiHistogram::probabilities() const {
    std::vector<double> p(counts);
    for (auto& v : p) v /= static_cast<double>(shots);
    return p;
}

std::pair<double, double> QuasiHistogram::marginal(std::size_t qubit) const {
    if (qubit >= n_qubits) throw std::out_of_range("quasi-histogram qubit out of range");
    double p1 = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i >> qubit & 1U) p1 += counts[i];
    }
    p1 /= static_cast<double>(shots);
    return {1.0 - p1, p1};
}

void to_json(nlohmann::json& j, const QuasiHistogram& h) {
    auto counts = nlohmann::json::object();
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (h.counts[i] != 0.0) counts[to_bitstring(i, h.n_qubits)] = h.counts[i];
    }
    j = {{"n_qubits", h.n_qubits}, {"shots", h.shots}, {"counts", counts}};
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("simplex projection of an empty vector");
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    std::vector<double> x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - theta, 0.0);
    return x;
}

namespace {

std::vector<double> solve_least_squares(const MitigationMatrix& m, std::span<const double> f, const SolverOptions& opt) {
    const double lipschitz = m.max_row_sum();
    if (!(lipschitz > 0.0)) throw std::domain_error("mitigation matrix is zero");
    std::vector<double> x(f.begin(), f.end());
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        std::vector<double> r = m.apply(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= f[i];
        const std::vector<double> g = m.apply_transpose(r);
        std::vector<double> step(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) step[i] = x[i] - g[i] / lipschitz;
        std::vector<double> next = project_to_simplex(step);
        double moved = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) moved = std::max(moved, std::abs(next[i] - x[i]));
        x = std::move(next);
        if (moved <= opt.step_tolerance) return x;
    }
    throw std::runtime_error("mitigation: least squares did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations");
}

std::vector<double> solve_inverse(const MitigationMatrix& m, std::span<const double> f) {
    if (m.mode == CalibrationMode::Tensored) {
        std::vector<std::array<double, 4>> inverse;
        for (const auto& a : m.factors) {
            const double det = a[0] * a[3] - a[1] * a[2];
            if (std::abs(det) < 1e-12) throw std::domain_error("mitigation: singular readout factor");
            inverse.push_back({a[3] / det, -a[1] / det, -a[2] / det, a[0] / det});
        }
        std::vector<double> x(f.begin(), f.end());
        apply_factors(x, inverse, false);
        return x;
    }
    const auto dim = static_cast<Eigen::Index>(m.dimension());
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(m.dense.data(), dim, dim);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw std::domain_error("mitigation: singular confusion matrix");
    const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(f.data(), dim));
    return {x.data(), x.data() + x.size()};
}

}  // namespace

QuasiHistogram mitigate(const ShotHistogram& hist, const MitigationMatrix& m, MitigationMethod method,
                        const SolverOptions& options) {
    if (hist.n_qubits != m.n_qubits) {
        throw std::invalid_argument("mitigation: histogram has " + std::to_string(hist.n_qubits) +
                                    " qubits, matrix has " + std::to_string(m.n_qubits));
    }
    if (hist.shots == 0) throw std::invalid_argument("mitigation: empty histogram");
    const std::vector<double> f = hist.frequencies();
    std::vector<double> x = method == MitigationMethod::LeastSquares ? solve_least_squares(m, f, options) : solve_inverse(m, f);
    QuasiHistogram out;
    out.n_qubits = hist.n_qubits;
    out.shots = hist.shots;
    for (auto& v : x) v *= static_cast<double>(hist.shots);
    out.counts = std::move(x);
    return out;
}

double tvd(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("tvd: distributions differ in support size");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / 2.0;
}

}  // namespace qkdlab::analysis
