#include "latsym/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace latsym {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double magnitude_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    return mag(rng);
}

} // namespace

OrbitData ode_orbit(const DifferenceSystem& sys,
                    const std::map<std::string, std::vector<double>>& initial, std::size_t steps,
                    const std::map<std::string, double>& params) {
    if (sys.dim != 1) throw SimulateError("ode_orbit needs a one-dimensional lattice");
    OrbitData data;
    data.params = params;
    for (const auto& rule : sys.rules) {
        auto it = initial.find(rule.var);
        std::size_t order = static_cast<std::size_t>(rule.top[0]);
        if (it == initial.end() || it->second.size() != order)
            throw SimulateError("initial data for " + rule.var + " must have " +
                                std::to_string(order) + " values");
        data.values[rule.var] = it->second;
    }
    auto par = [&](const std::string& name) -> double {
        auto it = params.find(name);
        if (it == params.end()) throw EvalError(EvalErrorKind::MissingEntry, "parameter " + name);
        return it->second;
    };
    for (std::size_t n = 0; n < steps; ++n) {
        for (const auto& rule : sys.rules) {
            auto dep = [&](const std::string& v, const MultiIndex& J) -> double {
                const auto& vec = data.values.at(v);
                std::size_t idx = n + static_cast<std::size_t>(J[0]);
                if (idx >= vec.size())
                    throw EvalError(EvalErrorKind::MissingEntry, "orbit index out of range");
                return vec[idx];
            };
            try {
                double v = evaluate_on_data(rule.rhs, {static_cast<long>(n)}, dep, par);
                data.values[rule.var].push_back(v);
            } catch (const EvalError& err) {
                throw SimulateError("singular step at n = " + std::to_string(n) + ": " + err.what());
            }
        }
    }
    return data;
}

GridData quad_fill(const DifferenceSystem& sys,
                   const std::map<std::string, std::vector<double>>& boundary_row,
                   const std::map<std::string, std::vector<double>>& boundary_col, std::size_t M,
                   std::size_t N, const std::map<std::string, double>& params) {
    if (sys.dim != 2) throw SimulateError("quad_fill needs a two-dimensional lattice");
    GridData data;
    data.params = params;
    for (const auto& rule : sys.rules) {
        const auto row = boundary_row.find(rule.var);
        const auto col = boundary_col.find(rule.var);
        if (row == boundary_row.end() || row->second.size() != M + 1)
            throw SimulateError("boundary row for " + rule.var + " must have M+1 values");
        if (col == boundary_col.end() || col->second.size() != N + 1)
            throw SimulateError("boundary column for " + rule.var + " must have N+1 values");
        if (row->second[0] != col->second[0])
            throw SimulateError("boundary row and column disagree at the corner for " + rule.var);
        auto& grid = data.values[rule.var];
        grid.assign(M + 1, std::vector<double>(N + 1, std::numeric_limits<double>::quiet_NaN()));
        for (std::size_t i = 0; i <= M; ++i) grid[i][0] = row->second[i];
        for (std::size_t j = 0; j <= N; ++j) grid[0][j] = col->second[j];
    }
    auto par = [&](const std::string& name) -> double {
        auto it = params.find(name);
        if (it == params.end()) throw EvalError(EvalErrorKind::MissingEntry, "parameter " + name);
        return it->second;
    };
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            for (const auto& rule : sys.rules) {
                auto dep = [&](const std::string& v, const MultiIndex& J) -> double {
                    double val = data.values.at(v).at(i + J[0]).at(j + J[1]);
                    if (std::isnan(val))
                        throw EvalError(EvalErrorKind::MissingEntry, "unfilled grid site");
                    return val;
                };
                try {
                    double v = evaluate_on_data(rule.rhs,
                                                {static_cast<long>(i), static_cast<long>(j)}, dep, par);
                    data.values[rule.var][i + rule.top[0]][j + rule.top[1]] = v;
                } catch (const EvalError& err) {
                    throw SimulateError("singular quad at (" + std::to_string(i) + "," +
                                        std::to_string(j) + "): " + err.what());
                }
            }
        }
    }
    return data;
}

namespace {

int max_offset(const Expr& e, std::size_t axis) {
    int m = 0;
    for (const auto& [var, J] : stencil(e)) m = std::max(m, J[axis]);
    return m;
}

} // namespace

DriftReport drift(const ConservationLaw& P, const OrbitData& data) {
    if (P.dim() != 1) throw SimulateError("orbit drift needs a single-component law");
    const Expr& comp = P.components[0];
    int k = max_offset(comp, 0);
    std::size_t len = data.length();
    DriftReport report;
    auto par = [&](const std::string& name) -> double { return data.params.at(name); };
    auto eval_at = [&](long n, double* mag) {
        auto dep = [&](const std::string& v, const MultiIndex& J) -> double {
            return data.values.at(v).at(static_cast<std::size_t>(n + J[0]));
        };
        return evaluate_on_data(comp, {n}, dep, par, mag);
    };
    if (len < static_cast<std::size_t>(k) + 2) return report;
    double total = 0;
    for (long n = 0; n + 1 + k < static_cast<long>(len); ++n) {
        double m0 = 0, m1 = 0;
        double here = eval_at(n, &m0);
        double r = eval_at(n + 1, &m1) - here;
        double norm = std::abs(r) / (1.0 + std::max(m0, m1));
        report.sites.push_back({{n}, {here}, norm});
        report.max_residual = std::max(report.max_residual, norm);
        total += norm;
    }
    if (!report.sites.empty()) report.mean_residual = total / report.sites.size();
    return report;
}

DriftReport drift(const ConservationLaw& P, const GridData& data) {
    if (P.dim() != 2) throw SimulateError("grid drift needs a two-component law");
    const Expr& F = P.F();
    const Expr& G = P.G();
    long M = static_cast<long>(data.rows()) - 1;
    long N = static_cast<long>(data.cols()) - 1;
    auto par = [&](const std::string& name) -> double { return data.params.at(name); };
    auto eval_at = [&](const Expr& e, long i, long j, double* mag) {
        auto dep = [&](const std::string& v, const MultiIndex& J) -> double {
            return data.values.at(v).at(static_cast<std::size_t>(i + J[0]))
                .at(static_cast<std::size_t>(j + J[1]));
        };
        return evaluate_on_data(e, {i, j}, dep, par, mag);
    };
    long i_hi = std::min(M - 1 - max_offset(F, 0), M - max_offset(G, 0));
    long j_hi = std::min(N - max_offset(F, 1), N - 1 - max_offset(G, 1));
    DriftReport report;
    double total = 0;
    for (long i = 0; i <= i_hi; ++i) {
        for (long j = 0; j <= j_hi; ++j) {
            double mags[4] = {0, 0, 0, 0};
            double f_here = eval_at(F, i, j, &mags[1]);
            double g_here = eval_at(G, i, j, &mags[3]);
            double r = eval_at(F, i + 1, j, &mags[0]) - f_here +
                       eval_at(G, i, j + 1, &mags[2]) - g_here;
            double norm = std::abs(r) / (1.0 + *std::max_element(mags, mags + 4));
            report.sites.push_back({{i, j}, {f_here, g_here}, norm});
            report.max_residual = std::max(report.max_residual, norm);
            total += norm;
        }
    }
    if (!report.sites.empty()) report.mean_residual = total / report.sites.size();
    return report;
}

namespace {

std::optional<Expr> strip_first_reciprocal(const Expr& e) {
    if (e.kind() == Kind::Reciprocal && e.kid(0).kind() != Kind::Constant) return e.kid(0);
    for (std::size_t i = 0; i < e.kids().size(); ++i) {
        if (auto r = strip_first_reciprocal(e.kid(i))) {
            std::vector<Expr> kids = e.kids();
            kids[i] = *r;
            switch (e.kind()) {
                case Kind::Sum: return Expr::sum(std::move(kids));
                case Kind::Product: return Expr::product(std::move(kids));
                case Kind::Power: return Expr::pow(kids[0], kids[1]);
                case Kind::Negate: return Expr::negate(kids[0]);
                case Kind::Reciprocal: return Expr::reciprocal(kids[0]);
                case Kind::Ln: return Expr::ln(kids[0]);
                case Kind::Exp: return Expr::exp(kids[0]);
                case Kind::Tanh: return Expr::tanh(kids[0]);
                case Kind::Abs: return Expr::abs(kids[0]);
                default: return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

std::optional<Expr> negate_first_summand(const Expr& e) {
    if (e.kind() == Kind::Sum) {
        std::vector<Expr> kids = e.kids();
        kids[0] = Expr::negate(kids[0]);
        return Expr::sum(std::move(kids));
    }
    for (std::size_t i = 0; i < e.kids().size(); ++i) {
        if (auto r = negate_first_summand(e.kid(i))) {
            std::vector<Expr> kids = e.kids();
            kids[i] = *r;
            switch (e.kind()) {
                case Kind::Product: return Expr::product(std::move(kids));
                case Kind::Power: return Expr::pow(kids[0], kids[1]);
                case Kind::Negate: return Expr::negate(kids[0]);
                case Kind::Reciprocal: return Expr::reciprocal(kids[0]);
                case Kind::Ln: return Expr::ln(kids[0]);
                case Kind::Exp: return Expr::exp(kids[0]);
                case Kind::Tanh: return Expr::tanh(kids[0]);
                case Kind::Abs: return Expr::abs(kids[0]);
                default: return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

} // namespace

ConservationLaw perturb_law(const ConservationLaw& P) {
    ConservationLaw out = P;
    for (auto& comp : out.components) {
        if (auto r = strip_first_reciprocal(comp)) {
            comp = *r;
            return out;
        }
    }
    for (auto& comp : out.components) {
        if (auto r = negate_first_summand(comp)) {
            comp = *r;
            return out;
        }
    }
    out.components.back() = Expr::negate(out.components.back());
    return out;
}

std::map<std::string, std::vector<double>> random_initial(const DifferenceSystem& sys,
                                                          std::size_t count, std::uint64_t seed) {
    std::map<std::string, std::vector<double>> out;
    std::uint64_t k = 0;
    for (const auto& rule : sys.rules) {
        std::mt19937_64 rng(mix(seed ^ mix(++k)));
        auto& vec = out[rule.var];
        bool positive = sys.domain_of(rule.var) == Domain::Positive;
        for (std::size_t i = 0; i < count; ++i) {
            double v = magnitude_draw(rng);
            if (!positive && (rng() & 1u)) v = -v;
            vec.push_back(v);
        }
    }
    return out;
}

std::map<std::string, double> random_params(const DifferenceSystem& sys, std::uint64_t seed) {
    std::map<std::string, double> out;
    std::uint64_t k = 100;
    for (const auto& [name, spec] : sys.params) {
        std::mt19937_64 rng(mix(seed ^ mix(++k)));
        if (spec.fixed) {
            out[name] = to_floating<double>(*spec.fixed);
            continue;
        }
        double v = 0;
        for (int tries = 0; tries < 64; ++tries) {
            v = magnitude_draw(rng);
            if (!spec.positive && (rng() & 1u)) v = -v;
            if (spec.exclude_unit && std::abs(std::abs(v) - 1.0) < 0.1) continue;
            bool clash = false;
            for (const auto& [a, b] : sys.distinct)
                if ((a == name && out.count(b) && std::abs(v - out[b]) < 0.1) ||
                    (b == name && out.count(a) && std::abs(v - out[a]) < 0.1))
                    clash = true;
            for (const auto& [a, b] : sys.distinct_abs)
                if ((a == name && out.count(b) && std::abs(std::abs(v) - std::abs(out[b])) < 0.1) ||
                    (b == name && out.count(a) && std::abs(std::abs(v) - std::abs(out[a])) < 0.1))
                    clash = true;
            if (!clash) break;
        }
        out[name] = v;
    }
    return out;
}

} // namespace latsym
