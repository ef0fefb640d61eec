#include "latsym/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace latsym {

std::string to_string(Status s) {
    switch (s) {
        case Status::HoldsIdentically: return "holds-identically";
        case Status::HoldsOnSolutions: return "holds-on-solutions";
        case Status::Fails: return "fails";
    }
    return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct Sampler {
    const DifferenceSystem* sys;   // may be null: defaults apply
    std::uint64_t seed;

    std::mt19937_64 engine(int trial, int attempt) const {
        std::uint64_t s = splitmix64(seed ^ splitmix64(0x10001ull * trial + 1) ^
                                     splitmix64(0x4242ull * attempt + 7));
        return std::mt19937_64(s);
    }

    Rational draw_value(std::mt19937_64& rng, Domain dom) const {
        std::uniform_int_distribution<int> mag(1, 9);
        int num = mag(rng), den = mag(rng);
        if (dom == Domain::NonzeroRational && (rng() & 1u)) num = -num;
        return make_rational(num, den);
    }

    Rational draw_param(std::mt19937_64& rng, const ParamSpec& spec) const {
        if (spec.fixed) return *spec.fixed;
        for (int i = 0; i < 64; ++i) {
            Rational q = draw_value(rng, spec.positive ? Domain::Positive : Domain::NonzeroRational);
            if (spec.exclude_unit && abs(q) == 1) continue;
            return q;
        }
        throw VerifyError("parameter constraints left nothing to sample");
    }

    /// Lattice point in {-4..4}^p with sum parity pinned to trial % 2, so both
    /// parities of m+n get equal coverage for alternating signs.
    std::vector<long> draw_point(std::mt19937_64& rng, std::size_t p, int trial) const {
        std::uniform_int_distribution<long> coord(-4, 4);
        std::vector<long> pt(p);
        for (auto& c : pt) c = coord(rng);
        long sum = 0;
        for (long c : pt) sum += c;
        long want = trial % 2;
        if (((sum % 2) + 2) % 2 != want) pt.back() += (pt.back() < 4 ? 1 : -1);
        return pt;
    }

    Environment sample(const std::set<JetCoord>& coords, const std::set<std::string>& pars,
                       std::size_t p, int trial, int attempt) const {
        auto rng = engine(trial, attempt);
        Environment env;
        env.point = draw_point(rng, p, trial);
        for (const auto& c : coords) {
            Domain dom = sys ? sys->domain_of(c.first) : Domain::NonzeroRational;
            env.values[c] = draw_value(rng, dom);
        }
        for (int tries = 0; tries < 64; ++tries) {
            env.params.clear();
            for (const auto& name : pars) {
                ParamSpec spec;
                if (sys) {
                    auto it = sys->params.find(name);
                    if (it != sys->params.end()) spec = it->second;
                }
                env.params[name] = draw_param(rng, spec);
            }
            if (!sys) break;
            bool ok = true;
            for (const auto& [a, b] : sys->distinct) {
                auto ia = env.params.find(a), ib = env.params.find(b);
                if (ia != env.params.end() && ib != env.params.end() && ia->second == ib->second)
                    ok = false;
            }
            for (const auto& [a, b] : sys->distinct_abs) {
                auto ia = env.params.find(a), ib = env.params.find(b);
                if (ia != env.params.end() && ib != env.params.end() &&
                    abs(ia->second) == abs(ib->second))
                    ok = false;
            }
            if (ok) break;
            if (tries == 63) throw VerifyError("distinctness constraints left nothing to sample");
        }
        return env;
    }
};

struct TrialValue {
    bool zero;
    double residual;   // normalized
};

TrialValue measure(const Expr& e, const Environment& env, bool exact, double tol) {
    if (exact) {
        Rational v = evaluate_exact(e, env);
        return {v == 0, std::abs(to_floating<double>(v))};
    }
    double mag = 0;
    double v = evaluate_float<double>(e, env, &mag);
    double res = std::abs(v) / (1.0 + mag);
    long double lmag = 0;
    long double lv = evaluate_float<long double>(e, env, &lmag);
    double lres = static_cast<double>(std::abs(lv) / (1.0L + lmag));
    bool ok = res <= tol && lres <= tol;
    return {ok, res};
}

} // namespace

namespace {

/// Backward offsets cannot reach the solved-form rewriter, but the solution
/// set is shift-invariant, so testing S_J(e) is equivalent. Shift forward
/// until every stencil offset is componentwise >= 0.
Expr align_forward(const Expr& e, std::size_t p) {
    std::vector<int> shift_by(p, 0);
    for (const auto& [var, J] : stencil(e))
        for (std::size_t i = 0; i < J.dim() && i < p; ++i)
            shift_by[i] = std::max(shift_by[i], -J[i]);
    MultiIndex sigma(std::move(shift_by));
    return sigma.is_zero() ? e : shift(e, sigma);
}

} // namespace

Verdict is_zero(const Expr& e, const DifferenceSystem* sys, const CheckOptions& opt) {
    Verdict out;
    Expr raw = simplify(e);
    if (raw.is_zero_literal()) {
        out.status = Status::HoldsIdentically;
        return out;
    }
    Expr reduced = sys ? normalize_on_solutions(align_forward(raw, sys->dim), *sys) : raw;
    bool reduced_literal_zero = reduced.is_zero_literal();

    // One environment per trial covers both the free-jet reading of the raw
    // expression and the on-solution residual.
    std::set<JetCoord> coords = stencil(raw);
    for (const auto& c : stencil(reduced)) coords.insert(c);
    std::set<std::string> pars = parameters(raw);
    for (const auto& n : parameters(reduced)) pars.insert(n);

    std::size_t p = sys ? sys->dim : 1;
    for (const auto& [var, J] : coords) p = std::max(p, J.dim());
    p = std::max<std::size_t>(p, static_cast<std::size_t>(std::max(max_axis(raw), max_axis(reduced))));

    bool exact_raw = !float_required(raw);
    bool exact_reduced = !float_required(reduced);
    out.exact = exact_raw && exact_reduced;

    Sampler sampler{sys, opt.seed};
    int resamples_left = 20 * opt.trials;
    bool raw_always_zero = true;

    for (int t = 0; t < opt.trials; ++t) {
        int attempt = 0;
        while (true) {
            Environment env = sampler.sample(coords, pars, p, t, attempt);
            try {
                TrialValue rv = measure(raw, env, exact_raw, opt.tol);
                if (!rv.zero) raw_always_zero = false;
                ++out.trials;
                if (sys) {
                    if (!reduced_literal_zero) {
                        TrialValue sv = measure(reduced, env, exact_reduced, opt.tol);
                        out.max_residual = std::max(out.max_residual, sv.residual);
                        if (!sv.zero) {
                            out.status = Status::Fails;
                            out.witness = env;
                            return out;
                        }
                    }
                } else {
                    out.max_residual = std::max(out.max_residual, rv.residual);
                    if (!rv.zero) {
                        out.status = Status::Fails;
                        out.witness = env;
                        return out;
                    }
                }
                break;
            } catch (const EvalError&) {
                if (--resamples_left <= 0)
                    throw VerifyError(
                        "sampling domain unsatisfiable: every candidate environment hit a "
                        "singularity");
                ++attempt;
            }
        }
    }

    if (!sys) {
        out.status = Status::HoldsIdentically;
        out.max_residual = out.exact ? 0.0 : out.max_residual;
        return out;
    }
    out.status = raw_always_zero ? Status::HoldsIdentically : Status::HoldsOnSolutions;
    if (out.exact) out.max_residual = 0.0;
    return out;
}

namespace {

Verdict combine(const std::vector<CheckPart>& parts) {
    Verdict out;
    out.status = Status::HoldsIdentically;
    for (const auto& part : parts) {
        const Verdict& v = part.verdict;
        out.trials += v.trials;
        out.exact = out.exact && v.exact;
        out.max_residual = std::max(out.max_residual, v.max_residual);
        if (v.status == Status::Fails) {
            out.status = Status::Fails;
            if (!out.witness) out.witness = v.witness;
        } else if (v.status == Status::HoldsOnSolutions && out.status != Status::Fails) {
            out.status = Status::HoldsOnSolutions;
        }
    }
    return out;
}

CheckResult finish(std::vector<CheckPart> parts) {
    CheckResult r;
    r.combined = combine(parts);
    r.parts = std::move(parts);
    return r;
}

} // namespace

CheckResult check_symmetry(const DifferenceSystem& sys, const Characteristic& v,
                           const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    for (const auto& rule : sys.rules) {
        Expr lhs = Expr::dependent(rule.var, rule.top);
        Expr residual = prolong_apply(v, Expr::sum({lhs, Expr::negate(rule.rhs)}));
        parts.push_back({rule.var + rule.top.str(), is_zero(residual, &sys, opt)});
    }
    return finish(std::move(parts));
}

CheckResult check_conservation_law(const DifferenceSystem& sys, const ConservationLaw& P,
                                   const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    parts.push_back({"divergence", is_zero(difference_divergence(P), &sys, opt)});
    return finish(std::move(parts));
}

CheckResult check_variational_symmetry(const Lagrangian& L, const Characteristic& v,
                                       const std::vector<Expr>* R, const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    Expr action = prolong_apply(v, L.density());
    if (R) {
        Expr divR = difference_divergence(ConservationLaw{*R});
        Expr residual = simplify(Expr::sum({action, Expr::negate(divR)}));
        parts.push_back({"pr v(L) - Div R", is_zero(residual, nullptr, opt)});
        return finish(std::move(parts));
    }
    Lagrangian varied(action);
    for (const auto& var : L.variables()) {
        Expr k = euler_lagrange(varied, var);
        parts.push_back({"E_" + var + "(pr v L)", is_zero(k, nullptr, opt)});
    }
    return finish(std::move(parts));
}

CheckResult check_el_symmetry_inheritance(const Lagrangian& L, const Characteristic& v,
                                          const DifferenceSystem& el_sys, const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    for (const auto& var : L.variables()) {
        Expr el = euler_lagrange(L, var);
        parts.push_back({"E_" + var + "(L) on system", is_zero(el, &el_sys, opt)});
    }
    CheckResult sym = check_symmetry(el_sys, v, opt);
    for (auto& part : sym.parts) parts.push_back(std::move(part));
    return finish(std::move(parts));
}

CheckResult check_theorem1_inheritance(const Lagrangian& L, const Characteristic& v,
                                       const DifferenceSystem& el_sys, const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    for (const auto& var : L.variables()) {
        Expr e = prolong_apply(v, euler_lagrange(L, var));
        parts.push_back({"pr v(E_" + var + "(L))", is_zero(e, &el_sys, opt)});
    }
    return finish(std::move(parts));
}

CheckResult check_theorem2(const Lagrangian& L, const Characteristic& v,
                           const std::vector<Expr>* R, const DifferenceSystem& sys,
                           const CheckOptions& opt) {
    if (!v.is_lie_point())
        throw VerifyError("theorem 2 applies to Lie point characteristics only");
    std::vector<CheckPart> parts;
    for (std::size_t i = 1; i <= L.dim(); ++i) {
        Expr Pi = noether_component(L, v, R, static_cast<int>(i));
        Expr e = prolong_apply(v, Pi);
        parts.push_back({"pr v(P^" + std::to_string(i) + ")", is_zero(e, &sys, opt)});
    }
    return finish(std::move(parts));
}

CheckResult check_association(const DifferenceSystem& sys, const Characteristic& v,
                              const ConservationLaw& P, const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    for (std::size_t i = 0; i < P.components.size(); ++i) {
        Expr e = prolong_apply(v, P.components[i]);
        parts.push_back({"pr v(P^" + std::to_string(i + 1) + ")", is_zero(e, &sys, opt)});
    }
    return finish(std::move(parts));
}

namespace {

void require_three_point(const Expr& e, const MultiIndex& allowed, const char* which) {
    for (const auto& [var, J] : stencil(e)) {
        if (J == MultiIndex{0, 0} || J == allowed) continue;
        throw VerifyError(std::string(which) + " is not in three-point form: depends on " + var +
                          J.str());
    }
}

} // namespace

CheckResult check_three_point_reduction(const DifferenceSystem& sys, const Expr& F, const Expr& G,
                                        const CheckOptions& opt) {
    require_three_point(F, MultiIndex{0, 1}, "F");
    require_three_point(G, MultiIndex{1, 0}, "G");
    Expr sumFG = Expr::sum({F, G});
    Expr reduced = d_operator_apply(sys, 1, d_operator_apply(sys, 2, sumFG));
    std::vector<CheckPart> parts;
    parts.push_back({"D1 D2 (F+G)", is_zero(reduced, &sys, opt)});
    return finish(std::move(parts));
}

CheckResult check_invariant_ansatz(const Characteristic& v, const std::vector<Expr>& coords,
                                   const CheckOptions& opt) {
    std::vector<CheckPart> parts;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        Expr e = prolong_apply(v, coords[i]);
        parts.push_back({"coordinate " + std::to_string(i + 1), is_zero(e, nullptr, opt)});
    }
    return finish(std::move(parts));
}

CheckResult check_noether_identity(const Lagrangian& L, const Characteristic& v,
                                   const CheckOptions& opt) {
    std::vector<Expr> C = noether_boundary_terms(L, v);
    std::vector<Expr> terms = {prolong_apply(v, L.density())};
    for (const auto& var : L.variables()) {
        auto it = v.components.find(var);
        if (it == v.components.end()) continue;
        terms.push_back(Expr::negate(Expr::product({it->second, euler_lagrange(L, var)})));
    }
    terms.push_back(Expr::negate(difference_divergence(ConservationLaw{C})));
    Expr residual = simplify(Expr::sum(std::move(terms)));
    std::vector<CheckPart> parts;
    parts.push_back({"pr v(L) - Q E(L) - Div C", is_zero(residual, nullptr, opt)});
    return finish(std::move(parts));
}

} // namespace latsym
