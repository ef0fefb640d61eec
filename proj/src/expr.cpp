#include "latsym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace latsym {

// ---------------------------------------------------------------------------
// Construction

std::shared_ptr<const ExprNode> Expr::zero_node() {
    static const std::shared_ptr<const ExprNode> z = [] {
        auto n = std::make_shared<ExprNode>();
        n->kind = Kind::Constant;
        n->value = 0;
        return n;
    }();
    return z;
}

Expr Expr::make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

Expr Expr::integer(long v) { return constant(Rational(v)); }

Expr Expr::constant(Rational q) {
    q.canonicalize();
    ExprNode n;
    n.kind = Kind::Constant;
    n.value = std::move(q);
    return make(std::move(n));
}

Expr Expr::parameter(std::string name) {
    ExprNode n;
    n.kind = Kind::Parameter;
    n.name = std::move(name);
    return make(std::move(n));
}

Expr Expr::lattice_var(int axis) {
    if (axis < 1) throw std::invalid_argument("lattice axis must be >= 1");
    ExprNode n;
    n.kind = Kind::LatticeVar;
    n.axis = axis;
    return make(std::move(n));
}

Expr Expr::dependent(std::string var, MultiIndex offset) {
    ExprNode n;
    n.kind = Kind::Dependent;
    n.name = std::move(var);
    n.offset = std::move(offset);
    return make(std::move(n));
}

Expr Expr::alt_sign(std::uint32_t axes_mask) {
    ExprNode n;
    n.kind = Kind::AltSign;
    n.axes = axes_mask;
    return make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> kids) {
    if (kids.empty()) return integer(0);
    if (kids.size() == 1) return kids[0];
    ExprNode n;
    n.kind = Kind::Sum;
    n.kids = std::move(kids);
    return make(std::move(n));
}

Expr Expr::product(std::vector<Expr> kids) {
    if (kids.empty()) return integer(1);
    if (kids.size() == 1) return kids[0];
    ExprNode n;
    n.kind = Kind::Product;
    n.kids = std::move(kids);
    return make(std::move(n));
}

namespace {

// Pure numeric tree: no jet coordinates, parameters, or lattice variables.
bool numeric_only(const Expr& e) {
    switch (e.kind()) {
        case Kind::Dependent:
        case Kind::Parameter:
        case Kind::LatticeVar:
        case Kind::AltSign:
            return false;
        default:
            for (const auto& k : e.kids())
                if (!numeric_only(k)) return false;
            return true;
    }
}

} // namespace

Expr Expr::pow(Expr base, Expr exponent) {
    if (!numeric_only(exponent) && !lattice_affine_int(exponent))
        throw std::invalid_argument(
            "power exponent must be a constant or integer-affine in the lattice variables");
    ExprNode n;
    n.kind = Kind::Power;
    n.kids = {std::move(base), std::move(exponent)};
    return make(std::move(n));
}

Expr Expr::negate(Expr x) {
    ExprNode n;
    n.kind = Kind::Negate;
    n.kids = {std::move(x)};
    return make(std::move(n));
}
Expr Expr::reciprocal(Expr x) {
    ExprNode n;
    n.kind = Kind::Reciprocal;
    n.kids = {std::move(x)};
    return make(std::move(n));
}
Expr Expr::ln(Expr x) {
    ExprNode n;
    n.kind = Kind::Ln;
    n.kids = {std::move(x)};
    return make(std::move(n));
}
Expr Expr::exp(Expr x) {
    ExprNode n;
    n.kind = Kind::Exp;
    n.kids = {std::move(x)};
    return make(std::move(n));
}
Expr Expr::tanh(Expr x) {
    ExprNode n;
    n.kind = Kind::Tanh;
    n.kids = {std::move(x)};
    return make(std::move(n));
}
Expr Expr::abs(Expr x) {
    ExprNode n;
    n.kind = Kind::Abs;
    n.kids = {std::move(x)};
    return make(std::move(n));
}

// ---------------------------------------------------------------------------
// Structural order

int Expr::compare(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case Kind::Constant:
            return cmp(a.value(), b.value()) < 0 ? -1 : (cmp(a.value(), b.value()) > 0 ? 1 : 0);
        case Kind::Parameter:
            return a.name().compare(b.name());
        case Kind::LatticeVar:
            return a.axis() < b.axis() ? -1 : (a.axis() > b.axis() ? 1 : 0);
        case Kind::Dependent: {
            if (int c = a.name().compare(b.name())) return c;
            if (a.offset() == b.offset()) return 0;
            return a.offset() < b.offset() ? -1 : 1;
        }
        case Kind::AltSign:
            return a.axes_mask() < b.axes_mask() ? -1 : (a.axes_mask() > b.axes_mask() ? 1 : 0);
        default: {
            const auto& ka = a.kids();
            const auto& kb = b.kids();
            if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
            for (std::size_t i = 0; i < ka.size(); ++i)
                if (int c = compare(ka[i], kb[i])) return c;
            return 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Structure queries

static void walk(const Expr& e, const std::function<void(const Expr&)>& fn) {
    fn(e);
    for (const auto& k : e.kids()) walk(k, fn);
}

std::set<JetCoord> stencil(const Expr& e) {
    std::set<JetCoord> out;
    walk(e, [&](const Expr& x) {
        if (x.kind() == Kind::Dependent) out.insert({x.name(), x.offset()});
    });
    return out;
}

std::set<std::string> parameters(const Expr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& x) {
        if (x.kind() == Kind::Parameter) out.insert(x.name());
    });
    return out;
}

int max_axis(const Expr& e) {
    int p = 0;
    walk(e, [&](const Expr& x) {
        if (x.kind() == Kind::LatticeVar) p = std::max(p, x.axis());
        if (x.kind() == Kind::AltSign) {
            std::uint32_t m = x.axes_mask();
            for (int k = 1; m; ++k, m >>= 1)
                if (m & 1u) p = std::max(p, k);
        }
        if (x.kind() == Kind::Dependent) p = std::max(p, static_cast<int>(x.offset().dim()));
    });
    return p;
}

std::optional<AffineForm> lattice_affine_int(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: {
            if (!is_integer(e.value()) || !fits_long(e.value())) return std::nullopt;
            AffineForm f;
            f.c0 = to_long(e.value());
            return f;
        }
        case Kind::LatticeVar: {
            AffineForm f;
            f.coeff[e.axis()] = 1;
            return f;
        }
        case Kind::Negate: {
            auto f = lattice_affine_int(e.kid(0));
            if (!f) return std::nullopt;
            f->c0 = -f->c0;
            for (auto& [k, c] : f->coeff) c = -c;
            return f;
        }
        case Kind::Sum: {
            AffineForm acc;
            for (const auto& k : e.kids()) {
                auto f = lattice_affine_int(k);
                if (!f) return std::nullopt;
                acc.c0 += f->c0;
                for (auto& [ax, c] : f->coeff) acc.coeff[ax] += c;
            }
            std::erase_if(acc.coeff, [](const auto& kv) { return kv.second == 0; });
            return acc;
        }
        case Kind::Product: {
            long scale = 1;
            std::optional<AffineForm> lin;
            for (const auto& k : e.kids()) {
                auto f = lattice_affine_int(k);
                if (!f) return std::nullopt;
                if (f->coeff.empty()) {
                    scale *= f->c0;
                } else {
                    if (lin) return std::nullopt;   // product of two non-constant parts
                    lin = std::move(f);
                }
            }
            AffineForm out = lin.value_or(AffineForm{1, {}});
            out.c0 *= scale;
            for (auto& [ax, c] : out.coeff) c *= scale;
            std::erase_if(out.coeff, [](const auto& kv) { return kv.second == 0; });
            return out;
        }
        default:
            return std::nullopt;
    }
}

Expr alt_sign_from_affine(const AffineForm& aff) {
    std::uint32_t mask = 0;
    for (const auto& [axis, c] : aff.coeff)
        if (c % 2 != 0) mask |= (1u << (axis - 1));
    Expr core = mask ? Expr::alt_sign(mask) : Expr::integer(1);
    return (aff.c0 % 2 != 0) ? Expr::negate(core) : core;
}

/// Exponent that keeps exact evaluation possible: integer constant or
/// integer-affine in the lattice variables.
static bool exponent_is_integral(const Expr& exponent) {
    if (exponent.kind() == Kind::Constant) return is_integer(exponent.value());
    return lattice_affine_int(exponent).has_value();
}

bool float_required(const Expr& e) {
    switch (e.kind()) {
        case Kind::Ln:
        case Kind::Exp:
        case Kind::Tanh:
            return true;
        case Kind::Power:
            if (!exponent_is_integral(e.kid(1))) return true;
            return float_required(e.kid(0)) || float_required(e.kid(1));
        default:
            for (const auto& k : e.kids())
                if (float_required(k)) return true;
            return false;
    }
}

// ---------------------------------------------------------------------------
// Evaluation

static long lattice_value(const Environment& env, int axis) {
    if (axis < 1 || static_cast<std::size_t>(axis) > env.point.size())
        throw EvalError(EvalErrorKind::MissingEntry,
                        "lattice point has no axis " + std::to_string(axis));
    return env.point[axis - 1];
}

static int alt_sign_value(const std::vector<long>& point, std::uint32_t mask) {
    long s = 0;
    for (std::size_t k = 0; k < point.size(); ++k)
        if (mask & (1u << k)) s += point[k];
    return (s % 2 == 0) ? 1 : -1;
}

Rational evaluate_exact(const Expr& e, const Environment& env) {
    switch (e.kind()) {
        case Kind::Constant:
            return e.value();
        case Kind::Parameter: {
            auto it = env.params.find(e.name());
            if (it == env.params.end())
                throw EvalError(EvalErrorKind::MissingEntry, "no value for parameter " + e.name());
            return it->second;
        }
        case Kind::LatticeVar:
            return Rational(lattice_value(env, e.axis()));
        case Kind::Dependent: {
            auto it = env.values.find({e.name(), e.offset()});
            if (it == env.values.end())
                throw EvalError(EvalErrorKind::MissingEntry,
                                "no value for " + e.name() + e.offset().str());
            return it->second;
        }
        case Kind::AltSign:
            return Rational(alt_sign_value(env.point, e.axes_mask()));
        case Kind::Sum: {
            Rational s(0);
            for (const auto& k : e.kids()) s += evaluate_exact(k, env);
            return s;
        }
        case Kind::Product: {
            Rational p(1);
            for (const auto& k : e.kids()) p *= evaluate_exact(k, env);
            return p;
        }
        case Kind::Power: {
            Rational ex = evaluate_exact(e.kid(1), env);
            if (!fits_long(ex))
                throw EvalError(EvalErrorKind::PowDomain, "non-integer or oversized exponent");
            Rational b = evaluate_exact(e.kid(0), env);
            long k = to_long(ex);
            if (b == 0 && k < 0)
                throw EvalError(EvalErrorKind::PowDomain, "zero raised to a negative power");
            return pow_rational(b, k);
        }
        case Kind::Negate:
            return -evaluate_exact(e.kid(0), env);
        case Kind::Reciprocal: {
            Rational v = evaluate_exact(e.kid(0), env);
            if (v == 0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
            return 1 / v;
        }
        case Kind::Abs:
            return abs(evaluate_exact(e.kid(0), env));
        default:
            throw std::logic_error("evaluate_exact on a transcendental expression");
    }
}

template <class F>
struct FloatEval {
    const std::vector<long>& point;
    std::function<F(const std::string&, const MultiIndex&)> dep;
    std::function<F(const std::string&)> par;
    const Environment* exact_env = nullptr;   // set when rational inputs exist
    F max_mag = 0;

    F track(F v) {
        if (!std::isfinite(static_cast<double>(v)))
            throw EvalError(EvalErrorKind::Overflow, "non-finite intermediate value");
        F a = v < 0 ? -v : v;
        if (a > max_mag) max_mag = a;
        return v;
    }

    F eval(const Expr& e) {
        // Rational subtrees are evaluated exactly when the environment is
        // rational. Exact cancellation to zero inside a ln argument or a
        // denominator then raises the domain error it deserves instead of
        // feeding roundoff noise into the transcendental.
        if (exact_env && !e.kids().empty() && !float_required(e))
            return track(to_floating<F>(evaluate_exact(e, *exact_env)));
        switch (e.kind()) {
            case Kind::Constant:
                return track(to_floating<F>(e.value()));
            case Kind::Parameter:
                return track(par(e.name()));
            case Kind::LatticeVar:
                return track(static_cast<F>(lattice_value_ref(e.axis())));
            case Kind::Dependent:
                return track(dep(e.name(), e.offset()));
            case Kind::AltSign:
                return track(static_cast<F>(alt_sign_value(point, e.axes_mask())));
            case Kind::Sum: {
                F s = 0;
                for (const auto& k : e.kids()) s += eval(k);
                return track(s);
            }
            case Kind::Product: {
                F p = 1;
                for (const auto& k : e.kids()) p *= eval(k);
                return track(p);
            }
            case Kind::Power: {
                F b = eval(e.kid(0));
                F x = eval(e.kid(1));
                F r = std::round(static_cast<double>(x));
                bool integral = (x == r);
                if (b == 0 && x < 0)
                    throw EvalError(EvalErrorKind::PowDomain, "zero raised to a negative power");
                if (b < 0 && !integral)
                    throw EvalError(EvalErrorKind::PowDomain,
                                    "negative base with non-integer exponent");
                return track(std::pow(b, x));
            }
            case Kind::Negate:
                return track(-eval(e.kid(0)));
            case Kind::Reciprocal: {
                F v = eval(e.kid(0));
                if (v == 0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
                return track(F(1) / v);
            }
            case Kind::Ln: {
                F v = eval(e.kid(0));
                if (v <= 0) throw EvalError(EvalErrorKind::LogDomain, "ln of a non-positive value");
                return track(std::log(v));
            }
            case Kind::Exp:
                return track(std::exp(eval(e.kid(0))));
            case Kind::Tanh:
                return track(std::tanh(eval(e.kid(0))));
            case Kind::Abs: {
                F v = eval(e.kid(0));
                return track(v < 0 ? -v : v);
            }
        }
        throw std::logic_error("unreachable expression kind");
    }

    long lattice_value_ref(int axis) const {
        if (axis < 1 || static_cast<std::size_t>(axis) > point.size())
            throw EvalError(EvalErrorKind::MissingEntry,
                            "lattice point has no axis " + std::to_string(axis));
        return point[axis - 1];
    }
};

template <class F>
F evaluate_float(const Expr& e, const Environment& env, F* max_magnitude) {
    FloatEval<F> ctx{
        env.point,
        [&](const std::string& v, const MultiIndex& j) -> F {
            auto it = env.values.find({v, j});
            if (it == env.values.end())
                throw EvalError(EvalErrorKind::MissingEntry, "no value for " + v + j.str());
            return to_floating<F>(it->second);
        },
        [&](const std::string& name) -> F {
            auto it = env.params.find(name);
            if (it == env.params.end())
                throw EvalError(EvalErrorKind::MissingEntry, "no value for parameter " + name);
            return to_floating<F>(it->second);
        },
        &env};
    F v = ctx.eval(e);
    if (max_magnitude) *max_magnitude = ctx.max_mag;
    return v;
}

template double evaluate_float<double>(const Expr&, const Environment&, double*);
template long double evaluate_float<long double>(const Expr&, const Environment&, long double*);

double evaluate_on_data(const Expr& e, const std::vector<long>& point,
                        const std::function<double(const std::string&, const MultiIndex&)>& dep,
                        const std::function<double(const std::string&)>& par,
                        double* max_magnitude) {
    FloatEval<double> ctx{point, dep, par};
    double v = ctx.eval(e);
    if (max_magnitude) *max_magnitude = ctx.max_mag;
    return v;
}

Value evaluate(const Expr& e, const Environment& env) {
    if (float_required(e)) return evaluate_float<double>(e, env);
    return evaluate_exact(e, env);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr diff_core(const Expr& e, const std::function<Expr(const Expr&)>& leaf) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::LatticeVar:
        case Kind::AltSign:
        case Kind::Parameter:
        case Kind::Dependent:
            return leaf(e);
        case Kind::Sum: {
            std::vector<Expr> parts;
            for (const auto& k : e.kids()) parts.push_back(diff_core(k, leaf));
            return Expr::sum(std::move(parts));
        }
        case Kind::Product: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < e.kids().size(); ++i) {
                std::vector<Expr> factors;
                for (std::size_t j = 0; j < e.kids().size(); ++j)
                    factors.push_back(i == j ? diff_core(e.kid(j), leaf) : e.kid(j));
                terms.push_back(Expr::product(std::move(factors)));
            }
            return Expr::sum(std::move(terms));
        }
        case Kind::Power: {
            // Exponents are constants or lattice-affine, hence constant for
            // jet/parameter derivatives: d(b^g) = g * b^(g-1) * db.
            const Expr& base = e.kid(0);
            const Expr& expo = e.kid(1);
            Expr db = diff_core(base, leaf);
            Expr down = Expr::sum({expo, Expr::integer(-1)});
            return Expr::product({expo, Expr::pow(base, down), std::move(db)});
        }
        case Kind::Negate:
            return Expr::negate(diff_core(e.kid(0), leaf));
        case Kind::Reciprocal: {
            Expr dx = diff_core(e.kid(0), leaf);
            return Expr::negate(
                Expr::product({std::move(dx), Expr::pow(e.kid(0), Expr::integer(-2))}));
        }
        case Kind::Ln: {
            const Expr& arg = e.kid(0);
            // d ln|x| = dx / x; the Abs wrapper drops out of the derivative.
            const Expr& x = (arg.kind() == Kind::Abs) ? arg.kid(0) : arg;
            Expr dx = diff_core(x, leaf);
            return Expr::product({std::move(dx), Expr::reciprocal(x)});
        }
        case Kind::Exp:
            return Expr::product({diff_core(e.kid(0), leaf), e});
        case Kind::Tanh: {
            Expr dx = diff_core(e.kid(0), leaf);
            Expr sech2 = Expr::sum({Expr::integer(1),
                                    Expr::negate(Expr::pow(e, Expr::integer(2)))});
            return Expr::product({std::move(dx), std::move(sech2)});
        }
        case Kind::Abs: {
            // sign(x) * dx, valid away from x = 0.
            Expr dx = diff_core(e.kid(0), leaf);
            return Expr::product({std::move(dx), e, Expr::reciprocal(e.kid(0))});
        }
    }
    throw std::logic_error("unreachable expression kind");
}

} // namespace

Expr differentiate(const Expr& e, const JetCoord& wrt) {
    Expr d = diff_core(e, [&](const Expr& leaf) {
        if (leaf.kind() == Kind::Dependent && leaf.name() == wrt.first && leaf.offset() == wrt.second)
            return Expr::integer(1);
        return Expr::integer(0);
    });
    return simplify(d);
}

Expr differentiate_param(const Expr& e, const std::string& param) {
    Expr d = diff_core(e, [&](const Expr& leaf) {
        if (leaf.kind() == Kind::Parameter && leaf.name() == param) return Expr::integer(1);
        return Expr::integer(0);
    });
    return simplify(d);
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

const Expr kOne = Expr::integer(1);

/// Splits a summand into (rational coefficient, core term).
std::pair<Rational, Expr> split_term(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant:
            return {e.value(), kOne};
        case Kind::Negate: {
            auto [c, core] = split_term(e.kid(0));
            return {-c, core};
        }
        case Kind::Product: {
            Rational coeff(1);
            std::vector<Expr> rest;
            for (const auto& k : e.kids()) {
                if (k.kind() == Kind::Constant)
                    coeff *= k.value();
                else if (k.kind() == Kind::Negate) {
                    coeff *= -1;
                    rest.push_back(k.kid(0));
                } else
                    rest.push_back(k);
            }
            if (rest.empty()) return {coeff, kOne};
            std::sort(rest.begin(), rest.end());
            return {coeff, Expr::product(std::move(rest))};
        }
        default:
            return {Rational(1), e};
    }
}

Expr rebuild_term(const Rational& coeff, const Expr& core) {
    if (coeff == 0) return Expr::integer(0);
    if (core == kOne) return Expr::constant(coeff);
    if (coeff == 1) return core;
    if (coeff == -1) return Expr::negate(core);
    if (core.kind() == Kind::Product) {
        std::vector<Expr> kids = {Expr::constant(coeff)};
        kids.insert(kids.end(), core.kids().begin(), core.kids().end());
        return Expr::product(std::move(kids));
    }
    return Expr::product({Expr::constant(coeff), core});
}

Expr simplify_sum(std::vector<Expr> kids) {
    // Flatten, then combine structurally equal cores.
    std::vector<Expr> flat;
    std::function<void(const Expr&, bool)> push = [&](const Expr& k, bool negated) {
        if (k.kind() == Kind::Sum) {
            for (const auto& c : k.kids()) push(c, negated);
        } else if (k.kind() == Kind::Negate) {
            push(k.kid(0), !negated);
        } else {
            flat.push_back(negated ? Expr::negate(k) : k);
        }
    };
    for (const auto& k : kids) push(k, false);
    std::map<Expr, Rational> terms;   // ordered by structural compare
    for (const auto& k : flat) {
        auto [c, core] = split_term(k);
        terms[core] += c;
    }
    std::vector<Expr> out;
    for (const auto& [core, c] : terms) {
        if (c == 0) continue;
        out.push_back(rebuild_term(c, core));
    }
    if (out.empty()) return Expr::integer(0);
    return Expr::sum(std::move(out));
}

/// Splits a factor into (base, exponent) with an Expr exponent.
std::pair<Expr, Expr> split_factor(const Expr& e) {
    if (e.kind() == Kind::Power) return {e.kid(0), e.kid(1)};
    if (e.kind() == Kind::Reciprocal) {
        auto [b, x] = split_factor(e.kid(0));
        return {b, simplify_sum({Expr::negate(x)})};
    }
    return {e, kOne};
}

bool exponent_integral_for_merge(const Expr& x) {
    if (x.kind() == Kind::Constant) return is_integer(x.value());
    return lattice_affine_int(x).has_value();
}

Expr simplify_product(std::vector<Expr> kids) {
    std::vector<Expr> flat;
    for (auto& k : kids) {
        if (k.kind() == Kind::Product)
            flat.insert(flat.end(), k.kids().begin(), k.kids().end());
        else
            flat.push_back(std::move(k));
    }
    Rational coeff(1);
    std::uint32_t alt_mask = 0;
    bool has_alt = false;
    std::map<Expr, std::vector<Expr>> powers;   // base -> exponents awaiting merge
    std::vector<Expr> opaque;                   // factors kept verbatim

    std::function<void(const Expr&, bool)> absorb = [&](const Expr& f, bool invert) {
        switch (f.kind()) {
            case Kind::Constant:
                if (invert && f.value() == 0) {
                    opaque.push_back(Expr::reciprocal(f));   // keep 1/0 an eval error
                    return;
                }
                coeff *= invert ? 1 / f.value() : f.value();
                return;
            case Kind::Negate:
                coeff *= -1;
                absorb(f.kid(0), invert);
                return;
            case Kind::AltSign:
                alt_mask ^= f.axes_mask();
                has_alt = true;
                return;
            case Kind::Product:
                for (const auto& k : f.kids()) absorb(k, invert);
                return;
            case Kind::Reciprocal:
                absorb(f.kid(0), !invert);
                return;
            default:
                break;
        }
        auto [base, x] = split_factor(f);
        if (exponent_integral_for_merge(x))
            powers[base].push_back(invert ? simplify_sum({Expr::negate(x)}) : x);
        else
            opaque.push_back(invert ? Expr::reciprocal(f) : f);
    };
    for (const auto& f : flat) absorb(f, false);

    if (coeff == 0) return Expr::integer(0);

    std::vector<Expr> out;
    for (const auto& [base, exps] : powers) {
        Expr total = simplify_sum(std::vector<Expr>(exps.begin(), exps.end()));
        if (total.is_zero_literal()) continue;
        if (base.kind() == Kind::Constant && total.kind() == Kind::Constant &&
            fits_long(total.value())) {
            long k = to_long(total.value());
            if (!(base.value() == 0 && k < 0)) {
                coeff *= pow_rational(base.value(), k);
                continue;
            }
        }
        if (total == kOne)
            out.push_back(base);
        else if (total.kind() == Kind::Constant && total.value() == -1)
            out.push_back(Expr::reciprocal(base));
        else
            out.push_back(Expr::pow(base, total));
    }
    out.insert(out.end(), opaque.begin(), opaque.end());
    if (has_alt && alt_mask != 0) out.push_back(Expr::alt_sign(alt_mask));
    std::sort(out.begin(), out.end());

    if (out.empty()) return Expr::constant(coeff);
    Expr core = Expr::product(std::move(out));
    return rebuild_term(coeff, core);
}

} // namespace

Expr simplify(const Expr& e) {
    // Bottom-up single pass; the per-node rules are closed under each other.
    std::vector<Expr> kids;
    kids.reserve(e.kids().size());
    for (const auto& k : e.kids()) kids.push_back(simplify(k));

    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Parameter:
        case Kind::LatticeVar:
        case Kind::Dependent:
            return e;
        case Kind::AltSign:
            return e.axes_mask() == 0 ? Expr::integer(1) : e;
        case Kind::Sum:
            return simplify_sum(std::move(kids));
        case Kind::Product:
            return simplify_product(std::move(kids));
        case Kind::Power: {
            Expr base = kids[0], expo = kids[1];
            if (expo.is_zero_literal()) return Expr::integer(1);
            if (expo == kOne) return base;
            if (expo.kind() == Kind::Constant && expo.value() == -1 &&
                base.kind() != Kind::Constant)
                return simplify(Expr::reciprocal(base));
            if (base.is_one_literal()) return Expr::integer(1);
            if (base.kind() == Kind::Constant && expo.kind() == Kind::Constant &&
                is_integer(expo.value()) && fits_long(expo.value())) {
                long k = to_long(expo.value());
                if (!(base.value() == 0 && k < 0)) return Expr::constant(pow_rational(base.value(), k));
            }
            bool minus_one_base =
                (base.kind() == Kind::Constant && base.value() == -1) ||
                (base.kind() == Kind::Negate && base.kid(0).is_one_literal());
            if (minus_one_base) {
                if (auto aff = lattice_affine_int(expo))
                    return simplify(alt_sign_from_affine(*aff));
            }
            if (exponent_integral_for_merge(expo)) {
                // Integer-valued exponents distribute exactly.
                if (base.kind() == Kind::Product) {
                    std::vector<Expr> factors;
                    for (const auto& k : base.kids()) factors.push_back(Expr::pow(k, expo));
                    return simplify(Expr::product(std::move(factors)));
                }
                if (base.kind() == Kind::Reciprocal)
                    return simplify(Expr::pow(base.kid(0), Expr::negate(expo)));
                if (base.kind() == Kind::Negate) {
                    if (auto aff = lattice_affine_int(expo))
                        return simplify(Expr::product(
                            {alt_sign_from_affine(*aff), Expr::pow(base.kid(0), expo)}));
                }
                if (base.kind() == Kind::AltSign && expo.kind() == Kind::Constant) {
                    long k = to_long(expo.value());
                    return (k % 2 == 0) ? Expr::integer(1) : base;
                }
                if (base.kind() == Kind::Power) {
                    const Expr& inner = base.kid(1);
                    bool inner_const = inner.kind() == Kind::Constant;
                    bool outer_const = expo.kind() == Kind::Constant;
                    // (x^a)^b = x^(ab) needs ab to stay integer-affine.
                    if (exponent_integral_for_merge(inner) && (inner_const || outer_const))
                        return simplify(Expr::pow(base.kid(0), Expr::product({inner, expo})));
                }
            }
            return Expr::pow(std::move(base), std::move(expo));
        }
        case Kind::Negate: {
            const Expr& x = kids[0];
            if (x.kind() == Kind::Constant) return Expr::constant(-x.value());
            if (x.kind() == Kind::Negate) return x.kid(0);
            return Expr::negate(x);
        }
        case Kind::Reciprocal: {
            const Expr& x = kids[0];
            if (x.kind() == Kind::Constant && x.value() != 0)
                return Expr::constant(1 / x.value());
            if (x.kind() == Kind::Reciprocal) return x.kid(0);
            if (x.kind() == Kind::Negate) return simplify(Expr::negate(Expr::reciprocal(x.kid(0))));
            return Expr::reciprocal(x);
        }
        case Kind::Ln:
            return Expr::ln(kids[0]);
        case Kind::Exp:
            return Expr::exp(kids[0]);
        case Kind::Tanh:
            return Expr::tanh(kids[0]);
        case Kind::Abs: {
            const Expr& x = kids[0];
            if (x.kind() == Kind::Constant) return Expr::constant(abs(x.value()));
            if (x.kind() == Kind::Abs) return x;
            if (x.kind() == Kind::Negate) return Expr::abs(x.kid(0));
            return Expr::abs(x);
        }
    }
    throw std::logic_error("unreachable expression kind");
}

// ---------------------------------------------------------------------------
// Substitution

Expr substitute_dependents(const Expr& e,
                           const std::function<std::optional<Expr>(const std::string&, const MultiIndex&)>& fn) {
    if (e.kind() == Kind::Dependent) {
        auto r = fn(e.name(), e.offset());
        return r ? *r : e;
    }
    if (e.kids().empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e.kids().size());
    bool changed = false;
    for (const auto& k : e.kids()) {
        Expr nk = substitute_dependents(k, fn);
        changed = changed || (nk != k);
        kids.push_back(std::move(nk));
    }
    if (!changed) return e;
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
        default: throw std::logic_error("unreachable expression kind");
    }
}

// ---------------------------------------------------------------------------
// Rendering

std::vector<std::string> default_axes(std::size_t p) {
    if (p <= 1) return {"n"};
    if (p == 2) return {"m", "n"};
    std::vector<std::string> names;
    for (std::size_t k = 1; k <= p; ++k) names.push_back("n" + std::to_string(k));
    return names;
}

namespace {

// Precedence levels: sum < product < unary minus < power < atom.
enum Prec { kSum = 0, kProd = 1, kNeg = 2, kPow = 3, kAtom = 4 };

struct Renderer {
    const std::vector<std::string>& axes;

    std::string axis_name(int axis) const {
        if (axis < 1 || static_cast<std::size_t>(axis) > axes.size())
            return "n" + std::to_string(axis);
        return axes[axis - 1];
    }

    std::string paren(const Expr& e, int min_prec) const {
        std::string s = run(e);
        return prec(e) < min_prec ? "(" + s + ")" : s;
    }

    int prec(const Expr& e) const {
        switch (e.kind()) {
            case Kind::Sum: return kSum;
            case Kind::Product: return kProd;
            case Kind::Negate: return kNeg;
            case Kind::Power: case Kind::AltSign: return kPow;
            case Kind::Reciprocal: return kProd;
            case Kind::Constant:
                return (e.value() < 0 || !is_integer(e.value())) ? kProd : kAtom;
            default: return kAtom;
        }
    }

    std::string run(const Expr& e) const {
        switch (e.kind()) {
            case Kind::Constant: {
                const Rational& q = e.value();
                if (is_integer(q)) return q.get_str();
                return q.get_num().get_str() + "/" + q.get_den().get_str();
            }
            case Kind::Parameter: return e.name();
            case Kind::LatticeVar: return axis_name(e.axis());
            case Kind::Dependent: {
                std::string s = e.name() + "[";
                const auto& ent = e.offset().entries();
                for (std::size_t i = 0; i < ent.size(); ++i) {
                    if (i) s += ",";
                    s += std::to_string(ent[i]);
                }
                return s + "]";
            }
            case Kind::AltSign: {
                std::string s;
                std::uint32_t m = e.axes_mask();
                for (int k = 1; m; ++k, m >>= 1) {
                    if (!(m & 1u)) continue;
                    if (!s.empty()) s += "+";
                    s += axis_name(k);
                }
                return "(-1)^(" + s + ")";
            }
            case Kind::Sum: {
                std::string s;
                for (std::size_t i = 0; i < e.kids().size(); ++i) {
                    const Expr& k = e.kid(i);
                    if (k.kind() == Kind::Negate) {
                        s += (i ? " - " : "-");
                        s += paren(k.kid(0), kProd);
                    } else if (k.kind() == Kind::Constant && k.value() < 0) {
                        s += (i ? " - " : "-");
                        s += paren(Expr::constant(-k.value()), kProd);
                    } else {
                        if (i) s += " + ";
                        s += paren(k, kProd);
                    }
                }
                return s;
            }
            case Kind::Product: {
                std::string num, den;
                int den_count = 0;
                for (const auto& k : e.kids()) {
                    if (k.kind() == Kind::Reciprocal) {
                        if (!den.empty()) den += "*";
                        den += paren(k.kid(0), kNeg);
                        ++den_count;
                    } else {
                        if (!num.empty()) num += "*";
                        num += paren(k, kNeg);
                    }
                }
                if (num.empty()) num = "1";
                if (den_count == 0) return num;
                if (den_count > 1) den = "(" + den + ")";
                return num + "/" + den;
            }
            case Kind::Power: {
                std::string b = paren(e.kid(0), kAtom);
                const Expr& x = e.kid(1);
                bool bare = x.kind() == Kind::Constant && is_integer(x.value()) && x.value() > 0;
                return b + "^" + (bare ? run(x) : "(" + run(x) + ")");
            }
            case Kind::Negate:
                return "-" + paren(e.kid(0), kNeg);
            case Kind::Reciprocal:
                return "1/" + paren(e.kid(0), kNeg);
            case Kind::Ln: return "ln(" + run(e.kid(0)) + ")";
            case Kind::Exp: return "exp(" + run(e.kid(0)) + ")";
            case Kind::Tanh: return "tanh(" + run(e.kid(0)) + ")";
            case Kind::Abs: return "abs(" + run(e.kid(0)) + ")";
        }
        throw std::logic_error("unreachable expression kind");
    }
};

} // namespace

std::string render(const Expr& e, const std::vector<std::string>& axes) {
    return Renderer{axes}.run(e);
}

std::string render(const Expr& e) {
    std::size_t p = static_cast<std::size_t>(std::max(1, max_axis(e)));
    auto axes = default_axes(p);
    return render(e, axes);
}

} // namespace latsym
