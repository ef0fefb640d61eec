#pragma once

// Seed-fixed random expression trees over exact rationals (no ln/exp/tanh)
// and an evaluation-based exact zero check, shared by the property and
// acceptance suites.

#include "latsym/expr.hpp"

#include <functional>
#include <random>
#include <set>

namespace latsym::testgen {

struct Gen {
    std::mt19937_64 rng;
    std::size_t dim;
    int min_offset;   // 0 for forward-only (Lagrangian) trees

    explicit Gen(std::uint64_t seed, std::size_t dim, int min_offset = -2)
        : rng(seed), dim(dim), min_offset(min_offset) {}

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    MultiIndex offset() {
        std::vector<int> e(dim);
        for (auto& x : e) x = pick(min_offset, 2);
        return MultiIndex(std::move(e));
    }

    Expr leaf() {
        switch (pick(0, 5)) {
            case 0: return Expr::integer(pick(-3, 3));
            case 1: return Expr::lattice_var(pick(1, static_cast<int>(dim)));
            case 2: return Expr::parameter("a");
            case 3: return Expr::alt_sign(1u);
            default: return Expr::dependent("u", offset());
        }
    }

    Expr tree(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(0, 6)) {
            case 0: return Expr::sum({tree(depth - 1), tree(depth - 1)});
            case 1: return Expr::sum({tree(depth - 1), tree(depth - 1), tree(depth - 1)});
            case 2: return Expr::product({tree(depth - 1), tree(depth - 1)});
            case 3: return Expr::negate(tree(depth - 1));
            case 4: return Expr::reciprocal(tree(depth - 1));
            case 5: return Expr::pow(tree(depth - 1), Expr::integer(pick(2, 3)));
            default:
                return Expr::pow(Expr::dependent("u", offset()),
                                 Expr::sum({Expr::lattice_var(1), Expr::integer(pick(0, 2))}));
        }
    }

    Environment environment(const std::set<JetCoord>& coords, const std::set<std::string>& pars) {
        Environment env;
        for (std::size_t i = 0; i < dim; ++i) env.point.push_back(pick(-4, 4));
        for (const auto& c : coords) {
            int n = pick(-9, 9);
            if (n == 0) n = 3;
            env.values[c] = make_rational(n, pick(1, 9));
        }
        for (const auto& s : pars) {
            int n = pick(-9, 9);
            if (n == 0) n = 2;
            env.params[s] = make_rational(n, pick(1, 9));
        }
        return env;
    }
};

enum class ZeroCheck { Zero, NonZero, Vacuous };

/// Exact zero over random environments; singular draws are redrawn, and an
/// expression whose sampled domain is empty reports Vacuous.
inline ZeroCheck exact_zero(Gen& g, const Expr& e, int want = 4) {
    Expr r = simplify(e);
    if (r.is_zero_literal()) return ZeroCheck::Zero;
    auto coords = stencil(r);
    auto pars = parameters(r);
    int ok = 0;
    for (int tries = 0; tries < 60 && ok < want; ++tries) {
        Environment env = g.environment(coords, pars);
        try {
            if (evaluate_exact(r, env) != 0) return ZeroCheck::NonZero;
            ++ok;
        } catch (const EvalError&) {
            continue;
        }
    }
    return ok > 0 ? ZeroCheck::Zero : ZeroCheck::Vacuous;
}

/// Runs `identity` over fresh random trees until `count` non-vacuous checks
/// pass; returns false on the first nonzero residual.
inline bool property_holds(std::uint64_t seed, std::size_t dim, int min_offset, int count,
                           const std::function<Expr(Gen&)>& identity) {
    Gen g(seed, dim, min_offset);
    int done = 0, guard = 0;
    while (done < count) {
        if (++guard >= 20 * count) return false;
        Expr residual = identity(g);
        ZeroCheck z = exact_zero(g, residual);
        if (z == ZeroCheck::Vacuous) continue;
        if (z != ZeroCheck::Zero) return false;
        ++done;
    }
    return true;
}

} // namespace latsym::testgen
