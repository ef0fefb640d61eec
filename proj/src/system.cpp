#include "latsym/system.hpp"
#include "latsym/calculus.hpp"

#include <stdexcept>

namespace latsym {

const SolvedRule* DifferenceSystem::rule_for(const std::string& var) const {
    for (const auto& r : rules)
        if (r.var == var) return &r;
    return nullptr;
}

Domain DifferenceSystem::domain_of(const std::string& var) const {
    auto it = domains.find(var);
    return it == domains.end() ? Domain::NonzeroRational : it->second;
}

void DifferenceSystem::validate() const {
    for (const auto& r : rules) {
        for (const auto& [var, J] : stencil(r.rhs))
            if (var == r.var && J.dominates(r.top))
                throw std::invalid_argument("rule for " + r.var + r.top.str() +
                                            " is not in solved form: right side contains " + var +
                                            J.str());
        if (dim == 1 && rules.size() == 1) {
            if (differentiate(r.rhs, {r.var, MultiIndex::zero(1)}).is_zero_literal())
                throw std::invalid_argument("rule for " + r.var + r.top.str() +
                                            " does not depend on " + r.var + "[0]");
        }
    }
}

Expr normalize_on_solutions(const Expr& e, const DifferenceSystem& sys) {
    Expr cur = e;
    for (int round = 0; round < 1000; ++round) {
        bool changed = false;
        Expr next = substitute_dependents(cur, [&](const std::string& var, const MultiIndex& J)
                                                   -> std::optional<Expr> {
            const SolvedRule* r = sys.rule_for(var);
            if (!r || !J.dominates(r->top)) return std::nullopt;
            changed = true;
            return shift(r->rhs, J - r->top);
        });
        if (!changed) return simplify(cur);
        cur = simplify(next);
    }
    throw std::logic_error("normalize_on_solutions did not reach a fixpoint");
}

Expr solve_affine_for_top(const Expr& implicit_form, const std::string& var, const MultiIndex& top) {
    JetCoord coord{var, top};
    Expr a = differentiate(implicit_form, coord);
    if (a.is_zero_literal())
        throw std::invalid_argument("implicit form does not involve " + var + top.str());
    if (stencil(a).count(coord))
        throw std::invalid_argument("implicit form is not affine in " + var + top.str());
    Expr b = substitute_dependents(implicit_form, [&](const std::string& v, const MultiIndex& J)
                                                      -> std::optional<Expr> {
        if (v == var && J == top) return Expr::integer(0);
        return std::nullopt;
    });
    return simplify(Expr::negate(Expr::product({simplify(std::move(b)), Expr::reciprocal(a)})));
}

} // namespace latsym
