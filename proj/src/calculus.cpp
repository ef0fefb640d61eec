#include "latsym/calculus.hpp"
#include "latsym/system.hpp"

#include <algorithm>
#include <stdexcept>

namespace latsym {

bool Characteristic::is_lie_point() const {
    for (const auto& [var, q] : components)
        for (const auto& [v, J] : stencil(q))
            if (!J.is_zero()) return false;
    for (const auto& [par, q] : param_components)
        for (const auto& [v, J] : stencil(q))
            if (!J.is_zero()) return false;
    return true;
}

Lagrangian::Lagrangian(Expr density, std::size_t dim)
    : density_(std::move(density)), dim_(dim ? dim : 1) {
    for (const auto& [var, J] : stencil(density_)) {
        dim_ = std::max(dim_, J.dim());
        for (std::size_t i = 0; i < J.dim(); ++i)
            if (J[i] < 0)
                throw std::invalid_argument("Lagrangian depends on a backward shift " + var +
                                            J.str() + "; shift it forward first");
        if (vars_.empty() || vars_.back() != var) vars_.push_back(var);   // stencil is sorted
    }
}

Expr shift(const Expr& e, const MultiIndex& J) {
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Parameter:
            return e;
        case Kind::LatticeVar: {
            int d = J[static_cast<std::size_t>(e.axis() - 1)];
            if (d == 0) return e;
            return Expr::sum({e, Expr::integer(d)});
        }
        case Kind::Dependent:
            return Expr::dependent(e.name(), e.offset() + J);
        case Kind::AltSign: {
            long s = 0;
            std::uint32_t m = e.axes_mask();
            for (std::size_t k = 0; k < J.dim() && m; ++k, m >>= 1)
                if (m & 1u) s += J[k];
            return (s % 2 == 0) ? e : Expr::negate(e);
        }
        default: {
            std::vector<Expr> kids;
            kids.reserve(e.kids().size());
            for (const auto& k : e.kids()) kids.push_back(shift(k, J));
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
    }
}

Expr prolong_apply(const Characteristic& v, const Expr& e) {
    std::vector<Expr> terms;
    for (const auto& [var, J] : stencil(e)) {
        auto it = v.components.find(var);
        if (it == v.components.end()) continue;
        Expr d = differentiate(e, {var, J});
        if (d.is_zero_literal()) continue;
        terms.push_back(Expr::product({shift(it->second, J), std::move(d)}));
    }
    if (!v.param_components.empty()) {
        auto pars = parameters(e);
        for (const auto& [par, q] : v.param_components) {
            if (!pars.count(par)) continue;
            Expr d = differentiate_param(e, par);
            if (d.is_zero_literal()) continue;
            terms.push_back(Expr::product({q, std::move(d)}));
        }
    }
    return simplify(Expr::sum(std::move(terms)));
}

Expr difference_divergence(const ConservationLaw& P) {
    std::size_t p = P.components.size();
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < p; ++i) {
        const Expr& c = P.components[i];
        terms.push_back(shift(c, MultiIndex::unit(p, i + 1)));
        terms.push_back(Expr::negate(c));
    }
    return simplify(Expr::sum(std::move(terms)));
}

Expr euler_lagrange(const Lagrangian& L, const std::string& var) {
    std::vector<Expr> terms;
    for (const auto& [v, J] : stencil(L.density())) {
        if (v != var) continue;
        Expr d = differentiate(L.density(), {v, J});
        if (d.is_zero_literal()) continue;
        terms.push_back(shift(d, -J));
    }
    return simplify(Expr::sum(std::move(terms)));
}

Expr higher_euler(const Lagrangian& L, const std::string& var, const MultiIndex& J) {
    if (!J.dominates(MultiIndex::zero(J.dim())))
        throw std::invalid_argument("higher Euler operator needs J >= 0");
    std::vector<Expr> terms;
    for (const auto& [v, K] : stencil(L.density())) {
        if (v != var || !K.dominates(J)) continue;
        Expr d = differentiate(L.density(), {v, K});
        if (d.is_zero_literal()) continue;
        terms.push_back(shift(d, -(K - J)));
    }
    return simplify(Expr::sum(std::move(terms)));
}

std::vector<Expr> noether_boundary_terms(const Lagrangian& L, const Characteristic& v) {
    std::size_t p = L.dim();
    std::vector<std::vector<Expr>> boundary(p);
    for (const auto& [var, K] : stencil(L.density())) {
        auto it = v.components.find(var);
        if (it == v.components.end()) continue;
        const Expr& Q = it->second;
        Expr f = differentiate(L.density(), {var, K});
        if (f.is_zero_literal()) continue;
        MultiIndex J = K;
        // Reduce J to zero one unit step at a time, axis 1 first. Each step
        // peels off one boundary term for the axis being stepped.
        while (!J.is_zero()) {
            std::size_t axis = 0;
            while (J[axis] == 0) ++axis;
            MultiIndex e1 = MultiIndex::unit(p, axis + 1);
            f = shift(f, -e1);
            J = J - e1;
            boundary[axis].push_back(Expr::product({shift(Q, J), f}));
        }
    }
    std::vector<Expr> C;
    C.reserve(p);
    for (auto& terms : boundary) C.push_back(simplify(Expr::sum(std::move(terms))));
    return C;
}

Expr t_operator(const Lagrangian& L, const Characteristic& v, int axis) {
    auto C = noether_boundary_terms(L, v);
    return C.at(static_cast<std::size_t>(axis - 1));
}

Expr noether_component(const Lagrangian& L, const Characteristic& v,
                       const std::vector<Expr>* R, int axis) {
    Expr C = t_operator(L, v, axis);
    if (!R) return C;
    return simplify(Expr::sum({C, Expr::negate(R->at(static_cast<std::size_t>(axis - 1)))}));
}

namespace {

struct DOperator {
    Expr omega;
    JetCoord outer;
    JetCoord base;
};

DOperator build_d_operator(const DifferenceSystem& sys, int which) {
    if (sys.dim != 2) throw std::invalid_argument("D operators are defined for quad systems");
    MultiIndex want = (which == 1) ? MultiIndex{0, 1} : MultiIndex{1, 0};
    for (const auto& rule : sys.rules) {
        for (const auto& [var, J] : stencil(rule.rhs)) {
            if (J != want) continue;
            JetCoord base{rule.var, MultiIndex{0, 0}};
            Expr denom = differentiate(rule.rhs, base);
            if (denom.is_zero_literal())
                throw std::invalid_argument("degenerate rule: omega does not depend on " +
                                            rule.var + "[0,0]");
            return DOperator{rule.rhs, {var, J}, base};
        }
    }
    throw std::invalid_argument("no rule exposes a coordinate at offset " + want.str());
}

} // namespace

Expr d_operator_apply(const DifferenceSystem& sys, int which, const Expr& e) {
    DOperator op = build_d_operator(sys, which);
    Expr d_outer = differentiate(e, op.outer);
    Expr d_base = differentiate(e, op.base);
    Expr ratio = Expr::product({differentiate(op.omega, op.outer),
                                Expr::reciprocal(differentiate(op.omega, op.base))});
    return simplify(Expr::sum(
        {std::move(d_outer), Expr::negate(Expr::product({std::move(ratio), std::move(d_base)}))}));
}

Expr substitute_point_map(const Expr& e, const std::vector<PointSubstitution>& subs) {
    return substitute_dependents(e, [&](const std::string& var, const MultiIndex& J) -> std::optional<Expr> {
        for (const auto& s : subs)
            if (s.old_var == var) return shift(s.phi, J);
        return std::nullopt;
    });
}

Lagrangian change_variables(const Lagrangian& L, const std::vector<PointSubstitution>& subs) {
    return Lagrangian(simplify(substitute_point_map(L.density(), subs)));
}

} // namespace latsym
