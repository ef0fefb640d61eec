#pragma once

#include "latsym/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latsym {

struct DifferenceSystem;   // system.hpp

/// Evolutionary vector field: one expression per dependent variable, plus
/// optional components acting on parameters.
struct Characteristic {
    std::map<std::string, Expr> components;         // variable -> Q^alpha
    std::map<std::string, Expr> param_components;   // parameter -> Q^param

    /// Lie point characteristic: every component depends on dependent
    /// variables only at offset zero.
    bool is_lie_point() const;
};

/// Forward-shift-only Lagrangian density. Construction rejects densities
/// touching backward shifts; shift such a density forward first. The lattice
/// dimension is inferred from the stencil; pass it explicitly for densities
/// that degenerate to constants.
class Lagrangian {
public:
    explicit Lagrangian(Expr density, std::size_t dim = 0);

    const Expr& density() const { return density_; }
    const std::vector<std::string>& variables() const { return vars_; }
    std::size_t dim() const { return dim_; }

private:
    Expr density_;
    std::vector<std::string> vars_;
    std::size_t dim_;
};

/// p-tuple of conservation-law components; for p=2 the pair is (F, G) with
/// F advanced along the first axis and G along the second.
struct ConservationLaw {
    std::vector<Expr> components;

    std::size_t dim() const { return components.size(); }
    const Expr& F() const { return components.at(0); }
    const Expr& G() const { return components.at(1); }
};

/// S_J: lattice variables advance by J, dependent offsets translate by J,
/// alternating signs pick up the exact parity factor.
Expr shift(const Expr& e, const MultiIndex& J);

/// pr v(e): sum of shifted characteristic components against the jet
/// derivatives of e, plus parameter components against parameter derivatives.
Expr prolong_apply(const Characteristic& v, const Expr& e);

/// Div P = sum_i (S_i - id) P^i.
Expr difference_divergence(const ConservationLaw& P);

/// E_alpha(L) = sum_J S_{-J} dL/du^alpha_J.
Expr euler_lagrange(const Lagrangian& L, const std::string& var);

/// Higher Euler operator E_{u_J^alpha}(L) = sum_{J0 >= 0} S_{-J0} dL/du^alpha_{J0+J}.
Expr higher_euler(const Lagrangian& L, const std::string& var, const MultiIndex& J);

/// Boundary terms C^i of the discrete integration by parts underlying
/// Noether's construction:
///   pr v(L) = sum_alpha Q^alpha E_alpha(L) + sum_i (S_i - id) C^i.
/// Offsets reachable along several axes are reduced axis-1-first, so the
/// splitting across directions is fixed lexicographically; the identity above
/// holds exactly for any characteristic and is what the verify module checks.
std::vector<Expr> noether_boundary_terms(const Lagrangian& L, const Characteristic& v);

/// T^i(L) = C^i.
Expr t_operator(const Lagrangian& L, const Characteristic& v, int axis);

/// P^i = C^i - R^i; pass nullptr for R = 0.
Expr noether_component(const Lagrangian& L, const Characteristic& v,
                       const std::vector<Expr>* R, int axis);

/// Directional derivative that annihilates the solved rule:
///   D(e) = de/d(outer) - (dw/d(outer))/(dw/d(base)) * de/d(base).
/// `which` = 1 selects the operator whose outer coordinate sits at offset
/// (0,1), `which` = 2 the one at (1,0); both exist for every cataloged quad
/// system, including two-component ones where they come from different rules.
Expr d_operator_apply(const DifferenceSystem& sys, int which, const Expr& e);

/// Invertible point substitution old = phi(new), with phi given at offset 0.
struct PointSubstitution {
    std::string old_var;
    std::string new_var;
    Expr phi;
};

/// Replaces every u^alpha_J by shift(phi_alpha, J) in an arbitrary expression.
Expr substitute_point_map(const Expr& e, const std::vector<PointSubstitution>& subs);

/// The same substitution applied to a Lagrangian density.
Lagrangian change_variables(const Lagrangian& L, const std::vector<PointSubstitution>& subs);

} // namespace latsym
