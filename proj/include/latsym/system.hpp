#pragma once

#include "latsym/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latsym {

/// Sampling domain for a dependent variable.
enum class Domain { NonzeroRational, Positive };

/// Sampling constraints for a parameter.
struct ParamSpec {
    std::optional<Rational> fixed;   // pinned value (delta = 0 or 1, K = 1, ...)
    bool positive = false;
    bool exclude_unit = false;       // |value| != 1
};

/// Solved-form rewrite rule u^alpha_{J*} = omega.
struct SolvedRule {
    std::string var;
    MultiIndex top;   // J*
    Expr rhs;         // omega; its stencil holds no offset >= J* for `var`
};

/// A difference system in solved form together with the sampling data the
/// verifier needs: domains, parameter constraints, and distinctness rules.
struct DifferenceSystem {
    std::size_t dim = 1;
    std::vector<SolvedRule> rules;
    std::map<std::string, Domain> domains;
    std::map<std::string, ParamSpec> params;
    std::vector<std::pair<std::string, std::string>> distinct;       // a != b
    std::vector<std::pair<std::string, std::string>> distinct_abs;   // |a| != |b|

    const SolvedRule* rule_for(const std::string& var) const;
    Domain domain_of(const std::string& var) const;

    /// Solved-form sanity: no rule's right side may contain a coordinate the
    /// rule itself rewrites, and a single-variable p=1 rule must genuinely
    /// depend on the bottom coordinate u_n (otherwise the order is overstated
    /// and backward iteration is impossible). Throws std::invalid_argument.
    void validate() const;
};

/// Rewrites every reducible coordinate u^alpha_J (J >= J*_alpha componentwise)
/// to shift(omega_alpha, J - J*_alpha), repeating to a fixpoint. Terminates
/// because each substitution strictly lowers the reducible offsets.
Expr normalize_on_solutions(const Expr& e, const DifferenceSystem& sys);

/// Solves an implicit form F = 0 that is affine in u^var_{top} for the top
/// coordinate, returning omega = -B/A with F = A u_{top} + B. Throws when F
/// is not affine in that coordinate.
Expr solve_affine_for_top(const Expr& implicit_form, const std::string& var, const MultiIndex& top);

} // namespace latsym
