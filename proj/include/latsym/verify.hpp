#pragma once

#include "latsym/calculus.hpp"
#include "latsym/expr.hpp"
#include "latsym/system.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace latsym {

/// Default seed for randomized checks; every report records the seed used.
inline constexpr std::uint64_t kDefaultSeed = 1729;

enum class Status { HoldsIdentically, HoldsOnSolutions, Fails };

std::string to_string(Status s);

struct Verdict {
    Status status = Status::Fails;
    bool exact = true;                    // exact rationals vs floating trials
    int trials = 0;
    double max_residual = 0.0;            // normalized; 0 in exact holds
    std::optional<Environment> witness;   // present iff status == Fails

    bool holds() const { return status != Status::Fails; }
};

struct CheckOptions {
    std::uint64_t seed = kDefaultSeed;
    int trials = 50;
    double tol = 1e-9;
};

/// Sampling could not produce enough valid trial points, or inputs violate a
/// check's preconditions.
class VerifyError : public std::runtime_error {
public:
    explicit VerifyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Randomized zero test. With a system the expression is first normalized on
/// the solution manifold; trial environments honor the declared domains and
/// parameter constraints and are reproducible from (seed, trial). Exact mode
/// decides from exact rationals; float mode compares against
/// tol * (1 + largest intermediate magnitude) in double and confirms in long
/// double. Environments that hit a singularity are resampled, at most
/// 20 * trials times in total.
Verdict is_zero(const Expr& e, const DifferenceSystem* sys, const CheckOptions& opt);

struct CheckPart {
    std::string label;
    Verdict verdict;
};

struct CheckResult {
    Verdict combined;   // worst part; HoldsIdentically only if all parts are
    std::vector<CheckPart> parts;
};

/// Linearized symmetry condition: pr v(u_{J*} - omega) = 0 on solutions,
/// once per rule.
CheckResult check_symmetry(const DifferenceSystem& sys, const Characteristic& v,
                           const CheckOptions& opt);

/// Div P = 0 on solutions.
CheckResult check_conservation_law(const DifferenceSystem& sys, const ConservationLaw& P,
                                   const CheckOptions& opt);

/// With R: pr v(L) - Div R = 0 identically. Without R: divergence-symmetry
/// test through the null-Lagrangian kernel, E_beta(pr v(L)) = 0 for every
/// dependent variable beta.
CheckResult check_variational_symmetry(const Lagrangian& L, const Characteristic& v,
                                       const std::vector<Expr>* R, const CheckOptions& opt);

/// Consistency of the cataloged solved form with the Euler-Lagrange
/// expressions (each E_alpha(L), shifted into the reducible range, vanishes on
/// the system), then the symmetry check for v on that system.
CheckResult check_el_symmetry_inheritance(const Lagrangian& L, const Characteristic& v,
                                          const DifferenceSystem& el_sys, const CheckOptions& opt);

/// pr v(E_alpha(L)) = 0 on the Euler-Lagrange system, for every alpha.
CheckResult check_theorem1_inheritance(const Lagrangian& L, const Characteristic& v,
                                       const DifferenceSystem& el_sys, const CheckOptions& opt);

/// pr v(P^i) = 0 on solutions for the Noether components P^i = C^i - R^i
/// (R = 0 when null).
CheckResult check_theorem2(const Lagrangian& L, const Characteristic& v,
                           const std::vector<Expr>* R, const DifferenceSystem& sys,
                           const CheckOptions& opt);

/// Association condition: pr v(P^i) = 0 on solutions for every component.
CheckResult check_association(const DifferenceSystem& sys, const Characteristic& v,
                              const ConservationLaw& P, const CheckOptions& opt);

/// Three-point reduction D1 D2 (F + G) = 0 on solutions. F may involve only
/// offsets (0,0)/(0,1) and G only (0,0)/(1,0).
CheckResult check_three_point_reduction(const DifferenceSystem& sys, const Expr& F, const Expr& G,
                                        const CheckOptions& opt);

/// Each ansatz coordinate is an invariant of pr v identically, so any function
/// of the coordinates satisfies the association condition.
CheckResult check_invariant_ansatz(const Characteristic& v, const std::vector<Expr>& coords,
                                   const CheckOptions& opt);

/// The integration-by-parts identity behind Noether's construction:
/// pr v(L) - sum_alpha Q^alpha E_alpha(L) - Div C = 0 identically.
CheckResult check_noether_identity(const Lagrangian& L, const Characteristic& v,
                                   const CheckOptions& opt);

} // namespace latsym
