#pragma once

#include "latsym/multiindex.hpp"
#include "latsym/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace latsym {

/// Jet coordinate: a dependent variable sampled at a shift offset.
using JetCoord = std::pair<std::string, MultiIndex>;

enum class Kind {
    Constant,     // exact rational (integer iff denominator 1)
    Parameter,    // named constant, e.g. alpha
    LatticeVar,   // independent variable along one axis (1-based)
    Dependent,    // u^alpha at offset J
    AltSign,      // (-1)^{sum of selected lattice variables}
    Sum,
    Product,
    Power,        // kids = {base, exponent}
    Negate,
    Reciprocal,
    Ln,
    Exp,
    Tanh,
    Abs,
};

class Expr;
struct ExprNode {
    Kind kind;
    Rational value;          // Constant
    std::string name;        // Parameter, Dependent
    int axis = 0;            // LatticeVar
    MultiIndex offset;       // Dependent
    std::uint32_t axes = 0;  // AltSign bitmask, axis k -> bit k-1
    std::vector<Expr> kids;
};

/// Immutable expression tree handle. Copies share structure; all operations
/// on Expr are pure, so trees are safe to use across threads.
class Expr {
public:
    Expr() : node_(zero_node()) {}

    static Expr integer(long v);
    static Expr constant(Rational q);
    static Expr parameter(std::string name);
    static Expr lattice_var(int axis);
    static Expr dependent(std::string var, MultiIndex offset);
    static Expr alt_sign(std::uint32_t axes_mask);
    static Expr sum(std::vector<Expr> kids);
    static Expr product(std::vector<Expr> kids);
    static Expr pow(Expr base, Expr exponent);
    static Expr negate(Expr x);
    static Expr reciprocal(Expr x);
    static Expr ln(Expr x);
    static Expr exp(Expr x);
    static Expr tanh(Expr x);
    static Expr abs(Expr x);

    Kind kind() const { return node_->kind; }
    const Rational& value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    int axis() const { return node_->axis; }
    const MultiIndex& offset() const { return node_->offset; }
    std::uint32_t axes_mask() const { return node_->axes; }
    const std::vector<Expr>& kids() const { return node_->kids; }
    const Expr& kid(std::size_t i) const { return node_->kids[i]; }

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_zero_literal() const { return is_constant() && value() == 0; }
    bool is_one_literal() const { return is_constant() && value() == 1; }

    /// Total structural order; ==0 iff structurally equal.
    static int compare(const Expr& a, const Expr& b);
    bool operator==(const Expr& o) const { return compare(*this, o) == 0; }
    bool operator!=(const Expr& o) const { return !(*this == o); }
    bool operator<(const Expr& o) const { return compare(*this, o) < 0; }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    static std::shared_ptr<const ExprNode> zero_node();
    static Expr make(ExprNode n);
    std::shared_ptr<const ExprNode> node_;
};

// Convenience builders for writing expressions in code.
inline Expr operator+(Expr a, Expr b) { return Expr::sum({std::move(a), std::move(b)}); }
inline Expr operator-(Expr a, Expr b) { return Expr::sum({std::move(a), Expr::negate(std::move(b))}); }
inline Expr operator*(Expr a, Expr b) { return Expr::product({std::move(a), std::move(b)}); }
inline Expr operator/(Expr a, Expr b) { return Expr::product({std::move(a), Expr::reciprocal(std::move(b))}); }
inline Expr operator-(Expr a) { return Expr::negate(std::move(a)); }

/// All jet coordinates the expression depends on.
std::set<JetCoord> stencil(const Expr& e);
/// All parameter names occurring in the expression.
std::set<std::string> parameters(const Expr& e);
/// Largest lattice axis referenced (0 when none).
int max_axis(const Expr& e);

/// Affine form c0 + sum coeff_k * n_k with integer coefficients.
struct AffineForm {
    long c0 = 0;
    std::map<int, long> coeff;   // axis -> coefficient
};
/// Recognizes integer-affine expressions in the lattice variables.
std::optional<AffineForm> lattice_affine_int(const Expr& e);

/// (-1)^(c0 + sum c_k n_k) reduced exactly: axes with odd coefficients survive
/// as an AltSign factor, an odd constant term flips the sign.
Expr alt_sign_from_affine(const AffineForm& aff);

/// True when evaluation cannot stay in exact rationals
/// (Ln/Exp/Tanh present, or a power with a non-integer exponent).
bool float_required(const Expr& e);

// ---------------------------------------------------------------------------
// Evaluation

struct Environment {
    std::vector<long> point;                  // lattice coordinates, axis k -> point[k-1]
    std::map<JetCoord, Rational> values;      // dependent-variable samples
    std::map<std::string, Rational> params;
};

enum class EvalErrorKind { DivisionByZero, LogDomain, PowDomain, MissingEntry, Overflow };

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    EvalErrorKind kind;
};

using Value = std::variant<Rational, double>;

/// Exact evaluation; throws std::logic_error if float_required(e).
Rational evaluate_exact(const Expr& e, const Environment& env);

/// Floating evaluation at precision F (double or long double). When
/// max_magnitude is given it receives the largest absolute value of any
/// intermediate result, for relative-tolerance normalization.
template <class F>
F evaluate_float(const Expr& e, const Environment& env, F* max_magnitude = nullptr);

/// Floating evaluation against caller-supplied lookups (used on simulated data).
double evaluate_on_data(const Expr& e, const std::vector<long>& point,
                        const std::function<double(const std::string&, const MultiIndex&)>& dep,
                        const std::function<double(const std::string&)>& par,
                        double* max_magnitude = nullptr);

/// Exact rational when possible, double otherwise.
Value evaluate(const Expr& e, const Environment& env);

// ---------------------------------------------------------------------------
// Calculus on trees

/// Partial derivative treating each (variable, offset) jet coordinate as an
/// independent variable; lattice variables and parameters are constants.
Expr differentiate(const Expr& e, const JetCoord& wrt);
/// Partial derivative with respect to a parameter.
Expr differentiate_param(const Expr& e, const std::string& param);

/// Conservative normalization: flattens sums/products, folds constants,
/// cancels identical factors and additive inverses, orders children
/// canonically. Never expands Ln or rewrites transcendental identities.
Expr simplify(const Expr& e);

/// Replaces dependent nodes for which the callback returns a tree.
Expr substitute_dependents(const Expr& e,
                           const std::function<std::optional<Expr>(const std::string&, const MultiIndex&)>& fn);

// ---------------------------------------------------------------------------
// Rendering

/// Default axis names: {"n"} for p=1, {"m","n"} for p=2, {"n1",...} beyond.
std::vector<std::string> default_axes(std::size_t p);

/// DSL text for the expression; parse(render(e)) evaluates identically to e.
std::string render(const Expr& e);
std::string render(const Expr& e, const std::vector<std::string>& axes);

} // namespace latsym
