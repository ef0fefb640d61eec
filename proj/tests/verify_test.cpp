#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latsym/parse.hpp"
#include "latsym/verify.hpp"

using namespace latsym;

namespace {

Expr P1(const char* text) {
    ParseContext ctx(1);
    return parse_expr(text, ctx);
}
Expr P1s(const char* text) {
    ParseContext ctx(1);
    ctx.variables = {"s"};
    return parse_expr(text, ctx);
}
Expr P2(const char* text) {
    ParseContext ctx(2);
    return parse_expr(text, ctx);
}
Expr P2ab(const char* text) {
    ParseContext ctx(2);
    ctx.params = {"alpha", "beta"};
    return parse_expr(text, ctx);
}
Expr P2uv(const char* text) {
    ParseContext ctx(2);
    ctx.variables = {"u", "v"};
    return parse_expr(text, ctx);
}

// u_{n+2} = u_{n+1}^2 / u_n (Example 1).
DifferenceSystem ex1_system() {
    DifferenceSystem sys;
    sys.dim = 1;
    sys.rules = {{"u", {2}, P1("u[1]^2/u[0]")}};
    sys.domains["u"] = Domain::Positive;
    return sys;
}

// s_{n+2} = 2 s_{n+1} - s_n, the log form of Example 1.
DifferenceSystem ex1_log_system() {
    DifferenceSystem sys;
    sys.dim = 1;
    sys.rules = {{"s", {2}, P1s("2*s[1] - s[0]")}};
    return sys;
}

// u_{n+3} = u_{n+1} u_{n+2} / u_n (Example 2).
DifferenceSystem ex2_system() {
    DifferenceSystem sys;
    sys.dim = 1;
    sys.rules = {{"u", {3}, P1("u[1]*u[2]/u[0]")}};
    sys.domains["u"] = Domain::Positive;
    return sys;
}

// u_{1,1} = u_{0,0} (1 + u_{0,1}/u_{1,0}) (Example 3).
DifferenceSystem ex3_system() {
    DifferenceSystem sys;
    sys.dim = 2;
    sys.rules = {{"u", {1, 1}, P2("u[0,0]*(1 + u[0,1]/u[1,0])")}};
    return sys;
}

// Example 4 Euler-Lagrange system (both rules).
DifferenceSystem ex4_system() {
    DifferenceSystem sys;
    sys.dim = 2;
    sys.rules = {{"u", {1, 1}, P2uv("v[0,1]^2/u[0,0]")},
                 {"v", {1, 1}, P2uv("u[1,0]^2/v[0,0]")}};
    sys.domains["u"] = Domain::Positive;
    sys.domains["v"] = Domain::Positive;
    return sys;
}

Characteristic single(const char* var, Expr q) {
    Characteristic v;
    v.components[var] = std::move(q);
    return v;
}

const CheckOptions kOpt{};   // default seed/trials/tol

} // namespace

TEST_CASE("normalize_on_solutions") {
    DifferenceSystem sys = ex1_system();
    CHECK(normalize_on_solutions(P1("u[2]"), sys) == simplify(P1("u[1]^2/u[0]")));
    CHECK(normalize_on_solutions(P1("u[3]"), sys) == simplify(P1("u[1]^3/u[0]^2")));

    DifferenceSystem q = ex3_system();
    CHECK(normalize_on_solutions(P2("u[1,1]"), q) == simplify(P2("u[0,0]*(1 + u[0,1]/u[1,0])")));

    // Fixpoint: applying twice equals applying once.
    Expr e = P1("u[4]/u[2] + u[3]*n");
    Expr once = normalize_on_solutions(e, sys);
    CHECK(normalize_on_solutions(once, sys) == once);
    CHECK(stencil(once).count({"u", {2}}) == 0);
    CHECK(stencil(once).count({"u", {3}}) == 0);
    CHECK(stencil(once).count({"u", {4}}) == 0);
}

TEST_CASE("is_zero: first integrals of Examples 1 and 2") {
    DifferenceSystem sys = ex1_system();
    Expr p = P1("u[1]/u[0]");
    Expr sp_minus_p = Expr::sum({shift(p, {1}), Expr::negate(p)});
    Verdict v = is_zero(sp_minus_p, &sys, kOpt);
    CHECK(v.status == Status::HoldsOnSolutions);
    CHECK(v.exact);
    CHECK(v.max_residual == 0.0);

    DifferenceSystem sys2 = ex2_system();
    Expr p2 = P1("u[2]/u[0]");
    Verdict v2 = is_zero(Expr::sum({shift(p2, {1}), Expr::negate(p2)}), &sys2, kOpt);
    CHECK(v2.status == Status::HoldsOnSolutions);
    CHECK(v2.exact);
}

TEST_CASE("is_zero: failure carries a replayable witness") {
    Expr e = P1("u[0] - u[1]");
    Verdict v = is_zero(e, nullptr, kOpt);
    REQUIRE(v.status == Status::Fails);
    REQUIRE(v.witness.has_value());
    CHECK(evaluate_exact(e, *v.witness) != 0);

    // Same seed, same witness.
    Verdict v2 = is_zero(e, nullptr, kOpt);
    REQUIRE(v2.witness.has_value());
    CHECK(v2.witness->values == v.witness->values);
}

TEST_CASE("is_zero: status levels") {
    DifferenceSystem sys = ex1_system();
    // A literal zero after simplification needs no trials.
    Verdict lit = is_zero(P1("u[0] - u[0]"), &sys, kOpt);
    CHECK(lit.status == Status::HoldsIdentically);
    CHECK(lit.trials == 0);

    // Zero as a function though not literally; no system involvement.
    Expr f = P1("(u[0]+u[1])^2 - u[0]^2 - 2*u[0]*u[1] - u[1]^2");
    CHECK(is_zero(f, &sys, kOpt).status == Status::HoldsIdentically);

    // Holds only on the solution manifold.
    Expr g = P1("u[2]*u[0] - u[1]^2");
    CHECK(is_zero(g, &sys, kOpt).status == Status::HoldsOnSolutions);
}

TEST_CASE("is_zero: unsatisfiable sampling is reported") {
    // ln(-abs(u)-1) has an empty domain: every draw fails.
    Expr e = P1("ln(-abs(u[0]) - 1)");
    CHECK_THROWS_AS(is_zero(e, nullptr, kOpt), VerifyError);
}

TEST_CASE("check_symmetry: Example 1 characteristics") {
    DifferenceSystem sys = ex1_system();
    CHECK(check_symmetry(sys, single("u", P1("u[0]")), kOpt).combined.holds());
    CHECK(check_symmetry(sys, single("u", P1("n*u[0]")), kOpt).combined.holds());
    // Q3 = u ln|u| forces float mode.
    CheckResult q3 = check_symmetry(sys, single("u", P1("u[0]*ln(abs(u[0]))")), kOpt);
    CHECK(q3.combined.holds());
    CHECK_FALSE(q3.combined.exact);
    // Not a symmetry.
    CHECK(check_symmetry(sys, single("u", P1("u[0]^2")), kOpt).combined.status == Status::Fails);
}

TEST_CASE("check_symmetry: Example 2 characteristics") {
    DifferenceSystem sys = ex2_system();
    CHECK(check_symmetry(sys, single("u", P1("u[0]")), kOpt).combined.holds());
    CHECK(check_symmetry(sys, single("u", P1("(-1)^n*u[0]")), kOpt).combined.holds());
    CHECK(check_symmetry(sys, single("u", P1("n*u[0]")), kOpt).combined.holds());
    CHECK(check_symmetry(sys, single("u", P1("u[0]*ln(abs(u[0]))")), kOpt).combined.holds());
}

TEST_CASE("check_symmetry: H1 with parameter components") {
    // u11 = u00 + (beta-alpha)/(u10-u01), from the implicit H1 form.
    DifferenceSystem sys;
    sys.dim = 2;
    sys.rules = {{"u", {1, 1}, P2ab("u[0,0] + (beta-alpha)/(u[1,0]-u[0,1])")}};
    sys.distinct = {{"alpha", "beta"}};
    Characteristic q3 = single("u", P2ab("u[0,0]"));
    q3.param_components["alpha"] = P2ab("2*alpha");
    q3.param_components["beta"] = P2ab("2*beta");
    CHECK(check_symmetry(sys, q3, kOpt).combined.holds());
    // Without the parameter components the scaling is not a symmetry.
    CHECK(check_symmetry(sys, single("u", P2ab("u[0,0]")), kOpt).combined.status == Status::Fails);
}

TEST_CASE("check_conservation_law: Example 3 explicit pairs") {
    DifferenceSystem sys = ex3_system();
    ConservationLaw law1{{P2("(1+(-1)^(m+n))/2 * u[0,0]/u[0,1]"),
                          P2("(1+(-1)^(m+n))/2 * u[0,0]/u[1,0] + (1-(-1)^(m+n))/2 * u[1,0]/u[0,0]")}};
    Verdict v1 = check_conservation_law(sys, law1, kOpt).combined;
    CHECK(v1.holds());
    CHECK(v1.exact);

    // Second pair: parity factors swap between F and G.
    ConservationLaw law2{{P2("(1-(-1)^(m+n))/2 * u[0,0]/u[0,1]"),
                          P2("(1-(-1)^(m+n))/2 * u[0,0]/u[1,0] + (1+(-1)^(m+n))/2 * u[1,0]/u[0,0]")}};
    CHECK(check_conservation_law(sys, law2, kOpt).combined.holds());

    ConservationLaw trivial{{Expr::integer(4), Expr::integer(7)}};
    CHECK(check_conservation_law(sys, trivial, kOpt).combined.status ==
          Status::HoldsIdentically);

    // Negative control: a sign flip breaks the pair.
    ConservationLaw broken = law1;
    broken.components[1] = Expr::negate(broken.components[1]);
    CHECK(check_conservation_law(sys, broken, kOpt).combined.status == Status::Fails);
}

TEST_CASE("check_variational_symmetry: Example 1 log Lagrangian") {
    Lagrangian L(P1s("s[0]*s[1] - s[0]^2"));

    Characteristic v1 = single("s", Expr::integer(1));
    std::vector<Expr> R1 = {P1s("s[0]")};
    CHECK(check_variational_symmetry(L, v1, &R1, kOpt).combined.status ==
          Status::HoldsIdentically);

    Characteristic v2 = single("s", P1s("n"));
    std::vector<Expr> R2 = {P1s("(n-1)*s[0]")};
    CHECK(check_variational_symmetry(L, v2, &R2, kOpt).combined.status ==
          Status::HoldsIdentically);

    // Q = s_n (image of Q3) is not even a divergence symmetry: the kernel
    // test leaves 2(s[1] - 2 s[0] + s[-1]).
    Characteristic v3 = single("s", P1s("s[0]"));
    CheckResult r3 = check_variational_symmetry(L, v3, nullptr, kOpt);
    CHECK(r3.combined.status == Status::Fails);

    // v1 and v2 also pass the kernel test without a given R.
    CHECK(check_variational_symmetry(L, v1, nullptr, kOpt).combined.holds());
    CHECK(check_variational_symmetry(L, v2, nullptr, kOpt).combined.holds());
}

TEST_CASE("check_variational_symmetry: Example 4") {
    Lagrangian L(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    std::vector<Expr> R0 = {Expr::integer(0), Expr::integer(0)};
    CHECK(check_variational_symmetry(L, v, &R0, kOpt).combined.status ==
          Status::HoldsIdentically);

    Characteristic w;
    w.components["u"] = P2uv("2*n*u[0,0]");
    w.components["v"] = P2uv("(2*n-1)*v[0,0]");
    CHECK(check_variational_symmetry(L, w, nullptr, kOpt).combined.status == Status::Fails);
}

TEST_CASE("check_el_symmetry_inheritance") {
    Lagrangian L1(P1s("s[0]*s[1] - s[0]^2"));
    DifferenceSystem slog = ex1_log_system();
    CHECK(check_el_symmetry_inheritance(L1, single("s", Expr::integer(1)), slog, kOpt)
              .combined.holds());
    CHECK(check_el_symmetry_inheritance(L1, single("s", P1s("n")), slog, kOpt).combined.holds());

    Lagrangian L4(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    DifferenceSystem wuv = ex4_system();
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    CHECK(check_el_symmetry_inheritance(L4, v, wuv, kOpt).combined.holds());

    // Second generator: symmetry of the EL system though not variational.
    Characteristic w;
    w.components["u"] = P2uv("2*n*u[0,0]");
    w.components["v"] = P2uv("(2*n-1)*v[0,0]");
    CHECK(check_el_symmetry_inheritance(L4, w, wuv, kOpt).combined.holds());
}

TEST_CASE("check_theorem1_inheritance") {
    Lagrangian L1(P1s("s[0]*s[1] - s[0]^2"));
    DifferenceSystem slog = ex1_log_system();
    CHECK(check_theorem1_inheritance(L1, single("s", Expr::integer(1)), slog, kOpt)
              .combined.holds());
    CHECK(check_theorem1_inheritance(L1, single("s", P1s("n")), slog, kOpt).combined.holds());

    Lagrangian L4(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    DifferenceSystem wuv = ex4_system();
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    CHECK(check_theorem1_inheritance(L4, v, wuv, kOpt).combined.holds());
}

TEST_CASE("check_association") {
    DifferenceSystem sys = ex1_system();
    // Q = u0 against u1/u0 holds identically.
    Verdict a = check_association(sys, single("u", P1("u[0]")),
                                  ConservationLaw{{P1("u[1]/u[0]")}}, kOpt)
                    .combined;
    CHECK(a.status == Status::HoldsIdentically);

    // Q = n u0 against u1^n / u0^(n+1).
    Verdict b = check_association(sys, single("u", P1("n*u[0]")),
                                  ConservationLaw{{P1("u[1]^n/u[0]^(n+1)")}}, kOpt)
                    .combined;
    CHECK(b.holds());
    CHECK(b.exact);

    // Q = 1 against P = u0 fails: pr v(P) = 1.
    Verdict c = check_association(sys, single("u", Expr::integer(1)),
                                  ConservationLaw{{P1("u[0]")}}, kOpt)
                    .combined;
    CHECK(c.status == Status::Fails);
}

TEST_CASE("check_theorem2") {
    Lagrangian L(P1s("s[0]*s[1] - s[0]^2"));
    DifferenceSystem slog = ex1_log_system();

    Characteristic v1 = single("s", Expr::integer(1));
    std::vector<Expr> R1 = {P1s("s[0]")};
    CHECK(check_theorem2(L, v1, &R1, slog, kOpt).combined.holds());

    Characteristic v2 = single("s", P1s("n"));
    std::vector<Expr> R2 = {P1s("(n-1)*s[0]")};
    CHECK(check_theorem2(L, v2, &R2, slog, kOpt).combined.holds());

    Lagrangian L4(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    DifferenceSystem wuv = ex4_system();
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    CHECK(check_theorem2(L4, v, nullptr, wuv, kOpt).combined.holds());
}

TEST_CASE("check_three_point_reduction") {
    DifferenceSystem sys = ex3_system();
    Expr F1 = P2("(1+(-1)^(m+n))/2 * u[0,0]/u[0,1]");
    Expr G1 = P2("(1+(-1)^(m+n))/2 * u[0,0]/u[1,0] + (1-(-1)^(m+n))/2 * u[1,0]/u[0,0]");
    CHECK(check_three_point_reduction(sys, F1, G1, kOpt).combined.holds());

    // Fails for a non-law: D1 D2 (u00) has residual u00 (u10-u01) / (u10 (u10+u01)^2).
    CHECK(check_three_point_reduction(sys, P2("u[0,0]"), Expr::integer(0), kOpt)
              .combined.status == Status::Fails);

    // Form violation: F may not depend on u[1,0].
    CHECK_THROWS_AS(check_three_point_reduction(sys, P2("u[1,0]"), Expr::integer(0), kOpt),
                    VerifyError);

    // Example 4's logarithmic pair under the two-component operators.
    DifferenceSystem wuv = ex4_system();
    Expr F4 = P2uv("ln(u[0,0]/v[0,0]) + ln(u[0,0]/u[0,1])");
    Expr G4 = P2uv("-ln(u[0,0]/v[0,0]) + ln(v[0,0]/v[1,0])");
    CheckResult r = check_three_point_reduction(wuv, F4, G4, kOpt);
    CHECK(r.combined.holds());
    CHECK(r.combined.exact);   // d/du ln(...) is rational, so the residual is exact
}

TEST_CASE("check_invariant_ansatz") {
    // Q = (-1)^(m+n), coordinate u00+u01.
    Characteristic q1 = single("u", P2("(-1)^(m+n)"));
    CHECK(check_invariant_ansatz(q1, {P2("u[0,0]+u[0,1]"), P2("u[0,0]+u[1,0]")}, kOpt)
              .combined.status == Status::HoldsIdentically);

    Characteristic q2 = single("u", P2("u[0,0]"));
    CHECK(check_invariant_ansatz(q2, {P2("u[0,1]/u[0,0]"), P2("u[1,0]/u[0,0]")}, kOpt)
              .combined.status == Status::HoldsIdentically);

    // Q4 row of the second table: Q = 1 - u00^2.
    Characteristic q4 = single("u", P2("1 - u[0,0]^2"));
    Expr coord = P2("(u[0,0]+1)*(u[0,1]-1)/((u[0,0]-1)*(u[0,1]+1))");
    CHECK(check_invariant_ansatz(q4, {coord}, kOpt).combined.status ==
          Status::HoldsIdentically);

    // Not an invariant.
    CHECK(check_invariant_ansatz(q2, {P2("u[0,0]+u[0,1]")}, kOpt).combined.status ==
          Status::Fails);
}

TEST_CASE("check_noether_identity for every Example 1 and 4 pair") {
    Lagrangian L(P1s("s[0]*s[1] - s[0]^2"));
    for (Expr q : {Expr::integer(1), P1s("n"), P1s("s[0]")}) {
        CHECK(check_noether_identity(L, single("s", q), kOpt).combined.status ==
              Status::HoldsIdentically);
    }
    Lagrangian L4(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    CHECK(check_noether_identity(L4, v, kOpt).combined.status == Status::HoldsIdentically);
    Characteristic w;
    w.components["u"] = P2uv("2*n*u[0,0]");
    w.components["v"] = P2uv("(2*n-1)*v[0,0]");
    CHECK(check_noether_identity(L4, w, kOpt).combined.status == Status::HoldsIdentically);
}

TEST_CASE("commutator of prolongation and T on Lie point variational pairs") {
    Lagrangian L(P1s("s[0]*s[1] - s[0]^2"));
    Characteristic v1 = single("s", Expr::integer(1));
    // [pr v, T](L) = pr v(T(L)) - T(pr v (L)).
    Expr lhs = prolong_apply(v1, t_operator(L, v1, 1));
    Expr rhs = t_operator(Lagrangian(prolong_apply(v1, L.density())), v1, 1);
    CHECK(is_zero(Expr::sum({lhs, Expr::negate(rhs)}), nullptr, kOpt).status ==
          Status::HoldsIdentically);

    Lagrangian L4(P2uv("u[1,0]/v[0,0] + v[0,1]/u[0,0]"));
    Characteristic v;
    v.components["u"] = P2uv("u[0,0]");
    v.components["v"] = P2uv("v[0,0]");
    for (int axis : {1, 2}) {
        Expr a = prolong_apply(v, t_operator(L4, v, axis));
        Expr b = t_operator(Lagrangian(prolong_apply(v, L4.density()), 2), v, axis);
        CHECK(is_zero(Expr::sum({a, Expr::negate(b)}), nullptr, kOpt).status ==
              Status::HoldsIdentically);
    }
}

TEST_CASE("system validation rejects unsolved forms and degenerate orders") {
    DifferenceSystem bad;
    bad.dim = 1;
    bad.rules = {{"u", {2}, P1("u[2] + u[0]")}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    DifferenceSystem degenerate;
    degenerate.dim = 1;
    degenerate.rules = {{"u", {2}, P1("u[1]^2")}};   // order is really 1
    CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);

    CHECK_NOTHROW(ex1_system().validate());
    CHECK_NOTHROW(ex4_system().validate());
}

TEST_CASE("theorem 2 rejects non-point characteristics") {
    Lagrangian L(P1s("s[0]*s[1] - s[0]^2"));
    DifferenceSystem slog = ex1_log_system();
    Characteristic higher = single("s", P1s("s[1]"));
    CHECK_THROWS_AS(check_theorem2(L, higher, nullptr, slog, kOpt), VerifyError);
}

TEST_CASE("u = exp(s) converts Example 1 to its linear log form") {
    // Substituting u = exp(s) into u[2] - omega and testing on the linear
    // system s[2] = 2 s[1] - s[0] shows the two equations share solutions.
    DifferenceSystem slog = ex1_log_system();
    Expr equation = P1("u[2] - u[1]^2/u[0]");
    PointSubstitution sub{"u", "s", P1s("exp(s[0])")};
    Expr in_log = substitute_point_map(equation, {sub});
    Verdict v = is_zero(in_log, &slog, kOpt);
    CHECK(v.status == Status::HoldsOnSolutions);
    CHECK_FALSE(v.exact);
}
