#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latsym/catalog.hpp"
#include "latsym/parse.hpp"
#include "latsym/simulate.hpp"

#include <cmath>

using namespace latsym;

namespace {

Expr P1(const char* text) {
    ParseContext ctx(1);
    return parse_expr(text, ctx);
}

DifferenceSystem ex1_system() {
    DifferenceSystem sys;
    sys.dim = 1;
    sys.rules = {{"u", {2}, P1("u[1]^2/u[0]")}};
    sys.domains["u"] = Domain::Positive;
    return sys;
}

} // namespace

TEST_CASE("ode_orbit reproduces the geometric solution of Example 1") {
    DifferenceSystem sys = ex1_system();
    OrbitData data = ode_orbit(sys, {{"u", {1.0, 2.0}}}, 30, {});
    REQUIRE(data.values["u"].size() == 32);
    for (std::size_t n = 0; n < 32; ++n) {
        double expect = std::ldexp(1.0, static_cast<int>(n));   // 2^n
        CHECK(std::abs(data.values["u"][n] - expect) / expect <= 1e-12);
    }
}

TEST_CASE("ode_orbit: fixed point and singular step") {
    DifferenceSystem sys = ex1_system();
    OrbitData flat = ode_orbit(sys, {{"u", {3.5, 3.5}}}, 10, {});
    for (double v : flat.values["u"]) CHECK(v == 3.5);

    CHECK_THROWS_AS(ode_orbit(sys, {{"u", {0.0, 1.0}}}, 5, {}), SimulateError);
    CHECK_THROWS_AS(ode_orbit(sys, {{"u", {1.0}}}, 5, {}), SimulateError);
}

TEST_CASE("Example 2 orbit carries its first integral") {
    DifferenceSystem sys;
    sys.dim = 1;
    sys.rules = {{"u", {3}, P1("u[1]*u[2]/u[0]")}};
    OrbitData data = ode_orbit(sys, {{"u", {1.0, 2.0, 3.0}}}, 15, {});
    // u_{n+2}/u_n = 3 along the whole orbit.
    for (std::size_t n = 0; n + 2 < data.values["u"].size(); ++n)
        CHECK(data.values["u"][n + 2] / data.values["u"][n] == doctest::Approx(3.0).epsilon(1e-12));

    ConservationLaw p{{P1("u[2]/u[0]")}};
    DriftReport r = drift(p, data);
    CHECK(r.max_residual <= 1e-12);
}

TEST_CASE("quad_fill: Example 3 with all-ones boundary") {
    CatalogEntry e = load_entry("ex3");
    std::map<std::string, std::vector<double>> row{{"u", {1, 1, 1, 1, 1}}};
    std::map<std::string, std::vector<double>> col{{"u", {1, 1, 1, 1, 1}}};
    GridData g = quad_fill(e.system, row, col, 4, 4, {});
    CHECK(g.values["u"][1][1] == doctest::Approx(2.0));   // 1*(1 + 1/1)

    // Every unit quad satisfies the rule.
    const auto& u = g.values["u"];
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double w = u[i][j] * (1 + u[i][j + 1] / u[i + 1][j]);
            CHECK(std::abs(u[i + 1][j + 1] - w) / (1 + std::abs(w)) <= 1e-12);
        }
}

TEST_CASE("quad_fill matches a column-major recomputation") {
    // The rule reads only the three known corners, so sweep order is moot.
    CatalogEntry e = load_entry("ex4");
    auto row = random_initial(e.system, 5, 42);
    auto col = random_initial(e.system, 5, 43);
    for (auto& [var, v] : col) v[0] = row[var][0];
    GridData g = quad_fill(e.system, row, col, 4, 4, {});

    for (const auto& rule : e.system.rules) {
        const auto& grid = g.values[rule.var];
        // Column-major re-evaluation of each quad.
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t i = 0; i < 4; ++i) {
                auto dep = [&](const std::string& v, const MultiIndex& J) {
                    return g.values.at(v)[i + J[0]][j + J[1]];
                };
                double w = evaluate_on_data(rule.rhs, {(long)i, (long)j}, dep,
                                            [](const std::string&) { return 0.0; });
                CHECK(grid[i + 1][j + 1] == doctest::Approx(w).epsilon(1e-13));
            }
    }
}

TEST_CASE("drift: conserved vs perturbed on Example 1 data") {
    CatalogEntry e = load_entry("ex1");
    OrbitData data = ode_orbit(e.system, {{"u", {1.0, 2.0}}}, 20, {});

    const NamedLaw* p1 = e.find_law("P1");
    const NamedLaw* p2 = e.find_law("P2");
    REQUIRE(p1);
    REQUIRE(p2);
    CHECK(drift(p1->law, data).max_residual <= 1e-12);
    CHECK(drift(p2->law, data).max_residual <= 1e-9);

    // One flipped sign must be loudly non-conserved.
    CHECK(drift(perturb_law(p1->law), data).max_residual >= 1e-3);
    CHECK(drift(perturb_law(p2->law), data).max_residual >= 1e-3);

    // Non-conserved quantities report O(1) drift, not an error.
    ConservationLaw raw{{P1("u[0]")}};
    DriftReport r = drift(raw, data);
    CHECK(r.max_residual >= 1e-3);
}

TEST_CASE("drift on grids: Example 3 laws") {
    CatalogEntry e = load_entry("ex3");
    auto row = random_initial(e.system, 6, 7);
    auto col = random_initial(e.system, 6, 8);
    for (auto& [var, v] : col) v[0] = row[var][0];
    GridData g = quad_fill(e.system, row, col, 5, 5, {});
    for (const auto& l : e.laws) {
        CHECK(drift(l.law, g).max_residual <= 1e-12);
        CHECK(drift(perturb_law(l.law), g).max_residual >= 1e-3);
    }
}

TEST_CASE("random data honors domains and replays from the seed") {
    CatalogEntry e = load_entry("ex1");
    auto a = random_initial(e.system, 6, 99);
    auto b = random_initial(e.system, 6, 99);
    CHECK(a == b);
    for (double v : a["u"]) CHECK(v > 0);   // positive domain

    auto pa = random_params(load_entry("A1d0").system, 5);
    auto pb = random_params(load_entry("A1d0").system, 5);
    CHECK(pa == pb);
    CHECK(pa["alpha"] > 0);
    CHECK(pa["beta"] > 0);
    CHECK(pa["alpha"] != pa["beta"]);
}

TEST_CASE("quad_fill rejects inconsistent boundary corners") {
    CatalogEntry e = load_entry("ex3");
    std::map<std::string, std::vector<double>> row{{"u", {1, 1, 1}}};
    std::map<std::string, std::vector<double>> col{{"u", {2, 1, 1}}};
    CHECK_THROWS_AS(quad_fill(e.system, row, col, 2, 2, {}), SimulateError);
}
