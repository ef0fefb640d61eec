#pragma once

#include "latsym/calculus.hpp"
#include "latsym/system.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace latsym {

class SimulateError : public std::runtime_error {
public:
    explicit SimulateError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Orbit of a p=1 system: values u_n for n = 0..N+k-1 per variable.
struct OrbitData {
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, double> params;
    std::size_t length() const { return values.empty() ? 0 : values.begin()->second.size(); }
};

/// Rectangle fill of a p=2 system: values[var][i][j] on 0..M x 0..N.
struct GridData {
    std::map<std::string, std::vector<std::vector<double>>> values;
    std::map<std::string, double> params;
    std::size_t rows() const { return values.empty() ? 0 : values.begin()->second.size(); }
    std::size_t cols() const {
        return values.empty() || values.begin()->second.empty() ? 0
                                                                : values.begin()->second[0].size();
    }
};

/// Iterates the solved rules from the given initial window. Throws
/// SimulateError with the offending index on a singular step.
OrbitData ode_orbit(const DifferenceSystem& sys,
                    const std::map<std::string, std::vector<double>>& initial, std::size_t steps,
                    const std::map<std::string, double>& params);

/// Fills the rectangle row-major from boundary row j=0 and column i=0; each
/// quad's corner u_{i+1,j+1} comes from evaluating omega at (i,j). Quad rules
/// read only the three known corners, so sweep order does not change values.
GridData quad_fill(const DifferenceSystem& sys,
                   const std::map<std::string, std::vector<double>>& boundary_row,
                   const std::map<std::string, std::vector<double>>& boundary_col, std::size_t M,
                   std::size_t N, const std::map<std::string, double>& params);

struct DriftSite {
    std::vector<long> site;
    std::vector<double> values;   // law components evaluated at the site
    double residual;              // normalized by 1 + largest term magnitude
};

struct DriftReport {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    std::vector<DriftSite> sites;
};

/// Empirical divergence of a conservation law on generated data:
/// P(n+1) - P(n) per site for orbits, (S_m F - F) + (S_n G - G) per interior
/// quad for grids.
DriftReport drift(const ConservationLaw& P, const OrbitData& data);
DriftReport drift(const ConservationLaw& P, const GridData& data);

/// Negative control for drift checks: strips the first reciprocal factor, or
/// failing that negates the first summand, or the last component. The result
/// is no longer a conservation law for any cataloged system.
ConservationLaw perturb_law(const ConservationLaw& P);

/// Seeded boundary/initial data generation honoring the system's domains.
/// Values are drawn with magnitudes in [1/2, 2] so orbits and grids stay well
/// scaled.
std::map<std::string, std::vector<double>> random_initial(const DifferenceSystem& sys,
                                                          std::size_t count, std::uint64_t seed);
std::map<std::string, double> random_params(const DifferenceSystem& sys, std::uint64_t seed);

} // namespace latsym
