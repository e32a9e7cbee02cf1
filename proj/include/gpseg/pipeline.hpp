#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gpseg/assembly.hpp"
#include "gpseg/blowup.hpp"
#include "gpseg/matching.hpp"
#include "gpseg/outer.hpp"
#include "gpseg/solver.hpp"

namespace gpseg {

struct PipelineConfig {
    int dim = 3;
    Domain domain;
    Nonlinearity f = Nonlinearity::power(0.0, 1.0);
    Nonlinearity h = Nonlinearity::power(0.0, 1.0);
    std::vector<double> g_list = {1e4, 1e5, 1e6, 1e7, 1e8};
    OuterGridSpec outer_grid;
    double profile_spacing = 2.5e-4;  // t-grid spacing
    double profile_T_min = 8.0;
    double gamma = 0.5;
    uint64_t seed = 12345;
    double cutoff_margin = 0.5;  // outer blend edge vs the available room
    int solver_base_count = 4096;
    double gp_tol = 1e-10;
    int gp_max_iter = 25;
};

struct OuterStage {
    NodalSolution sol;
    OuterExpansion exp;
    NondegeneracyReport nondegeneracy;
};

struct InnerStage {
    std::shared_ptr<const BlowupProfile> profile;
    std::shared_ptr<const InnerCorrections> base_corr;  // phi0 + blocks
    double edge_scale = 1.0;
    double T = 0;
    int n_nodes = 0;
};

/// One g-point of the construction.
struct Construction {
    double g = 0;
    MatchingInputs inputs;
    Order1 o1;
    Order2 o2;
    Order3 o3;
    MatchingParameters params;
    std::shared_ptr<const InnerCorrections> corr;  // phi1 assembled at g
    std::shared_ptr<const OuterFamily> family;
    ApproximateSolution ap;
    RemainderReport remainder;
    S2S3Report s2s3;
    int phi1_iterations = 0;  // order-2 <-> (a1, b1) fixed point
};

/// Orchestrates the construction; shares the outer stage and one profile
/// solve across the whole g ladder. Instances are single-threaded; separate
/// instances may run in parallel.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig cfg);

    const PipelineConfig& config() const { return cfg_; }
    const OuterStage& outer();
    const InnerStage& inner();

    /// Matching + gluing + remainder at one g (preflight gates included).
    Construction construct(double g);

    /// Full nonlinear solve at one g, seeded from the construction.
    GPSolution solve(const Construction& c);

    /// Picard counterpart (for the cross-validation invariant).
    GPSolution solve_picard(const Construction& c);

    GridPtr solver_grid(double g);

    /// Base inputs shared across g (profile and outer scalars; a1, b1 and g
    /// are filled per construction).
    MatchingInputs base_inputs();

private:
    PipelineConfig cfg_;
    std::optional<OuterStage> outer_;
    std::optional<InnerStage> inner_;
    std::map<double, GridPtr> solver_grids_;
};

/// One log-log slope fit of an error family over the converged ladder.
struct RateReport {
    std::vector<double> g_list;
    std::vector<double> errors;
    double fitted_slope = 0;
    double fit_residual = 0;  // max log-deviation from the fit line
};

struct SweepResult {
    std::vector<Construction> constructions;
    std::vector<GPSolution> solutions;
    RateReport rate_u;      // sup |u_g - w+|
    RateReport rate_v;      // sup |v_g + w-|
    RateReport rate_inner;  // profile error over |r - r0 - xi| <= 3 g^-1/4
    RateReport correction;  // ||(phi,psi)||_1 of the final correction
    RateReport interface_drift;  // |r(g) - r0 - xi(g)|
    RateReport overlap;     // blend-zone gap / |ln g|^4
    RateReport remainder;   // inner-zone sup |R1| / |ln g|^4
};

/// Runs construct + solve over the configured ladder (optionally with a
/// worker pool over the independent g points) and fits every rate.
SweepResult run_sweep(Pipeline& pipe, int threads = 1);

/// Ratio ||(phi,psi)||_1 / (g^-1/4 ||(F,H)||_2) for seeded random decaying
/// right sides (the empirical probe of the linear a-priori estimate).
std::vector<double> linear_apriori_probe(Pipeline& pipe, const Construction& c,
                                         int n_probes, uint64_t seed);

}  // namespace gpseg
