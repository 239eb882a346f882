#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splash2d/run_io.hpp"

namespace splash2d {

/// One-parameter family of perturbed initial domains X(0) = labels + eps b.
struct PerturbationFamily {
    Scenario base;
    std::vector<double> epsilons;  // strictly decreasing, > 0
    Vec2 b{1.0, 0.0};              // unit translation direction
    bool perturb_stress = true;    // add eps b to the stress diagonal

    void validate() const;
};

/// Splash-time verdict: the classification trace over snapshots and the
/// bisected first self-intersection time, when one exists.
struct SplashVerdict {
    std::optional<double> t_star;
    std::vector<std::pair<double, DomainClass>> trace;
};

/// Translate the scenario's reference domain by eps b; the flux initial
/// condition becomes labels + eps b automatically (labels move with the
/// domain) and the stress initial condition gains the componentwise
/// broadcast of eps b when enabled.
Scenario perturb_scenario(const Scenario& base, double eps, const Vec2& b,
                          bool perturb_stress = true);

/// Classify every snapshot's physical interface; on a transition to
/// SelfIntersecting, bisect by re-running the flux on the bracketing interval
/// (velocity interpolated linearly between snapshots) down to dt/8.
SplashVerdict detect_splash(const RunRecord& run, const BranchMap& map);

/// Per-snapshot discrete H1 norm of X - X_eps on label-matched grids;
/// returns the series and its supremum.
struct GapSeries {
    std::vector<double> times;
    std::vector<double> gaps;
    double sup = 0.0;
};
GapSeries stability_gap(const RunRecord& run_a, const RunRecord& run_b, const Grid& grid);

struct SplashExperimentEntry {
    double eps = 0.0;
    std::optional<double> t_star;
    double sup_gap = 0.0;  // against the base run
};

struct SplashExperimentReport {
    std::vector<SplashExperimentEntry> entries;
    bool all_splash = false;
};

/// Run the family (optionally in parallel workers), detect splash times and
/// stability gaps against the base run. The base scenario's initial velocity
/// must point into the gap at both near-splash tips (PreconditionError
/// otherwise).
SplashExperimentReport splash_experiment(const PerturbationFamily& family, int threads = 1);

/// Check the inward-velocity condition at the two lobe tips of a near-splash
/// scenario; returns the offending physical point on failure.
void check_inward_velocity(const Scenario& sc);

}  // namespace splash2d
