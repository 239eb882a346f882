#pragma once

#include <string>
#include <vector>

#include "splash2d/picard.hpp"
#include "splash2d/scenario.hpp"

namespace splash2d {

/// Time-stamped state snapshot: fields on the grid, the interface in
/// conformal coordinates and its image in physical coordinates.
struct Snapshot {
    double t = 0.0;
    FieldSet fields;
    InterfaceCurve curve_conformal;
    InterfaceCurve curve_physical;
};

struct RunRecord {
    std::vector<Snapshot> snapshots;
    Params params;
    std::string scenario_name;
    std::string scenario_hash;
    ContractionReport contraction;
    ResidualReport residuals;
    double horizon = 0.0;
    int grid_nb = 0, grid_nr = 0;
};

/// Full pipeline for one scenario: prepare, compatibility gate, lift, Picard
/// to convergence, snapshot extraction. Throws CompatibilityError when the
/// initial data violates the compatibility conditions, NoContraction when the
/// fixed point does not close within max_sweeps.
RunRecord simulate_scenario(const Scenario& sc);

/// Variant reusing a prepared setup (perturbation families, sweeps).
RunRecord simulate_prepared(const Scenario& sc, const SimulationSetup& setup);

/// Write snapshots as CSV plus manifest.json; returns the manifest path.
/// Output is byte-identical for identical inputs.
std::string write_run(const RunRecord& record, const std::string& dir);

/// Largest empirically contracting Picard horizon for a scenario: grow from
/// t_min until contraction fails (or t_final is reached), then bisect. All
/// horizons are quantized to whole time steps.
struct HorizonScanResult {
    double t_emp = 0.0;
    bool censored = false;  // still contracting at t_final
    std::vector<double> tried;
    std::vector<double> ratios;  // final ratio per try (inf when not contracting)
};
HorizonScanResult scan_contracting_horizon(const Scenario& sc, double t_min,
                                           double rel_prec = 0.08);

/// Shortest-round-trip decimal formatting used for all numeric output.
std::string format_double(double v);

/// FNV-1a content hash used for scenario identity in manifests.
std::string content_hash(const std::string& text);

}  // namespace splash2d
