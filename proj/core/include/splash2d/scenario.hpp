#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splash2d/compat.hpp"
#include "splash2d/conformal.hpp"
#include "splash2d/curve.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// Named analytic initial-velocity families (physical fields evaluated at the
/// inverse-mapped node positions).
struct VelocitySpec {
    std::string family = "rest";  // rest | rigid_rotation | approach_jets
    double omega = 1.0;           // rigid_rotation rate
    Vec2 rot_center{0.0, 0.0};
    double speed = 1.0;           // approach_jets amplitude
    double width = 0.1;           // approach_jets shear-layer width
    double center_x = -0.25;      // approach_jets mouth abscissa
    double spread = 0.35;         // approach_jets axial localization
    double height = 0.6;          // approach_jets vertical localization
};

struct StressSpec {
    std::string kind = "zero";  // zero | constant | traction_balance
    Sym2 value;                 // constant components
};

struct CurveSpec {
    std::string kind = "circle";  // circle | ellipse | near_splash | markers
    Vec2 center{2.0, 0.0};
    double radius = 0.7;
    double a = 2.0, b = 1.0;        // ellipse semi-axes
    double rho = 1.0;               // near_splash lobe radius
    double clearance = 0.05;        // near_splash distance to the branch point
    double aspect = 1.0;            // near_splash width/height ratio (<1 = tall)
    std::vector<Vec2> markers;      // explicit marker list
};

struct Scenario {
    std::string name = "scenario";
    Params params;
    CurveSpec curve;
    VelocitySpec velocity;
    StressSpec stress;
    BranchMap map;
    bool newtonian = false;      // disable the stress coupling entirely
    Vec2 stress_offset_diag{0.0, 0.0};  // added to (T11, T22) (perturbations)

    /// Canonical JSON form (used for hashing and round trips).
    std::string canonical_json() const;
};

/// Physical velocity and its physical-space gradient at a physical point.
struct VelocitySample {
    Vec2 u;
    Mat2 grad;
};
VelocitySample sample_velocity(const VelocitySpec& spec, const Vec2& z);

/// Materialized simulation inputs for a scenario.
struct SimulationSetup {
    InterfaceCurve curve;
    Grid grid;
    BranchMap map;
    VecField v0;
    SymField T0;
    VecField x0;
    Params params;
    bool newtonian = false;
    // Analytic initial force (1-kappa) lap u0 + div tau0, available (and
    // identically zero) for all shipped velocity/stress family combinations
    // except approach_jets with zero/constant stress.
    std::optional<VecField> analytic_g0;
};

InterfaceCurve build_curve(const CurveSpec& spec, const BranchMap& map, int n_markers);
SimulationSetup prepare_simulation(const Scenario& sc);

/// Parse and validate a scenario file. Schema violations raise ConfigError
/// with a JSON-pointer path; invariant violations raise ParamError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

}  // namespace splash2d
