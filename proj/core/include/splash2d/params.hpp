#pragma once

#include "splash2d/errors.hpp"

namespace splash2d {

/// Nondimensional physical constants and discretization controls.
/// All quantities are in the nondimensional units fixed by the velocity
/// and length scales of the flow; dimensional variables never appear.
struct Params {
    double reynolds = 1.0;      // Re >= 0
    double weissenberg = 1.0;   // We > 0
    double kappa = 0.5;         // polymer viscosity fraction, 0 <= kappa < 1

    int grid_n = 32;            // boundary markers (>= 16); radial rings derived
    double dt = 5e-3;           // time step
    double t_final = 0.25;      // requested horizon (capped by max_horizon)

    double tol_solver = 1e-8;   // linear equation-row residual tolerance
    double tol_div = 1e-6;      // compatibility residual tolerance
    double tol_picard = 1e-8;   // fixed-point composite difference tolerance
    int max_sweeps = 50;

    // Empirical calibration of the contraction horizon T_max.
    double c_cal = 0.5;
    double mu_cal = 1.0;

    double fold_tol = 1e-6;     // det(grad X) floor before MeshFoldError
    int snapshot_stride = 0;    // 0 = choose automatically (~40 snapshots)

    /// Radial ring count paired with grid_n boundary markers (kept even for
    /// the coarse pressure space).
    int rings() const {
        int r = grid_n / 2 < 8 ? 8 : grid_n / 2;
        return r % 2 == 0 ? r : r + 1;
    }

    void validate() const {
        if (reynolds < 0.0) throw ParamError("params: reynolds must be >= 0");
        if (weissenberg <= 0.0) throw ParamError("params: weissenberg must be > 0");
        if (kappa < 0.0 || kappa >= 1.0)
            throw ParamError("params: kappa must lie in [0,1)");
        if (grid_n < 16) throw ParamError("params: grid_n must be >= 16");
        if (grid_n % 2 != 0)
            throw ParamError("params: grid_n must be even (coarse pressure space)");
        if (dt <= 0.0) throw ParamError("params: dt must be > 0");
        if (t_final <= 0.0) throw ParamError("params: t_final must be > 0");
        if (tol_solver <= 0.0 || tol_div <= 0.0 || tol_picard <= 0.0)
            throw ParamError("params: tolerances must be > 0");
        if (max_sweeps < 1) throw ParamError("params: max_sweeps must be >= 1");
        if (c_cal <= 0.0 || mu_cal <= 0.0)
            throw ParamError("params: calibration constants must be > 0");
    }
};

}  // namespace splash2d
