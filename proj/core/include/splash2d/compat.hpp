#pragma once

#include <optional>

#include "splash2d/conformal.hpp"
#include "splash2d/fields.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// Residuals of the initial-data constraints: divergence of the velocity,
/// divergence and unit determinant of the initial deformation gradient, and
/// the tangential boundary-traction balance. Diagnostic; never throws.
struct CompatReport {
    double div_u = 0.0;
    double div_f = 0.0;
    double det_f = 0.0;
    double traction_tangential = 0.0;
    bool pass = false;
};

/// F0 defaults to the identity when not supplied.
CompatReport check_compatibility(const Grid& g, const BranchMap& map, const VecField& v0,
                                 const SymField& T0, const Params& p,
                                 const std::optional<TensorField>& F0 = std::nullopt);

}  // namespace splash2d
