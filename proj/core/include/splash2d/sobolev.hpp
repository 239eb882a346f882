#pragma once

#include <cstdint>
#include <vector>

#include "splash2d/fields.hpp"
#include "splash2d/params.hpp"

namespace splash2d {

/// Space-time norm orders for the diagnostic ledgers.
struct NormSpec {
    double s = 2.25;     // spatial order, 2 < s < 2.5
    double gamma = 1.1;  // 1 < gamma < s - 1
    void validate() const;
};

/// Spectral H^s norm of an nx x ny sample of a periodic field on
/// [0,lx) x [0,ly): sqrt(sum (1+|k|^2)^s |f_hat_k|^2), L2-calibrated.
double spectral_norm_periodic(const std::vector<double>& f, int nx, int ny, double lx,
                              double ly, double s);

/// Fractional Sobolev norm of a uniformly sampled time series on [0, T]
/// (reflection padding, DFT weight). Diagnostic-grade.
double fractional_time_norm(const std::vector<double>& series, double dt, double r);

/// Interval fractional norm by direct Slobodeckij quadrature (O(K^2), no
/// periodization artifacts); r in (0, 2). Used by the integration probe where
/// the endpoint kink of the reflected DFT would distort the trend.
double slobodeckij_time_norm(const std::vector<double>& series, double dt, double r);

/// Approximate H^s norm of a grid field: smooth cutoff equal to 1 on the
/// inner 90% of the domain, zero-padded resampling onto a periodic square,
/// spectral weight. Diagnostic-grade (cutoff-dependent).
double h_norm(const Grid& g, const ScalarField& f, double s, int resolution = 128);
double h_norm(const Grid& g, const VecField& f, double s, int resolution = 128);

/// Computable stand-ins for the anisotropic space-time norms. The pieces are
/// reported separately; no combination rule is applied.
struct TimeSpaceLedger {
    double K_l2hs = 0.0;      // L2_t H^s_x
    double K_hs2l2 = 0.0;     // H^{s/2}_t L2_x
    double F_supt = 0.0;      // sup_t t^{-1/4} ||f(t)||_{H^{s+1}}
    double F_h2hgamma = 0.0;  // H^2_t H^gamma_x via second differences
    double Kb_l2hs = 0.0;     // boundary trace, L2_t H^{s-1/2}
    double Kb_ht2l2 = 0.0;    // boundary trace, H^{(s-1/2)/2}_t L2
};

TimeSpaceLedger time_space_norms(const Grid& g, const std::vector<ScalarField>& series,
                                 double dt, const NormSpec& spec, int resolution = 96);

/// Product-bound probe: max over random band-limited pairs of
/// ||vw||_{H^s} / (||v||_{H^r} ||w||_{H^s}); passes when the fitted log-log
/// slope of the max ratio against the band limit stays below 0.1.
struct ProductProbeReport {
    std::vector<int> bands;
    std::vector<double> max_ratio;
    double slope = 0.0;
    bool pass = false;
};
ProductProbeReport product_lemma_probe(int trials, double s, double r, std::uint64_t seed,
                                       std::vector<int> bands = {8, 16, 32});

/// Time-integration probe: ratio ||int_0^t v||_{H^{s+1-eps}} / ||v||_{H^s}
/// on shrinking windows; the mean ratio must be nonincreasing as T decreases.
struct IntegralProbeReport {
    std::vector<double> windows;
    std::vector<double> mean_ratio;
    bool nonincreasing = false;
};
IntegralProbeReport integral_lemma_probe(int trials, double s, double eps, std::uint64_t seed);

}  // namespace splash2d
