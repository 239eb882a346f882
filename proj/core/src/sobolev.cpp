#include "splash2d/sobolev.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "splash2d/errors.hpp"

namespace splash2d {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

/// Complex DFT magnitudes of a real sequence (r2c), normalized by 1/n.
std::vector<double> dft_power(const std::vector<double>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<double> in(f);
    std::vector<fftw_complex> out(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<double> power(static_cast<std::size_t>(n / 2 + 1));
    for (int m = 0; m <= n / 2; ++m) {
        const double re = out[static_cast<std::size_t>(m)][0] / n;
        const double im = out[static_cast<std::size_t>(m)][1] / n;
        power[static_cast<std::size_t>(m)] = re * re + im * im;
    }
    return power;
}

}  // namespace

void NormSpec::validate() const {
    if (!(s > 2.0 && s < 2.5)) throw ParamError("norm spec: need 2 < s < 5/2");
    if (!(gamma > 1.0 && gamma < s - 1.0)) throw ParamError("norm spec: need 1 < gamma < s-1");
}

double spectral_norm_periodic(const std::vector<double>& f, int nx, int ny, double lx,
                              double ly, double s) {
    if (static_cast<int>(f.size()) != nx * ny)
        throw ShapeError("spectral_norm_periodic: size mismatch");
    std::vector<double> in(f);
    std::vector<fftw_complex> out(static_cast<std::size_t>(nx) * (ny / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_r2c_2d(nx, ny, in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }

    const double norm_fac = 1.0 / (static_cast<double>(nx) * ny);
    double acc = 0.0;
    for (int a = 0; a < nx; ++a) {
        const int ka = a <= nx / 2 ? a : a - nx;
        const double kx = 2.0 * M_PI * ka / lx;
        for (int b = 0; b <= ny / 2; ++b) {
            const double ky = 2.0 * M_PI * b / ly;
            const std::size_t idx = static_cast<std::size_t>(a) * (ny / 2 + 1) + b;
            const double re = out[idx][0] * norm_fac;
            const double im = out[idx][1] * norm_fac;
            double p = re * re + im * im;
            // r2c stores half the spectrum; double the interior columns.
            if (b != 0 && !(ny % 2 == 0 && b == ny / 2)) p *= 2.0;
            acc += std::pow(1.0 + kx * kx + ky * ky, s) * p;
        }
    }
    return std::sqrt(lx * ly * acc);
}

double fractional_time_norm(const std::vector<double>& series, double dt, double r) {
    const int K = static_cast<int>(series.size());
    if (K < 4) throw ShapeError("fractional_time_norm: need at least 4 samples");
    // Even reflection kills the periodization jump.
    const int M = 2 * K - 2;
    std::vector<double> ext(static_cast<std::size_t>(M));
    for (int k = 0; k < K; ++k) ext[static_cast<std::size_t>(k)] = series[static_cast<std::size_t>(k)];
    for (int k = 1; k < K - 1; ++k)
        ext[static_cast<std::size_t>(M - k)] = series[static_cast<std::size_t>(k)];

    const std::vector<double> power = dft_power(ext);
    const double period = M * dt;
    double acc = 0.0;
    for (int m = 0; m < static_cast<int>(power.size()); ++m) {
        const double omega = 2.0 * M_PI * m / period;
        double p = power[static_cast<std::size_t>(m)];
        if (m != 0 && !(M % 2 == 0 && m == M / 2)) p *= 2.0;
        acc += std::pow(1.0 + omega * omega, r) * p;
    }
    // Calibrated so r = 0 matches the L2(0,T) norm of the series.
    return std::sqrt(0.5 * period * acc);
}

double slobodeckij_time_norm(const std::vector<double>& series, double dt, double r) {
    if (!(r > 0.0 && r < 2.0)) throw ParamError("slobodeckij norm: need 0 < r < 2");
    const int m = static_cast<int>(std::floor(r));
    const double theta = r - m;

    double acc = 0.0;
    std::vector<double> cur = series;
    for (int k = 0; k <= m; ++k) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double w = (i == 0 || i + 1 == cur.size()) ? 0.5 : 1.0;
            acc += w * dt * cur[i] * cur[i];
        }
        if (k < m) {
            std::vector<double> nd(cur.size() - 1);
            for (std::size_t i = 0; i + 1 < cur.size(); ++i)
                nd[i] = (cur[i + 1] - cur[i]) / dt;
            cur = nd;
        }
    }
    if (theta > 0.0) {
        double semi = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                const double diff = cur[i] - cur[j];
                const double tau = static_cast<double>(j - i) * dt;
                semi += 2.0 * diff * diff / std::pow(tau, 1.0 + 2.0 * theta) * dt * dt;
            }
        }
        acc += semi;
    }
    return std::sqrt(acc);
}

namespace {

/// Cutoff equal to 1 on the inner 90% of the inward coordinate, smoothly
/// falling to 0 at the boundary ring.
double cutoff_value(double s_frac) {
    if (s_frac <= 0.9) return 1.0;
    const double x = (1.0 - s_frac) / 0.1;  // 1 at s=0.9, 0 at s=1
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

struct SquareSampling {
    std::vector<double> values;
    int res;
    double lx, ly;
};

SquareSampling resample_to_square(const Grid& g, const ScalarField& f, int res) {
    // Cutoff in the grid's inward coordinate.
    ScalarField cut(f.size());
    for (int j = 0; j < g.nr; ++j) {
        const double s_frac = 1.0 - static_cast<double>(j) / g.nr;
        for (int i = 0; i < g.nb; ++i) {
            const std::size_t n = static_cast<std::size_t>(g.id(i, j));
            cut[n] = f[n] * cutoff_value(s_frac);
        }
    }
    cut[static_cast<std::size_t>(g.pole_id())] = f[static_cast<std::size_t>(g.pole_id())];

    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Vec2& p : g.nodes) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const double span = std::max(x1 - x0, y1 - y0);
    const double L = 1.5 * span;
    const double cx = 0.5 * (x0 + x1) - 0.5 * L;
    const double cy = 0.5 * (y0 + y1) - 0.5 * L;

    SquareSampling sq;
    sq.res = res;
    sq.lx = sq.ly = L;
    sq.values.assign(static_cast<std::size_t>(res) * res, 0.0);
    for (int a = 0; a < res; ++a) {
        for (int b = 0; b < res; ++b) {
            const Vec2 p{cx + (a + 0.5) * L / res, cy + (b + 0.5) * L / res};
            double val = 0.0;
            try {
                val = interpolate(g, cut, p);
            } catch (const OutOfDomain&) {
                val = 0.0;
            }
            sq.values[static_cast<std::size_t>(a) * res + b] = val;
        }
    }
    return sq;
}

}  // namespace

double h_norm(const Grid& g, const ScalarField& f, double s, int resolution) {
    const SquareSampling sq = resample_to_square(g, f, resolution);
    return spectral_norm_periodic(sq.values, sq.res, sq.res, sq.lx, sq.ly, s);
}

double h_norm(const Grid& g, const VecField& f, double s, int resolution) {
    ScalarField fx(f.size()), fy(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        fx[n] = f[n].x;
        fy[n] = f[n].y;
    }
    const double a = h_norm(g, fx, s, resolution);
    const double b = h_norm(g, fy, s, resolution);
    return std::sqrt(a * a + b * b);
}

TimeSpaceLedger time_space_norms(const Grid& g, const std::vector<ScalarField>& series,
                                 double dt, const NormSpec& spec, int resolution) {
    spec.validate();
    const int K = static_cast<int>(series.size());
    if (K < 4) throw ShapeError("time_space_norms: need at least 4 time samples");

    TimeSpaceLedger led;

    // L2_t H^s_x by trapezoid; weighted sup for the F piece.
    double acc_l2hs = 0.0;
    for (int k = 0; k < K; ++k) {
        const double hs = h_norm(g, series[static_cast<std::size_t>(k)], spec.s, resolution);
        const double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
        acc_l2hs += w * dt * hs * hs;
        const double t = k * dt;
        if (t > 0.0) {
            const double hs1 =
                h_norm(g, series[static_cast<std::size_t>(k)], spec.s + 1.0, resolution);
            led.F_supt = std::max(led.F_supt, std::pow(t, -0.25) * hs1);
        }
    }
    led.K_l2hs = std::sqrt(acc_l2hs);

    // H^{s/2}_t L2_x: per-node fractional time norms, area-weighted.
    double acc_ht = 0.0;
    std::vector<double> node_series(static_cast<std::size_t>(K));
    for (int n = 0; n < g.nnodes(); ++n) {
        for (int k = 0; k < K; ++k)
            node_series[static_cast<std::size_t>(k)] =
                series[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
        const double fn = fractional_time_norm(node_series, dt, 0.5 * spec.s);
        acc_ht += g.node_weight[static_cast<std::size_t>(n)] * fn * fn;
    }
    led.K_hs2l2 = std::sqrt(acc_ht);

    // H^2_t H^gamma_x via second differences in time.
    double acc_h2 = 0.0;
    for (int k = 0; k < K; ++k) {
        const double hg = h_norm(g, series[static_cast<std::size_t>(k)], spec.gamma, resolution);
        const double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
        acc_h2 += w * dt * hg * hg;
        if (k >= 1 && k + 1 < K) {
            ScalarField d2(series[0].size());
            for (std::size_t n = 0; n < d2.size(); ++n)
                d2[n] = (series[static_cast<std::size_t>(k + 1)][n] -
                         2.0 * series[static_cast<std::size_t>(k)][n] +
                         series[static_cast<std::size_t>(k - 1)][n]) /
                        (dt * dt);
            const double hd = h_norm(g, d2, spec.gamma, resolution);
            acc_h2 += dt * hd * hd;
        }
    }
    led.F_h2hgamma = std::sqrt(acc_h2);

    // Boundary trace: 1D periodic spectral norm along the markers plus a
    // fractional time norm of the trace, both diagnostic-grade.
    const double blen = g.mean_spacing * g.nb;
    double acc_b = 0.0;
    std::vector<double> btrace(static_cast<std::size_t>(g.nb));
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < g.nb; ++i)
            btrace[static_cast<std::size_t>(i)] =
                series[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        // 1D spectral norm: reuse the 2D machinery with one row.
        const std::vector<double> power = dft_power(btrace);
        double acc = 0.0;
        for (int m = 0; m < static_cast<int>(power.size()); ++m) {
            const double xi = 2.0 * M_PI * m / blen;
            double p = power[static_cast<std::size_t>(m)];
            if (m != 0 && !(g.nb % 2 == 0 && m == g.nb / 2)) p *= 2.0;
            acc += std::pow(1.0 + xi * xi, spec.s - 0.5) * p;
        }
        const double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
        acc_b += w * dt * blen * acc;
    }
    led.Kb_l2hs = std::sqrt(acc_b);

    double acc_bt = 0.0;
    for (int i = 0; i < g.nb; ++i) {
        for (int k = 0; k < K; ++k)
            node_series[static_cast<std::size_t>(k)] =
                series[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        const double fn = fractional_time_norm(node_series, dt, 0.5 * (spec.s - 0.5));
        acc_bt += g.bdy_weight[static_cast<std::size_t>(i)] * fn * fn;
    }
    led.Kb_ht2l2 = std::sqrt(acc_bt);

    return led;
}

// ---------------------------------------------------------------------------
// Lemma probes

namespace {

/// Random real band-limited field on an res x res periodic grid, unit box.
std::vector<double> random_band_limited(int res, int band, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> f(static_cast<std::size_t>(res) * res, 0.0);
    for (int ka = -band; ka <= band; ++ka) {
        for (int kb = -band; kb <= band; ++kb) {
            if (ka == 0 && kb == 0) continue;
            const double cr = gauss(rng);
            const double ci = gauss(rng);
            for (int a = 0; a < res; ++a) {
                const double xa = 2.0 * M_PI * a / res;
                for (int b = 0; b < res; ++b) {
                    const double xb = 2.0 * M_PI * b / res;
                    const double ph = ka * xa + kb * xb;
                    f[static_cast<std::size_t>(a) * res + b] +=
                        cr * std::cos(ph) + ci * std::sin(ph);
                }
            }
        }
    }
    return f;
}

}  // namespace

ProductProbeReport product_lemma_probe(int trials, double s, double r, std::uint64_t seed,
                                       std::vector<int> bands) {
    if (!(r > 1.0) || !(r >= s) || !(s >= 0.0))
        throw ParamError("product probe: need r > 1, r >= s >= 0");
    ProductProbeReport rep;
    rep.bands = bands;
    std::mt19937_64 rng(seed);
    const double L = 2.0 * M_PI;

    for (int band : bands) {
        const int res = 4 * band + 8;
        double worst = 0.0;
        const int per_band = std::max(1, trials / static_cast<int>(bands.size()));
        for (int t = 0; t < per_band; ++t) {
            const std::vector<double> v = random_band_limited(res, band, rng);
            const std::vector<double> w = random_band_limited(res, band, rng);
            std::vector<double> vw(v.size());
            for (std::size_t n = 0; n < v.size(); ++n) vw[n] = v[n] * w[n];
            const double nv = spectral_norm_periodic(v, res, res, L, L, r);
            const double nw = spectral_norm_periodic(w, res, res, L, L, s);
            const double np = spectral_norm_periodic(vw, res, res, L, L, s);
            if (nv > 0.0 && nw > 0.0) worst = std::max(worst, np / (nv * nw));
        }
        rep.max_ratio.push_back(worst);
    }

    // Log-log slope of the max ratio against the band limit.
    const int m = static_cast<int>(bands.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < m; ++k) {
        const double x = std::log(static_cast<double>(bands[static_cast<std::size_t>(k)]));
        const double y = std::log(rep.max_ratio[static_cast<std::size_t>(k)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.pass = rep.slope < 0.1;
    return rep;
}

IntegralProbeReport integral_lemma_probe(int trials, double s, double eps, std::uint64_t seed) {
    if (!(s > 0.0 && s < 0.5) || !(eps >= 0.0 && eps < s))
        throw ParamError("integral probe: need 0 < s < 1/2 and 0 <= eps < s");
    IntegralProbeReport rep;
    rep.windows = {1.0, 0.5, 0.25};
    rep.mean_ratio.assign(rep.windows.size(), 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int K = 257;  // samples on [0, 1]
    const double dt = 1.0 / (K - 1);

    for (int t = 0; t < trials; ++t) {
        // Random band-limited signal on [0, 1].
        std::vector<double> v(static_cast<std::size_t>(K), 0.0);
        for (int mode = 0; mode <= 16; ++mode) {
            const double cr = gauss(rng), ci = gauss(rng);
            for (int k = 0; k < K; ++k) {
                const double tt = k * dt;
                v[static_cast<std::size_t>(k)] += cr * std::cos(M_PI * mode * tt) +
                                                  ci * std::sin(M_PI * mode * tt);
            }
        }
        std::vector<double> V(static_cast<std::size_t>(K), 0.0);
        for (int k = 1; k < K; ++k)
            V[static_cast<std::size_t>(k)] = V[static_cast<std::size_t>(k - 1)] +
                                             0.5 * dt * (v[static_cast<std::size_t>(k)] +
                                                         v[static_cast<std::size_t>(k - 1)]);

        for (std::size_t wi = 0; wi < rep.windows.size(); ++wi) {
            const int Kw = static_cast<int>(std::lround((K - 1) * rep.windows[wi])) + 1;
            const std::vector<double> vw(v.begin(), v.begin() + Kw);
            const std::vector<double> Vw(V.begin(), V.begin() + Kw);
            const double num = slobodeckij_time_norm(Vw, dt, s + 1.0 - eps);
            const double den = slobodeckij_time_norm(vw, dt, s);
            if (den > 0.0) rep.mean_ratio[wi] += num / den / trials;
        }
    }
    rep.nonincreasing = true;
    for (std::size_t wi = 0; wi + 1 < rep.windows.size(); ++wi) {
        // windows shrink along the list; ratios must not grow.
        if (rep.mean_ratio[wi + 1] > rep.mean_ratio[wi] * (1.0 + 1e-9))
            rep.nonincreasing = false;
    }
    return rep;
}

}  // namespace splash2d
