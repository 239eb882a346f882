#include "splash2d/splash_lab.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "splash2d/errors.hpp"
#include "splash2d/flux.hpp"
#include "splash2d/geometry.hpp"

namespace splash2d {

void PerturbationFamily::validate() const {
    if (epsilons.empty()) throw ParamError("perturbation family: empty epsilon list");
    for (double e : epsilons)
        if (e <= 0.0) throw ParamError("perturbation family: epsilons must be > 0");
    for (std::size_t k = 0; k + 1 < epsilons.size(); ++k)
        if (epsilons[k + 1] >= epsilons[k])
            throw ParamError("perturbation family: epsilons must be strictly decreasing");
    if (std::fabs(norm(b) - 1.0) > 1e-12)
        throw ParamError("perturbation family: b must be a unit vector");
}

Scenario perturb_scenario(const Scenario& base, double eps, const Vec2& b,
                          bool perturb_stress) {
    if (eps < 0.0) throw ParamError("perturb_scenario: eps must be >= 0");
    if (eps == 0.0) return base;

    const Vec2 shift = eps * b;
    const InterfaceCurve curve = build_curve(base.curve, base.map, base.params.grid_n);
    const InterfaceCurve moved = curve.translated(shift);

    if (!base.map.identity_map) {
        const std::size_t n = moved.markers.size();
        double winding = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& p = moved.markers[i];
            const Vec2& q = moved.markers[(i + 1) % n];
            if (base.map.cut_distance(p) < 1e-12)
                throw GeometryError("perturb_scenario: curve touches the branch cut");
            // Segment against the cut ray.
            const Vec2 bp = base.map.branch_point;
            const Vec2 far = bp + 1e6 * base.map.cut_direction;
            if (segments_intersect(p, q, bp, far))
                throw GeometryError("perturb_scenario: perturbed curve crosses the branch cut");
            const Vec2 dp = p - bp, dq = q - bp;
            winding += std::atan2(cross(dp, dq), dot(dp, dq));
        }
        if (std::fabs(winding) > 1e-6)
            throw GeometryError("perturb_scenario: perturbed curve encloses the branch point");
    }

    Scenario out = base;
    out.name = base.name + "_eps" + format_double(eps);
    out.curve.kind = "markers";
    out.curve.markers = moved.markers;
    if (perturb_stress) {
        const double add = eps * (b.x + b.y) / std::sqrt(2.0);
        out.stress_offset_diag.x += add;
        out.stress_offset_diag.y += add;
    }
    return out;
}

namespace {

/// Re-integrate the boundary flux from a snapshot to time tau with the
/// velocity interpolated linearly between the bracketing snapshots.
InterfaceCurve flux_to(const BranchMap& map, const Snapshot& lo, const Snapshot& hi,
                       double tau, double dt_sub) {
    VecField X = lo.fields.X;
    double t = lo.t;
    const double span = hi.t - lo.t;
    while (t < tau - 1e-15) {
        const double step = std::min(dt_sub, tau - t);
        const double mid = (t + 0.5 * step - lo.t) / span;
        VecField v(X.size());
        for (std::size_t n = 0; n < X.size(); ++n)
            v[n] = (1.0 - mid) * lo.fields.v[n] + mid * hi.fields.v[n];
        X = advance_flux(map, X, v, step);
        t += step;
    }
    const std::size_t nb = lo.curve_conformal.markers.size();
    std::vector<Vec2> conf(nb);
    for (std::size_t i = 0; i < nb; ++i) conf[i] = X[i];
    InterfaceCurve c;
    c.markers = std::move(conf);
    return c;
}

}  // namespace

SplashVerdict detect_splash(const RunRecord& run, const BranchMap& map) {
    SplashVerdict verdict;
    if (run.snapshots.size() < 2)
        throw ShapeError("detect_splash: need at least two snapshots");

    std::vector<DomainClass> cls(run.snapshots.size());
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        cls[k] = classify_physical(map, run.snapshots[k].curve_conformal);
        verdict.trace.emplace_back(run.snapshots[k].t, cls[k]);
    }

    for (std::size_t k = 1; k < cls.size(); ++k) {
        if (cls[k] == DomainClass::SelfIntersecting &&
            cls[k - 1] != DomainClass::SelfIntersecting) {
            const Snapshot& lo_snap = run.snapshots[k - 1];
            const Snapshot& hi_snap = run.snapshots[k];
            const double dt_bisect = run.params.dt / 8.0;
            double lo = lo_snap.t, hi = hi_snap.t;
            while (hi - lo > dt_bisect) {
                const double mid = 0.5 * (lo + hi);
                const InterfaceCurve c = flux_to(map, lo_snap, hi_snap, mid, dt_bisect);
                if (classify_physical(map, c) == DomainClass::SelfIntersecting)
                    hi = mid;
                else
                    lo = mid;
            }
            verdict.t_star = 0.5 * (lo + hi);
            break;
        }
    }
    return verdict;
}

GapSeries stability_gap(const RunRecord& run_a, const RunRecord& run_b, const Grid& grid) {
    if (run_a.grid_nb != run_b.grid_nb || run_a.grid_nr != run_b.grid_nr ||
        run_a.snapshots.size() != run_b.snapshots.size())
        throw ShapeError("stability_gap: runs use mismatched grids or snapshot counts");
    GapSeries series;
    for (std::size_t k = 0; k < run_a.snapshots.size(); ++k) {
        if (std::fabs(run_a.snapshots[k].t - run_b.snapshots[k].t) > 1e-12)
            throw ShapeError("stability_gap: snapshot times differ");
        const VecField& Xa = run_a.snapshots[k].fields.X;
        const VecField& Xb = run_b.snapshots[k].fields.X;
        VecField d(Xa.size());
        for (std::size_t n = 0; n < Xa.size(); ++n) d[n] = Xa[n] - Xb[n];
        const double gap = norm_h1(grid, d);
        series.times.push_back(run_a.snapshots[k].t);
        series.gaps.push_back(gap);
        series.sup = std::max(series.sup, gap);
    }
    return series;
}

void check_inward_velocity(const Scenario& sc) {
    const InterfaceCurve curve = build_curve(sc.curve, sc.map, sc.params.grid_n);
    const std::size_t n = curve.markers.size();

    // The two near-splash points: endpoints of the minimum physical gap
    // between genuinely distinct arcs (same admissibility rule as the
    // classifier: arc-separated pairs that shortcut across the domain).
    std::vector<Vec2> phys(n);
    for (std::size_t i = 0; i < n; ++i) phys[i] = sc.map.inverse(curve.markers[i]);
    std::vector<double> seglen(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        seglen[i] = norm(phys[(i + 1) % n] - phys[i]);
        total += seglen[i];
    }
    std::vector<double> arc(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        arc[i] = acc + 0.5 * seglen[i];
        acc += seglen[i];
    }
    std::size_t up = n, down = n;
    double best = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 2; k < n; ++k) {
            if (i == 0 && k == n - 1) continue;
            const double along = std::fabs(arc[k] - arc[i]);
            const double arc_sep = std::min(along, total - along);
            if (arc_sep < 4.0 * std::max(seglen[i], seglen[k])) continue;
            const double d = norm(phys[i] - phys[k]);
            if (d < 0.5 * arc_sep && d < best) {
                best = d;
                up = i;
                down = k;
            }
        }
    }
    if (up == n || down == n)
        throw PreconditionError("inward velocity check: could not locate the two lobe tips");

    for (std::size_t tip : {up, down}) {
        const Vec2 zc = sc.map.inverse(curve.markers[tip]);
        const Vec2 zn = sc.map.inverse(curve.markers[(tip + 1) % n]);
        const Vec2 zb = sc.map.inverse(curve.markers[(tip + n - 1) % n]);
        const Vec2 t = (zn - zb) / norm(zn - zb);
        const Vec2 normal{t.y, -t.x};
        const Vec2 u = sample_velocity(sc.velocity, zc).u;
        if (dot(u, normal) <= 0.0)
            throw PreconditionError(
                "inward velocity condition fails at physical point (" + format_double(zc.x) +
                ", " + format_double(zc.y) + "): u.n = " + format_double(dot(u, normal)));
    }
}

SplashExperimentReport splash_experiment(const PerturbationFamily& family, int threads) {
    family.validate();
    check_inward_velocity(family.base);

    const RunRecord base_run = simulate_scenario(family.base);
    const SimulationSetup base_setup = prepare_simulation(family.base);

    auto run_one = [&](double eps) {
        const Scenario sc = perturb_scenario(family.base, eps, family.b, family.perturb_stress);
        const RunRecord run = simulate_scenario(sc);
        SplashExperimentEntry entry;
        entry.eps = eps;
        entry.t_star = detect_splash(run, sc.map).t_star;
        entry.sup_gap = stability_gap(run, base_run, base_setup.grid).sup;
        return entry;
    };

    SplashExperimentReport report;
    report.entries.resize(family.epsilons.size());
    if (threads > 1) {
        std::vector<std::future<SplashExperimentEntry>> futs;
        futs.reserve(family.epsilons.size());
        for (double eps : family.epsilons)
            futs.push_back(std::async(std::launch::async, run_one, eps));
        for (std::size_t k = 0; k < futs.size(); ++k) report.entries[k] = futs[k].get();
    } else {
        for (std::size_t k = 0; k < family.epsilons.size(); ++k)
            report.entries[k] = run_one(family.epsilons[k]);
    }
    report.all_splash =
        std::all_of(report.entries.begin(), report.entries.end(),
                    [](const SplashExperimentEntry& e) { return e.t_star.has_value(); });
    return report;
}

}  // namespace splash2d
