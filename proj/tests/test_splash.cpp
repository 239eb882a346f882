#include <doctest.h>

#include <cmath>

#include "splash2d/splash_lab.hpp"

using namespace splash2d;

namespace {

Scenario base_circle() {
    Scenario sc;
    sc.name = "base";
    sc.curve.kind = "circle";
    sc.curve.center = {2.0, 0.0};
    sc.curve.radius = 0.6;
    sc.params.grid_n = 32;
    return sc;
}

/// Synthetic run: a thin two-arc slab whose top arc dips with a localized
/// bump profile (fastest at x = 2), so the first contact happens at exactly
/// t = gap / speed and the crossing persists afterwards.
RunRecord synthetic_closing_run(double gap, double speed, double dt, double t_end,
                                int snapshots) {
    std::vector<Vec2> pts;
    const int m = 40;
    const double r2 = 0.5 * gap;
    for (int i = 0; i <= m; ++i) pts.push_back({static_cast<double>(i) / m * 4.0, 0.0});
    for (int i = 1; i < 6; ++i)
        pts.push_back({4.0 + r2 * std::sin(M_PI * i / 6.0),
                       r2 - r2 * std::cos(M_PI * i / 6.0)});
    for (int i = m; i >= 0; --i) pts.push_back({static_cast<double>(i) / m * 4.0, gap});
    for (int i = 1; i < 6; ++i)
        pts.push_back({-r2 * std::sin(M_PI * i / 6.0), r2 + r2 * std::cos(M_PI * i / 6.0)});

    auto bump = [](double x) {
        const double u = (x - 2.0) / 0.8;
        return std::exp(-u * u);
    };

    RunRecord run;
    run.params.dt = dt;
    run.grid_nb = static_cast<int>(pts.size());
    run.grid_nr = 0;
    for (int s = 0; s < snapshots; ++s) {
        const double t = t_end * s / (snapshots - 1);
        Snapshot snap;
        snap.t = t;
        snap.fields.X.resize(pts.size());
        snap.fields.v.resize(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const Vec2 vel{0.0, -speed * bump(pts[k].x) * pts[k].y / gap};
            snap.fields.X[k] = pts[k] + t * vel;
            snap.fields.v[k] = vel;
        }
        snap.curve_conformal.markers = snap.fields.X;
        run.snapshots.push_back(std::move(snap));
    }
    return run;
}

}  // namespace

TEST_CASE("perturb_scenario: identity at eps=0, exact shift, round trip") {
    const Scenario base = base_circle();
    const Scenario same = perturb_scenario(base, 0.0, {1, 0});
    CHECK(same.canonical_json() == base.canonical_json());

    const Vec2 b{1.0, 0.0};
    const Scenario moved = perturb_scenario(base, 0.01, b);
    const InterfaceCurve c0 = build_curve(base.curve, base.map, base.params.grid_n);
    const InterfaceCurve c1 = build_curve(moved.curve, moved.map, moved.params.grid_n);
    for (std::size_t k = 0; k < c0.size(); ++k) {
        CHECK(c1.markers[k].x - c0.markers[k].x == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(c1.markers[k].y == doctest::Approx(c0.markers[k].y));
    }
    // Stress diagonal offset eps (b1 + b2)/sqrt(2).
    CHECK(moved.stress_offset_diag.x == doctest::Approx(0.01 / std::sqrt(2.0)));

    const Scenario back = perturb_scenario(moved, 0.01, -1.0 * b, false);
    const InterfaceCurve c2 = build_curve(back.curve, back.map, back.params.grid_n);
    for (std::size_t k = 0; k < c0.size(); ++k)
        CHECK(norm(c2.markers[k] - c0.markers[k]) < 1e-15);
}

TEST_CASE("perturb_scenario rejects curves that reach the cut") {
    Scenario sc = base_circle();
    sc.curve.center = {0.7, 0.0};
    sc.curve.radius = 0.6;
    // Pushing the curve across the branch point crosses the cut ray.
    CHECK_THROWS_AS((void)perturb_scenario(sc, 0.2, {-1.0, 0.0}), GeometryError);
}

TEST_CASE("detect_splash: bisected time matches the analytic crossing") {
    const double gap = 0.05, speed = 0.25, dt = 2e-3;
    const double t_star_exact = gap / speed;  // 0.2
    const RunRecord run = synthetic_closing_run(gap, speed, dt, 0.4, 9);
    const BranchMap ident({0, 0}, {-1, 0}, true);
    const SplashVerdict verdict = detect_splash(run, ident);
    REQUIRE(verdict.t_star.has_value());
    CHECK(std::fabs(*verdict.t_star - t_star_exact) < dt / 8.0 + 1e-12);
    // Trace starts regular-or-tangent and ends self-intersecting.
    CHECK(verdict.trace.front().second != DomainClass::SelfIntersecting);
    CHECK(verdict.trace.back().second == DomainClass::SelfIntersecting);
}

TEST_CASE("detect_splash: no contact means no splash time") {
    const RunRecord run = synthetic_closing_run(0.5, 0.1, 1e-2, 0.3, 5);
    const BranchMap ident({0, 0}, {-1, 0}, true);
    const SplashVerdict verdict = detect_splash(run, ident);
    CHECK_FALSE(verdict.t_star.has_value());
    for (const auto& [t, c] : verdict.trace) CHECK(c != DomainClass::SelfIntersecting);
}

TEST_CASE("detect_splash requires two snapshots") {
    RunRecord run = synthetic_closing_run(0.5, 0.1, 1e-2, 0.3, 5);
    run.snapshots.resize(1);
    const BranchMap ident({0, 0}, {-1, 0}, true);
    CHECK_THROWS_AS((void)detect_splash(run, ident), ShapeError);
}

TEST_CASE("stability_gap: zero for identical runs, exact for pure translation") {
    const auto curve = make_circle({2, 0}, 0.6, 32);
    const Grid g = build_reference_grid(curve, 16);
    RunRecord a;
    a.grid_nb = g.nb;
    a.grid_nr = g.nr;
    for (int k = 0; k < 3; ++k) {
        Snapshot s;
        s.t = 0.01 * k;
        s.fields.X = identity_flux(g);
        a.snapshots.push_back(std::move(s));
    }
    CHECK(stability_gap(a, a, g).sup == 0.0);

    RunRecord b = a;
    const double eps = 0.01;
    for (auto& s : b.snapshots)
        for (Vec2& x : s.fields.X) x.x += eps;
    const GapSeries series = stability_gap(a, b, g);
    // Constant translation: H1 norm of the constant field = eps * sqrt(area).
    double area = 0.0;
    for (double w : g.node_weight) area += w;
    for (double gval : series.gaps)
        CHECK(gval == doctest::Approx(eps * std::sqrt(area)).epsilon(1e-12));

    RunRecord c = a;
    c.grid_nb += 2;
    CHECK_THROWS_AS((void)stability_gap(a, c, g), ShapeError);
    RunRecord d = a;
    d.snapshots[1].t += 1e-3;
    CHECK_THROWS_AS((void)stability_gap(a, d, g), ShapeError);
}

TEST_CASE("inward-velocity precondition") {
    Scenario sc;
    sc.curve.kind = "near_splash";
    sc.curve.rho = 1.0;
    sc.curve.clearance = 0.015;
    sc.params.grid_n = 64;
    sc.velocity.family = "approach_jets";
    sc.velocity.speed = 0.5;
    sc.stress.kind = "traction_balance";
    CHECK_NOTHROW(check_inward_velocity(sc));

    Scenario rest = sc;
    rest.velocity.family = "rest";
    CHECK_THROWS_AS(check_inward_velocity(rest), PreconditionError);
}

TEST_CASE("perturbation family validation") {
    PerturbationFamily fam;
    fam.base = base_circle();
    fam.epsilons = {0.04, 0.02, 0.01};
    fam.b = {1.0, 0.0};
    CHECK_NOTHROW(fam.validate());
    fam.epsilons = {0.01, 0.02};
    CHECK_THROWS_AS(fam.validate(), ParamError);
    fam.epsilons = {0.01};
    fam.b = {2.0, 0.0};
    CHECK_THROWS_AS(fam.validate(), ParamError);
}
