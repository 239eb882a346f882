#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "splash2d/run_io.hpp"
#include "splash2d/scenario.hpp"

using namespace splash2d;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal scenario parses with defaults filled") {
    const Scenario sc = parse_scenario(R"({
        "curve": {"kind": "circle"},
        "initial_velocity": {"family": "rest"},
        "initial_stress": {"kind": "zero"}
    })");
    CHECK(sc.params.weissenberg == 1.0);
    CHECK(sc.params.grid_n == 32);
    CHECK(sc.curve.kind == "circle");
    CHECK(sc.velocity.family == "rest");
    CHECK_FALSE(sc.map.identity_map);
}

TEST_CASE("invariant violations carry JSON-pointer paths") {
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"params": {"kappa": 1.2}})"),
                         doctest::Contains("/params/kappa"), ParamError);
    CHECK_THROWS_AS(parse_scenario(R"({"params": {"grid_n": 8}})"), ParamError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"curve": {"kind": "pentagon"}})"),
                         doctest::Contains("/curve/kind"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"initial_velocity": {"family": "sloshing"}})"),
                         doctest::Contains("/initial_velocity/family"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("scenario canonical form round trips") {
    Scenario sc;
    sc.name = "roundtrip";
    sc.params.weissenberg = 2.5;
    sc.params.kappa = 0.25;
    sc.velocity.family = "approach_jets";
    sc.velocity.speed = 0.8;
    sc.stress.kind = "traction_balance";
    const Scenario back = parse_scenario(sc.canonical_json());
    CHECK(back.canonical_json() == sc.canonical_json());
}

TEST_CASE("velocity families: values and analytic gradients") {
    const VelocitySpec rest;
    CHECK(norm(sample_velocity(rest, {1.0, 2.0}).u) == 0.0);

    VelocitySpec rot;
    rot.family = "rigid_rotation";
    rot.omega = 0.7;
    const VelocitySample rs = sample_velocity(rot, {2.0, -1.0});
    CHECK(rs.u.x == doctest::Approx(0.7));
    CHECK(rs.u.y == doctest::Approx(1.4));
    CHECK(trace(rs.grad) == 0.0);

    VelocitySpec jets;
    jets.family = "approach_jets";
    jets.speed = 1.3;
    jets.width = 0.12;
    jets.center_x = -0.3;
    jets.spread = 0.4;
    // Divergence-free by construction; gradient matches finite differences.
    for (const Vec2 z : {Vec2{-0.2, 0.05}, Vec2{0.1, -0.3}, Vec2{-0.5, 0.2}}) {
        const VelocitySample s = sample_velocity(jets, z);
        CHECK(std::fabs(trace(s.grad)) < 1e-13);
        const double h = 1e-6;
        const Vec2 ux = (1.0 / (2.0 * h)) *
                        (sample_velocity(jets, {z.x + h, z.y}).u -
                         sample_velocity(jets, {z.x - h, z.y}).u);
        const Vec2 uy = (1.0 / (2.0 * h)) *
                        (sample_velocity(jets, {z.x, z.y + h}).u -
                         sample_velocity(jets, {z.x, z.y - h}).u);
        CHECK(std::fabs(ux.x - s.grad.a11) < 1e-6);
        CHECK(std::fabs(uy.x - s.grad.a12) < 1e-6);
        CHECK(std::fabs(ux.y - s.grad.a21) < 1e-6);
        CHECK(std::fabs(uy.y - s.grad.a22) < 1e-6);
    }
    // Squeeze structure: downward above the axis, upward below.
    CHECK(sample_velocity(jets, {-0.3, 0.2}).u.y < 0.0);
    CHECK(sample_velocity(jets, {-0.3, -0.2}).u.y > 0.0);
}

TEST_CASE("traction_balance stress makes approach_jets exactly compatible") {
    Scenario sc;
    sc.name = "jets";
    sc.curve.kind = "near_splash";
    sc.curve.rho = 1.0;
    sc.curve.clearance = 0.06;
    sc.params.grid_n = 64;
    sc.velocity.family = "approach_jets";
    sc.velocity.speed = 0.6;
    sc.stress.kind = "traction_balance";
    // The analytic family is div-free in the continuum; its discrete
    // divergence carries O(h^2 grad^2 u), so the gate tolerance is set to
    // the discretization scale for this stiff field.
    sc.params.tol_div = 0.5;
    const SimulationSetup setup = prepare_simulation(sc);
    const CompatReport rep =
        check_compatibility(setup.grid, setup.map, setup.v0, setup.T0, setup.params);
    // The tangential traction cancels at grid level by construction.
    CHECK(rep.traction_tangential < 1e-12);
    CHECK(rep.pass);
}

TEST_CASE("near-splash curve hugs the branch point at the requested clearance") {
    Scenario sc;
    sc.curve.kind = "near_splash";
    sc.curve.rho = 1.0;
    sc.curve.clearance = 0.05;
    sc.params.grid_n = 128;
    const InterfaceCurve curve = build_curve(sc.curve, sc.map, sc.params.grid_n);
    double dmin = 1e300, dmax = 0.0;
    for (const Vec2& m : curve.markers) {
        dmin = std::min(dmin, norm(m));
        dmax = std::max(dmax, norm(m));
    }
    CHECK(dmin == doctest::Approx(0.05).epsilon(0.02));
    CHECK(dmax == doctest::Approx(2.05).epsilon(0.02));
    // The physical image stays embedded (no crossing) at positive clearance.
    CHECK(classify_physical(sc.map, curve) != DomainClass::SelfIntersecting);
    // Markers cluster near the branch point: conformal spacing at the tip is
    // several times finer than at the far side.
    const std::size_t n = curve.size();
    double near_sp = 1e300, far_sp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sp = norm(curve.markers[(i + 1) % n] - curve.markers[i]);
        near_sp = std::min(near_sp, sp);
        far_sp = std::max(far_sp, sp);
    }
    CHECK(far_sp / near_sp > 3.0);
}

TEST_CASE("write_run is byte-deterministic and follows the CSV schema") {
    const auto curve = make_circle({2, 0}, 0.5, 16);
    const Grid g = build_reference_grid(curve, 8);
    RunRecord rec;
    rec.params = Params{};
    rec.scenario_name = "demo";
    rec.scenario_hash = content_hash("demo");
    rec.grid_nb = g.nb;
    rec.grid_nr = g.nr;
    rec.horizon = 0.02;
    for (int k = 0; k < 3; ++k) {
        Snapshot s;
        s.t = 0.01 * k;
        s.fields.v = zero_vec(g);
        s.fields.q = zero_scalar(g);
        s.fields.T = zero_sym(g);
        s.fields.X = identity_flux(g);
        s.curve_conformal = curve;
        s.curve_physical = curve;
        rec.snapshots.push_back(std::move(s));
    }

    const std::string dir1 = "/tmp/splash2d_io_a", dir2 = "/tmp/splash2d_io_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    write_run(rec, dir1);
    write_run(rec, dir2);

    std::vector<std::filesystem::path> files1;
    for (const auto& e : std::filesystem::directory_iterator(dir1))
        files1.push_back(e.path().filename());
    std::sort(files1.begin(), files1.end());
    CHECK(files1.size() == 4);  // 3 snapshots + manifest
    for (const auto& f : files1)
        CHECK(slurp(std::filesystem::path(dir1) / f) ==
              slurp(std::filesystem::path(dir2) / f));

    // Snapshot files are lexicographically ordered by time.
    std::ifstream csv(std::filesystem::path(dir1) / files1[1]);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "node_i,node_j,x1,x2,v1,v2,q,T11,T12,T22,X1,X2");
}

TEST_CASE("simulate-and-write: empty horizon still produces a manifest") {
    Scenario sc;
    sc.name = "tiny";
    sc.params.grid_n = 16;
    sc.params.dt = 0.01;
    sc.params.t_final = 0.02;
    sc.curve.kind = "circle";
    sc.curve.center = {2.0, 0.0};
    sc.curve.radius = 0.4;
    const RunRecord rec = simulate_scenario(sc);
    CHECK(rec.snapshots.size() >= 2);
    CHECK(rec.snapshots.front().t == 0.0);
    for (std::size_t k = 1; k < rec.snapshots.size(); ++k)
        CHECK(rec.snapshots[k].t > rec.snapshots[k - 1].t);
    const std::string dir = "/tmp/splash2d_io_c";
    std::filesystem::remove_all(dir);
    const std::string manifest = write_run(rec, dir);
    CHECK(std::filesystem::exists(manifest));
}
