#include "splash2d/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "splash2d/errors.hpp"
#include "splash2d/geometry.hpp"

namespace splash2d {

using json = nlohmann::ordered_json;

VelocitySample sample_velocity(const VelocitySpec& spec, const Vec2& z) {
    VelocitySample s;
    if (spec.family == "rest") {
        return s;
    }
    if (spec.family == "rigid_rotation") {
        const Vec2 r = z - spec.rot_center;
        s.u = spec.omega * perp(r);
        s.grad = {0.0, -spec.omega, spec.omega, 0.0};
        return s;
    }
    if (spec.family == "approach_jets") {
        // Stream function V x1 tanh(x2/w) E(x1) G(x2) with Gaussian envelopes
        // E, G: a smooth divergence-free squeeze closing the mouth gap of
        // the near-splash geometry from both sides, localized around the
        // mouth in both directions.
        const double V = spec.speed, w = spec.width, xc = spec.center_x;
        const double l = spec.spread, sy = spec.height;
        const double T = std::tanh(z.y / w);
        const double Tp = (1.0 - T * T) / w;
        const double Tpp = -2.0 * (1.0 - T * T) * T / (w * w);
        const double E = std::exp(-(z.x - xc) * (z.x - xc) / (2.0 * l * l));
        const double Ep = -((z.x - xc) / (l * l)) * E;
        const double Epp = (-1.0 / (l * l) + (z.x - xc) * (z.x - xc) / (l * l * l * l)) * E;
        const double G = std::exp(-z.y * z.y / (2.0 * sy * sy));
        const double Gp = -(z.y / (sy * sy)) * G;
        const double Gpp = (z.y * z.y / (sy * sy * sy * sy) - 1.0 / (sy * sy)) * G;

        s.u.x = V * z.x * E * (Tp * G + T * Gp);
        s.u.y = -V * T * G * (E + z.x * Ep);
        s.grad.a11 = V * (E + z.x * Ep) * (Tp * G + T * Gp);
        s.grad.a12 = V * z.x * E * (Tpp * G + 2.0 * Tp * Gp + T * Gpp);
        s.grad.a21 = -V * T * G * (2.0 * Ep + z.x * Epp);
        s.grad.a22 = -V * (Tp * G + T * Gp) * (E + z.x * Ep);
        return s;
    }
    throw ConfigError("unknown velocity family '" + spec.family + "' at /initial_velocity/family");
}

namespace {

InterfaceCurve near_splash_curve(const CurveSpec& spec, const BranchMap& map, int n) {
    // Conformal ellipse (semi-axes rho*aspect along the cut axis, rho across)
    // at distance `clearance` from the branch point, on the side opposite
    // the cut. The physical image is a limacon-type domain: two lips hugging
    // the cut with a narrow mouth; smaller aspect flattens the mouth opening.
    const Vec2 axis = -1.0 * map.cut_direction;
    const Vec2 perp_axis = perp(axis);
    const double ax = spec.rho * spec.aspect;
    const Vec2 center = map.branch_point + (ax + spec.clearance) * axis;

    // Cluster markers where the physical image is fine: spacing ~ sqrt(|w|).
    const int fine = 4096;
    std::vector<double> cdf(static_cast<std::size_t>(fine) + 1, 0.0);
    auto point = [&](double th) {
        return center + (ax * std::cos(th)) * axis + (spec.rho * std::sin(th)) * perp_axis;
    };
    auto weight = [&](double th) {
        const Vec2 p = point(th) - map.branch_point;
        return 1.0 / std::sqrt(std::max(norm(p) / spec.rho, 1e-3));
    };
    for (int k = 0; k < fine; ++k) {
        const double th = M_PI + 2.0 * M_PI * (k + 0.5) / fine;
        cdf[static_cast<std::size_t>(k + 1)] = cdf[static_cast<std::size_t>(k)] + weight(th);
    }
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double target = cdf.back() * i / n;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
        std::size_t k = static_cast<std::size_t>(it - cdf.begin());
        if (k > 0) --k;
        const double frac =
            cdf[k + 1] > cdf[k] ? (target - cdf[k]) / (cdf[k + 1] - cdf[k]) : 0.0;
        const double th = M_PI + 2.0 * M_PI * (static_cast<double>(k) + frac) / fine;
        pts.push_back(point(th));
    }
    return InterfaceCurve(std::move(pts));
}

}  // namespace

InterfaceCurve build_curve(const CurveSpec& spec, const BranchMap& map, int n_markers) {
    if (spec.kind == "circle") return make_circle(spec.center, spec.radius, n_markers);
    if (spec.kind == "ellipse") return make_ellipse(spec.center, spec.a, spec.b, n_markers);
    if (spec.kind == "near_splash") return near_splash_curve(spec, map, n_markers);
    if (spec.kind == "markers") return InterfaceCurve(spec.markers);
    throw ConfigError("unknown curve kind '" + spec.kind + "' at /curve/kind");
}

SimulationSetup prepare_simulation(const Scenario& sc) {
    sc.params.validate();
    SimulationSetup setup;
    setup.map = sc.map;
    setup.params = sc.params;
    setup.newtonian = sc.newtonian;
    setup.curve = build_curve(sc.curve, sc.map, sc.params.grid_n);

    if (!sc.map.identity_map) {
        // The reference domain must stay clear of the branch point and cut.
        for (const Vec2& m : setup.curve.markers) {
            if (sc.map.cut_distance(m) < 1e-12)
                throw GeometryError("scenario: reference curve touches the branch cut");
        }
    }

    setup.grid = build_reference_grid(setup.curve, sc.params.rings());
    const std::size_t nn = static_cast<std::size_t>(setup.grid.nnodes());

    setup.v0.resize(nn);
    TensorField phys_grad(nn);
    for (std::size_t n = 0; n < nn; ++n) {
        const Vec2 z = sc.map.inverse(setup.grid.nodes[n]);
        const VelocitySample vs = sample_velocity(sc.velocity, z);
        setup.v0[n] = vs.u;
        phys_grad[n] = vs.grad;
    }

    setup.T0.assign(nn, Sym2{});
    if (sc.stress.kind == "constant") {
        setup.T0.assign(nn, sc.stress.value);
    } else if (sc.stress.kind == "traction_balance") {
        // tau0 = -(1-kappa)(grad u0 + grad u0^T) built from the DISCRETE
        // physical velocity gradient, so the tangential boundary traction of
        // the initial data cancels at grid level (machine zero), not just to
        // O(h^2) of the analytic gradient.
        const TensorField gv = grad_vec(setup.grid, setup.v0);
        for (std::size_t n = 0; n < nn; ++n) {
            const Mat2 D = gv[n] * sc.map.jacobian(setup.grid.nodes[n]);
            setup.T0[n] = (-(1.0 - sc.params.kappa)) * symmetrize(D + transpose(D));
        }
    } else if (sc.stress.kind != "zero") {
        throw ConfigError("unknown stress kind '" + sc.stress.kind +
                          "' at /initial_stress/kind");
    }
    for (std::size_t n = 0; n < nn; ++n) {
        setup.T0[n].t11 += sc.stress_offset_diag.x;
        setup.T0[n].t22 += sc.stress_offset_diag.y;
    }

    setup.x0 = identity_flux(setup.grid);

    // Analytic initial force: rest and rigid rotation are harmonic, so the
    // viscous force vanishes; zero/constant stress has zero divergence; and
    // traction_balance cancels the viscous force identically. The only
    // combination without a closed form is approach_jets with a
    // zero/constant stress (nonzero lap u0).
    const bool harmonic = sc.velocity.family == "rest" ||
                          sc.velocity.family == "rigid_rotation";
    if (harmonic || sc.stress.kind == "traction_balance")
        setup.analytic_g0 = zero_vec(setup.grid);
    return setup;
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

[[noreturn]] void config_fail(const std::string& ptr, const std::string& what) {
    throw ConfigError("scenario config error at " + ptr + ": " + what);
}

double jnum(const json& j, const std::string& ptr) {
    if (!j.is_number()) config_fail(ptr, "expected a number");
    return j.get<double>();
}

Vec2 jvec2(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.size() != 2) config_fail(ptr, "expected [x, y]");
    return {jnum(j[0], ptr + "/0"), jnum(j[1], ptr + "/1")};
}

template <typename T>
void maybe(const json& j, const char* key, T& out, const std::string& ptr) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string p = ptr + "/" + key;
    if constexpr (std::is_same_v<T, double>) {
        out = jnum(v, p);
    } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) config_fail(p, "expected an integer");
        out = v.get<int>();
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) config_fail(p, "expected a boolean");
        out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) config_fail(p, "expected a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, Vec2>) {
        out = jvec2(v, p);
    }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) config_fail("/", "expected an object");

    Scenario sc;
    maybe(j, "name", sc.name, "");

    if (j.contains("params")) {
        const json& p = j.at("params");
        if (!p.is_object()) config_fail("/params", "expected an object");
        maybe(p, "reynolds", sc.params.reynolds, "/params");
        maybe(p, "weissenberg", sc.params.weissenberg, "/params");
        maybe(p, "kappa", sc.params.kappa, "/params");
        maybe(p, "grid_n", sc.params.grid_n, "/params");
        maybe(p, "dt", sc.params.dt, "/params");
        maybe(p, "t_final", sc.params.t_final, "/params");
        maybe(p, "tol_solver", sc.params.tol_solver, "/params");
        maybe(p, "tol_div", sc.params.tol_div, "/params");
        maybe(p, "tol_picard", sc.params.tol_picard, "/params");
        maybe(p, "max_sweeps", sc.params.max_sweeps, "/params");
        maybe(p, "c_cal", sc.params.c_cal, "/params");
        maybe(p, "mu_cal", sc.params.mu_cal, "/params");
        maybe(p, "fold_tol", sc.params.fold_tol, "/params");
        maybe(p, "snapshot_stride", sc.params.snapshot_stride, "/params");
    }
    auto check = [](bool ok, const char* ptr, const char* msg) {
        if (!ok) throw ParamError(std::string("params: ") + msg + " at " + ptr);
    };
    check(sc.params.reynolds >= 0.0, "/params/reynolds", "reynolds must be >= 0");
    check(sc.params.weissenberg > 0.0, "/params/weissenberg", "weissenberg must be > 0");
    check(sc.params.kappa >= 0.0 && sc.params.kappa < 1.0, "/params/kappa",
          "kappa must lie in [0,1)");
    check(sc.params.grid_n >= 16, "/params/grid_n", "grid_n must be >= 16");
    check(sc.params.dt > 0.0, "/params/dt", "dt must be > 0");
    check(sc.params.t_final > 0.0, "/params/t_final", "t_final must be > 0");
    sc.params.validate();

    if (j.contains("curve")) {
        const json& c = j.at("curve");
        if (!c.is_object()) config_fail("/curve", "expected an object");
        maybe(c, "kind", sc.curve.kind, "/curve");
        maybe(c, "center", sc.curve.center, "/curve");
        maybe(c, "radius", sc.curve.radius, "/curve");
        maybe(c, "a", sc.curve.a, "/curve");
        maybe(c, "b", sc.curve.b, "/curve");
        maybe(c, "rho", sc.curve.rho, "/curve");
        maybe(c, "clearance", sc.curve.clearance, "/curve");
        maybe(c, "aspect", sc.curve.aspect, "/curve");
        if (c.contains("markers")) {
            const json& m = c.at("markers");
            if (!m.is_array()) config_fail("/curve/markers", "expected an array");
            for (std::size_t k = 0; k < m.size(); ++k)
                sc.curve.markers.push_back(
                    jvec2(m[k], "/curve/markers/" + std::to_string(k)));
        }
        const std::string& kind = sc.curve.kind;
        if (kind != "circle" && kind != "ellipse" && kind != "near_splash" &&
            kind != "markers")
            config_fail("/curve/kind", "unknown curve kind '" + kind + "'");
    }

    if (j.contains("initial_velocity")) {
        const json& v = j.at("initial_velocity");
        if (!v.is_object()) config_fail("/initial_velocity", "expected an object");
        maybe(v, "family", sc.velocity.family, "/initial_velocity");
        maybe(v, "omega", sc.velocity.omega, "/initial_velocity");
        maybe(v, "rot_center", sc.velocity.rot_center, "/initial_velocity");
        maybe(v, "speed", sc.velocity.speed, "/initial_velocity");
        maybe(v, "width", sc.velocity.width, "/initial_velocity");
        maybe(v, "center_x", sc.velocity.center_x, "/initial_velocity");
        maybe(v, "spread", sc.velocity.spread, "/initial_velocity");
        maybe(v, "height", sc.velocity.height, "/initial_velocity");
        const std::string& fam = sc.velocity.family;
        if (fam != "rest" && fam != "rigid_rotation" && fam != "approach_jets")
            config_fail("/initial_velocity/family", "unknown family '" + fam + "'");
    }

    if (j.contains("initial_stress")) {
        const json& s = j.at("initial_stress");
        if (!s.is_object()) config_fail("/initial_stress", "expected an object");
        maybe(s, "kind", sc.stress.kind, "/initial_stress");
        maybe(s, "t11", sc.stress.value.t11, "/initial_stress");
        maybe(s, "t12", sc.stress.value.t12, "/initial_stress");
        maybe(s, "t22", sc.stress.value.t22, "/initial_stress");
        const std::string& kind = sc.stress.kind;
        if (kind != "zero" && kind != "constant" && kind != "traction_balance")
            config_fail("/initial_stress/kind", "unknown stress kind '" + kind + "'");
    }

    Vec2 bp{0.0, 0.0}, cut{-1.0, 0.0};
    bool identity = false;
    if (j.contains("conformal")) {
        const json& c = j.at("conformal");
        if (!c.is_object()) config_fail("/conformal", "expected an object");
        maybe(c, "branch_point", bp, "/conformal");
        maybe(c, "cut_direction", cut, "/conformal");
        maybe(c, "identity_map_mode", identity, "/conformal");
    }
    const double cn = norm(cut);
    if (cn == 0.0) config_fail("/conformal/cut_direction", "must be nonzero");
    sc.map = BranchMap(bp, cut / cn, identity);

    maybe(j, "newtonian", sc.newtonian, "");
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string Scenario::canonical_json() const {
    json j;
    j["name"] = name;
    j["params"] = {{"reynolds", params.reynolds},
                   {"weissenberg", params.weissenberg},
                   {"kappa", params.kappa},
                   {"grid_n", params.grid_n},
                   {"dt", params.dt},
                   {"t_final", params.t_final},
                   {"tol_solver", params.tol_solver},
                   {"tol_div", params.tol_div},
                   {"tol_picard", params.tol_picard},
                   {"max_sweeps", params.max_sweeps},
                   {"c_cal", params.c_cal},
                   {"mu_cal", params.mu_cal},
                   {"fold_tol", params.fold_tol},
                   {"snapshot_stride", params.snapshot_stride}};
    j["curve"] = {{"kind", curve.kind},
                  {"center", {curve.center.x, curve.center.y}},
                  {"radius", curve.radius},
                  {"a", curve.a},
                  {"b", curve.b},
                  {"rho", curve.rho},
                  {"clearance", curve.clearance},
                  {"aspect", curve.aspect}};
    if (!curve.markers.empty()) {
        json m = json::array();
        for (const Vec2& p : curve.markers) m.push_back({p.x, p.y});
        j["curve"]["markers"] = m;
    }
    j["initial_velocity"] = {{"family", velocity.family},
                             {"omega", velocity.omega},
                             {"rot_center", {velocity.rot_center.x, velocity.rot_center.y}},
                             {"speed", velocity.speed},
                             {"width", velocity.width},
                             {"center_x", velocity.center_x},
                             {"spread", velocity.spread},
                             {"height", velocity.height}};
    j["initial_stress"] = {{"kind", stress.kind},
                           {"t11", stress.value.t11},
                           {"t12", stress.value.t12},
                           {"t22", stress.value.t22}};
    j["conformal"] = {{"branch_point", {map.branch_point.x, map.branch_point.y}},
                      {"cut_direction", {map.cut_direction.x, map.cut_direction.y}},
                      {"identity_map_mode", map.identity_map}};
    j["newtonian"] = newtonian;
    j["stress_offset_diag"] = {stress_offset_diag.x, stress_offset_diag.y};
    return j.dump(2);
}

}  // namespace splash2d
