#include "splash2d/run_io.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "splash2d/errors.hpp"
#include "splash2d/version.hpp"

namespace splash2d {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

RunRecord simulate_scenario(const Scenario& sc) {
    const SimulationSetup setup = prepare_simulation(sc);
    return simulate_prepared(sc, setup);
}

RunRecord simulate_prepared(const Scenario& sc, const SimulationSetup& setup) {
    const Params& p = setup.params;
    const CompatReport compat =
        check_compatibility(setup.grid, setup.map, setup.v0, setup.T0, p);
    if (!compat.pass)
        throw CompatibilityError(
            "scenario '" + sc.name + "': initial data violates the compatibility conditions "
            "(div_u=" + format_double(compat.div_u) +
            ", traction=" + format_double(compat.traction_tangential) + ")");

    const double horizon = std::min(p.t_final, max_horizon(p));
    const PicardContext ctx = make_picard_context(setup.grid, setup.map, p, setup.v0, setup.T0,
                                                  setup.x0, horizon, setup.newtonian,
                                                  setup.analytic_g0);
    ConvergeResult result = run_to_convergence(ctx);

    RunRecord rec;
    rec.params = p;
    rec.scenario_name = sc.name;
    rec.scenario_hash = content_hash(sc.canonical_json());
    rec.contraction = std::move(result.report);
    rec.residuals = result.residuals;
    rec.horizon = ctx.horizon();
    rec.grid_nb = setup.grid.nb;
    rec.grid_nr = setup.grid.nr;

    int stride = p.snapshot_stride;
    if (stride <= 0) stride = std::max(1, (ctx.levels - 1) / 40);
    for (int k = 0; k < ctx.levels; k += stride) {
        Snapshot snap;
        snap.t = ctx.time(k);
        snap.fields.v = ctx.full_velocity(result.state, k);
        snap.fields.q = ctx.full_pressure(result.state, k);
        snap.fields.T = result.state.T[static_cast<std::size_t>(k)];
        snap.fields.X = result.state.X[static_cast<std::size_t>(k)];

        std::vector<Vec2> conf(static_cast<std::size_t>(setup.grid.nb));
        std::vector<Vec2> phys(static_cast<std::size_t>(setup.grid.nb));
        for (int i = 0; i < setup.grid.nb; ++i) {
            conf[static_cast<std::size_t>(i)] = snap.fields.X[static_cast<std::size_t>(i)];
            phys[static_cast<std::size_t>(i)] =
                setup.map.inverse(conf[static_cast<std::size_t>(i)]);
        }
        snap.curve_conformal.markers = std::move(conf);
        snap.curve_physical.markers = std::move(phys);
        rec.snapshots.push_back(std::move(snap));
    }
    return rec;
}

HorizonScanResult scan_contracting_horizon(const Scenario& sc, double t_min, double rel_prec) {
    const SimulationSetup setup = prepare_simulation(sc);
    const Params& p = setup.params;
    HorizonScanResult result;

    auto contracting_at = [&](double T) -> double {
        // Returns the final contraction ratio, or +inf when the sweep loop
        // fails to close (NoContraction, mesh folding, solver breakdown).
        const double horizon = std::max(2.0 * p.dt, T);
        try {
            const PicardContext ctx = make_picard_context(
                setup.grid, setup.map, p, setup.v0, setup.T0, setup.x0, horizon,
                setup.newtonian, setup.analytic_g0);
            const ConvergeResult res = run_to_convergence(ctx);
            if (!res.report.contracting) return std::numeric_limits<double>::infinity();
            return std::isnan(res.report.final_ratio) ? 0.0 : res.report.final_ratio;
        } catch (const NoContraction&) {
            return std::numeric_limits<double>::infinity();
        } catch (const MeshFoldError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const SolverError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double lo = std::max(2.0 * p.dt, t_min);
    double r = contracting_at(lo);
    result.tried.push_back(lo);
    result.ratios.push_back(r);
    if (std::isinf(r)) {
        result.t_emp = 0.0;
        return result;
    }

    double hi = lo;
    while (hi < p.t_final) {
        const double next = std::min(p.t_final, hi * 1.3);
        const double rr = contracting_at(next);
        result.tried.push_back(next);
        result.ratios.push_back(rr);
        if (std::isinf(rr)) {
            hi = next;
            // Bisect [lo, hi].
            while (hi - lo > rel_prec * lo && hi - lo > p.dt) {
                const double mid = 0.5 * (lo + hi);
                const double rm = contracting_at(mid);
                result.tried.push_back(mid);
                result.ratios.push_back(rm);
                if (std::isinf(rm))
                    hi = mid;
                else
                    lo = mid;
            }
            result.t_emp = lo;
            return result;
        }
        lo = hi = next;
    }
    result.t_emp = lo;
    result.censored = true;
    return result;
}

std::string write_run(const RunRecord& rec, const std::string& dir) {
    fs::create_directories(dir);

    json manifest;
    manifest["tool"] = "splash2d";
    manifest["version"] = kVersion;
    manifest["scenario"] = rec.scenario_name;
    manifest["scenario_hash"] = rec.scenario_hash;
    manifest["params"] = {{"reynolds", rec.params.reynolds},
                          {"weissenberg", rec.params.weissenberg},
                          {"kappa", rec.params.kappa},
                          {"grid_n", rec.params.grid_n},
                          {"dt", rec.params.dt},
                          {"t_final", rec.params.t_final},
                          {"tol_solver", rec.params.tol_solver},
                          {"tol_div", rec.params.tol_div},
                          {"tol_picard", rec.params.tol_picard},
                          {"max_sweeps", rec.params.max_sweeps},
                          {"c_cal", rec.params.c_cal},
                          {"mu_cal", rec.params.mu_cal},
                          {"fold_tol", rec.params.fold_tol}};
    manifest["grid"] = {{"nb", rec.grid_nb}, {"nr", rec.grid_nr}};
    manifest["horizon"] = rec.horizon;
    manifest["pressure_space"] = "coarse bilinear (half-resolution collocation)";
    manifest["contraction"] = {{"sweeps", rec.contraction.sweeps},
                               {"converged", rec.contraction.converged},
                               {"contracting", rec.contraction.contracting},
                               {"final_ratio", rec.contraction.final_ratio},
                               {"diffs", rec.contraction.diffs}};
    manifest["residuals"] = {{"momentum", rec.residuals.momentum},
                             {"trace", rec.residuals.trace},
                             {"trace_fine", rec.residuals.trace_fine},
                             {"traction", rec.residuals.traction},
                             {"stress_ode", rec.residuals.stress_ode},
                             {"flux_ode", rec.residuals.flux_ode}};

    json files = json::array();
    const int nb = rec.grid_nb, nr = rec.grid_nr;
    for (std::size_t s = 0; s < rec.snapshots.size(); ++s) {
        const Snapshot& snap = rec.snapshots[s];
        char name[64];
        std::snprintf(name, sizeof(name), "snap_%04zu_t%.8f.csv", s, snap.t);
        files.push_back(name);

        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error("write_run: cannot open " + std::string(name));
        out << "node_i,node_j,x1,x2,v1,v2,q,T11,T12,T22,X1,X2\n";
        const int nn = nb * nr + 1;
        for (int n = 0; n < nn; ++n) {
            const std::size_t u = static_cast<std::size_t>(n);
            const int i = n == nb * nr ? 0 : n % nb;
            const int j = n == nb * nr ? nr : n / nb;
            // Node label positions are recoverable from X at t=0; snapshots
            // store the evolved fields only.
            out << i << ',' << j << ',';
            out << format_double(rec.snapshots[0].fields.X[u].x) << ','
                << format_double(rec.snapshots[0].fields.X[u].y) << ','
                << format_double(snap.fields.v[u].x) << ','
                << format_double(snap.fields.v[u].y) << ','
                << format_double(snap.fields.q[u]) << ','
                << format_double(snap.fields.T[u].t11) << ','
                << format_double(snap.fields.T[u].t12) << ','
                << format_double(snap.fields.T[u].t22) << ','
                << format_double(snap.fields.X[u].x) << ','
                << format_double(snap.fields.X[u].y) << '\n';
        }
    }
    manifest["snapshots"] = files;

    const fs::path mpath = fs::path(dir) / "manifest.json";
    std::ofstream mout(mpath, std::ios::binary);
    if (!mout) throw Error("write_run: cannot open manifest.json");
    mout << manifest.dump(2) << '\n';
    return mpath.string();
}

}  // namespace splash2d
