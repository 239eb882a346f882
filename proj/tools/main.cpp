#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splash2d/run_io.hpp"
#include "splash2d/splash_lab.hpp"
#include "splash2d/sobolev.hpp"
#include "splash2d/version.hpp"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace splash2d;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        out.push_back(std::stod(csv.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 double t_final, double dt, int grid_n) {
    Scenario sc = load_scenario(scenario_path);
    if (t_final > 0.0) sc.params.t_final = t_final;
    if (dt > 0.0) sc.params.dt = dt;
    if (grid_n > 0) sc.params.grid_n = grid_n;

    const RunRecord rec = simulate_scenario(sc);
    const std::string manifest = write_run(rec, out_dir);
    std::cout << "converged in " << rec.contraction.sweeps << " sweeps (final ratio "
              << format_double(rec.contraction.final_ratio) << ")\n"
              << "residuals: momentum " << format_double(rec.residuals.momentum) << ", trace "
              << format_double(rec.residuals.trace) << ", traction "
              << format_double(rec.residuals.traction) << "\n"
              << "manifest: " << manifest << "\n";
    return 0;
}

int run_check(const std::string& scenario_path) {
    const Scenario sc = load_scenario(scenario_path);
    const SimulationSetup setup = prepare_simulation(sc);
    const CompatReport rep =
        check_compatibility(setup.grid, setup.map, setup.v0, setup.T0, setup.params);
    std::cout << "compatibility report for '" << sc.name << "'\n"
              << "  div u0:               " << format_double(rep.div_u) << "\n"
              << "  div F0:               " << format_double(rep.div_f) << "\n"
              << "  det F0 - 1:           " << format_double(rep.det_f) << "\n"
              << "  tangential traction:  " << format_double(rep.traction_tangential) << "\n"
              << "  tolerance:            " << format_double(setup.params.tol_div) << "\n"
              << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
}

int run_splash(const std::string& scenario_path, const std::string& eps_csv,
               const std::string& out_dir, int threads) {
    PerturbationFamily family;
    family.base = load_scenario(scenario_path);
    family.epsilons = parse_list(eps_csv);
    const SplashExperimentReport report = splash_experiment(family, threads);

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "splash.csv", std::ios::binary);
    csv << "eps,t_star,sup_gap\n";
    ordered_json j;
    j["scenario"] = family.base.name;
    j["entries"] = ordered_json::array();
    for (const auto& e : report.entries) {
        csv << format_double(e.eps) << ','
            << (e.t_star ? format_double(*e.t_star) : std::string("none")) << ','
            << format_double(e.sup_gap) << '\n';
        ordered_json je;
        je["eps"] = e.eps;
        if (e.t_star)
            je["t_star"] = *e.t_star;
        else
            je["t_star"] = nullptr;
        je["sup_gap"] = e.sup_gap;
        j["entries"].push_back(je);
    }
    j["all_splash"] = report.all_splash;
    std::ofstream jf(fs::path(out_dir) / "splash.json", std::ios::binary);
    jf << j.dump(2) << '\n';

    for (const auto& e : report.entries)
        std::cout << "eps " << format_double(e.eps) << ": t* "
                  << (e.t_star ? format_double(*e.t_star) : std::string("none")) << ", sup gap "
                  << format_double(e.sup_gap) << "\n";
    return 0;
}

int run_calibrate(const std::string& scenario_path, const std::string& we_csv,
                  const std::string& out_dir, int threads) {
    const Scenario base = load_scenario(scenario_path);
    const std::vector<double> we_list = parse_list(we_csv);

    auto scan_one = [&](double we) {
        Scenario sc = base;
        sc.params.weissenberg = we;
        return scan_contracting_horizon(sc, 2.0 * sc.params.dt);
    };

    std::vector<HorizonScanResult> results(we_list.size());
    if (threads > 1) {
        std::vector<std::future<HorizonScanResult>> futs;
        for (double we : we_list)
            futs.push_back(std::async(std::launch::async, scan_one, we));
        for (std::size_t k = 0; k < futs.size(); ++k) results[k] = futs[k].get();
    } else {
        for (std::size_t k = 0; k < we_list.size(); ++k) results[k] = scan_one(we_list[k]);
    }

    // Fit T_emp = (c We/(1+We))^(1/mu) by log-log regression.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < we_list.size(); ++k) {
        if (results[k].t_emp <= 0.0) continue;
        const double x = std::log(we_list[k] / (1.0 + we_list[k]));
        const double y = std::log(results[k].t_emp);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    double mu_fit = std::numeric_limits<double>::quiet_NaN();
    double c_fit = std::numeric_limits<double>::quiet_NaN();
    if (m >= 2 && std::fabs(m * sxx - sx * sx) > 1e-30) {
        const double a = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double b = (sy - a * sx) / m;
        mu_fit = 1.0 / a;
        c_fit = std::exp(b / a);
    }

    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "calibration.csv", std::ios::binary);
    csv << "we,t_emp,censored\n";
    ordered_json j;
    j["scenario"] = base.name;
    j["entries"] = ordered_json::array();
    for (std::size_t k = 0; k < we_list.size(); ++k) {
        csv << format_double(we_list[k]) << ',' << format_double(results[k].t_emp) << ','
            << (results[k].censored ? 1 : 0) << '\n';
        ordered_json je;
        je["we"] = we_list[k];
        je["t_emp"] = results[k].t_emp;
        je["censored"] = results[k].censored;
        je["tried"] = results[k].tried;
        j["entries"].push_back(je);
        std::cout << "We " << format_double(we_list[k]) << ": T_emp "
                  << format_double(results[k].t_emp)
                  << (results[k].censored ? " (censored at t_final)" : "") << "\n";
    }
    j["fit"] = {{"c_cal", c_fit}, {"mu_cal", mu_fit}};
    std::ofstream jf(fs::path(out_dir) / "calibration.json", std::ios::binary);
    jf << j.dump(2) << '\n';
    std::cout << "fit: c_cal " << format_double(c_fit) << ", mu_cal " << format_double(mu_fit)
              << "\n";
    return 0;
}

int run_probe(int trials, const std::string& out_path, std::uint64_t seed) {
    const ProductProbeReport prod = product_lemma_probe(trials, 2.25, 2.4, seed);
    const IntegralProbeReport integ = integral_lemma_probe(std::max(10, trials / 4), 0.3, 0.1,
                                                           seed + 1);
    ordered_json j;
    j["product_lemma"] = {{"bands", prod.bands},
                          {"max_ratio", prod.max_ratio},
                          {"slope", prod.slope},
                          {"pass", prod.pass}};
    j["integral_lemma"] = {{"windows", integ.windows},
                           {"mean_ratio", integ.mean_ratio},
                           {"nonincreasing", integ.nonincreasing}};
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << "\n";
    return (prod.pass && integ.nonincreasing) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D free-boundary Oldroyd-B simulator in conformal-Lagrangian coordinates"};
    app.set_version_flag("--version", std::string(kVersion));

    std::uint64_t seed = 20240901;
    int threads = 1;
    app.add_option("--seed", seed, "seed for randomized probes");
    app.add_option("--threads", threads, "parallel workers for scenario families");

    std::string scenario_path, out_dir = "out";
    double t_final = -1.0, dt = -1.0;
    int grid_n = -1;

    auto* simulate = app.add_subcommand("simulate", "run one scenario to convergence");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--t-final", t_final, "override t_final");
    simulate->add_option("--dt", dt, "override dt");
    simulate->add_option("--grid-n", grid_n, "override grid_n");

    std::string eps_csv = "0.04,0.02,0.01";
    auto* splash = app.add_subcommand("splash", "epsilon-family splash experiment");
    splash->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    splash->add_option("--eps", eps_csv, "comma-separated epsilon list");
    splash->add_option("--out", out_dir, "output directory");

    std::string we_csv = "0.1,1,10";
    auto* calibrate = app.add_subcommand("calibrate", "fit the contraction horizon constants");
    calibrate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    calibrate->add_option("--we-list", we_csv, "comma-separated Weissenberg numbers");
    calibrate->add_option("--out", out_dir, "output directory");

    int trials = 200;
    std::string report_path;
    auto* probe = app.add_subcommand("probe-lemmas", "run the norm-inequality probes");
    probe->add_option("--trials", trials, "number of random trials");
    probe->add_option("--out", report_path, "report JSON path");

    auto* check = app.add_subcommand("check", "compatibility report for a scenario");
    check->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(scenario_path, out_dir, t_final, dt, grid_n);
        if (splash->parsed()) return run_splash(scenario_path, eps_csv, out_dir, threads);
        if (calibrate->parsed()) return run_calibrate(scenario_path, we_csv, out_dir, threads);
        if (probe->parsed()) return run_probe(trials, report_path, seed);
        if (check->parsed()) return run_check(scenario_path);
    } catch (const NoContraction& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MeshFoldError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
