#include "polarfit/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "polarfit/errors.hpp"
#include "polarfit/fit.hpp"
#include "polarfit/fock.hpp"
#include "polarfit/io.hpp"

namespace polarfit::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

// "lo:hi:step" (inclusive endpoints) or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi, step;
        char colon1, colon2;
        std::istringstream is(spec);
        if (!(is >> lo >> colon1 >> hi >> colon2 >> step) || colon1 != ':' ||
            colon2 != ':' || !(step > 0.0) || hi < lo)
            throw ParseError(what + ": expected lo:hi:step with step > 0, got '" +
                             spec + "'");
        const int n = (int)std::lround((hi - lo) / step);
        for (int i = 0; i <= n; ++i) out.push_back(lo + step * i);
        if (!out.empty() && out.back() > hi + 1e-12 * std::abs(hi)) out.pop_back();
    } else {
        std::istringstream is(spec);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw ParseError(what + ": bad number '" + cell + "'");
            out.push_back(v);
        }
        if (out.empty())
            throw ParseError(what + ": empty grid '" + spec + "'");
    }
    return out;
}

struct Session {
    io::RunConfig config;
    fs::path out_dir;
    bool plot_script = false;
    std::string config_dir;

    fs::path out(const std::string& name) const { return out_dir / name; }

    void write_json(const std::string& name, const json& doc) const {
        std::ofstream f(out(name));
        if (!f) throw ParseError("cannot write '" + (out_dir / name).string() + "'");
        f << doc.dump(2) << "\n";
    }

    void write_plot(const std::string& name, const std::string& body) const {
        if (!plot_script) return;
        std::ofstream f(out(name));
        if (!f) throw ParseError("cannot write '" + (out_dir / name).string() + "'");
        f << "#!/usr/bin/env python3\n"
          << "import matplotlib\n"
          << "matplotlib.use(\"Agg\")\n"
          << "import matplotlib.pyplot as plt\n"
          << "import csv, collections\n\n"
          << "def load(path):\n"
          << "    with open(path) as f:\n"
          << "        rows = list(csv.DictReader(f))\n"
          << "    return rows\n\n"
          << body;
    }
};

Session make_session(const std::optional<std::string>& config_path,
                     const std::optional<std::string>& out_dir,
                     bool plot_script) {
    Session s;
    if (config_path) {
        s.config = io::parse_config(*config_path);
        s.config_dir = fs::path(*config_path).parent_path().string();
    }
    s.plot_script = plot_script || s.config.plot_script;

    std::string dir;
    if (out_dir) dir = *out_dir;
    else if (!s.config.out_dir.empty()) dir = s.config.out_dir;
    else if (const char* env = std::getenv("POLARFIT_OUTDIR")) dir = env;
    else dir = ".";
    s.out_dir = dir;
    fs::create_directories(s.out_dir);
    return s;
}

void write_curve_csv(const Session& s, const std::string& name,
                     const disp::DispersionCurve& curve) {
    std::vector<disp::DispersionPoint> pts(curve.points.begin(), curve.points.end());
    io::save_dispersion_csv(pts, s.out(name).string());
}

void write_rms_csv(const Session& s, const std::string& name,
                   const fit::FitResult& result) {
    std::vector<std::string> header{"omega_r_mev", "rms_mev"};
    std::vector<std::vector<double>> rows;
    rows.reserve(result.rms_curve.size());
    for (const auto& [w, rms] : result.rms_curve)
        rows.push_back({w, rms});
    io::write_table_csv(s.out(name).string(), header, rows);
}

// ----------------------------------------------------------- subcommands ---

int cmd_dispersion(const Session& s, const std::string& variant_name,
                   const std::optional<std::string>& angles,
                   const std::optional<std::string>& kgrid) {
    if (angles && kgrid)
        throw ParseError("dispersion: give either --angles or --kgrid, not both");
    const model::Variant variant = model::variant_from_string(variant_name);
    const disp::SystemParams params = s.config.system_params(s.config_dir);

    disp::DispersionCurve curve;
    if (kgrid) {
        const std::vector<double> grid = parse_grid(*kgrid, "--kgrid");
        curve = disp::dispersion_curve_wavevectors(params, variant, grid,
                                                   s.config.threads);
    } else {
        std::vector<double> grid;
        if (angles) {
            grid = parse_grid(*angles, "--angles");
        } else {
            // default sweep around the configured probe angle
            const double center = s.config.theta_deg;
            grid = parse_grid(io::format_sig(std::max(1.0, center - 15.0)) + ":" +
                              io::format_sig(std::min(89.0, center + 15.0)) + ":0.5",
                              "--angles");
        }
        curve = disp::dispersion_curve_angles(params, variant, grid, s.config.threads);
    }

    write_curve_csv(s, "dispersion_curve.csv", curve);
    json doc = io::result_envelope("dispersion", s.config);
    doc["results"] = json{{"variant", model::to_string(variant)},
                          {"curve", io::curve_to_json(curve)}};
    s.write_json("dispersion.json", doc);
    s.write_plot("plot_dispersion.py",
        "rows = load(\"dispersion_curve.csv\")\n"
        "xcol = \"theta_deg\" if \"theta_deg\" in rows[0] else \"k_per_nm\"\n"
        "for br in (\"LP\", \"UP\"):\n"
        "    pts = [(float(r[xcol]), float(r[\"energy_mev\"])) for r in rows if r[\"branch\"] == br]\n"
        "    pts.sort()\n"
        "    plt.plot([p[0] for p in pts], [p[1] for p in pts], label=br)\n"
        "plt.xlabel(xcol); plt.ylabel(\"energy (meV)\"); plt.legend()\n"
        "plt.savefig(\"dispersion.png\", dpi=150)\n");

    if (curve.points.empty()) {
        std::cerr << "dispersion: every point failed";
        if (!curve.failures.empty())
            std::cerr << " (first: " << curve.failures.front().message << ")";
        std::cerr << "\n";
        return 1;
    }
    if (curve.partial())
        std::cerr << "dispersion: " << curve.failures.size()
                  << " point(s) failed; curve flagged partial\n";
    return 0;
}

int cmd_fit(const Session& s, const std::string& data_path,
            const std::optional<std::string>& variant_name) {
    std::vector<disp::DispersionPoint> data = io::load_dispersion_csv(data_path);
    fit::FitConfig cfg = s.config.fit;
    if (variant_name) cfg.variant = model::variant_from_string(*variant_name);

    const fit::FitResult result =
        fit::fit_rabi(data, s.config.system_params(s.config_dir), cfg);

    write_rms_csv(s, "fit_rms_curve.csv", result);
    write_curve_csv(s, "fit_curve.csv", result.fitted_curve);
    json doc = io::result_envelope("fit", s.config);
    doc["results"] = io::fit_result_to_json(result);
    s.write_json("fit.json", doc);
    s.write_plot("plot_fit.py",
        "rows = load(\"fit_rms_curve.csv\")\n"
        "xs = [float(r[\"omega_r_mev\"]) for r in rows]\n"
        "ys = [float(r[\"rms_mev\"]) for r in rows]\n"
        "plt.plot(xs, ys, \".-\")\n"
        "plt.xlabel(\"omega_r (meV)\"); plt.ylabel(\"rms (meV)\")\n"
        "plt.savefig(\"fit_rms.png\", dpi=150)\n");

    std::cout << "fit: variant=" << model::to_string(result.variant)
              << " omega_r*=" << io::format_sig(result.omega_r_star)
              << " meV rms=" << io::format_sig(result.rms_star) << " meV\n";
    for (const auto& w : result.warnings)
        std::cerr << "fit: warning: " << w.detail << "\n";
    return 0;
}

int cmd_compare(const Session& s, const std::string& data_path) {
    std::vector<disp::DispersionPoint> data = io::load_dispersion_csv(data_path);
    const fit::CompareOutcome outcome =
        fit::compare_variants(data, s.config.system_params(s.config_dir), s.config.fit);

    json results = json::array();
    for (const auto& r : outcome.results) {
        results.push_back(io::fit_result_to_json(r));
        write_rms_csv(s, std::string("compare_rms_") + model::to_string(r.variant) + ".csv", r);
        write_curve_csv(s, std::string("compare_curve_") + model::to_string(r.variant) + ".csv",
                        r.fitted_curve);
    }
    json doc = io::result_envelope("compare", s.config);
    doc["results"] = json{{"fits", results}};
    if (!outcome.failures.empty()) {
        json fails = json::array();
        for (const auto& f : outcome.failures)
            fails.push_back(json{{"variant", model::to_string(f.variant)},
                                 {"message", f.message}});
        doc["results"]["failures"] = fails;
    }
    s.write_json("compare.json", doc);
    s.write_plot("plot_compare.py",
        "import glob\n"
        "for path in sorted(glob.glob(\"compare_rms_*.csv\")):\n"
        "    rows = load(path)\n"
        "    xs = [float(r[\"omega_r_mev\"]) for r in rows]\n"
        "    ys = [float(r[\"rms_mev\"]) for r in rows]\n"
        "    plt.plot(xs, ys, \".-\", label=path[12:-4])\n"
        "plt.xlabel(\"omega_r (meV)\"); plt.ylabel(\"rms (meV)\"); plt.legend()\n"
        "plt.savefig(\"compare_rms.png\", dpi=150)\n");

    std::cout << "compare: variant, omega_r* (meV), rms (meV)\n";
    for (const auto& r : outcome.results)
        std::cout << "  " << model::to_string(r.variant) << ", "
                  << io::format_sig(r.omega_r_star) << ", "
                  << io::format_sig(r.rms_star) << "\n";
    for (const auto& f : outcome.failures)
        std::cerr << "compare: " << model::to_string(f.variant)
                  << " failed: " << f.message << "\n";
    return outcome.results.empty() ? 1 : 0;
}

int cmd_deviation_map(const Session& s, const std::string& ratios,
                      double theta_res) {
    const std::vector<double> grid = parse_grid(ratios, "--ratios");

    disp::SystemParams params = s.config.system_params(s.config_dir);
    // the map needs a cavity whose fixed-angle response is resonant at
    // theta_res; calibrate one from the configured indices
    params.cavity = disp::cavity_for_resonance_angle(
        s.config.e_12, theta_res, s.config.n_prop, s.config.cavity_n);

    const std::vector<fit::DeviationRow> rows =
        fit::deviation_vs_coupling(params, grid, theta_res);

    std::vector<std::string> header{"ratio", "no_antires_lp_pct", "no_antires_up_pct",
                                    "rwa_lp_pct", "rwa_up_pct"};
    std::vector<std::vector<double>> cells;
    json failures = json::array();
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            failures.push_back(json{{"ratio", io::round_sig(r.ratio)},
                                    {"message", r.error}});
            continue;
        }
        cells.push_back({r.ratio, r.no_antires_lp_pct, r.no_antires_up_pct,
                         r.rwa_lp_pct, r.rwa_up_pct});
    }
    io::write_table_csv(s.out("deviation_map.csv").string(), header, cells);

    double max_abs = 0.0;
    for (const auto& r : rows)
        if (r.error.empty()) max_abs = std::max(max_abs, r.max_abs_pct());

    json doc = io::result_envelope("deviation-map", s.config);
    doc["results"] = json{
        {"theta_res_deg", io::round_sig(theta_res)},
        {"cavity_e_z_mev", io::round_sig(params.cavity.parametric_params().e_z)},
        {"max_abs_deviation_pct", io::round_sig(max_abs)},
        {"n_rows", cells.size()}};
    if (!failures.empty()) doc["results"]["failures"] = failures;
    s.write_json("deviation_map.json", doc);
    s.write_plot("plot_deviation_map.py",
        "rows = load(\"deviation_map.csv\")\n"
        "xs = [float(r[\"ratio\"]) for r in rows]\n"
        "for col in (\"no_antires_lp_pct\", \"no_antires_up_pct\", \"rwa_lp_pct\", \"rwa_up_pct\"):\n"
        "    plt.plot(xs, [float(r[col]) for r in rows], label=col)\n"
        "plt.xlabel(\"omega_r / e_12\"); plt.ylabel(\"deviation (%)\"); plt.legend()\n"
        "plt.savefig(\"deviation_map.png\", dpi=150)\n");

    std::cout << "deviation-map: " << cells.size() << " rows, max |deviation| = "
              << io::format_sig(max_abs) << " %\n";
    return failures.empty() || !cells.empty() ? 0 : 1;
}

int cmd_ground_state(const Session& s, const std::string& ratios) {
    const std::vector<double> grid = parse_grid(ratios, "--ratios");
    const disp::SystemParams params = s.config.system_params(s.config_dir);
    const double k_res = params.cavity.resonant_k(params.e_12);
    const double e_cav = params.cavity.energy_at(k_res);

    std::vector<std::string> header{"ratio", "omega_r_mev", "n_photon", "n_matter"};
    std::vector<std::vector<double>> cells;
    for (double r : grid) {
        const double omega_r = r * params.e_12;
        const double d = params.d_dia_override
                             ? *params.d_dia_override
                             : model::default_dia(omega_r, params.e_12);
        const model::ModeInputs in{e_cav, params.e_12, omega_r, d};
        const model::GroundStatePopulations pops =
            model::ground_state_populations(model::diagonalize(in, model::Variant::Full));
        cells.push_back({r, omega_r, pops.n_photon, pops.n_matter});
    }
    io::write_table_csv(s.out("ground_state.csv").string(), header, cells);

    json doc = io::result_envelope("ground-state", s.config);
    doc["results"] = json{{"k_res_per_nm", io::round_sig(k_res)},
                          {"e_cav_mev", io::round_sig(e_cav)},
                          {"n_rows", cells.size()}};
    s.write_json("ground_state.json", doc);
    s.write_plot("plot_ground_state.py",
        "rows = load(\"ground_state.csv\")\n"
        "xs = [float(r[\"ratio\"]) for r in rows]\n"
        "plt.plot(xs, [float(r[\"n_photon\"]) for r in rows], label=\"n_photon\")\n"
        "plt.plot(xs, [float(r[\"n_matter\"]) for r in rows], label=\"n_matter\")\n"
        "plt.xlabel(\"omega_r / e_12\"); plt.ylabel(\"ground-state population\")\n"
        "plt.legend(); plt.savefig(\"ground_state.png\", dpi=150)\n");
    return 0;
}

int cmd_oracle_check(const Session& s, const std::optional<std::string>& ratios,
                     const std::string& detunings, int cutoff, double tol) {
    const std::vector<double> dets = parse_grid(detunings, "--detunings");
    std::vector<double> omegas;
    if (ratios) {
        for (double r : parse_grid(*ratios, "--ratios"))
            omegas.push_back(r * s.config.e_12);
    } else {
        omegas.push_back(s.config.omega_r);
    }

    fock::FockConfig fcfg;
    fcfg.n_max_photon = cutoff;
    fcfg.n_max_matter = cutoff;
    fcfg.convergence_tol = tol;

    std::vector<std::string> header{
        "e_cav_mev", "omega_r_mev", "d_dia_mev",
        "e_lp_bogoliubov", "e_lp_fock", "e_up_bogoliubov", "e_up_fock",
        "n_photon_bogoliubov", "n_photon_fock", "n_matter_bogoliubov",
        "n_matter_fock", "max_delta"};
    std::vector<std::vector<double>> cells;
    double worst = 0.0;

    for (double omega_r : omegas) {
        for (double det : dets) {
            const double e_cav = s.config.e_12 + det;
            const double d = s.config.d_dia
                                 ? *s.config.d_dia
                                 : model::default_dia(omega_r, s.config.e_12);
            const model::ModeInputs in{e_cav, s.config.e_12, omega_r, d};
            const model::PolaritonModes modes =
                model::diagonalize(in, model::Variant::Full);
            const model::GroundStatePopulations pops =
                model::ground_state_populations(modes);
            const fock::OracleResult oracle =
                fock::oracle_spectrum(in, model::Variant::Full, fcfg);

            const double delta = std::max(
                {std::abs(modes.e_lp - oracle.e_lp),
                 std::abs(modes.e_up - oracle.e_up),
                 std::abs(pops.n_photon - oracle.n_photon_gs),
                 std::abs(pops.n_matter - oracle.n_matter_gs)});
            worst = std::max(worst, delta);
            cells.push_back({e_cav, omega_r, d, modes.e_lp, oracle.e_lp,
                             modes.e_up, oracle.e_up, pops.n_photon,
                             oracle.n_photon_gs, pops.n_matter,
                             oracle.n_matter_gs, delta});
        }
    }
    io::write_table_csv(s.out("oracle_check.csv").string(), header, cells);

    const bool pass = worst <= tol;
    json doc = io::result_envelope("oracle-check", s.config);
    doc["results"] = json{{"cutoff", cutoff},
                          {"tolerance", io::round_sig(tol)},
                          {"cases", cells.size()},
                          {"max_discrepancy", io::round_sig(worst)},
                          {"pass", pass}};
    s.write_json("oracle_check.json", doc);

    std::cout << "oracle-check: " << cells.size() << " case(s), max discrepancy "
              << io::format_sig(worst) << (pass ? " -> PASS" : " -> FAIL") << "\n";
    return pass ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"intersubband cavity-polariton dispersion toolkit"};
    app.require_subcommand(1);

    std::optional<std::string> config_path, out_dir;
    bool plot_script = false;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory (default: $POLARFIT_OUTDIR or .)");
    app.add_flag("--plot-script", plot_script, "emit a plotting script beside the CSVs");

    auto* sub_disp = app.add_subcommand("dispersion", "polariton curves over a grid");
    std::string variant_name = "full";
    std::optional<std::string> angles, kgrid;
    sub_disp->add_option("--variant", variant_name,
                         "full | no_antires | no_antires_no_dia");
    sub_disp->add_option("--angles", angles, "internal angle grid lo:hi:step, degrees");
    sub_disp->add_option("--kgrid", kgrid, "wavevector grid lo:hi:step, 1/nm");

    auto* sub_fit = app.add_subcommand("fit", "single-variant Rabi-energy fit");
    std::string data_path;
    std::optional<std::string> fit_variant;
    sub_fit->add_option("--data", data_path, "dispersion data CSV")->required();
    sub_fit->add_option("--variant", fit_variant, "override the configured variant");

    auto* sub_cmp = app.add_subcommand("compare", "three-variant fit comparison");
    std::string cmp_data;
    sub_cmp->add_option("--data", cmp_data, "dispersion data CSV")->required();

    auto* sub_dev = app.add_subcommand("deviation-map",
                                       "reduced-variant deviation vs coupling ratio");
    std::string ratios = "0:0.3:0.01";
    double theta_res = 60.0;
    sub_dev->add_option("--ratios", ratios, "coupling ratio grid lo:hi:step or list");
    sub_dev->add_option("--theta-res", theta_res, "resonant internal angle, degrees");

    auto* sub_gs = app.add_subcommand("ground-state",
                                      "virtual ground-state populations vs coupling");
    std::string gs_ratios = "0:0.3:0.01";
    sub_gs->add_option("--ratios", gs_ratios, "coupling ratio grid lo:hi:step or list");

    auto* sub_oracle = app.add_subcommand("oracle-check",
                                          "Fock-space oracle vs Bogoliubov spectrum");
    std::optional<std::string> oracle_ratios;
    std::string oracle_dets = "-20,0,20";
    int cutoff = 16;
    double oracle_tol = 1e-6;
    sub_oracle->add_option("--ratios", oracle_ratios,
                           "coupling ratios (default: the configured omega_r)");
    sub_oracle->add_option("--detunings", oracle_dets, "e_cav - e_12 grid, meV");
    sub_oracle->add_option("--cutoff", cutoff, "Fock occupancy cutoff per mode");
    sub_oracle->add_option("--tol", oracle_tol, "pass/fail discrepancy bound");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("polarfit");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const Session s = make_session(config_path, out_dir, plot_script);
        if (sub_disp->parsed()) return cmd_dispersion(s, variant_name, angles, kgrid);
        if (sub_fit->parsed()) return cmd_fit(s, data_path, fit_variant);
        if (sub_cmp->parsed()) return cmd_compare(s, cmp_data);
        if (sub_dev->parsed()) return cmd_deviation_map(s, ratios, theta_res);
        if (sub_gs->parsed()) return cmd_ground_state(s, gs_ratios);
        if (sub_oracle->parsed())
            return cmd_oracle_check(s, oracle_ratios, oracle_dets, cutoff, oracle_tol);
        std::cerr << "polarfit: no subcommand\n";
        return 2;
    } catch (const ParseError& err) {
        std::cerr << "polarfit: " << err.what() << "\n";
        return 2;
    } catch (const Error& err) {
        std::cerr << "polarfit: " << err.what() << "\n";
        return 1;
    }
}

} // namespace polarfit::cli
