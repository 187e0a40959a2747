#include "polarfit/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polarfit/constants.hpp"
#include "polarfit/errors.hpp"
#include "polarfit/version.hpp"

namespace polarfit::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& value, const std::string& context) {
    char* end = nullptr;
    const std::string t = trim(value);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw ParseError(context + ": expected a number, got '" + value + "'");
    return v;
}

long parse_long(const std::string& value, const std::string& context) {
    char* end = nullptr;
    const std::string t = trim(value);
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw ParseError(context + ": expected an integer, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& value, const std::string& context) {
    const std::string t = trim(value);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ParseError(context + ": expected true/false, got '" + value + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace

double round_sig(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------- config ---

disp::SystemParams RunConfig::system_params(const std::string& base_dir) const {
    disp::SystemParams p;
    p.e_12 = e_12;
    p.n_prop = n_prop;
    p.coupling = disp::CouplingModel{coupling_kind, omega_r};
    p.d_dia_override = d_dia;
    if (cavity_kind == CavityKind::Parametric) {
        p.cavity = cavity_e_z
                       ? disp::CavityModel::parametric(*cavity_e_z, cavity_n)
                       : disp::cavity_for_resonance_angle(e_12, cavity_resonance_theta,
                                                          n_prop, cavity_n);
    } else {
        if (cavity_table.empty())
            throw ParseError("system.cavity_table: required for a tabulated cavity");
        std::filesystem::path path(cavity_table);
        if (path.is_relative() && !base_dir.empty())
            path = std::filesystem::path(base_dir) / path;
        p.cavity = load_cavity_csv(path.string(), n_prop);
    }
    return p;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file '" + path + "'");

    RunConfig cfg;
    std::string section;
    std::string line;
    int line_no = 0;

    const auto ctx = [&](const std::string& key) {
        return path + ":" + std::to_string(line_no) + ": [" + section + "] " + key;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string::size_type hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;

        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": malformed section header '" + t + "'");
            section = t.substr(1, t.size() - 2);
            if (section != "system" && section != "fit" && section != "run" &&
                section != "output")
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": unknown section [" + section + "]");
            continue;
        }

        const std::string::size_type eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));

        if (section == "system") {
            if (key == "e_12") cfg.e_12 = parse_double(value, ctx(key));
            else if (key == "n_prop") cfg.n_prop = parse_double(value, ctx(key));
            else if (key == "theta") cfg.theta_deg = parse_double(value, ctx(key));
            else if (key == "cavity") {
                if (value == "parametric") cfg.cavity_kind = CavityKind::Parametric;
                else if (value == "tabulated") cfg.cavity_kind = CavityKind::Tabulated;
                else throw ParseError(ctx(key) + ": expected parametric | tabulated");
            }
            else if (key == "cavity_e_z") cfg.cavity_e_z = parse_double(value, ctx(key));
            else if (key == "cavity_n") cfg.cavity_n = parse_double(value, ctx(key));
            else if (key == "cavity_resonance_theta")
                cfg.cavity_resonance_theta = parse_double(value, ctx(key));
            else if (key == "cavity_table") cfg.cavity_table = value;
            else if (key == "coupling") {
                if (value == "constant")
                    cfg.coupling_kind = disp::CouplingModel::Kind::Constant;
                else if (value == "scaled")
                    cfg.coupling_kind = disp::CouplingModel::Kind::Scaled;
                else throw ParseError(ctx(key) + ": expected constant | scaled");
            }
            else if (key == "omega_r") cfg.omega_r = parse_double(value, ctx(key));
            else if (key == "d_dia") cfg.d_dia = parse_double(value, ctx(key));
            else throw ParseError(ctx(key) + ": unknown key");
        } else if (section == "fit") {
            if (key == "omega_r_low") cfg.fit.omega_r_low = parse_double(value, ctx(key));
            else if (key == "omega_r_high") cfg.fit.omega_r_high = parse_double(value, ctx(key));
            else if (key == "coarse_points")
                cfg.fit.coarse_grid_points = (int)parse_long(value, ctx(key));
            else if (key == "refine_tol") cfg.fit.refine_tolerance = parse_double(value, ctx(key));
            else if (key == "variant") cfg.fit.variant = model::variant_from_string(value);
            else if (key == "domain") cfg.fit.domain = fit::fit_domain_from_string(value);
            else throw ParseError(ctx(key) + ": unknown key");
        } else if (section == "run") {
            if (key == "threads") {
                const long n = parse_long(value, ctx(key));
                if (n < 1 || n > 256)
                    throw ParseError(ctx(key) + ": threads must be in [1, 256]");
                cfg.threads = (unsigned)n;
            }
            else throw ParseError(ctx(key) + ": unknown key");
        } else if (section == "output") {
            if (key == "directory") cfg.out_dir = value;
            else if (key == "plot_script") cfg.plot_script = parse_bool(value, ctx(key));
            else throw ParseError(ctx(key) + ": unknown key");
        } else {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": key '" + key + "' outside any section");
        }
    }

    // physical invariants, named per field
    if (!(cfg.e_12 > 0.0)) throw ParseError("system.e_12: must be > 0");
    if (!(cfg.n_prop > 1.0)) throw ParseError("system.n_prop: must be > 1");
    if (!(cfg.theta_deg > 0.0 && cfg.theta_deg < 90.0))
        throw ParseError("system.theta: must be in (0, 90)");
    if (cfg.cavity_e_z && !(*cfg.cavity_e_z > 0.0))
        throw ParseError("system.cavity_e_z: must be > 0");
    if (!(cfg.cavity_n > 0.0)) throw ParseError("system.cavity_n: must be > 0");
    if (!(cfg.omega_r >= 0.0)) throw ParseError("system.omega_r: must be >= 0");
    if (cfg.d_dia && !(*cfg.d_dia >= 0.0))
        throw ParseError("system.d_dia: must be >= 0");
    try {
        cfg.fit.validate();
    } catch (const DomainError& err) {
        throw ParseError(std::string("fit: ") + err.what());
    }
    // materialize the cavity so that referenced files are checked now
    cfg.system_params(std::filesystem::path(path).parent_path().string());
    return cfg;
}

namespace {

const char* to_string(CavityKind k) {
    return k == CavityKind::Parametric ? "parametric" : "tabulated";
}

const char* to_string(disp::CouplingModel::Kind k) {
    return k == disp::CouplingModel::Kind::Constant ? "constant" : "scaled";
}

} // namespace

void write_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write config file '" + path + "'");
    out << "[system]\n";
    out << "e_12 = " << format_sig(cfg.e_12) << "\n";
    out << "n_prop = " << format_sig(cfg.n_prop) << "\n";
    out << "theta = " << format_sig(cfg.theta_deg) << "\n";
    out << "cavity = " << to_string(cfg.cavity_kind) << "\n";
    if (cfg.cavity_e_z) out << "cavity_e_z = " << format_sig(*cfg.cavity_e_z) << "\n";
    out << "cavity_n = " << format_sig(cfg.cavity_n) << "\n";
    out << "cavity_resonance_theta = " << format_sig(cfg.cavity_resonance_theta) << "\n";
    if (!cfg.cavity_table.empty()) out << "cavity_table = " << cfg.cavity_table << "\n";
    out << "coupling = " << to_string(cfg.coupling_kind) << "\n";
    out << "omega_r = " << format_sig(cfg.omega_r) << "\n";
    if (cfg.d_dia) out << "d_dia = " << format_sig(*cfg.d_dia) << "\n";
    out << "\n[fit]\n";
    out << "omega_r_low = " << format_sig(cfg.fit.omega_r_low) << "\n";
    out << "omega_r_high = " << format_sig(cfg.fit.omega_r_high) << "\n";
    out << "coarse_points = " << cfg.fit.coarse_grid_points << "\n";
    out << "refine_tol = " << format_sig(cfg.fit.refine_tolerance) << "\n";
    out << "variant = " << model::to_string(cfg.fit.variant) << "\n";
    out << "domain = " << fit::to_string(cfg.fit.domain) << "\n";
    out << "\n[run]\n";
    out << "threads = " << cfg.threads << "\n";
    out << "\n[output]\n";
    if (!cfg.out_dir.empty()) out << "directory = " << cfg.out_dir << "\n";
    out << "plot_script = " << (cfg.plot_script ? "true" : "false") << "\n";
}

json config_to_json(const RunConfig& cfg) {
    json j;
    json system;
    system["e_12"] = round_sig(cfg.e_12);
    system["n_prop"] = round_sig(cfg.n_prop);
    system["theta"] = round_sig(cfg.theta_deg);
    system["cavity"] = to_string(cfg.cavity_kind);
    if (cfg.cavity_e_z) system["cavity_e_z"] = round_sig(*cfg.cavity_e_z);
    system["cavity_n"] = round_sig(cfg.cavity_n);
    system["cavity_resonance_theta"] = round_sig(cfg.cavity_resonance_theta);
    if (!cfg.cavity_table.empty()) system["cavity_table"] = cfg.cavity_table;
    system["coupling"] = to_string(cfg.coupling_kind);
    system["omega_r"] = round_sig(cfg.omega_r);
    if (cfg.d_dia) system["d_dia"] = round_sig(*cfg.d_dia);
    j["system"] = system;

    json fitj;
    fitj["omega_r_low"] = round_sig(cfg.fit.omega_r_low);
    fitj["omega_r_high"] = round_sig(cfg.fit.omega_r_high);
    fitj["coarse_points"] = cfg.fit.coarse_grid_points;
    fitj["refine_tol"] = round_sig(cfg.fit.refine_tolerance);
    fitj["variant"] = model::to_string(cfg.fit.variant);
    fitj["domain"] = fit::to_string(cfg.fit.domain);
    j["fit"] = fitj;

    j["run"] = json{{"threads", cfg.threads}};

    json outj;
    if (!cfg.out_dir.empty()) outj["directory"] = cfg.out_dir;
    outj["plot_script"] = cfg.plot_script;
    j["output"] = outj;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    const json& s = j.at("system");
    cfg.e_12 = s.at("e_12").get<double>();
    cfg.n_prop = s.at("n_prop").get<double>();
    cfg.theta_deg = s.at("theta").get<double>();
    cfg.cavity_kind = s.at("cavity").get<std::string>() == "tabulated"
                          ? CavityKind::Tabulated
                          : CavityKind::Parametric;
    if (s.contains("cavity_e_z")) cfg.cavity_e_z = s.at("cavity_e_z").get<double>();
    cfg.cavity_n = s.at("cavity_n").get<double>();
    cfg.cavity_resonance_theta = s.at("cavity_resonance_theta").get<double>();
    if (s.contains("cavity_table")) cfg.cavity_table = s.at("cavity_table").get<std::string>();
    cfg.coupling_kind = s.at("coupling").get<std::string>() == "scaled"
                            ? disp::CouplingModel::Kind::Scaled
                            : disp::CouplingModel::Kind::Constant;
    cfg.omega_r = s.at("omega_r").get<double>();
    if (s.contains("d_dia")) cfg.d_dia = s.at("d_dia").get<double>();

    const json& f = j.at("fit");
    cfg.fit.omega_r_low = f.at("omega_r_low").get<double>();
    cfg.fit.omega_r_high = f.at("omega_r_high").get<double>();
    cfg.fit.coarse_grid_points = f.at("coarse_points").get<int>();
    cfg.fit.refine_tolerance = f.at("refine_tol").get<double>();
    cfg.fit.variant = model::variant_from_string(f.at("variant").get<std::string>());
    cfg.fit.domain = fit::fit_domain_from_string(f.at("domain").get<std::string>());

    cfg.threads = j.at("run").at("threads").get<unsigned>();
    const json& o = j.at("output");
    if (o.contains("directory")) cfg.out_dir = o.at("directory").get<std::string>();
    cfg.plot_script = o.at("plot_script").get<bool>();
    return cfg;
}

// ------------------------------------------------------------------- CSV ---

std::vector<disp::DispersionPoint> load_dispersion_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open data file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file");

    const std::vector<std::string> header = split(line, ',');
    int col_theta = -1, col_k = -1, col_energy = -1, col_branch = -1;
    for (int i = 0; i < (int)header.size(); ++i) {
        if (header[i] == "theta_deg") col_theta = i;
        else if (header[i] == "k_per_nm") col_k = i;
        else if (header[i] == "energy_mev") col_energy = i;
        else if (header[i] == "branch") col_branch = i;
        else throw ParseError(path + ": unknown column '" + header[i] + "'");
    }
    if (col_energy < 0 || col_branch < 0 || (col_theta < 0 && col_k < 0))
        throw ParseError(path + ": need columns energy_mev, branch and "
                         "theta_deg and/or k_per_nm");

    std::vector<disp::DispersionPoint> points;
    int line_no = 1;
    bool has_lp = false, has_up = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        const std::string where = path + ":" + std::to_string(line_no);
        if ((int)cells.size() != (int)header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) +
                             " cells, got " + std::to_string(cells.size()));
        disp::DispersionPoint pt;
        if (col_theta >= 0 && !cells[col_theta].empty())
            pt.theta_deg = parse_double(cells[col_theta], where + " theta_deg");
        if (col_k >= 0 && !cells[col_k].empty())
            pt.k = parse_double(cells[col_k], where + " k_per_nm");
        if (!pt.theta_deg && !pt.k)
            throw ParseError(where + ": row carries neither theta_deg nor k_per_nm");
        pt.energy = parse_double(cells[col_energy], where + " energy_mev");
        if (!(pt.energy > 0.0))
            throw ParseError(where + ": energy_mev must be > 0");
        try {
            pt.branch = disp::branch_from_string(cells[col_branch]);
        } catch (const DomainError& err) {
            throw ParseError(where + ": " + err.what());
        }
        (pt.branch == disp::Branch::LP ? has_lp : has_up) = true;
        points.push_back(pt);
    }
    if (points.empty())
        throw ParseError(path + ": no data rows");
    if (!has_lp || !has_up)
        throw ParseError(path + ": need at least one point per branch, missing " +
                         std::string(!has_lp ? "LP" : "UP"));
    return points;
}

void save_dispersion_csv(std::span<const disp::DispersionPoint> points,
                         const std::string& path) {
    bool any_theta = false, any_k = false;
    for (const auto& pt : points) {
        any_theta |= pt.theta_deg.has_value();
        any_k |= pt.k.has_value();
    }
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write data file '" + path + "'");

    std::string header;
    if (any_theta) header += "theta_deg,";
    if (any_k) header += "k_per_nm,";
    out << header << "energy_mev,branch\n";
    for (const auto& pt : points) {
        if (any_theta) out << (pt.theta_deg ? format_sig(*pt.theta_deg) : "") << ",";
        if (any_k) out << (pt.k ? format_sig(*pt.k) : "") << ",";
        out << format_sig(pt.energy) << "," << disp::to_string(pt.branch) << "\n";
    }
}

disp::CavityModel load_cavity_csv(const std::string& path, double n_prop) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open cavity table '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ": empty file");
    const std::vector<std::string> header = split(line, ',');
    if (header.size() != 2 || header[1] != "energy_mev" ||
        (header[0] != "k_per_nm" && header[0] != "theta_deg"))
        throw ParseError(path + ": expected header k_per_nm,energy_mev or "
                         "theta_deg,energy_mev");
    const bool by_angle = header[0] == "theta_deg";

    std::vector<double> k, e;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        const std::string where = path + ":" + std::to_string(line_no);
        if (cells.size() != 2)
            throw ParseError(where + ": expected 2 cells");
        const double x = parse_double(cells[0], where + " " + header[0]);
        const double energy = parse_double(cells[1], where + " energy_mev");
        if (by_angle) {
            // the row's energy is the bare cavity dip at that angle, so the
            // probed wavevector follows directly from the geometry
            const disp::GeometryParams geom{n_prop, x};
            k.push_back(disp::k_of_angle_energy(geom, energy));
        } else {
            k.push_back(x);
        }
        e.push_back(energy);
    }
    try {
        return disp::CavityModel::tabulated(std::move(k), std::move(e));
    } catch (const DomainError& err) {
        throw ParseError(path + ": " + err.what());
    }
}

void write_table_csv(const std::string& path, std::span<const std::string> header,
                     std::span<const std::vector<double>> rows) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write table '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_sig(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
}

// ------------------------------------------------------------------ JSON ---

json result_envelope(const std::string& command, const RunConfig& cfg) {
    json j;
    j["tool"] = "polarfit";
    j["version"] = kVersion;
    j["command"] = command;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    j["timestamp"] = stamp;
    j["config"] = config_to_json(cfg);
    j["tolerances"] = json{{"pairing_residual_mev", Tolerances{}.pairing_residual},
                           {"angle_solve_mev", 1e-8},
                           {"serialization_sig_digits", 12}};
    return j;
}

json curve_to_json(const disp::DispersionCurve& curve) {
    json j;
    j["domain"] = curve.domain == disp::DispersionCurve::Domain::Angle
                      ? "angle" : "wavevector";
    j["partial"] = curve.partial();
    json pts = json::array();
    for (const auto& pt : curve.points) {
        json p;
        if (pt.theta_deg) p["theta_deg"] = round_sig(*pt.theta_deg);
        if (pt.k) p["k_per_nm"] = round_sig(*pt.k);
        p["energy_mev"] = round_sig(pt.energy);
        p["branch"] = disp::to_string(pt.branch);
        pts.push_back(p);
    }
    j["points"] = pts;
    if (curve.partial()) {
        json fails = json::array();
        for (const auto& f : curve.failures)
            fails.push_back(json{{"abscissa", round_sig(f.abscissa)},
                                 {"branch", disp::to_string(f.branch)},
                                 {"message", f.message}});
        j["failures"] = fails;
    }
    return j;
}

json fit_result_to_json(const fit::FitResult& result) {
    json j;
    j["variant"] = model::to_string(result.variant);
    j["omega_r_star_mev"] = round_sig(result.omega_r_star);
    j["rms_star_mev"] = round_sig(result.rms_star);
    j["n_points_used"] = result.n_points_used;
    if (!result.warnings.empty()) {
        json w = json::array();
        for (const auto& warning : result.warnings)
            w.push_back(json{{"kind", warning.kind == fit::FitWarning::Kind::BoundaryMinimum
                                          ? "boundary_minimum" : "ambiguous_minimum"},
                             {"detail", warning.detail}});
        j["warnings"] = w;
    }
    j["fitted_curve"] = curve_to_json(result.fitted_curve);
    return j;
}

} // namespace polarfit::io
