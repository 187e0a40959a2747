// io.hpp — run configuration, CSV ingestion/serialization, and the JSON
// result document helpers behind the command-line interface.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarfit/dispersion.hpp"
#include "polarfit/fit.hpp"

namespace polarfit::io {

using json = nlohmann::ordered_json;

enum class CavityKind { Parametric, Tabulated };

// Flat key/value configuration with [system], [fit], [run] and [output]
// sections. Unknown keys are rejected. Every field has a documented default
// (see README); a minimal file may set nothing but e_12.
struct RunConfig {
    // [system]
    double e_12 = 152.0;            // transition energy, meV
    double n_prop = 3.3;            // propagation-medium index
    double theta_deg = 70.0;        // default probe angle, degrees
    CavityKind cavity_kind = CavityKind::Parametric;
    std::optional<double> cavity_e_z;        // explicit confinement energy, meV
    double cavity_n = 3.3;                   // effective cavity index
    double cavity_resonance_theta = 60.0;    // used when cavity_e_z unset
    std::string cavity_table;                // CSV path for tabulated models
    disp::CouplingModel::Kind coupling_kind = disp::CouplingModel::Kind::Constant;
    double omega_r = 16.5;                   // Rabi energy at resonance, meV
    std::optional<double> d_dia;             // diamagnetic override, meV

    // [fit]
    fit::FitConfig fit;

    // [run]
    unsigned threads = 1;

    // [output]
    std::string out_dir;            // empty: POLARFIT_OUTDIR or "."
    bool plot_script = false;

    // Materialize the physics configuration (loads the cavity table for
    // tabulated models, relative to base_dir when given).
    disp::SystemParams system_params(const std::string& base_dir = "") const;
};

// Strict parse: unknown section or key, malformed value, or an invariant
// violation raises ParseError with line/key context. Referenced files must
// exist and parse.
RunConfig parse_config(const std::string& path);

// Inverse of parse_config: writes every effective key. parse_config on the
// output reproduces the config.
void write_config(const RunConfig& config, const std::string& path);

json config_to_json(const RunConfig& config);
RunConfig config_from_json(const json& j);

// Dispersion data CSV. Required columns: energy_mev, branch, and at least one
// of theta_deg / k_per_nm. Rows are validated individually; both branches
// must be present.
std::vector<disp::DispersionPoint> load_dispersion_csv(const std::string& path);

// Writes theta_deg and/or k_per_nm (when any point carries them), energy_mev
// and branch, 12 significant digits. load_dispersion_csv inverts it.
void save_dispersion_csv(std::span<const disp::DispersionPoint> points,
                         const std::string& path);

// Bare-cavity table: `k_per_nm,energy_mev`, or `theta_deg,energy_mev` with
// each row converted through k = E n_prop sin(theta) / (hbar c).
disp::CavityModel load_cavity_csv(const std::string& path, double n_prop);

// Plain numeric table with a header row, 12 significant digits per cell.
void write_table_csv(const std::string& path, std::span<const std::string> header,
                     std::span<const std::vector<double>> rows);

// Round to 12 significant digits: the serialization precision of every
// numeric field in result documents and CSV files.
double round_sig(double v);
std::string format_sig(double v);

// Common envelope of every result document: tool name/version, command,
// timestamp, echoed effective configuration, and the library tolerances.
json result_envelope(const std::string& command, const RunConfig& config);

// Result-document fragments.
json curve_to_json(const disp::DispersionCurve& curve);
json fit_result_to_json(const fit::FitResult& result);

} // namespace polarfit::io
