// fit.hpp — single-parameter least-squares fitting of measured polariton
// dispersions, variant comparison, and the deviation-vs-coupling map.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polarfit/dispersion.hpp"
#include "polarfit/model.hpp"

namespace polarfit::fit {

enum class FitDomain { Angle, Wavevector };

const char* to_string(FitDomain d);
FitDomain fit_domain_from_string(const std::string& s);

struct FitConfig {
    double omega_r_low = 0.0;      // scan bounds for the Rabi energy, meV
    double omega_r_high = 50.0;
    int coarse_grid_points = 64;   // >= 16
    double refine_tolerance = 1e-3;  // golden-section bracket width, meV
    model::Variant variant = model::Variant::Full;
    FitDomain domain = FitDomain::Angle;

    void validate() const;
};

struct FitWarning {
    enum class Kind { BoundaryMinimum, AmbiguousMinimum };
    Kind kind;
    std::string detail;
};

struct FitResult {
    model::Variant variant = model::Variant::Full;
    double omega_r_star = 0.0;  // minimizer, meV
    double rms_star = 0.0;      // objective at the minimizer, meV
    // every (omega_r, rms) sample evaluated during the scan, sorted by omega_r
    std::vector<std::pair<double, double>> rms_curve;
    disp::DispersionCurve fitted_curve;
    std::size_t n_points_used = 0;
    std::vector<FitWarning> warnings;
};

// Pooled root-mean-square deviation between the data and the model, both
// branches in one mean. Points must carry the abscissa of the requested
// domain; solver failures are gathered and reported in one error.
double rms_deviation(std::span<const disp::DispersionPoint> data,
                     const disp::SystemParams& params, model::Variant variant,
                     FitDomain domain = FitDomain::Angle);

// Minimize rms_deviation over the Rabi energy: coarse grid scan, then
// golden-section refinement around the best coarse sample. The coupling
// strength inside `params` is the scanned parameter; its incoming value is
// ignored.
FitResult fit_rabi(std::span<const disp::DispersionPoint> data,
                   disp::SystemParams params, const FitConfig& config);

struct VariantFailure {
    model::Variant variant;
    std::string message;
};

struct CompareOutcome {
    std::vector<FitResult> results;     // sorted by rms_star, best first
    std::vector<VariantFailure> failures;
};

// fit_rabi for all three variants under one config (config.variant ignored).
CompareOutcome compare_variants(std::span<const disp::DispersionPoint> data,
                                const disp::SystemParams& params,
                                const FitConfig& config);

// One row of the deviation map: percent deviation of each reduced variant
// from the full Hamiltonian, per branch, at fixed internal angle.
struct DeviationRow {
    double ratio = 0.0;              // omega_r / e_12
    double no_antires_lp_pct = 0.0;
    double no_antires_up_pct = 0.0;
    double rwa_lp_pct = 0.0;         // no_antires_no_dia
    double rwa_up_pct = 0.0;
    std::string error;               // non-empty when this ratio failed

    double max_abs_pct() const;
};

// Fixed-angle deviation of the reduced variants vs the full Hamiltonian over
// a grid of coupling ratios in [0, 0.5]. The cavity inside `params` must be
// calibrated so that resonance occurs at theta_res_deg. Per-ratio solver
// failures produce rows with the error field set.
std::vector<DeviationRow> deviation_vs_coupling(disp::SystemParams params,
                                                std::span<const double> ratio_grid,
                                                double theta_res_deg);

// Local-minima analysis of a coarse scan: flags a minimum on the boundary and
// multiple local minima within 5% of the best. Exposed for direct testing.
std::vector<FitWarning> analyze_coarse_scan(
    std::span<const std::pair<double, double>> samples);

} // namespace polarfit::fit
