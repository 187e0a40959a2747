#include "polarfit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polarfit/errors.hpp"
#include "polarfit/goldensection.hpp"

namespace polarfit::fit {

const char* to_string(FitDomain d) {
    return d == FitDomain::Angle ? "angle" : "wavevector";
}

FitDomain fit_domain_from_string(const std::string& s) {
    if (s == "angle") return FitDomain::Angle;
    if (s == "wavevector") return FitDomain::Wavevector;
    throw DomainError("unknown fit domain '" + s + "' (expected angle | wavevector)");
}

void FitConfig::validate() const {
    if (!(omega_r_low >= 0.0))
        throw DomainError("FitConfig: omega_r_low must be >= 0");
    if (!(omega_r_high > omega_r_low))
        throw DomainError("FitConfig: omega_r_high must exceed omega_r_low");
    if (coarse_grid_points < 16)
        throw DomainError("FitConfig: coarse_grid_points must be >= 16, got " +
                          std::to_string(coarse_grid_points));
    if (!(refine_tolerance > 0.0))
        throw DomainError("FitConfig: refine_tolerance must be > 0");
}

namespace {

double model_energy(const disp::SystemParams& params, model::Variant variant,
                    FitDomain domain, const disp::DispersionPoint& pt) {
    if (domain == FitDomain::Angle) {
        if (!pt.theta_deg)
            throw DomainError("rms_deviation: data point lacks an angle in angle domain");
        const disp::GeometryParams geom{params.n_prop, *pt.theta_deg};
        return disp::branch_energy_at_angle(params, variant, geom, pt.branch);
    }
    if (!pt.k)
        throw DomainError("rms_deviation: data point lacks a wavevector in wavevector domain");
    return disp::branch_energy_at_k(params, variant, *pt.k, pt.branch);
}

} // namespace

double rms_deviation(std::span<const disp::DispersionPoint> data,
                     const disp::SystemParams& params, model::Variant variant,
                     FitDomain domain) {
    if (data.empty())
        throw DomainError("rms_deviation: no data points");
    for (std::size_t i = 0; i < data.size(); ++i) {
        const bool has_abscissa = domain == FitDomain::Angle
                                      ? data[i].theta_deg.has_value()
                                      : data[i].k.has_value();
        if (!has_abscissa)
            throw DomainError("rms_deviation: point " + std::to_string(i + 1) +
                              " lacks a " +
                              (domain == FitDomain::Angle ? "theta_deg" : "k_per_nm") +
                              std::string(" abscissa in the ") + to_string(domain) +
                              " domain");
    }

    double sum_sq = 0.0;
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < data.size(); ++i) {
        try {
            const double e = model_energy(params, variant, domain, data[i]);
            const double r = e - data[i].energy;
            sum_sq += r * r;
        } catch (const Error& err) {
            std::ostringstream os;
            os << "point " << i + 1 << " (" << to_string(data[i].branch);
            if (data[i].theta_deg) os << ", theta=" << *data[i].theta_deg << " deg";
            if (data[i].k) os << ", k=" << *data[i].k << " /nm";
            os << "): " << err.what();
            bad.push_back(os.str());
        }
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "rms_deviation: " << bad.size() << " unresolvable point(s):";
        for (const auto& b : bad) os << "\n  " << b;
        throw BracketError(os.str());
    }
    return std::sqrt(sum_sq / (double)data.size());
}

std::vector<FitWarning> analyze_coarse_scan(
    std::span<const std::pair<double, double>> samples) {
    std::vector<FitWarning> warnings;
    if (samples.size() < 3) return warnings;

    std::size_t best = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].second < samples[best].second) best = i;

    if (best == 0 || best + 1 == samples.size()) {
        std::ostringstream os;
        os << "coarse minimum at the " << (best == 0 ? "lower" : "upper")
           << " bound omega_r = " << samples[best].first
           << " meV; widen the scan range";
        warnings.push_back({FitWarning::Kind::BoundaryMinimum, os.str()});
    }

    // interior local minima within 5% of the best value
    std::vector<double> contenders;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        if (samples[i].second <= samples[i - 1].second &&
            samples[i].second <= samples[i + 1].second &&
            samples[i].second <= 1.05 * samples[best].second)
            contenders.push_back(samples[i].first);
    }
    if (contenders.size() > 1) {
        std::ostringstream os;
        os << "ambiguous fit: " << contenders.size()
           << " coarse minima within 5% of each other at omega_r =";
        for (double w : contenders) os << " " << w;
        os << " meV";
        warnings.push_back({FitWarning::Kind::AmbiguousMinimum, os.str()});
    }
    return warnings;
}

FitResult fit_rabi(std::span<const disp::DispersionPoint> data,
                   disp::SystemParams params, const FitConfig& config) {
    config.validate();
    if (data.empty())
        throw DomainError("fit_rabi: no data points");

    const auto objective = [&](double omega_r) {
        params.coupling.omega_r_res = omega_r;
        return rms_deviation(data, params, config.variant, config.domain);
    };

    FitResult result;
    result.variant = config.variant;
    result.n_points_used = data.size();

    // coarse scan
    std::vector<std::pair<double, double>> coarse;
    coarse.reserve(config.coarse_grid_points);
    const double step = (config.omega_r_high - config.omega_r_low) /
                        (config.coarse_grid_points - 1);
    std::size_t best = 0;
    for (int i = 0; i < config.coarse_grid_points; ++i) {
        const double w = config.omega_r_low + step * i;
        coarse.emplace_back(w, objective(w));
        if (coarse[i].second < coarse[best].second) best = i;
    }
    result.warnings = analyze_coarse_scan(coarse);
    result.rms_curve = coarse;

    // golden-section refinement around the best coarse sample
    const double lo = coarse[best > 0 ? best - 1 : 0].first;
    const double hi = coarse[std::min(best + 1, coarse.size() - 1)].first;
    double star_w = coarse[best].first;
    double star_rms = coarse[best].second;
    if (hi > lo) {
        auto [w, rms] = golden_section_min(
            objective, lo, hi, config.refine_tolerance,
            [&](double x, double fx) { result.rms_curve.emplace_back(x, fx); });
        if (rms < star_rms) {
            star_w = w;
            star_rms = rms;
        }
    }
    result.omega_r_star = star_w;
    result.rms_star = star_rms;
    std::sort(result.rms_curve.begin(), result.rms_curve.end());

    // fitted curve over the data's own abscissae
    params.coupling.omega_r_res = star_w;
    std::vector<double> grid;
    grid.reserve(data.size());
    for (const auto& pt : data) {
        if (config.domain == FitDomain::Angle && pt.theta_deg)
            grid.push_back(*pt.theta_deg);
        else if (config.domain == FitDomain::Wavevector && pt.k)
            grid.push_back(*pt.k);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    result.fitted_curve =
        config.domain == FitDomain::Angle
            ? disp::dispersion_curve_angles(params, config.variant, grid)
            : disp::dispersion_curve_wavevectors(params, config.variant, grid);
    return result;
}

CompareOutcome compare_variants(std::span<const disp::DispersionPoint> data,
                                const disp::SystemParams& params,
                                const FitConfig& config) {
    config.validate();
    if (data.empty())
        throw DomainError("compare_variants: no data points");

    CompareOutcome outcome;
    for (model::Variant v : {model::Variant::Full, model::Variant::NoAntires,
                             model::Variant::NoAntiresNoDia}) {
        FitConfig cfg = config;
        cfg.variant = v;
        try {
            outcome.results.push_back(fit_rabi(data, params, cfg));
        } catch (const Error& err) {
            outcome.failures.push_back({v, err.what()});
        }
    }
    std::sort(outcome.results.begin(), outcome.results.end(),
              [](const FitResult& a, const FitResult& b) {
                  return a.rms_star < b.rms_star;
              });
    return outcome;
}

double DeviationRow::max_abs_pct() const {
    return std::max({std::abs(no_antires_lp_pct), std::abs(no_antires_up_pct),
                     std::abs(rwa_lp_pct), std::abs(rwa_up_pct)});
}

std::vector<DeviationRow> deviation_vs_coupling(disp::SystemParams params,
                                                std::span<const double> ratio_grid,
                                                double theta_res_deg) {
    if (ratio_grid.empty())
        throw DomainError("deviation_vs_coupling: empty ratio grid");
    for (double r : ratio_grid)
        if (!(r >= 0.0 && r <= 0.5))
            throw DomainError("deviation_vs_coupling: ratios must lie in [0, 0.5], got " +
                              std::to_string(r));

    const disp::GeometryParams geom{params.n_prop, theta_res_deg};
    std::vector<DeviationRow> rows;
    rows.reserve(ratio_grid.size());

    for (double r : ratio_grid) {
        DeviationRow row;
        row.ratio = r;
        params.coupling.omega_r_res = r * params.e_12;
        try {
            for (disp::Branch branch : {disp::Branch::LP, disp::Branch::UP}) {
                const double e_full = disp::branch_energy_at_angle(
                    params, model::Variant::Full, geom, branch);
                const double e_na = disp::branch_energy_at_angle(
                    params, model::Variant::NoAntires, geom, branch);
                const double e_rwa = disp::branch_energy_at_angle(
                    params, model::Variant::NoAntiresNoDia, geom, branch);
                const double dev_na = 100.0 * (e_na - e_full) / e_full;
                const double dev_rwa = 100.0 * (e_rwa - e_full) / e_full;
                if (branch == disp::Branch::LP) {
                    row.no_antires_lp_pct = dev_na;
                    row.rwa_lp_pct = dev_rwa;
                } else {
                    row.no_antires_up_pct = dev_na;
                    row.rwa_up_pct = dev_rwa;
                }
            }
        } catch (const Error& err) {
            row = DeviationRow{};
            row.ratio = r;
            row.error = err.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace polarfit::fit
