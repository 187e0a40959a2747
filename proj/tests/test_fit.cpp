#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "polarfit/dispersion.hpp"
#include "polarfit/errors.hpp"
#include "polarfit/fit.hpp"

using namespace polarfit;
using disp::Branch;
using model::Variant;

namespace {

disp::SystemParams paper_like_params(double omega_r = 16.5, double n_cav = 3.3) {
    disp::SystemParams p;
    p.e_12 = 152.0;
    p.n_prop = 3.3;
    p.cavity = disp::cavity_for_resonance_angle(152.0, 60.0, 3.3, n_cav);
    p.coupling = disp::CouplingModel{disp::CouplingModel::Kind::Constant, omega_r};
    return p;
}

// Synthetic measurement: both branches sampled across the fixed-angle
// anticrossing region (the minimum-splitting angle sits near 52 degrees for
// the 60-degree-resonant cavity).
std::vector<disp::DispersionPoint> synthetic_data(const disp::SystemParams& params,
                                                  Variant variant, double lo = 35.0,
                                                  double hi = 60.0, int n = 20) {
    std::vector<disp::DispersionPoint> data;
    for (Branch branch : {Branch::LP, Branch::UP}) {
        for (int i = 0; i < n; ++i) {
            const double theta = lo + (hi - lo) * i / (n - 1);
            const disp::GeometryParams geom{params.n_prop, theta};
            disp::DispersionPoint pt;
            pt.theta_deg = theta;
            pt.energy = disp::branch_energy_at_angle(params, variant, geom, branch);
            pt.branch = branch;
            data.push_back(pt);
        }
    }
    return data;
}

fit::FitConfig quick_config(Variant variant) {
    fit::FitConfig cfg;
    cfg.omega_r_low = 5.0;
    cfg.omega_r_high = 30.0;
    cfg.coarse_grid_points = 26;
    cfg.refine_tolerance = 1e-3;
    cfg.variant = variant;
    cfg.domain = fit::FitDomain::Angle;
    return cfg;
}

} // namespace

TEST_CASE("rms_deviation: exact data, constant offset, and variant mismatch") {
    const disp::SystemParams p = paper_like_params();
    std::vector<disp::DispersionPoint> data = synthetic_data(p, Variant::Full, 45, 60, 6);

    CHECK(fit::rms_deviation(data, p, Variant::Full) < 1e-8);

    std::vector<disp::DispersionPoint> shifted = data;
    for (auto& pt : shifted) pt.energy += 1.0;
    CHECK(fit::rms_deviation(shifted, p, Variant::Full) ==
          doctest::Approx(1.0).epsilon(1e-9));

    CHECK(fit::rms_deviation(data, p, Variant::NoAntiresNoDia) > 0.1);
}

TEST_CASE("rms_deviation: permutation and duplication invariance") {
    const disp::SystemParams probe = paper_like_params(14.0);
    const disp::SystemParams truth = paper_like_params(16.5);
    std::vector<disp::DispersionPoint> data =
        synthetic_data(truth, Variant::Full, 45, 60, 8);

    const double base = fit::rms_deviation(data, probe, Variant::Full);

    std::mt19937 rng(3);
    std::vector<disp::DispersionPoint> shuffled = data;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(fit::rms_deviation(shuffled, probe, Variant::Full) ==
          doctest::Approx(base).epsilon(1e-14));

    std::vector<disp::DispersionPoint> doubled = data;
    doubled.insert(doubled.end(), data.begin(), data.end());
    CHECK(fit::rms_deviation(doubled, probe, Variant::Full) ==
          doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("rms_deviation: domain errors and unresolvable points") {
    const disp::SystemParams p = paper_like_params();
    CHECK_THROWS_AS(fit::rms_deviation({}, p, Variant::Full), DomainError);

    disp::DispersionPoint no_theta;
    no_theta.k = 2e-3;
    no_theta.energy = 150.0;
    no_theta.branch = Branch::LP;
    std::vector<disp::DispersionPoint> missing{no_theta};
    CHECK_THROWS_AS(fit::rms_deviation(missing, p, Variant::Full, fit::FitDomain::Angle),
                    DomainError);
    CHECK_NOTHROW(fit::rms_deviation(missing, p, Variant::Full,
                                     fit::FitDomain::Wavevector));

    // a point outside a narrow tabulated window is reported by index
    disp::SystemParams narrow = p;
    const double k_res = p.cavity.resonant_k(152.0);
    std::vector<double> ks, es;
    for (int i = 0; i < 8; ++i) {
        ks.push_back(k_res * (0.9 + 0.025 * i));
        es.push_back(p.cavity.energy_at(ks.back()));
    }
    narrow.cavity = disp::CavityModel::tabulated(ks, es);
    disp::DispersionPoint inside;
    inside.k = k_res;
    inside.energy = 140.0;
    inside.branch = Branch::LP;
    disp::DispersionPoint outside;
    outside.k = 3.0 * k_res;
    outside.energy = 150.0;
    outside.branch = Branch::LP;
    std::vector<disp::DispersionPoint> mixed{inside, outside};
    try {
        fit::rms_deviation(mixed, narrow, Variant::Full, fit::FitDomain::Wavevector);
        FAIL("expected an error listing the offending point");
    } catch (const Error& err) {
        const std::string what = err.what();
        CHECK(what.find("point 2") != std::string::npos);
        CHECK(what.find("point 1") == std::string::npos);
    }
}

TEST_CASE("analyze_coarse_scan: boundary and ambiguity warnings") {
    using Sample = std::pair<double, double>;

    const std::vector<Sample> unimodal{{0, 9}, {1, 4}, {2, 1}, {3, 2}, {4, 7}};
    CHECK(fit::analyze_coarse_scan(unimodal).empty());

    const std::vector<Sample> at_edge{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    const auto edge_warnings = fit::analyze_coarse_scan(at_edge);
    REQUIRE(edge_warnings.size() == 1);
    CHECK(edge_warnings[0].kind == fit::FitWarning::Kind::BoundaryMinimum);

    const std::vector<Sample> bimodal{{0, 5}, {1, 1.00}, {2, 4}, {3, 1.02}, {4, 5}};
    const auto ambiguous = fit::analyze_coarse_scan(bimodal);
    REQUIRE(ambiguous.size() == 1);
    CHECK(ambiguous[0].kind == fit::FitWarning::Kind::AmbiguousMinimum);
    CHECK(ambiguous[0].detail.find("2 coarse minima") != std::string::npos);
}

TEST_CASE("fit_rabi: recovers the generating coupling") {
    const disp::SystemParams truth = paper_like_params(16.5);
    const std::vector<disp::DispersionPoint> data =
        synthetic_data(truth, Variant::Full, 35, 60, 10);

    const fit::FitResult result =
        fit::fit_rabi(data, paper_like_params(), quick_config(Variant::Full));
    CHECK(result.variant == Variant::Full);
    CHECK(result.omega_r_star == doctest::Approx(16.5).epsilon(2e-4));
    CHECK(result.rms_star < 5e-4);  // floor set by the 1e-3 refine tolerance
    CHECK(result.warnings.empty());
    CHECK(result.n_points_used == data.size());
    CHECK(result.fitted_curve.points.size() == 2 * 10);

    // the curve retains every evaluation, sorted, and the reported minimum
    // is the best sample seen
    CHECK(result.rms_curve.size() >= 26);
    CHECK(std::is_sorted(result.rms_curve.begin(), result.rms_curve.end()));
    double best = 1e30;
    for (const auto& [w, rms] : result.rms_curve) best = std::min(best, rms);
    CHECK(result.rms_star == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("fit_rabi: roundtrip identity holds for every variant") {
    for (Variant v : {Variant::Full, Variant::NoAntires, Variant::NoAntiresNoDia}) {
        CAPTURE(model::to_string(v));
        const disp::SystemParams truth = paper_like_params(16.5);
        const std::vector<disp::DispersionPoint> data =
            synthetic_data(truth, v, 40, 60, 8);
        const fit::FitResult result =
            fit::fit_rabi(data, paper_like_params(), quick_config(v));
        CHECK(std::abs(result.omega_r_star - 16.5) < quick_config(v).refine_tolerance);
        CHECK(result.rms_star < 5e-4);
    }
}

TEST_CASE("fit_rabi: boundary minimum warning when the truth is out of bounds") {
    const disp::SystemParams truth = paper_like_params(16.5);
    const std::vector<disp::DispersionPoint> data =
        synthetic_data(truth, Variant::Full, 40, 60, 6);

    fit::FitConfig cfg = quick_config(Variant::Full);
    cfg.omega_r_low = 20.0;
    cfg.omega_r_high = 40.0;
    const fit::FitResult result = fit::fit_rabi(data, paper_like_params(), cfg);
    REQUIRE(!result.warnings.empty());
    CHECK(result.warnings[0].kind == fit::FitWarning::Kind::BoundaryMinimum);
    CHECK(result.omega_r_star == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("fit_rabi: config validation") {
    const std::vector<disp::DispersionPoint> data =
        synthetic_data(paper_like_params(), Variant::Full, 45, 60, 4);
    fit::FitConfig cfg = quick_config(Variant::Full);
    cfg.coarse_grid_points = 8;
    CHECK_THROWS_AS(fit::fit_rabi(data, paper_like_params(), cfg), DomainError);
    cfg = quick_config(Variant::Full);
    cfg.omega_r_high = cfg.omega_r_low;
    CHECK_THROWS_AS(fit::fit_rabi(data, paper_like_params(), cfg), DomainError);
    CHECK_THROWS_AS(fit::fit_rabi({}, paper_like_params(), quick_config(Variant::Full)),
                    DomainError);
}

TEST_CASE("compare_variants: full wins on its own data, reduced fits degrade in order") {
    const disp::SystemParams truth = paper_like_params(16.5);  // ratio ~ 0.11
    const std::vector<disp::DispersionPoint> data =
        synthetic_data(truth, Variant::Full, 35, 60, 12);

    const fit::CompareOutcome outcome =
        fit::compare_variants(data, paper_like_params(), quick_config(Variant::Full));
    CHECK(outcome.failures.empty());
    REQUIRE(outcome.results.size() == 3);

    CHECK(outcome.results[0].variant == Variant::Full);
    CHECK(outcome.results[0].rms_star < 5e-4);
    CHECK(outcome.results[1].variant == Variant::NoAntires);
    CHECK(outcome.results[2].variant == Variant::NoAntiresNoDia);
    CHECK(outcome.results[1].rms_star < outcome.results[2].rms_star);

    // the rotating-wave fit lands at a smaller coupling, as measured
    CHECK(outcome.results[2].omega_r_star < 16.5);
    CHECK(outcome.results[2].rms_star > 1.0);
}

TEST_CASE("compare_variants: weak coupling makes the variants indistinguishable") {
    const disp::SystemParams truth = paper_like_params(0.01 * 152.0);
    const std::vector<disp::DispersionPoint> data =
        synthetic_data(truth, Variant::Full, 35, 60, 8);

    fit::FitConfig cfg = quick_config(Variant::Full);
    cfg.omega_r_low = 0.0;
    cfg.omega_r_high = 5.0;
    const fit::CompareOutcome outcome =
        fit::compare_variants(data, paper_like_params(), cfg);
    REQUIRE(outcome.results.size() == 3);
    for (const auto& r : outcome.results)
        CHECK(r.rms_star < 0.05);

    CHECK_THROWS_AS(fit::compare_variants({}, paper_like_params(), cfg), DomainError);
}

TEST_CASE("deviation_vs_coupling: zero at zero, monotone, ordered by severity") {
    const std::vector<double> ratios{0.0, 0.025, 0.05, 0.075, 0.1};
    const std::vector<fit::DeviationRow> rows =
        fit::deviation_vs_coupling(paper_like_params(0.0, 3.1), ratios, 60.0);
    REQUIRE(rows.size() == ratios.size());

    CHECK(rows[0].no_antires_lp_pct == 0.0);
    CHECK(rows[0].no_antires_up_pct == 0.0);
    CHECK(rows[0].rwa_lp_pct == 0.0);
    CHECK(rows[0].rwa_up_pct == 0.0);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].error.empty());
        // dropping more terms deviates more, branch by branch
        CHECK(std::abs(rows[i].no_antires_lp_pct) <= std::abs(rows[i].rwa_lp_pct));
        CHECK(std::abs(rows[i].no_antires_up_pct) <= std::abs(rows[i].rwa_up_pct));
        // monotone growth in the coupling ratio
        CHECK(std::abs(rows[i].rwa_lp_pct) > std::abs(rows[i - 1].rwa_lp_pct));
        CHECK(std::abs(rows[i].rwa_up_pct) > std::abs(rows[i - 1].rwa_up_pct));
        CHECK(rows[i].max_abs_pct() > rows[i - 1].max_abs_pct());
    }

    const std::vector<double> out_of_range{0.0, 0.6};
    CHECK_THROWS_AS(fit::deviation_vs_coupling(paper_like_params(), out_of_range, 60.0),
                    DomainError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(fit::deviation_vs_coupling(paper_like_params(), empty, 60.0),
                    DomainError);
}

TEST_CASE("deviation_vs_coupling: per-ratio failures are rows, not aborts") {
    // a five-point tabulated cavity that only covers the resonant crossing:
    // large ratios push the upper branch out of range
    disp::SystemParams p = paper_like_params();
    const double k_res = p.cavity.resonant_k(152.0);
    std::vector<double> ks, es;
    for (int i = 0; i < 5; ++i) {
        ks.push_back(k_res * (0.8 + 0.125 * i));
        es.push_back(p.cavity.energy_at(ks.back()));
    }
    p.cavity = disp::CavityModel::tabulated(ks, es);

    const std::vector<double> ratios{0.01, 0.3};
    const std::vector<fit::DeviationRow> rows =
        fit::deviation_vs_coupling(p, ratios, 60.0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error.empty());
    CHECK(!rows[1].error.empty());
    CHECK(rows[1].max_abs_pct() == 0.0);
}
