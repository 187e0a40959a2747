#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "polarfit/errors.hpp"
#include "polarfit/fock.hpp"

using namespace polarfit;
using model::Variant;

namespace {

int total_quanta(int index, int n_max_matter) {
    const int cols = n_max_matter + 1;
    return index / cols + index % cols;
}

} // namespace

TEST_CASE("fock hamiltonian: decoupled limit is diagonal with the photon zero point") {
    const model::ModeInputs in{140.0, 152.0, 0.0, 0.0};
    fock::FockConfig cfg;
    cfg.n_max_photon = 5;
    cfg.n_max_matter = 4;
    const Eigen::MatrixXcd h = fock::build_fock_hamiltonian(in, Variant::Full, cfg);

    for (int na = 0; na <= 5; ++na)
        for (int nb = 0; nb <= 4; ++nb) {
            const int i = na * 5 + nb;
            CHECK(h(i, i).real() ==
                  doctest::Approx(140.0 * (na + 0.5) + 152.0 * nb).epsilon(1e-15));
        }
    Eigen::MatrixXcd off = h;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fock hamiltonian: number conservation without the anti-resonant terms") {
    const model::ModeInputs in{152.0, 152.0, 16.5, 1.7911184210526316};
    fock::FockConfig cfg;
    cfg.n_max_photon = 6;
    cfg.n_max_matter = 6;
    const Eigen::MatrixXcd h = fock::build_fock_hamiltonian(in, Variant::NoAntires, cfg);
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j)
            if (total_quanta(i, 6) != total_quanta(j, 6))
                CHECK(h(i, j) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("fock hamiltonian: hermitian, and parity sectors never mix") {
    const model::ModeInputs in{160.0, 152.0, 30.0, 5.921052631578947};
    fock::FockConfig cfg;
    cfg.n_max_photon = 8;
    cfg.n_max_matter = 8;
    const Eigen::MatrixXcd h = fock::build_fock_hamiltonian(in, Variant::Full, cfg);

    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    double cross = 0.0;
    for (int i = 0; i < h.rows(); ++i)
        for (int j = 0; j < h.cols(); ++j)
            if (total_quanta(i, 8) % 2 != total_quanta(j, 8) % 2)
                cross += std::abs(h(i, j));
    CHECK(cross == 0.0);
}

TEST_CASE("fock hamiltonian: dimension guard") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 1100;
    cfg.n_max_matter = 1100;
    CHECK_THROWS_AS(fock::build_fock_hamiltonian(
                        model::ModeInputs{152.0, 152.0, 1.0, 0.0}, Variant::Full, cfg),
                    DomainError);
    cfg.n_max_photon = 3;  // below the minimum
    cfg.n_max_matter = 16;
    CHECK_THROWS_AS(fock::build_fock_hamiltonian(
                        model::ModeInputs{152.0, 152.0, 1.0, 0.0}, Variant::Full, cfg),
                    DomainError);
}

TEST_CASE("oracle: decoupled limit") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 8;
    cfg.n_max_matter = 8;
    const fock::OracleResult r = fock::oracle_spectrum(
        model::ModeInputs{140.0, 152.0, 0.0, 0.0}, Variant::Full, cfg);
    CHECK(r.e_lp == doctest::Approx(140.0).epsilon(1e-12));
    CHECK(r.e_up == doctest::Approx(152.0).epsilon(1e-12));
    CHECK(r.n_photon_gs == 0.0);
    CHECK(r.n_matter_gs == 0.0);
    CHECK(r.converged);
}

TEST_CASE("oracle: rotating-wave block is exact at any cutoff") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 6;
    cfg.n_max_matter = 6;
    const fock::OracleResult r = fock::oracle_spectrum(
        model::ModeInputs{152.0, 152.0, 16.5, 0.0}, Variant::NoAntiresNoDia, cfg);
    const auto [lp, up] = model::rwa_eigenvalues(152.0, 152.0, 16.5);
    CHECK(r.e_lp == doctest::Approx(lp).epsilon(1e-10));
    CHECK(r.e_up == doctest::Approx(up).epsilon(1e-10));
    CHECK(r.n_photon_gs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.n_matter_gs == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("oracle vs bogoliubov: full variant across coupling and detuning") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 16;
    cfg.n_max_matter = 16;
    cfg.convergence_tol = 1e-7;
    for (double ratio : {0.05, 0.11}) {
        for (double e_cav : {132.0, 152.0, 172.0}) {
            CAPTURE(ratio);
            CAPTURE(e_cav);
            const model::ModeInputs in =
                model::make_mode_inputs(e_cav, 152.0, ratio * 152.0);
            const model::PolaritonModes modes = model::diagonalize(in, Variant::Full);
            const model::GroundStatePopulations pops =
                model::ground_state_populations(modes);
            const fock::OracleResult r =
                fock::oracle_spectrum(in, Variant::Full, cfg);
            CHECK(r.converged);
            CHECK(std::abs(r.e_lp - modes.e_lp) < 1e-6);
            CHECK(std::abs(r.e_up - modes.e_up) < 1e-6);
            CHECK(std::abs(r.n_photon_gs - pops.n_photon) < 1e-6);
            CHECK(std::abs(r.n_matter_gs - pops.n_matter) < 1e-6);
        }
    }
}

TEST_CASE("oracle: detuned weak coupling skips the multi-LP odd states") {
    // e_up must be the single upper-polariton excitation, not 3x or 5x the
    // lower branch, which sit below it at this detuning
    fock::FockConfig cfg;
    cfg.n_max_photon = 12;
    cfg.n_max_matter = 12;
    const model::ModeInputs in = model::make_mode_inputs(40.0, 400.0, 6.0);
    const fock::OracleResult r = fock::oracle_spectrum(in, Variant::Full, cfg);
    const model::PolaritonModes modes = model::diagonalize(in, Variant::Full);
    CHECK(std::abs(r.e_lp - modes.e_lp) < 1e-6);
    CHECK(std::abs(r.e_up - modes.e_up) < 1e-6);
    CHECK(r.e_up > 3.0 * r.e_lp);  // the skipped states were really in between
}

TEST_CASE("oracle: cutoff ladder converges monotonically") {
    const model::ModeInputs in = model::make_mode_inputs(152.0, 152.0, 45.6);
    const model::PolaritonModes exact = model::diagonalize(in, Variant::Full);

    double prev_err = 1e30;
    for (int cutoff : {8, 12, 16, 20}) {
        fock::FockConfig cfg;
        cfg.n_max_photon = cutoff;
        cfg.n_max_matter = cutoff;
        cfg.convergence_tol = 1.0;  // no ladder throw; we track the error ourselves
        const fock::OracleResult r = fock::oracle_spectrum(in, Variant::Full, cfg);
        const double err =
            std::max(std::abs(r.e_lp - exact.e_lp), std::abs(r.e_up - exact.e_up));
        // monotone until the dense-solver noise floor
        CHECK(err <= std::max(prev_err, 1e-10));
        prev_err = err;
    }
    CHECK(prev_err < 1e-8);
}

TEST_CASE("oracle: ground state photon number positive only with anomalous terms") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 12;
    cfg.n_max_matter = 12;
    const model::ModeInputs in = model::make_mode_inputs(152.0, 152.0, 30.0);

    const fock::OracleResult full = fock::oracle_spectrum(in, Variant::Full, cfg);
    CHECK(full.n_photon_gs > 1e-4);
    CHECK(full.n_matter_gs > 1e-4);

    const fock::OracleResult na = fock::oracle_spectrum(in, Variant::NoAntires, cfg);
    CHECK(na.n_photon_gs == doctest::Approx(0.0).epsilon(1e-14));
    const fock::OracleResult rwa =
        fock::oracle_spectrum(in, Variant::NoAntiresNoDia, cfg);
    CHECK(rwa.n_photon_gs == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("oracle: unreachable tolerance raises a convergence error with both estimates") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 8;
    cfg.n_max_matter = 8;
    cfg.convergence_tol = 1e-18;
    const model::ModeInputs in = model::make_mode_inputs(152.0, 152.0, 45.6);
    CHECK_THROWS_AS(fock::oracle_spectrum(in, Variant::Full, cfg), ConvergenceError);
    try {
        fock::oracle_spectrum(in, Variant::Full, cfg);
    } catch (const ConvergenceError& err) {
        const std::string what = err.what();
        CHECK(what.find("at cutoffs (8,8)") != std::string::npos);
        CHECK(what.find("at +4") != std::string::npos);
    }
}

TEST_CASE("oracle: sparse path above the dense sector limit matches bogoliubov") {
    fock::FockConfig cfg;
    cfg.n_max_photon = 75;  // sectors of ~2900 states force the Lanczos path
    cfg.n_max_matter = 75;
    cfg.convergence_tol = 1e-6;
    const model::ModeInputs in = model::make_mode_inputs(152.0, 152.0, 0.2 * 152.0);
    const fock::OracleResult r = fock::oracle_spectrum(in, Variant::Full, cfg);
    const model::PolaritonModes modes = model::diagonalize(in, Variant::Full);
    const model::GroundStatePopulations pops = model::ground_state_populations(modes);
    CHECK(std::abs(r.e_lp - modes.e_lp) < 1e-6);
    CHECK(std::abs(r.e_up - modes.e_up) < 1e-6);
    CHECK(std::abs(r.n_photon_gs - pops.n_photon) < 1e-6);
    CHECK(std::abs(r.n_matter_gs - pops.n_matter) < 1e-6);
}
