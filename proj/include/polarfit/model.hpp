// model.hpp — two-mode cavity/intersubband Hamiltonian: construction and
// Hopfield-Bogoliubov diagonalization.
//
// The quadratic Hamiltonian per in-plane wavevector couples one cavity-photon
// mode a_k and one bright intersubband-excitation mode b_k. Three variants are
// supported, dropping terms from the outside in:
//
//   Full          : resonant exchange + diamagnetic photon shift + anomalous
//                   (pair-creating) terms at opposite wavevectors
//   NoAntires     : resonant exchange + diamagnetic shift (number conserving)
//   NoAntiresNoDia: resonant exchange only (the rotating-wave approximation)
//
// Energies are meV throughout, with hbar folded into the numbers.

#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "polarfit/constants.hpp"

namespace polarfit::model {

enum class Variant { Full, NoAntires, NoAntiresNoDia };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Per-wavevector scalar inputs of the two-mode problem.
struct ModeInputs {
    double e_cav = 0.0;   // bare cavity photon energy at this k, meV
    double e_12 = 0.0;    // bare intersubband transition energy, meV
    double omega_r = 0.0; // vacuum Rabi energy at this k, meV
    double d_dia = 0.0;   // diamagnetic energy, meV

    // Throws DomainError unless e_cav > 0, e_12 > 0, omega_r >= 0, d_dia >= 0.
    void validate() const;
};

// Default diamagnetic rule: d_dia = omega_r^2 / e_12.
double default_dia(double omega_r, double e_12);

// ModeInputs with the default diamagnetic rule applied.
ModeInputs make_mode_inputs(double e_cav, double e_12, double omega_r);

// Bogoliubov coefficients of one polariton branch in the operator basis
// (a_k, b_k, a†_{-k}, b†_{-k}). The anomalous entries mix creation into
// annihilation and vanish identically for the number-conserving variants.
struct BranchCoefficients {
    std::complex<double> photon;       // normal photon weight
    std::complex<double> matter;       // normal matter weight
    std::complex<double> photon_anom;  // anomalous photon weight
    std::complex<double> matter_anom;  // anomalous matter weight

    // |photon|^2 + |matter|^2 - |photon_anom|^2 - |matter_anom|^2; equals 1
    // for a properly normalized branch.
    double symplectic_norm() const;
};

// Result of diagonalizing one k-point: the two positive-frequency branches.
struct PolaritonModes {
    double e_lp = 0.0;  // lower polariton, meV
    double e_up = 0.0;  // upper polariton, meV
    BranchCoefficients coeff_lp;
    BranchCoefficients coeff_up;
};

// Expected number of virtual quanta per mode pair in the interacting ground
// state (nonzero only when the anomalous terms are kept).
struct GroundStatePopulations {
    double n_photon = 0.0;
    double n_matter = 0.0;
};

// Dynamical (Hopfield-Bogoliubov) matrix M from the Heisenberg equations of
// motion i d/dt v = M v for v = (a_k, b_k, a†_{-k}, b†_{-k}). The diamagnetic
// term shifts the diagonal photon entry by 2*d_dia; in the Full variant it
// also contributes anomalous photon-photon entries of magnitude 2*d_dia, and
// the anti-resonant exchange fills the remaining off-diagonal block.
Eigen::Matrix4cd build_bogoliubov_matrix(const ModeInputs& inputs, Variant variant);

// Positive-frequency spectrum and Bogoliubov coefficients.
//
// The Full variant runs a general complex eigensolver on the 4x4 dynamical
// matrix and classifies eigenvectors by the sign of their symplectic norm;
// the reduced variants diagonalize the 2x2 number-conserving block, so their
// anomalous coefficients are exactly zero. Branches are sorted ascending,
// coefficient phases fixed so the leading normal component is real and
// non-negative; exactly degenerate branches are ordered photon-like first.
//
// Throws InstabilityError when a squared eigenfrequency is negative (mode
// softening; reachable only when d_dia is forced below omega_r^2/e_12).
PolaritonModes diagonalize(const ModeInputs& inputs, Variant variant,
                           const Tolerances& tol = {});

// Closed-form spectrum of the rotating-wave Hamiltonian in the one-excitation
// subspace: (e_lp, e_up) = (e_cav+e_12)/2 -/+ sqrt((e_cav-e_12)^2 + 4 w^2)/2.
std::pair<double, double> rwa_eigenvalues(double e_cav, double e_12, double omega_r);

// Spectrum with the diamagnetic shift retained: identical to rwa_eigenvalues
// evaluated at the shifted photon energy e_cav + 2*d_dia.
std::pair<double, double> dia_rwa_eigenvalues(double e_cav, double e_12,
                                              double omega_r, double d_dia);

// Virtual populations of the squeezed ground state: per branch sums of the
// squared anomalous coefficients.
GroundStatePopulations ground_state_populations(const PolaritonModes& modes);

} // namespace polarfit::model
