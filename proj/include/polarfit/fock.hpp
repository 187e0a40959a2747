// fock.hpp — brute-force verifier: exact diagonalization of the two-mode
// Hamiltonian on a truncated Fock basis.
//
// Independent of the Bogoliubov route in model.hpp: the Hamiltonian is
// assembled operator by operator on the product basis |n_a, n_b> and
// diagonalized numerically. Boson-number parity is conserved, so the ground
// state lives in the even sector and the one-excitation branches in the odd
// sector.

#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "polarfit/model.hpp"

namespace polarfit::fock {

struct FockConfig {
    int n_max_photon = 16;        // highest photon occupancy kept
    int n_max_matter = 16;        // highest matter occupancy kept
    double convergence_tol = 1e-7;  // ladder agreement required, meV / occupancy
};

struct OracleResult {
    double e_lp = 0.0;
    double e_up = 0.0;
    double n_photon_gs = 0.0;
    double n_matter_gs = 0.0;
    bool converged = false;
    // largest change of any reported quantity when the cutoffs grow by 4
    double ladder_delta = 0.0;
};

using SparseMatrixXcd = Eigen::SparseMatrix<std::complex<double>>;

// Hermitian matrix of the selected variant over |n_a, n_b> with
// n_a <= n_max_photon, n_b <= n_max_matter; basis index n_a*(n_max_matter+1)+n_b.
// The photon zero-point 1/2 and the diamagnetic zero-point constant are kept.
// Throws DomainError above 1e6 basis states.
SparseMatrixXcd build_fock_hamiltonian(const model::ModeInputs& inputs,
                                       model::Variant variant,
                                       const FockConfig& config);

// Excitation energies and ground-state populations at the configured cutoffs,
// cross-checked by re-running with both cutoffs + 4. Agreement within
// convergence_tol is required; otherwise a ConvergenceError carries both
// estimates. Values come from the larger run.
OracleResult oracle_spectrum(const model::ModeInputs& inputs,
                             model::Variant variant,
                             const FockConfig& config);

} // namespace polarfit::fock
