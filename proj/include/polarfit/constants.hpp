// constants.hpp — physical constants and shared numerical tolerances

#pragma once

namespace polarfit {

// hbar*c in meV*nm (CODATA). The single source for angle<->wavevector and
// cavity dispersion conversions; all energies in this library are meV.
inline constexpr double kHbarC = 197326.98;

// Residual thresholds used by the diagonalization self-checks. Overridable
// per call for stress tests.
struct Tolerances {
    double pairing_residual = 1e-9;   // max |E_i + E_j| for a +/- pair, meV
    double imag_part = 1e-9;          // allowed Im(E) per unit of matrix norm
    double degeneracy = 1e-9;         // branch-ordering tie threshold, meV
};

} // namespace polarfit
