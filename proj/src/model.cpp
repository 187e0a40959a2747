#include "polarfit/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "polarfit/errors.hpp"

namespace polarfit::model {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::string describe(const ModeInputs& in) {
    std::ostringstream os;
    os << "e_cav=" << in.e_cav << " e_12=" << in.e_12
       << " omega_r=" << in.omega_r << " d_dia=" << in.d_dia;
    return os.str();
}

// Phase convention: leading normal component real and non-negative. The
// photon weight decides unless it is (numerically) zero, in which case the
// matter weight does.
void fix_phase(Eigen::Vector4cd& v) {
    const std::complex<double> lead =
        std::abs(v(0)) > 1e-12 ? v(0) : v(1);
    const double mag = std::abs(lead);
    if (mag == 0.0) return;
    v *= std::conj(lead) / mag;
    // scrub the residual imaginary dust on the leading entry
    if (std::abs(v(0)) > 1e-12) v(0) = std::complex<double>(std::abs(v(0)), 0.0);
}

BranchCoefficients to_coefficients(const Eigen::Vector4cd& v) {
    return BranchCoefficients{v(0), v(1), v(2), v(3)};
}

// Diagonalize the 2x2 number-conserving block [e_cav_eff, i w; -i w, e_12].
// Used for the reduced variants, whose anomalous sector is exactly empty.
PolaritonModes diagonalize_block(double e_cav_eff, double e_12, double omega_r,
                                 const Tolerances& tol) {
    Eigen::Matrix2cd h;
    h << std::complex<double>(e_cav_eff, 0.0), kI * omega_r,
         -kI * omega_r, std::complex<double>(e_12, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error("diagonalize: 2x2 eigensolver failed");

    Eigen::Vector2d ev = solver.eigenvalues();  // ascending
    if (ev(0) <= 0.0)
        throw InstabilityError(
            "lower-polariton mode softened: eigenvalue " + std::to_string(ev(0)) +
            " meV <= 0 (omega_r exceeds the stable range for these inputs)");

    std::array<Eigen::Vector4cd, 2> vec;
    for (int j = 0; j < 2; ++j) {
        vec[j].setZero();
        vec[j](0) = solver.eigenvectors()(0, j);
        vec[j](1) = solver.eigenvectors()(1, j);
    }
    // exact degeneracy: photon-like branch first, by convention
    if (std::abs(ev(1) - ev(0)) <= tol.degeneracy &&
        std::norm(vec[1](0)) > std::norm(vec[0](0))) {
        std::swap(vec[0], vec[1]);
        std::swap(ev(0), ev(1));
    }
    fix_phase(vec[0]);
    fix_phase(vec[1]);

    PolaritonModes out;
    out.e_lp = ev(0);
    out.e_up = ev(1);
    out.coeff_lp = to_coefficients(vec[0]);
    out.coeff_up = to_coefficients(vec[1]);
    return out;
}

double symplectic_norm(const Eigen::Vector4cd& v) {
    return std::norm(v(0)) + std::norm(v(1)) - std::norm(v(2)) - std::norm(v(3));
}

PolaritonModes diagonalize_full(const Eigen::Matrix4cd& m, const ModeInputs& in,
                                const Tolerances& tol) {
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(m);
    if (solver.info() != Eigen::Success)
        throw Error("diagonalize: 4x4 eigensolver failed");

    // Backward error of the eigensolver scales with the matrix norm, so the
    // reality check must too.
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double imag_tol = tol.imag_part * scale * 16.0;

    struct Mode {
        double energy;
        Eigen::Vector4cd vec;
    };
    std::array<Mode, 2> physical;
    std::size_t n_physical = 0;
    std::array<double, 2> negatives{};
    std::size_t n_negative = 0;

    for (int j = 0; j < 4; ++j) {
        const std::complex<double> lambda = solver.eigenvalues()(j);
        if (std::abs(lambda.imag()) > imag_tol) {
            const char* branch =
                std::abs(lambda.real()) < in.e_12 ? "lower-polariton" : "upper-polariton";
            throw InstabilityError(
                std::string(branch) + " squared eigenfrequency went negative "
                "(complex eigenvalue " + std::to_string(lambda.real()) + " + " +
                std::to_string(lambda.imag()) + "i meV) for " + describe(in));
        }
        Eigen::Vector4cd v = solver.eigenvectors().col(j);
        const double s = symplectic_norm(v);
        if (s > 0.0) {
            if (n_physical < 2) {
                v /= std::sqrt(s);
                physical[n_physical++] = Mode{lambda.real(), v};
            } else {
                n_physical++;
            }
        } else if (n_negative < 2) {
            negatives[n_negative++] = lambda.real();
        }
    }
    if (n_physical != 2)
        throw InstabilityError(
            "expected 2 positive-norm modes, found " + std::to_string(n_physical) +
            " for " + describe(in));

    if (physical[0].energy > physical[1].energy)
        std::swap(physical[0], physical[1]);
    if (physical[0].energy <= 0.0)
        throw InstabilityError(
            "lower-polariton mode softened: eigenvalue " +
            std::to_string(physical[0].energy) + " meV <= 0 for " + describe(in));

    // +/- pairing self-check against the mirror eigenvalues
    double pairing = 0.0;
    for (const auto& mode : physical) {
        double best = std::abs(mode.energy + negatives[0]);
        if (n_negative > 1) best = std::min(best, std::abs(mode.energy + negatives[1]));
        pairing = std::max(pairing, best);
    }
    if (pairing > tol.pairing_residual * scale)
        throw Error("diagonalize: eigenvalue pairing residual " +
                    std::to_string(pairing) + " meV for " + describe(in));

    // tie-break exact degeneracies photon-like first
    if (std::abs(physical[1].energy - physical[0].energy) <= tol.degeneracy &&
        std::norm(physical[1].vec(0)) > std::norm(physical[0].vec(0)))
        std::swap(physical[0], physical[1]);

    fix_phase(physical[0].vec);
    fix_phase(physical[1].vec);

    PolaritonModes out;
    out.e_lp = physical[0].energy;
    out.e_up = physical[1].energy;
    out.coeff_lp = to_coefficients(physical[0].vec);
    out.coeff_up = to_coefficients(physical[1].vec);
    return out;
}

} // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::NoAntires: return "no_antires";
        case Variant::NoAntiresNoDia: return "no_antires_no_dia";
    }
    return "?";
}

Variant variant_from_string(const std::string& s) {
    if (s == "full") return Variant::Full;
    if (s == "no_antires") return Variant::NoAntires;
    if (s == "no_antires_no_dia") return Variant::NoAntiresNoDia;
    throw DomainError("unknown Hamiltonian variant '" + s +
                      "' (expected full | no_antires | no_antires_no_dia)");
}

void ModeInputs::validate() const {
    if (!(e_cav > 0.0))
        throw DomainError("ModeInputs: e_cav must be > 0, got " + std::to_string(e_cav));
    if (!(e_12 > 0.0))
        throw DomainError("ModeInputs: e_12 must be > 0, got " + std::to_string(e_12));
    if (!(omega_r >= 0.0))
        throw DomainError("ModeInputs: omega_r must be >= 0, got " + std::to_string(omega_r));
    if (!(d_dia >= 0.0))
        throw DomainError("ModeInputs: d_dia must be >= 0, got " + std::to_string(d_dia));
}

double default_dia(double omega_r, double e_12) {
    return omega_r * omega_r / e_12;
}

ModeInputs make_mode_inputs(double e_cav, double e_12, double omega_r) {
    ModeInputs in{e_cav, e_12, omega_r, default_dia(omega_r, e_12)};
    in.validate();
    return in;
}

double BranchCoefficients::symplectic_norm() const {
    return std::norm(photon) + std::norm(matter)
         - std::norm(photon_anom) - std::norm(matter_anom);
}

Eigen::Matrix4cd build_bogoliubov_matrix(const ModeInputs& in, Variant variant) {
    in.validate();
    const double d = variant == Variant::NoAntiresNoDia ? 0.0 : in.d_dia;
    const double shifted = in.e_cav + 2.0 * d;
    const double w = in.omega_r;

    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = shifted;
    m(0, 1) = kI * w;
    m(1, 0) = -kI * w;
    m(1, 1) = in.e_12;
    m(2, 2) = -shifted;
    m(2, 3) = kI * w;
    m(3, 2) = -kI * w;
    m(3, 3) = -in.e_12;

    if (variant == Variant::Full) {
        m(0, 2) = 2.0 * in.d_dia;
        m(0, 3) = -kI * w;
        m(1, 2) = -kI * w;
        m(2, 0) = -2.0 * in.d_dia;
        m(2, 1) = -kI * w;
        m(3, 0) = -kI * w;
    }
    return m;
}

PolaritonModes diagonalize(const ModeInputs& in, Variant variant,
                           const Tolerances& tol) {
    in.validate();
    switch (variant) {
        case Variant::NoAntiresNoDia:
            return diagonalize_block(in.e_cav, in.e_12, in.omega_r, tol);
        case Variant::NoAntires:
            return diagonalize_block(in.e_cav + 2.0 * in.d_dia, in.e_12, in.omega_r, tol);
        case Variant::Full:
            return diagonalize_full(build_bogoliubov_matrix(in, variant), in, tol);
    }
    throw DomainError("diagonalize: bad variant");
}

std::pair<double, double> rwa_eigenvalues(double e_cav, double e_12, double omega_r) {
    if (!(e_cav > 0.0) || !(e_12 > 0.0) || !(omega_r >= 0.0))
        throw DomainError("rwa_eigenvalues: need e_cav, e_12 > 0 and omega_r >= 0");
    const double mean = 0.5 * (e_cav + e_12);
    const double delta = e_cav - e_12;
    const double split = 0.5 * std::sqrt(delta * delta + 4.0 * omega_r * omega_r);
    return {mean - split, mean + split};
}

std::pair<double, double> dia_rwa_eigenvalues(double e_cav, double e_12,
                                              double omega_r, double d_dia) {
    if (!(d_dia >= 0.0))
        throw DomainError("dia_rwa_eigenvalues: d_dia must be >= 0");
    return rwa_eigenvalues(e_cav + 2.0 * d_dia, e_12, omega_r);
}

GroundStatePopulations ground_state_populations(const PolaritonModes& modes) {
    GroundStatePopulations pops;
    pops.n_photon = std::norm(modes.coeff_lp.photon_anom) +
                    std::norm(modes.coeff_up.photon_anom);
    pops.n_matter = std::norm(modes.coeff_lp.matter_anom) +
                    std::norm(modes.coeff_up.matter_anom);
    return pops;
}

} // namespace polarfit::model
