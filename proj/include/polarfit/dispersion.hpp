// dispersion.hpp — cavity dispersion models, angle/wavevector geometry, and
// the polariton branch solvers at fixed k and at fixed internal angle.
//
// At fixed internal angle the probed in-plane wavevector depends on the
// detected energy, so the branch energy solves an implicit equation
// E = E_branch(k(theta, E)); both polariton dips measured at one angle sit at
// different k, which inflates the apparent splitting well beyond 2*omega_r.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "polarfit/model.hpp"
#include "polarfit/monotone_cubic.hpp"

namespace polarfit::disp {

// e_cav(k) = sqrt(e_z^2 + (hbar c k / n_cav)^2): confinement energy plus the
// in-plane light line of the guided mode.
struct ParametricCavity {
    double e_z = 0.0;    // confinement energy at k = 0, meV
    double n_cav = 0.0;  // effective cavity refractive index
};

class CavityModel {
public:
    static CavityModel parametric(double e_z, double n_cav);
    // Strictly increasing samples (k in 1/nm, energy in meV); >= 4 points.
    static CavityModel tabulated(std::vector<double> k, std::vector<double> energy);

    bool is_parametric() const { return std::holds_alternative<ParametricCavity>(impl_); }
    const ParametricCavity& parametric_params() const;

    // Bare cavity energy at k; TABULATED requests outside the table range
    // throw RangeError (no silent extrapolation).
    double energy_at(double k) const;

    // k range on which energy_at is defined.
    double k_min() const;
    double k_max() const;  // +inf for parametric

    // Unique k with energy_at(k) = e_12, by bracketed root finding; throws
    // ResonanceNotFoundError when the dispersion never reaches e_12.
    double resonant_k(double e_12) const;

private:
    struct Table {
        std::vector<double> k;
        std::vector<double> energy;
        MonotoneCubic interp;
    };
    std::variant<ParametricCavity, Table> impl_;
};

// Rabi-energy model: constant across k, or scaled as sqrt(e_12/e_cav(k))
// so that it equals omega_r_res at the resonant wavevector.
struct CouplingModel {
    enum class Kind { Constant, Scaled };
    Kind kind = Kind::Constant;
    double omega_r_res = 0.0;  // vacuum Rabi energy at the resonance point, meV

    double omega_r_at(double e_cav, double e_12) const;
};

struct GeometryParams {
    double n_prop = 0.0;       // refractive index of the propagation medium
    double theta_int = 0.0;    // internal incidence angle from the normal, degrees

    void validate() const;     // requires 0 < theta_int < 90 and n_prop > 1
};

// Full physics configuration of a sample: everything except the probe angle.
struct SystemParams {
    double e_12 = 0.0;         // bare transition energy, meV
    CavityModel cavity;
    CouplingModel coupling;
    double n_prop = 0.0;       // propagation-medium index used for angle probes
    // fixed diamagnetic energy in meV; unset applies d = omega_r^2/e_12
    std::optional<double> d_dia_override;
};

enum class Branch { LP, UP };

const char* to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct DispersionPoint {
    std::optional<double> theta_deg;  // internal angle, when known
    std::optional<double> k;          // in-plane wavevector in 1/nm, when known
    double energy = 0.0;              // meV
    Branch branch = Branch::LP;
};

struct CurveFailure {
    double abscissa = 0.0;
    Branch branch = Branch::LP;
    std::string message;
};

struct DispersionCurve {
    enum class Domain { Angle, Wavevector };
    Domain domain = Domain::Angle;
    std::vector<DispersionPoint> points;
    std::vector<CurveFailure> failures;

    bool partial() const { return !failures.empty(); }
};

// In-plane wavevector probed at energy E (meV) under the given geometry:
// k = E * n_prop * sin(theta) / (hbar c). Strictly increasing in both the
// energy and the angle.
double k_of_angle_energy(const GeometryParams& geom, double energy);

// ModeInputs assembled from the system at one wavevector.
model::ModeInputs mode_inputs_at_k(const SystemParams& params, double k);

// Branch energy at fixed in-plane wavevector.
double branch_energy_at_k(const SystemParams& params, model::Variant variant,
                          double k, Branch branch);

// Branch energy at fixed internal angle: solves E = E_branch(k(theta, E)) by
// bracketed root finding, starting from LP in (0.2 e_12, e_12) and UP in
// (e_12, 3 e_12) and widening adaptively. Converges to 1e-8 meV.
double branch_energy_at_angle(const SystemParams& params, model::Variant variant,
                              const GeometryParams& geom, Branch branch);

// Both branches over a grid. Per-point solver failures are collected in the
// result rather than aborting the sweep. `threads` > 1 evaluates points
// concurrently (they are independent); output order is deterministic.
DispersionCurve dispersion_curve_angles(const SystemParams& params,
                                        model::Variant variant,
                                        std::span<const double> theta_deg,
                                        unsigned threads = 1);
DispersionCurve dispersion_curve_wavevectors(const SystemParams& params,
                                             model::Variant variant,
                                             std::span<const double> k,
                                             unsigned threads = 1);

// Parametric cavity whose fixed-angle response crosses e_12 exactly at
// theta_res: e_z = e_12 * sqrt(1 - (n_prop/n_cav * sin(theta_res))^2).
CavityModel cavity_for_resonance_angle(double e_12, double theta_res_deg,
                                       double n_prop, double n_cav);

} // namespace polarfit::disp
