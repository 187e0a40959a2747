#include "polarfit/dispersion.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "polarfit/errors.hpp"
#include "polarfit/rootfind.hpp"

namespace polarfit::disp {

namespace {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

constexpr double kAngleSolveTol = 1e-8;   // meV, fixed-angle convergence
constexpr int kAngleSolveIters = 200;

} // namespace

// ---------------------------------------------------------------- cavity ---

CavityModel CavityModel::parametric(double e_z, double n_cav) {
    if (!(e_z > 0.0))
        throw DomainError("CavityModel: e_z must be > 0, got " + std::to_string(e_z));
    if (!(n_cav > 0.0))
        throw DomainError("CavityModel: n_cav must be > 0, got " + std::to_string(n_cav));
    CavityModel m;
    m.impl_ = ParametricCavity{e_z, n_cav};
    return m;
}

CavityModel CavityModel::tabulated(std::vector<double> k, std::vector<double> energy) {
    if (k.size() != energy.size())
        throw DomainError("CavityModel: k/energy size mismatch");
    if (!k.empty() && k.front() < 0.0)
        throw DomainError("CavityModel: wavevectors must be >= 0");
    for (std::size_t i = 0; i < energy.size(); ++i)
        if (!(energy[i] > 0.0))
            throw DomainError("CavityModel: tabulated energy must be > 0 at row " +
                              std::to_string(i + 1));
    CavityModel m;
    Table t;
    t.interp = MonotoneCubic(k, energy);  // checks >= 4 and strict ordering in k
    for (std::size_t i = 1; i < energy.size(); ++i)
        if (!(energy[i] > energy[i - 1]))
            throw DomainError("CavityModel: tabulated energies must increase with k "
                              "(violated at row " + std::to_string(i + 1) + ")");
    t.k = std::move(k);
    t.energy = std::move(energy);
    m.impl_ = std::move(t);
    return m;
}

const ParametricCavity& CavityModel::parametric_params() const {
    if (const auto* p = std::get_if<ParametricCavity>(&impl_)) return *p;
    throw DomainError("CavityModel: not a parametric model");
}

double CavityModel::energy_at(double k) const {
    if (k < 0.0)
        throw DomainError("CavityModel: k must be >= 0, got " + std::to_string(k));
    if (const auto* p = std::get_if<ParametricCavity>(&impl_)) {
        const double light = kHbarC * k / p->n_cav;
        return std::hypot(p->e_z, light);
    }
    const auto& t = std::get<Table>(impl_);
    return t.interp(k);
}

double CavityModel::k_min() const {
    if (std::holds_alternative<ParametricCavity>(impl_)) return 0.0;
    return std::get<Table>(impl_).k.front();
}

double CavityModel::k_max() const {
    if (std::holds_alternative<ParametricCavity>(impl_))
        return std::numeric_limits<double>::infinity();
    return std::get<Table>(impl_).k.back();
}

double CavityModel::resonant_k(double e_12) const {
    if (!(e_12 > 0.0))
        throw DomainError("resonant_k: e_12 must be > 0");

    double lo = k_min();
    double hi;
    if (const auto* p = std::get_if<ParametricCavity>(&impl_)) {
        if (e_12 < p->e_z)
            throw ResonanceNotFoundError(
                "resonant_k: e_12 = " + std::to_string(e_12) +
                " meV is below the cavity confinement energy " + std::to_string(p->e_z));
        if (e_12 == p->e_z) return 0.0;
        // bracket by doubling past the crossing of the closed form
        hi = p->n_cav * e_12 / kHbarC;
        while (energy_at(hi) < e_12) hi *= 2.0;
    } else {
        hi = k_max();
        const double e_lo = energy_at(lo), e_hi = energy_at(hi);
        if (e_12 < e_lo || e_12 > e_hi)
            throw ResonanceNotFoundError(
                "resonant_k: e_12 = " + std::to_string(e_12) +
                " meV outside the tabulated energy range [" + std::to_string(e_lo) +
                ", " + std::to_string(e_hi) + "]");
    }
    const auto f = [&](double k) { return energy_at(k) - e_12; };
    const double xtol = 1e-10 * std::max(hi, 1e-30);
    return brent_root(f, lo, hi, xtol);
}

// -------------------------------------------------------------- coupling ---

double CouplingModel::omega_r_at(double e_cav, double e_12) const {
    if (!(omega_r_res >= 0.0))
        throw DomainError("CouplingModel: omega_r_res must be >= 0");
    switch (kind) {
        case Kind::Constant: return omega_r_res;
        case Kind::Scaled: return omega_r_res * std::sqrt(e_12 / e_cav);
    }
    throw DomainError("CouplingModel: bad kind");
}

// -------------------------------------------------------------- geometry ---

void GeometryParams::validate() const {
    if (!(theta_int > 0.0 && theta_int < 90.0))
        throw DomainError("GeometryParams: theta_int must be in (0, 90) degrees, got " +
                          std::to_string(theta_int));
    if (!(n_prop > 1.0))
        throw DomainError("GeometryParams: n_prop must be > 1, got " +
                          std::to_string(n_prop));
}

const char* to_string(Branch b) { return b == Branch::LP ? "LP" : "UP"; }

Branch branch_from_string(const std::string& s) {
    if (s == "LP") return Branch::LP;
    if (s == "UP") return Branch::UP;
    throw DomainError("unknown branch '" + s + "' (expected LP or UP)");
}

double k_of_angle_energy(const GeometryParams& geom, double energy) {
    geom.validate();
    if (energy < 0.0)
        throw DomainError("k_of_angle_energy: energy must be >= 0");
    return energy * geom.n_prop * std::sin(deg_to_rad(geom.theta_int)) / kHbarC;
}

// --------------------------------------------------------------- solvers ---

model::ModeInputs mode_inputs_at_k(const SystemParams& params, double k) {
    const double e_cav = params.cavity.energy_at(k);
    const double omega_r = params.coupling.omega_r_at(e_cav, params.e_12);
    const double d_dia = params.d_dia_override
                             ? *params.d_dia_override
                             : model::default_dia(omega_r, params.e_12);
    model::ModeInputs in{e_cav, params.e_12, omega_r, d_dia};
    in.validate();
    return in;
}

double branch_energy_at_k(const SystemParams& params, model::Variant variant,
                          double k, Branch branch) {
    const model::PolaritonModes modes =
        model::diagonalize(mode_inputs_at_k(params, k), variant);
    return branch == Branch::LP ? modes.e_lp : modes.e_up;
}

namespace {

// Energy window on which k(theta, E) stays inside the cavity model's range,
// shrunk inward so boundary evaluations survive the k(E) rounding round trip.
std::pair<double, double> representable_window(const SystemParams& params,
                                               const GeometryParams& geom) {
    const double slope = geom.n_prop * std::sin(deg_to_rad(geom.theta_int)) / kHbarC;
    double lo = params.cavity.k_min() / slope * (1.0 + 1e-12);
    double hi = params.cavity.k_max() / slope * (1.0 - 1e-12);  // +inf for parametric
    return {lo, hi};
}

// Photon-line energy of the decoupled (omega_r = 0) problem. The diamagnetic
// terms survive at zero coupling when d_dia is overridden: the diagonal part
// shifts the photon by 2d and the Full variant's anomalous part squeezes it
// to sqrt((e_cav+2d)^2 - 4d^2).
double photon_line_energy(double e_cav, double d, model::Variant variant) {
    switch (variant) {
        case model::Variant::NoAntiresNoDia: return e_cav;
        case model::Variant::NoAntires: return e_cav + 2.0 * d;
        case model::Variant::Full:
            return std::sqrt(e_cav * e_cav + 4.0 * d * e_cav);
    }
    return e_cav;
}

// Decoupled limit: the photon line probed at fixed angle, E = E_ph(e_cav(k(E))).
double bare_cavity_at_angle(const SystemParams& params, const GeometryParams& geom,
                            double d, model::Variant variant) {
    const auto [w_lo, w_hi] = representable_window(params, geom);
    const auto f = [&](double e) {
        const double e_cav = params.cavity.energy_at(k_of_angle_energy(geom, e));
        return e - photon_line_energy(e_cav, d, variant);
    };
    double lo = std::max(1e-6 * params.e_12, w_lo);
    double hi = std::min(64.0 * params.e_12, w_hi * (1.0 - 1e-12));
    double flo = f(lo), fhi = f(hi);
    int widen = 0;
    while (flo * fhi > 0.0 && widen++ < 60) {
        if (flo < 0.0) {
            // root above hi (if any; a steep guided line may never cross)
            const double next = std::min(hi * 2.0, w_hi * (1.0 - 1e-12));
            if (next <= hi) break;
            hi = next;
            fhi = f(hi);
        } else {
            const double next = std::max(lo * 0.5, w_lo + (w_lo > 0.0 ? 1e-15 : 0.0));
            if (next >= lo) break;
            lo = next;
            flo = f(lo);
        }
    }
    if (flo * fhi > 0.0)
        throw BracketError("bare cavity fixed-angle solve: no sign change in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "] meV");
    return brent_root(f, lo, hi, flo, fhi, kAngleSolveTol, kAngleSolveIters);
}

} // namespace

double branch_energy_at_angle(const SystemParams& params, model::Variant variant,
                              const GeometryParams& geom, Branch branch) {
    geom.validate();
    const double e_12 = params.e_12;

    // Decoupled limit: branches are the bare photon fixed-angle solution and
    // the flat transition line, ordered by energy.
    if (params.coupling.omega_r_res == 0.0) {
        const double d = params.d_dia_override.value_or(0.0);
        const double e_cav_star = bare_cavity_at_angle(params, geom, d, variant);
        const bool lower = branch == Branch::LP;
        return lower ? std::min(e_cav_star, e_12) : std::max(e_cav_star, e_12);
    }

    const auto f = [&](double e) {
        return e - branch_energy_at_k(params, variant, k_of_angle_energy(geom, e), branch);
    };

    const auto [w_lo, w_hi] = representable_window(params, geom);
    double eps = 1e-6 * e_12;
    double lo, hi, flo, fhi;

    if (branch == Branch::LP) {
        lo = std::max(0.2 * e_12, w_lo);
        hi = std::min(e_12 - eps, w_hi * (1.0 - 1e-12));
    } else {
        lo = std::max(e_12 + eps, w_lo * (1.0 + 1e-12));
        hi = std::min(3.0 * e_12, w_hi * (1.0 - 1e-12));
    }
    flo = f(lo);
    fhi = f(hi);

    int attempts = 0;
    while (flo * fhi > 0.0 && attempts++ < 40) {
        if (branch == Branch::LP) {
            if (fhi > 0.0 && flo > 0.0) {
                lo = std::max(lo * 0.5, w_lo + (w_lo > 0.0 ? 1e-12 * e_12 : 0.0));
                if (lo <= 0.0) lo = 1e-9 * e_12;
                flo = f(lo);
            } else {
                // both negative: the root hugs e_12, tighten the gap
                eps /= 16.0;
                hi = e_12 - eps;
                fhi = f(hi);
            }
        } else {
            if (flo < 0.0 && fhi < 0.0) {
                const double next = std::min(hi * 2.0, w_hi * (1.0 - 1e-12));
                if (next <= hi) break;  // window exhausted
                hi = next;
                fhi = f(hi);
            } else {
                eps /= 16.0;
                lo = e_12 + eps;
                flo = f(lo);
            }
        }
    }
    if (flo * fhi > 0.0) {
        std::ostringstream os;
        os << "branch_energy_at_angle: no sign change for " << to_string(branch)
           << " at theta=" << geom.theta_int << " deg after widening; scanned ["
           << lo << ", " << hi << "] meV";
        throw BracketError(os.str());
    }
    return brent_root(f, lo, hi, flo, fhi, kAngleSolveTol, kAngleSolveIters);
}

// ---------------------------------------------------------------- curves ---

namespace {

template <typename Eval>
DispersionCurve evaluate_curve(DispersionCurve::Domain domain,
                               std::span<const double> grid, unsigned threads,
                               Eval&& eval) {
    if (grid.empty())
        throw DomainError("dispersion_curve: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("dispersion_curve: grid must be strictly increasing");

    const std::array<Branch, 2> branches{Branch::LP, Branch::UP};
    const std::size_t n_jobs = grid.size() * branches.size();

    std::vector<std::optional<DispersionPoint>> slots(n_jobs);
    std::vector<std::optional<CurveFailure>> fails(n_jobs);

    const auto run_job = [&](std::size_t job) {
        const Branch branch = branches[job / grid.size()];
        const double x = grid[job % grid.size()];
        try {
            slots[job] = eval(x, branch);
        } catch (const Error& err) {
            fails[job] = CurveFailure{x, branch, err.what()};
        }
    };

    if (threads <= 1 || n_jobs < 2) {
        for (std::size_t job = 0; job < n_jobs; ++job) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        const unsigned n_workers =
            std::min<unsigned>(threads, (unsigned)n_jobs);
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t job = next++; job < n_jobs; job = next++)
                    run_job(job);
            });
        for (auto& t : pool) t.join();
    }

    DispersionCurve curve;
    curve.domain = domain;
    for (std::size_t job = 0; job < n_jobs; ++job) {
        if (slots[job]) curve.points.push_back(*slots[job]);
        if (fails[job]) curve.failures.push_back(*fails[job]);
    }
    return curve;
}

} // namespace

DispersionCurve dispersion_curve_angles(const SystemParams& params,
                                        model::Variant variant,
                                        std::span<const double> theta_deg,
                                        unsigned threads) {
    return evaluate_curve(
        DispersionCurve::Domain::Angle, theta_deg, threads,
        [&](double theta, Branch branch) {
            const GeometryParams geom{params.n_prop, theta};
            const double e = branch_energy_at_angle(params, variant, geom, branch);
            DispersionPoint pt;
            pt.theta_deg = theta;
            pt.k = k_of_angle_energy(geom, e);
            pt.energy = e;
            pt.branch = branch;
            return pt;
        });
}

DispersionCurve dispersion_curve_wavevectors(const SystemParams& params,
                                             model::Variant variant,
                                             std::span<const double> k,
                                             unsigned threads) {
    return evaluate_curve(
        DispersionCurve::Domain::Wavevector, k, threads,
        [&](double kv, Branch branch) {
            DispersionPoint pt;
            pt.k = kv;
            pt.energy = branch_energy_at_k(params, variant, kv, branch);
            pt.branch = branch;
            return pt;
        });
}

CavityModel cavity_for_resonance_angle(double e_12, double theta_res_deg,
                                       double n_prop, double n_cav) {
    if (!(e_12 > 0.0))
        throw DomainError("cavity_for_resonance_angle: e_12 must be > 0");
    const double s = (n_prop / n_cav) * std::sin(deg_to_rad(theta_res_deg));
    if (!(s > 0.0 && s < 1.0))
        throw DomainError(
            "cavity_for_resonance_angle: n_prop*sin(theta_res)/n_cav must lie in "
            "(0, 1), got " + std::to_string(s));
    return CavityModel::parametric(e_12 * std::sqrt(1.0 - s * s), n_cav);
}

} // namespace polarfit::disp
