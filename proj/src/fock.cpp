#include "polarfit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "polarfit/errors.hpp"

namespace polarfit::fock {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr int kDenseSectorLimit = 2048;

struct Basis {
    int n_ph;  // photon cutoff
    int n_mat; // matter cutoff
    int cols;  // n_mat + 1
    int dim;   // (n_ph+1)*(n_mat+1)

    int index(int na, int nb) const { return na * cols + nb; }
    int photon_of(int i) const { return i / cols; }
    int matter_of(int i) const { return i % cols; }
};

Basis make_basis(const FockConfig& cfg) {
    if (cfg.n_max_photon < 4 || cfg.n_max_matter < 4)
        throw DomainError("FockConfig: cutoffs must be >= 4");
    if (!(cfg.convergence_tol > 0.0))
        throw DomainError("FockConfig: convergence_tol must be > 0");
    const long long dim =
        (long long)(cfg.n_max_photon + 1) * (long long)(cfg.n_max_matter + 1);
    if (dim > 1000000)
        throw DomainError("Fock basis would need " + std::to_string(dim) +
                          " states; the guard is 1e6");
    return Basis{cfg.n_max_photon, cfg.n_max_matter, cfg.n_max_matter + 1,
                 (int)dim};
}

// Triplet assembly of the variant Hamiltonian. The resonant exchange moves
// one quantum between the modes; the anomalous terms change the total boson
// number by two, so parity is conserved by construction.
std::vector<Eigen::Triplet<std::complex<double>>>
hamiltonian_triplets(const model::ModeInputs& in, model::Variant variant,
                     const Basis& basis) {
    const double w = in.omega_r;
    const double d = in.d_dia;
    const bool keep_dia = variant != model::Variant::NoAntiresNoDia;
    const bool keep_anti = variant == model::Variant::Full;

    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    trip.reserve((std::size_t)basis.dim * 7);

    for (int na = 0; na <= basis.n_ph; ++na) {
        for (int nb = 0; nb <= basis.n_mat; ++nb) {
            const int col = basis.index(na, nb);
            double diag = in.e_cav * (na + 0.5) + in.e_12 * nb;
            if (keep_dia) diag += d * (2.0 * na + 1.0);  // a†a + aa†
            trip.emplace_back(col, col, diag);

            // i w (a† b - a b†)
            if (na + 1 <= basis.n_ph && nb - 1 >= 0)
                trip.emplace_back(basis.index(na + 1, nb - 1), col,
                                  kI * w * std::sqrt((na + 1.0) * nb));
            if (na - 1 >= 0 && nb + 1 <= basis.n_mat)
                trip.emplace_back(basis.index(na - 1, nb + 1), col,
                                  -kI * w * std::sqrt(na * (nb + 1.0)));

            if (keep_anti) {
                // i w (a b - a† b†)
                if (na - 1 >= 0 && nb - 1 >= 0)
                    trip.emplace_back(basis.index(na - 1, nb - 1), col,
                                      kI * w * std::sqrt((double)na * nb));
                if (na + 1 <= basis.n_ph && nb + 1 <= basis.n_mat)
                    trip.emplace_back(basis.index(na + 1, nb + 1), col,
                                      -kI * w * std::sqrt((na + 1.0) * (nb + 1.0)));
                // d (a a + a† a†)
                if (na - 2 >= 0)
                    trip.emplace_back(basis.index(na - 2, nb), col,
                                      std::complex<double>(d * std::sqrt(na * (na - 1.0)), 0.0));
                if (na + 2 <= basis.n_ph)
                    trip.emplace_back(basis.index(na + 2, nb), col,
                                      std::complex<double>(d * std::sqrt((na + 1.0) * (na + 2.0)), 0.0));
            }
        }
    }
    return trip;
}

// Indices of one parity sector (parity of n_a + n_b).
std::vector<int> sector_indices(const Basis& basis, int parity) {
    std::vector<int> idx;
    idx.reserve((std::size_t)basis.dim / 2 + 1);
    for (int i = 0; i < basis.dim; ++i)
        if ((basis.photon_of(i) + basis.matter_of(i)) % 2 == parity)
            idx.push_back(i);
    return idx;
}

SparseMatrixXcd project_sector(const SparseMatrixXcd& h,
                               const std::vector<int>& idx) {
    std::vector<int> pos(h.rows(), -1);
    for (int j = 0; j < (int)idx.size(); ++j) pos[idx[j]] = j;

    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    trip.reserve((std::size_t)h.nonZeros() / 2 + 1);
    for (int col = 0; col < h.outerSize(); ++col) {
        if (pos[col] < 0) continue;
        for (SparseMatrixXcd::InnerIterator it(h, col); it; ++it) {
            if (pos[it.row()] >= 0)
                trip.emplace_back(pos[it.row()], pos[col], it.value());
        }
    }
    SparseMatrixXcd out(idx.size(), idx.size());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

struct SectorEigen {
    Eigen::VectorXd values;    // ascending, lowest n_want
    Eigen::MatrixXcd vectors;  // matching columns, sector basis
};

// Lanczos with full reorthogonalization for the lowest eigenpairs of a
// Hermitian sparse matrix. Used when the sector is too large for a dense
// solve; the Krylov dimension is generous because the matrices here are
// cheap to apply.
SectorEigen lanczos_lowest(const SparseMatrixXcd& h, int n_want) {
    const int dim = (int)h.rows();
    const int steps = std::min(dim, std::max(120, 10 * n_want));

    Eigen::MatrixXcd v(dim, steps + 1);
    Eigen::VectorXd alpha(steps), beta(steps);

    Eigen::VectorXcd q = Eigen::VectorXcd::Zero(dim);
    // deterministic start vector with weight on every basis state
    for (int i = 0; i < dim; ++i)
        q(i) = std::complex<double>(1.0 + 0.001 * std::cos(0.7 * i), 0.0);
    q.normalize();
    v.col(0) = q;

    int m = 0;
    for (int j = 0; j < steps; ++j) {
        Eigen::VectorXcd r = h * v.col(j);
        alpha(j) = r.dot(v.col(j)).real();
        r -= alpha(j) * v.col(j);
        if (j > 0) r -= beta(j - 1) * v.col(j - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i)
                r -= v.col(i).dot(r) * v.col(i);
        beta(j) = r.norm();
        m = j + 1;
        if (beta(j) < 1e-13) break;  // invariant subspace exhausted
        v.col(j + 1) = r / beta(j);
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        t(j, j) = alpha(j);
        if (j + 1 < m) {
            t(j, j + 1) = beta(j);
            t(j + 1, j) = beta(j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(t);
    if (ts.info() != Eigen::Success)
        throw Error("lanczos_lowest: tridiagonal solve failed");

    const int keep = std::min(n_want, m);
    SectorEigen out;
    out.values = ts.eigenvalues().head(keep);
    out.vectors = v.leftCols(m) * ts.eigenvectors().leftCols(keep);
    return out;
}

SectorEigen dense_lowest(const SparseMatrixXcd& h, int n_want) {
    Eigen::MatrixXcd dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    if (solver.info() != Eigen::Success)
        throw Error("oracle_spectrum: dense eigensolver failed");
    const int keep = std::min<int>(n_want, (int)dense.rows());
    SectorEigen out;
    out.values = solver.eigenvalues().head(keep);
    out.vectors = solver.eigenvectors().leftCols(keep);
    return out;
}

SectorEigen sector_lowest(const SparseMatrixXcd& h, int n_want) {
    return (int)h.rows() <= kDenseSectorLimit ? dense_lowest(h, n_want)
                                              : lanczos_lowest(h, n_want);
}

double number_expectation(const Eigen::VectorXcd& state,
                          const std::vector<int>& idx, const Basis& basis,
                          bool photon, bool matter) {
    double acc = 0.0;
    for (int j = 0; j < (int)idx.size(); ++j) {
        const double p = std::norm(state(j));
        if (photon) acc += p * basis.photon_of(idx[j]);
        if (matter) acc += p * basis.matter_of(idx[j]);
    }
    return acc;
}

struct RawSpectrum {
    double e_lp, e_up, n_photon, n_matter;
};

RawSpectrum solve_once(const model::ModeInputs& in, model::Variant variant,
                       const FockConfig& cfg) {
    const Basis basis = make_basis(cfg);
    const SparseMatrixXcd h = build_fock_hamiltonian(in, variant, cfg);

    const std::vector<int> even = sector_indices(basis, 0);
    const std::vector<int> odd = sector_indices(basis, 1);

    const SectorEigen ground = sector_lowest(project_sector(h, even), 1);
    const double e0 = ground.values(0);

    RawSpectrum out{};
    out.n_photon = number_expectation(ground.vectors.col(0), even, basis, true, false);
    out.n_matter = number_expectation(ground.vectors.col(0), even, basis, false, true);

    const int n_odd_want = 16;
    const SectorEigen exc = sector_lowest(project_sector(h, odd), n_odd_want);
    out.e_lp = exc.values(0) - e0;

    // The odd sector also holds multi-quantum states such as three lower
    // polaritons, which undercut the upper branch at large detuning. Select
    // the upper polariton as the next state whose total boson number is
    // one-excitation-like, i.e. within +1 of the lower polariton's.
    const double n_lp = number_expectation(exc.vectors.col(0), odd, basis, true, true);
    out.e_up = -1.0;
    for (int j = 1; j < (int)exc.values.size(); ++j) {
        const double n_j = number_expectation(exc.vectors.col(j), odd, basis, true, true);
        if (n_j < n_lp + 1.0) {
            out.e_up = exc.values(j) - e0;
            break;
        }
    }
    if (out.e_up < 0.0)
        throw ConvergenceError(
            "oracle_spectrum: upper branch not found among the lowest " +
            std::to_string(n_odd_want) + " odd-sector states; raise the cutoffs");
    return out;
}

} // namespace

SparseMatrixXcd build_fock_hamiltonian(const model::ModeInputs& in,
                                       model::Variant variant,
                                       const FockConfig& cfg) {
    in.validate();
    const Basis basis = make_basis(cfg);
    const auto trip = hamiltonian_triplets(in, variant, basis);
    SparseMatrixXcd h(basis.dim, basis.dim);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

OracleResult oracle_spectrum(const model::ModeInputs& in, model::Variant variant,
                             const FockConfig& cfg) {
    in.validate();
    make_basis(cfg);  // config checks up front

    const RawSpectrum base = solve_once(in, variant, cfg);
    FockConfig bigger = cfg;
    bigger.n_max_photon += 4;
    bigger.n_max_matter += 4;
    const RawSpectrum check = solve_once(in, variant, bigger);

    const double delta = std::max(
        {std::abs(base.e_lp - check.e_lp), std::abs(base.e_up - check.e_up),
         std::abs(base.n_photon - check.n_photon),
         std::abs(base.n_matter - check.n_matter)});

    if (delta > cfg.convergence_tol) {
        std::ostringstream os;
        os << "oracle_spectrum: cutoff ladder did not converge (delta " << delta
           << " > tol " << cfg.convergence_tol << "); at cutoffs ("
           << cfg.n_max_photon << "," << cfg.n_max_matter << "): e_lp=" << base.e_lp
           << " e_up=" << base.e_up << " n_ph=" << base.n_photon
           << "; at +4: e_lp=" << check.e_lp << " e_up=" << check.e_up
           << " n_ph=" << check.n_photon;
        throw ConvergenceError(os.str());
    }

    OracleResult out;
    out.e_lp = check.e_lp;
    out.e_up = check.e_up;
    out.n_photon_gs = check.n_photon;
    out.n_matter_gs = check.n_matter;
    out.converged = true;
    out.ladder_delta = delta;
    return out;
}

} // namespace polarfit::fock
