// floquet.hpp — single-cycle Floquet operator, effective Hamiltonian and quasienergy spectra

#pragma once

#include "fockladder/errors.hpp"
#include "fockladder/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>
#include <sstream>
#include <string>
#include <vector>

namespace fockladder {

/// Dimensionless controls of the driven junction, energies in units of J.
struct SystemParams {
    int N{100};
    double mu{0.0};
    double xi{0.5};
    double phi{0.0};
    double tau{0.01};

    void validate() const {
        require_particle_number(N);
        if (!std::isfinite(mu) || !std::isfinite(xi) || !std::isfinite(phi) || !std::isfinite(tau))
            throw std::invalid_argument("system parameters must be finite");
        if (xi < 0.0) throw std::invalid_argument("xi must be non-negative");
        if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "N=" << N << " mu=" << mu << " xi=" << xi << " phi=" << phi << " tau=" << tau;
        return os.str();
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Maps physical couplings (U, W, J, K, ω) at pulse interval τ onto the effective controls.
inline SystemParams physical_to_effective(int N, double U, double W, double J, double K, double omega,
                                          double tau) {
    require_particle_number(N);
    if (!(J > 0.0)) throw std::invalid_argument("tunneling energy J must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("drive frequency omega must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("pulse interval tau must be positive");
    SystemParams p;
    p.N = N;
    p.mu = std::numbers::pi * U * N / (J * omega * tau);
    p.xi = K / J;
    p.phi = 2.0 * W / omega;
    p.tau = tau;
    return p;
}

// ------------------------------ S_x kick cache -------------------------------

namespace detail {

struct SxDecomposition {
    RealVector eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

inline std::shared_ptr<const SxDecomposition> make_sx_decomposition(int N) {
    const auto d = static_cast<Eigen::Index>(bec_dim(N));
    RealVector diag = RealVector::Zero(d);
    RealVector sub = sx_offdiagonal(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw EigensolverError("S_x spectral decomposition failed for N=" + std::to_string(N));
    return std::make_shared<const SxDecomposition>(SxDecomposition{solver.eigenvalues(), solver.eigenvectors()});
}

}  // namespace detail

/// Spectral decomposition of S_x, computed once per N and shared read-only afterwards.
inline std::shared_ptr<const detail::SxDecomposition> sx_decomposition(int N) {
    require_particle_number(N);
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const detail::SxDecomposition>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[N];
    if (!slot) slot = detail::make_sx_decomposition(N);
    return slot;
}

/// exp(i·angle·S_x) on the BEC block.
inline Matrix sx_kick(int N, double angle) {
    const auto dec = sx_decomposition(N);
    const Matrix v = dec->eigenvectors.cast<cplx>();
    Vector phases(dec->eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(kI * angle * dec->eigenvalues(k));
    return v * phases.asDiagonal() * v.transpose();
}

/// sx_kick memoized per (N, angle); scans reuse one kick for every parameter point.
inline std::shared_ptr<const Matrix> cached_sx_kick(int N, double angle) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const Matrix>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{N, angle}];
    if (!slot) slot = std::make_shared<const Matrix>(sx_kick(N, angle));
    return slot;
}

// ------------------------------ Floquet operator -----------------------------

/// U_F = e^{-i[(μτ/N)S_z² + φS_zσ_z]} e^{iτS_x} e^{-i[(μτ/N)S_z² - φS_zσ_z]} e^{iNξτσ_x/2}.
inline Operator build_floquet(const SystemParams& p) {
    p.validate();
    const int N = p.N;
    const auto b = static_cast<Eigen::Index>(bec_dim(N));
    const auto d = 2 * b;

    const auto kick_ptr = cached_sx_kick(N, p.tau);
    const Matrix& kick = *kick_ptr;

    // Diagonal phases of the two interaction ramps.
    Vector ramp_after(d), ramp_before(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const FockIndex s = fock_index(static_cast<std::size_t>(k), N);
        const double n = s.n;
        const double boson = p.mu * p.tau / N * n * n;
        ramp_after(k) = std::exp(-kI * (boson + p.phi * n * s.m));
        ramp_before(k) = std::exp(-kI * (boson - p.phi * n * s.m));
    }

    Matrix u = Matrix::Zero(d, d);
    u.topLeftCorner(b, b) = kick;
    u.bottomRightCorner(b, b) = kick;
    u = u * ramp_before.asDiagonal();

    // Impurity kick cos(a)I + i sin(a)σ_x, mixing the two leg blocks column-wise.
    const double a = 0.5 * N * p.xi * p.tau;
    const cplx c = std::cos(a);
    const cplx is = kI * std::sin(a);
    const Matrix left = u.leftCols(b);
    const Matrix right = u.rightCols(b);
    u.leftCols(b) = c * left + is * right;
    u.rightCols(b) = is * left + c * right;

    u = ramp_after.asDiagonal() * u;
    return {std::move(u), OperatorKind::unitary};
}

/// H_eff/J = 2(μ/N)S_z² - S_x cosφ - S_y σ_z sinφ - (Nξ/2)σ_x.
inline Operator build_heff(const SystemParams& p) {
    p.validate();
    const int N = p.N;
    const Operator sz = build_sz(N);
    const Operator one_b = identity(static_cast<Eigen::Index>(bec_dim(N)));
    const Operator one_i = identity(2);
    const Matrix sz2 = sz.matrix() * sz.matrix();
    Matrix h = embed(Operator(sz2, OperatorKind::hermitian), one_i).matrix() * (2.0 * p.mu / N);
    h -= std::cos(p.phi) * embed(build_sx(N), one_i).matrix();
    h -= std::sin(p.phi) * embed(build_sy(N), sigma_z()).matrix();
    h -= 0.5 * N * p.xi * embed(one_b, sigma_x()).matrix();
    // Symmetrize away rounding from the Kronecker products.
    h = 0.5 * (h + h.adjoint()).eval();
    return {std::move(h), OperatorKind::hermitian};
}

/// Rigorous (Gershgorin) bound on the spectral radius of H_eff.
inline double heff_energy_bound(const SystemParams& p) {
    p.validate();
    const int N = p.N;
    const double hop = std::abs(std::cos(p.phi)) + std::abs(std::sin(p.phi));
    double bound = 0.0;
    for (int n = -N / 2; n <= N / 2; ++n) {
        double row = std::abs(2.0 * p.mu / N * n * n) + 0.5 * N * p.xi;
        if (n < N / 2) row += 0.5 * hop * raising_element(N, n);
        if (n > -N / 2) row += 0.5 * hop * raising_element(N, n - 1);
        bound = std::max(bound, row);
    }
    return bound;
}

/// Rejects parameter points whose energies could wrap around the Floquet zone.
inline void require_unique_quasienergies(const SystemParams& p) {
    const double reach = heff_energy_bound(p) * p.tau;
    if (!(reach < std::numbers::pi))
        throw BranchAmbiguityError("energy range exceeds the Floquet zone (|E|tau <= " + std::to_string(reach) +
                                   " is not below pi) at " + p.describe());
}

// --------------------------------- spectra -----------------------------------

/// Quasienergies ε ∈ (-π/τ, π/τ] in ascending order with column-matched orthonormal states.
/// `parity` holds the Π eigenvalue of each state, or 0 when the decomposition was not
/// parity resolved.
struct Spectrum {
    RealVector quasienergies;
    Matrix states;
    std::vector<int> parity;
    double tau{0.0};

    [[nodiscard]] Eigen::Index size() const { return quasienergies.size(); }
};

inline constexpr double kBranchEdgeTol = 1e-9;
inline constexpr double kDegeneracyTol = 1e-10;

namespace detail {

struct RawEigen {
    Vector values;
    Matrix vectors;
};

// Schur vectors of a normal matrix are its orthonormal eigenvectors, including
// inside degenerate subspaces.
inline RawEigen normal_eigen(const Matrix& m) {
    Eigen::ComplexSchur<Matrix> schur(m, true);
    if (schur.info() != Eigen::Success) throw EigensolverError("complex Schur decomposition did not converge");
    const Matrix& t = schur.matrixT();
    const Matrix strict = t.triangularView<Eigen::StrictlyUpper>();
    if (max_abs(strict) > 1e-8)
        throw EigensolverError("Schur form is not diagonal; operator is not normal");
    return {t.diagonal(), schur.matrixU()};
}

inline double fold_quasienergy(cplx lambda, double tau) {
    const double angle = -std::arg(lambda);  // in [-π, π)
    if (std::numbers::pi - std::abs(angle) < kBranchEdgeTol) {
        std::ostringstream os;
        os.precision(17);
        os << "quasienergy " << angle / tau << " lies on the folding edge pi/tau (branch ambiguity)";
        throw BranchAmbiguityError(os.str());
    }
    return angle / tau;
}

// Parity sector of a Π-symmetric ladder operator in the basis (|j> ± |d-1-j>)/√2.
inline Matrix parity_block(const Matrix& u, int sign) {
    const Eigen::Index d = u.rows();
    const Eigen::Index b = d / 2;
    Matrix block(b, b);
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < b; ++r) block(r, c) = u(r, c) + static_cast<double>(sign) * u(r, d - 1 - c);
    return block;
}

inline Vector lift_from_sector(const Vector& w, int sign) {
    const Eigen::Index b = w.size();
    const Eigen::Index d = 2 * b;
    Vector v(d);
    for (Eigen::Index r = 0; r < b; ++r) {
        v(r) = w(r) / std::numbers::sqrt2;
        v(d - 1 - r) = static_cast<double>(sign) * w(r) / std::numbers::sqrt2;
    }
    return v;
}

inline double parity_leak(const Matrix& u) {
    const Eigen::Index d = u.rows();
    double leak = 0.0;
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) leak = std::max(leak, std::abs(u(r, c) - u(d - 1 - r, d - 1 - c)));
    return leak;
}

}  // namespace detail

inline Spectrum spectrum(const Operator& uf, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    const Matrix& u = uf.matrix();
    if (unitarity_error(u) > 1e-8) throw std::invalid_argument("spectrum requires a unitary operator");
    const Eigen::Index d = u.rows();

    std::vector<double> eps;
    std::vector<int> par;
    Matrix vecs(d, d);

    // Block-diagonalize by Π when the operator commutes with it; Π maps index k to d-1-k.
    bool resolved = false;
    if (d >= 6 && d % 2 == 0 && detail::parity_leak(u) <= 1e-10) {
        Eigen::Index col = 0;
        for (int sign : {1, -1}) {
            const auto raw = detail::normal_eigen(detail::parity_block(u, sign));
            for (Eigen::Index k = 0; k < raw.values.size(); ++k, ++col) {
                eps.push_back(detail::fold_quasienergy(raw.values(k), tau));
                par.push_back(sign);
                vecs.col(col) = detail::lift_from_sector(raw.vectors.col(k), sign);
            }
        }
        resolved = true;
    }
    if (!resolved) {
        const auto raw = detail::normal_eigen(u);
        vecs = raw.vectors;
        for (Eigen::Index k = 0; k < d; ++k) {
            eps.push_back(detail::fold_quasienergy(raw.values(k), tau));
            par.push_back(0);
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });

    Spectrum s;
    s.tau = tau;
    s.quasienergies.resize(d);
    s.states.resize(d, d);
    s.parity.resize(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        s.quasienergies(k) = eps[static_cast<std::size_t>(src)];
        s.states.col(k) = vecs.col(src);
        s.parity[static_cast<std::size_t>(k)] = par[static_cast<std::size_t>(src)];
    }
    return s;
}

/// Eigenpairs of a Hermitian operator, ascending.
inline Spectrum hermitian_spectrum(const Operator& h) {
    if (h.kind() != OperatorKind::hermitian) throw std::invalid_argument("operator is not tagged hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw EigensolverError("hermitian eigensolver did not converge");
    Spectrum s;
    s.quasienergies = solver.eigenvalues();
    s.states = solver.eigenvectors();
    s.parity.assign(static_cast<std::size_t>(h.dim()), 0);
    return s;
}

/// exp(-i H τ) by spectral decomposition of the Hermitian H.
inline Operator propagator(const Operator& h, double tau) {
    const Spectrum s = hermitian_spectrum(h);
    Vector phases(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k) phases(k) = std::exp(-kI * s.quasienergies(k) * tau);
    return {Matrix(s.states * phases.asDiagonal() * s.states.adjoint()), OperatorKind::unitary};
}

inline double spectral_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

struct GroundState {
    double quasienergy{0.0};
    Vector state;
};

/// Lowest quasienergy eigenpair. A degenerate lowest pair resolves to its Π-even combination.
inline GroundState ground_state(const Spectrum& spec) {
    if (spec.size() == 0) throw std::invalid_argument("empty spectrum");
    GroundState g{spec.quasienergies(0), spec.states.col(0)};
    Eigen::Index k = 1;
    while (k < spec.size() && spec.quasienergies(k) - spec.quasienergies(0) <= kDegeneracyTol) ++k;
    if (k == 1) return g;

    for (Eigen::Index j = 0; j < k; ++j)
        if (spec.parity[static_cast<std::size_t>(j)] == 1) return {spec.quasienergies(0), spec.states.col(j)};

    // Unresolved decomposition: project each degenerate state onto the Π-even sector.
    const Eigen::Index d = spec.states.rows();
    Vector best;
    double best_norm = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        const Vector v = spec.states.col(j);
        const Vector even = 0.5 * (v + v.reverse());
        if (even.norm() > best_norm) {
            best_norm = even.norm();
            best = even;
        }
    }
    if (d % 2 != 0 || best_norm < 1e-8) return g;
    g.state = best / best_norm;
    return g;
}

/// Lower Gershgorin bound on the spectrum of H_eff.
inline double heff_lower_bound(const SystemParams& p) {
    p.validate();
    const int N = p.N;
    const double hop = std::abs(std::cos(p.phi)) + std::abs(std::sin(p.phi));
    double bound = std::numeric_limits<double>::infinity();
    for (int n = -N / 2; n <= N / 2; ++n) {
        double radius = 0.5 * N * p.xi;
        if (n < N / 2) radius += 0.5 * hop * raising_element(N, n);
        if (n > -N / 2) radius += 0.5 * hop * raising_element(N, n - 1);
        bound = std::min(bound, 2.0 * p.mu / N * n * n - radius);
    }
    return bound;
}

namespace detail {

inline GroundState lowest_in_sector_by_sine(const Matrix& block, int sign, double tau, bool with_vector,
                                            const Matrix& u) {
    const Matrix k = (block.adjoint() - block) / (2.0 * kI);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(k, with_vector ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw EigensolverError("hermitian sector solve did not converge");
    const double sine = solver.eigenvalues()(0);
    if (!with_vector) return {std::asin(std::clamp(sine, -1.0, 1.0)) / tau, Vector()};
    Vector v = lift_from_sector(solver.eigenvectors().col(0), sign);
    const double eps = fold_quasienergy(v.dot(u * v), tau);
    return {eps, std::move(v)};
}

inline GroundState lowest_in_sector_by_schur(const Matrix& block, int sign, double tau) {
    const auto raw = normal_eigen(block);
    Eigen::Index best = 0;
    double best_eps = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < raw.values.size(); ++k) {
        const double eps = fold_quasienergy(raw.values(k), tau);
        if (eps < best_eps) {
            best_eps = eps;
            best = k;
        }
    }
    return {best_eps, lift_from_sector(raw.vectors.col(best), sign)};
}

}  // namespace detail

/// Lowest quasienergy state of each Π sector.
struct SectorGroundStates {
    GroundState even;
    GroundState odd;

    [[nodiscard]] double gap() const { return odd.quasienergy - even.quasienergy; }
    /// Ground-state parity; ties within kDegeneracyTol go to the even sector.
    [[nodiscard]] int parity() const { return gap() < -kDegeneracyTol ? -1 : 1; }
    [[nodiscard]] const GroundState& ground() const { return parity() == 1 ? even : odd; }
    [[nodiscard]] const GroundState& sector(int sign) const { return sign == 1 ? even : odd; }
};

/// Sector ground states of U_F at a parameter point. U_F commutes with Π for every
/// parameter choice, so each sector is solved on its own (N+1)-dimensional block.
///
/// Within a sector the Hermitian part -(U - U†)/2i has eigenvalues sin(ετ) on the
/// eigenvectors of U. While every ετ stays above -π/2 and the lowest ε is negative, the
/// lowest eigenvector of that Hermitian matrix is the sector ground state; otherwise the
/// block is Schur-decomposed. `with_vectors = false` returns quasienergies only.
inline SectorGroundStates solve_sector_ground_states(const SystemParams& p, bool with_vectors = true) {
    require_unique_quasienergies(p);
    const Operator uf = build_floquet(p);
    const Matrix& u = uf.matrix();
    // 0.9 keeps a margin for the O(τ²) gap between U_F and exp(-iH_eff τ).
    const bool sine_ok = -heff_lower_bound(p) * p.tau < 0.9 * std::numbers::pi / 2.0;

    SectorGroundStates out;
    for (int sign : {1, -1}) {
        const Matrix block = detail::parity_block(u, sign);
        GroundState g;
        bool done = false;
        if (sine_ok) {
            g = detail::lowest_in_sector_by_sine(block, sign, p.tau, with_vectors, u);
            done = g.quasienergy < 0.0;
        }
        if (!done) g = detail::lowest_in_sector_by_schur(block, sign, p.tau);
        (sign == 1 ? out.even : out.odd) = std::move(g);
    }
    return out;
}

/// Ground state of U_F at a parameter point.
inline GroundState solve_ground_state(const SystemParams& p) { return solve_sector_ground_states(p).ground(); }

}  // namespace fockladder
