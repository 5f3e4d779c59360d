// observables.hpp — numeric observables of Floquet eigenstates on the Fock ladder

#pragma once

#include "fockladder/lattice.hpp"
#include "fockladder/meanfield.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace fockladder {

/// θ_k = -π + 2πk/(N+1), k = 0..N.
inline std::vector<double> phase_grid(int N) {
    require_particle_number(N);
    std::vector<double> thetas(bec_dim(N));
    const double step = 2.0 * std::numbers::pi / (N + 1);
    for (std::size_t k = 0; k < thetas.size(); ++k) thetas[k] = -std::numbers::pi + step * static_cast<double>(k);
    return thetas;
}

inline int particles_of_state(const Vector& state) { return particles_from_ladder_dim(state.size()); }

/// P_m(θ) = |Σ_n e^{iθn} <m, n|ψ>|².
inline double phase_energy_density(const Vector& state, int m, double theta) {
    const int N = particles_of_state(state);
    cplx sum = 0.0;
    for (int n = -N / 2; n <= N / 2; ++n)
        sum += std::exp(kI * (theta * n)) * state(static_cast<Eigen::Index>(linear_index({n, m}, N)));
    return std::norm(sum);
}

/// P_m(θ_k, ε_i) over the full phase grid for every column of `states`; rows are θ, columns eigenstates.
inline Eigen::MatrixXd phase_energy_map(const Matrix& states, int m) {
    const int N = particles_from_ladder_dim(states.rows());
    const auto thetas = phase_grid(N);
    const auto b = static_cast<Eigen::Index>(bec_dim(N));
    const Eigen::Index offset = m == -1 ? 0 : b;
    Matrix fourier(static_cast<Eigen::Index>(thetas.size()), b);
    for (Eigen::Index k = 0; k < fourier.rows(); ++k)
        for (Eigen::Index j = 0; j < b; ++j)
            fourier(k, j) = std::exp(kI * (thetas[static_cast<std::size_t>(k)] * static_cast<double>(j - N / 2)));
    return (fourier * states.middleRows(offset, b)).cwiseAbs2();
}

/// Per-leg densities and phases; index [leg][n + N/2] with leg 0 = left (m=-1), 1 = right.
struct LegProfile {
    int N{0};
    std::array<std::vector<double>, 2> density;
    std::array<std::vector<std::optional<double>>, 2> phase;  // empty where density < kPhaseMask
};

inline constexpr double kPhaseMask = 1e-14;

inline LegProfile fock_density_phase(const Vector& state) {
    const int N = particles_of_state(state);
    Eigen::Index peak = 0;
    state.cwiseAbs().maxCoeff(&peak);
    const cplx gauge = std::abs(state(peak)) > 0.0 ? std::conj(state(peak)) / std::abs(state(peak)) : cplx{1.0};

    LegProfile out;
    out.N = N;
    for (int leg = 0; leg < 2; ++leg) {
        out.density[leg].resize(bec_dim(N));
        out.phase[leg].resize(bec_dim(N));
        for (int n = -N / 2; n <= N / 2; ++n) {
            const auto k = static_cast<std::size_t>(n + N / 2);
            const cplx amp = gauge * state(static_cast<Eigen::Index>(linear_index({n, leg == 0 ? -1 : 1}, N)));
            out.density[leg][k] = std::norm(amp);
            if (out.density[leg][k] >= kPhaseMask) out.phase[leg][k] = std::arg(amp);
        }
    }
    return out;
}

/// <S_x> and <S_y σ_z>, evaluated on the tridiagonal structure directly.
struct CurrentMoments {
    double sx{0.0};
    double sy_sz{0.0};
};

inline CurrentMoments current_moments(const Vector& state) {
    const int N = particles_of_state(state);
    CurrentMoments out;
    for (int m : {-1, 1}) {
        for (int n = -N / 2; n < N / 2; ++n) {
            const cplx lo = state(static_cast<Eigen::Index>(linear_index({n, m}, N)));
            const cplx hi = state(static_cast<Eigen::Index>(linear_index({n + 1, m}, N)));
            // <hi|S_+|lo> = r; S_x = (S_+ + S_-)/2, S_y = (S_+ - S_-)/(2i).
            const cplx t = std::conj(hi) * lo * raising_element(N, n);
            out.sx += t.real();
            out.sy_sz += m * t.imag();
        }
    }
    return out;
}

struct ChiralCurrent {
    double jc{0.0};          // units of J
    double normalized{0.0};  // 2J_C/(NJ)
};

/// Hellmann–Feynman current <∂_φ H_eff> = <S_x> sinφ - <S_y σ_z> cosφ.
inline ChiralCurrent chiral_current_numeric(const Vector& state, double phi) {
    const int N = particles_of_state(state);
    const CurrentMoments mom = current_moments(state);
    const double jc = mom.sx * std::sin(phi) - mom.sy_sz * std::cos(phi);
    return {jc, 2.0 * jc / N};
}

/// Impurity reduced density matrix Tr_B |ψ><ψ| in the (L, R) basis.
inline Eigen::Matrix2cd impurity_density_matrix(const Vector& state) {
    const int N = particles_of_state(state);
    const auto b = static_cast<Eigen::Index>(bec_dim(N));
    const auto left = state.head(b);
    const auto right = state.tail(b);
    Eigen::Matrix2cd rho;
    rho(0, 0) = left.squaredNorm();
    rho(1, 1) = right.squaredNorm();
    rho(0, 1) = right.dot(left);  // Σ_n ψ_L(n) ψ_R(n)*
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

inline double entanglement_entropy_numeric(const Vector& state) {
    const Eigen::Matrix2cd rho = impurity_density_matrix(state);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int k = 0; k < 2; ++k) s += meanfield::entropy_term(std::clamp(solver.eigenvalues()(k), 0.0, 1.0));
    return std::clamp(s, 0.0, std::numbers::ln2);
}

/// <S_z²> of the BEC, the Fock-space width of a state.
inline double sz_squared(const Vector& state) {
    const int N = particles_of_state(state);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < state.size(); ++k) {
        const double n = fock_index(static_cast<std::size_t>(k), N).n;
        acc += n * n * std::norm(state(k));
    }
    return acc;
}

}  // namespace fockladder
