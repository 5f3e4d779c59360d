// validation.hpp — cross-module invariant suite behind `fockladder validate`

#pragma once

#include "fockladder/floquet.hpp"
#include "fockladder/lattice.hpp"
#include "fockladder/meanfield.hpp"
#include "fockladder/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace fockladder::validation {

struct Check {
    std::string name;
    double value{0.0};
    double tolerance{0.0};
    bool passed{false};
};

/// Reference point used for operator-level invariants.
inline SystemParams reference_point() { return {20, 0.5, 0.5, 1.0, 0.01}; }

inline double algebra_error(int N) {
    const Matrix sx = build_sx(N).matrix(), sy = build_sy(N).matrix(), sz = build_sz(N).matrix();
    const double s = 0.5 * N;
    const auto d = sx.rows();
    return std::max({max_abs(commutator(sx, sy) - kI * sz), max_abs(commutator(sy, sz) - kI * sx),
                     max_abs(commutator(sz, sx) - kI * sy),
                     max_abs(sx * sx + sy * sy + sz * sz - s * (s + 1.0) * Matrix::Identity(d, d))});
}

inline double parity_error(const SystemParams& p) {
    const Matrix pi = parity_operator(p.N).matrix();
    const Matrix u = build_floquet(p).matrix();
    const Matrix h = build_heff(p).matrix();
    return std::max(max_abs(commutator(u, pi)), max_abs(commutator(h, pi)));
}

inline double spectrum_residual(const SystemParams& p) {
    const Operator uf = build_floquet(p);
    const Spectrum s = spectrum(uf, p.tau);
    double worst = unitarity_error(s.states);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const Vector v = s.states.col(k);
        const Vector r = uf.matrix() * v - std::exp(-kI * s.quasienergies(k) * p.tau) * v;
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

inline double parseval_error(const SystemParams& p) {
    const Spectrum s = spectrum(build_floquet(p), p.tau);
    const auto b = static_cast<Eigen::Index>(bec_dim(p.N));
    double worst = 0.0;
    for (int m : {-1, 1}) {
        const Eigen::MatrixXd dens = phase_energy_map(s.states, m);
        if (dens.minCoeff() < 0.0) return std::numeric_limits<double>::infinity();
        const Eigen::Index offset = m == -1 ? 0 : b;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double lhs = dens.col(i).sum() / static_cast<double>(b);
            const double rhs = s.states.col(i).segment(offset, b).squaredNorm();
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

/// Largest violation of 0 <= S <= ln 2, unit trace and Hermiticity of ρ_I along a flux sweep.
inline double entropy_bound_violation(int N, double xi, double tau) {
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
        const SystemParams p{N, 0.0, xi, 0.15 * k, tau};
        const Vector g = solve_ground_state(p).state;
        const Eigen::Matrix2cd rho = impurity_density_matrix(g);
        const double s = entanglement_entropy_numeric(g);
        worst = std::max({worst, -s, s - std::numbers::ln2, std::abs(rho.trace() - 1.0),
                          std::abs(rho(0, 1) - std::conj(rho(1, 0)))});
    }
    return std::max(worst, 0.0);
}

inline double current_antisymmetry(const SystemParams& p) {
    SystemParams mirrored = p;
    mirrored.phi = -p.phi;
    const double forward = chiral_current_numeric(solve_ground_state(p).state, p.phi).jc;
    const double backward = chiral_current_numeric(solve_ground_state(mirrored).state, mirrored.phi).jc;
    return std::abs(forward + backward);
}

/// Relative mismatch between the Hellmann–Feynman current and a central difference of ε_0(φ).
inline double hellmann_feynman_mismatch(const SystemParams& p, double step) {
    SystemParams up = p, down = p;
    up.phi += step;
    down.phi -= step;
    const double fd = (solve_ground_state(up).quasienergy - solve_ground_state(down).quasienergy) / (2.0 * step);
    const double hf = chiral_current_numeric(solve_ground_state(p).state, p.phi).jc;
    return std::abs(hf - fd) / std::abs(fd);
}

/// ‖U_F − exp(−iH_eff τ)‖₂ at τ over the same norm at τ/2.
inline double trotter_ratio(SystemParams p) {
    auto deviation = [](const SystemParams& q) {
        return spectral_norm(build_floquet(q).matrix() - propagator(build_heff(q), q.tau).matrix());
    };
    const double coarse = deviation(p);
    p.tau *= 0.5;
    return coarse / deviation(p);
}

inline Check make(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

/// The invariant suite. `p` supplies the user's operating point; fixed reference points
/// cover the remaining checks.
inline std::vector<Check> run_invariant_suite(const SystemParams& p) {
    p.validate();
    const SystemParams ref = reference_point();
    std::vector<Check> out;

    out.push_back(make("floquet unitarity (reference)", unitarity_error(build_floquet(ref).matrix()), 1e-10));
    out.push_back(make("floquet unitarity (operating point)", unitarity_error(build_floquet(p).matrix()), 1e-10));
    out.push_back(make("effective hamiltonian hermiticity", std::max(hermiticity_error(build_heff(ref).matrix()),
                                                                      hermiticity_error(build_heff(p).matrix())),
                       1e-12));
    out.push_back(make("angular momentum algebra",
                       std::max({algebra_error(2), algebra_error(20), algebra_error(p.N)}), 1e-10));
    out.push_back(make("parity commutation", std::max(parity_error(ref), parity_error(p)), 1e-9));
    out.push_back(make("spectrum residual and orthonormality", spectrum_residual(ref), 1e-8));
    out.push_back(make("parseval identity", parseval_error(ref), 1e-10));
    out.push_back(make("entropy bounds", entropy_bound_violation(20, 0.5, ref.tau), 1e-10));
    out.push_back(make("chiral current antisymmetry", current_antisymmetry({20, 0.0, 0.5, 0.3, ref.tau}), 1e-8));
    out.push_back(make("hellmann-feynman consistency", hellmann_feynman_mismatch({50, 0.0, 0.5, 0.3, ref.tau}, 1e-4),
                       1e-3));
    const double ratio = trotter_ratio(ref);
    out.push_back({"effective hamiltonian convergence (ratio in [3.5, 4.5])", ratio, 4.5, ratio >= 3.5 && ratio <= 4.5});
    return out;
}

inline bool all_passed(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

}  // namespace fockladder::validation
