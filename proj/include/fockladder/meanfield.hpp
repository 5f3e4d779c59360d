// meanfield.hpp — closed-form bands, phases and currents of the mean-field ladder

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fockladder::meanfield {

enum class Band { lower, upper };

struct BandPoint {
    double theta{0.0};
    double e_lower{0.0};
    double e_upper{0.0};
};

/// Impurity amplitudes of the lower-band eigenstate sin(α/2)|R> + cos(α/2)|L>.
struct MeanfieldState {
    double alpha_theta{0.0};
    double amp_R{0.0};
    double amp_L{0.0};
};

/// E_±(θ)/J = -(N/2)[cosθ cosφ ∓ sqrt(ξ² + sin²θ sin²φ)].
inline double band_energy(double theta, double phi, double xi, double N, Band band) {
    if (!(N > 0.0)) throw std::invalid_argument("N must be positive");
    const double s = std::sin(theta) * std::sin(phi);
    const double root = std::sqrt(xi * xi + s * s);
    const double sign = band == Band::lower ? 1.0 : -1.0;
    return -0.5 * N * (std::cos(theta) * std::cos(phi) + sign * root);
}

inline BandPoint band_point(double theta, double phi, double xi, double N) {
    return {theta, band_energy(theta, phi, xi, N, Band::lower), band_energy(theta, phi, xi, N, Band::upper)};
}

inline double mixing_angle(double theta, double phi, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("mixing angle requires xi > 0 (decoupled legs)");
    const double s = std::sin(theta) * std::sin(phi);
    return 2.0 * std::atan((s + std::sqrt(xi * xi + s * s)) / xi);
}

inline MeanfieldState lower_band_state(double theta, double phi, double xi) {
    const double a = mixing_angle(theta, phi, xi);
    return {a, std::sin(0.5 * a), std::cos(0.5 * a)};
}

/// cosφ_c = (-ξ + sqrt(ξ² + 4))/2.
inline double critical_flux(double xi) {
    if (xi < 0.0) throw std::invalid_argument("xi must be non-negative");
    return std::acos(0.5 * (-xi + std::sqrt(xi * xi + 4.0)));
}

/// Minima of the lower band: {0} in the Meissner phase, {-θ0, +θ0} past φ_c.
inline std::vector<double> theta0(double phi, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("theta0 requires xi > 0");
    if (phi < 0.0 || phi > 0.5 * std::numbers::pi) throw std::invalid_argument("phi outside [0, pi/2]");
    if (phi <= critical_flux(xi)) return {0.0};
    const double c = std::cos(phi) / std::sin(phi);
    const double s2 = std::sin(phi) * std::sin(phi) - xi * xi * c * c;
    if (s2 <= 0.0) return {0.0};
    const double t = std::asin(std::sqrt(std::min(s2, 1.0)));
    return {-t, t};
}

/// 2J_C/(NJ) on either side of the transition.
inline double chiral_current_analytic(double phi, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("chiral current requires xi > 0");
    if (phi < 0.0 || phi > 0.5 * std::numbers::pi) throw std::invalid_argument("phi outside [0, pi/2]");
    if (phi <= critical_flux(xi)) return std::sin(phi);
    const double s = std::sin(phi);
    return xi * xi * std::cos(phi) / (s * s * std::sqrt(xi * xi + s * s));
}

/// Interaction at which self-trapping coincides with the vortex transition: (ξ - sqrt(ξ² + 4))/4.
inline double mu_critical(double xi) {
    if (xi < 0.0) throw std::invalid_argument("xi must be non-negative");
    return 0.25 * (xi - std::sqrt(xi * xi + 4.0));
}

inline constexpr double kClampTol = 1e-12;

/// -p ln p with 0 ln 0 = 0.
inline double entropy_term(double p) { return p > 0.0 ? -p * std::log(p) : 0.0; }

/// Two-level entropy from f_± = ½(1 ± ξ/(sinφ sqrt(ξ² + sin²φ))), clamped into [0, 1].
inline double entropy_analytic(double phi, double xi) {
    const double s = std::sin(phi);
    if (s == 0.0) throw std::invalid_argument("analytic entropy is singular at sin(phi) = 0");
    const double r = xi / (s * std::sqrt(xi * xi + s * s));
    auto clamp = [](double f) {
        if (f < kClampTol) return 0.0;
        if (f > 1.0 - kClampTol) return 1.0;
        return f;
    };
    const double fp = clamp(0.5 * (1.0 + r));
    const double fm = clamp(0.5 * (1.0 - r));
    return std::clamp(entropy_term(fp) + entropy_term(fm), 0.0, std::numbers::ln2);
}

}  // namespace fockladder::meanfield
