// test_meanfield.cpp — closed-form bands, ground-state phase, current, μ_c and entropy

#include "fockladder/meanfield.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fockladder::meanfield;

namespace {

// Reference values evaluated independently at 30 significant digits.
constexpr double kPhiC05 = 0.674888845586006;
constexpr double kPhiC10 = 0.904556894302381;
constexpr double kMuC05 = -0.390388203202208;
constexpr double kSin2Theta0 = 0.605002686414223;  // φ = 1, ξ = 0.5
constexpr double kTheta0 = 0.891188390961881;
constexpr double kVortexCurrent = 0.194894302563856;  // φ = 1, ξ = 0.5
constexpr double kEntropyHalfPi = 0.589514485735048;  // φ = π/2, ξ = 0.5
constexpr double kEntropy12 = 0.558345191382760;      // φ = 1.2, ξ = 0.5
constexpr double kAlpha = 2.24969735372007;           // θ = 0.5, φ = 1, ξ = 0.5
constexpr double kBandEdge = 55.9016994374947;        // 50·sqrt(1.25)

// Mean-field 2×2 Bloch block in the (L, R) basis with σ_z = diag(-1, +1).
Eigen::Matrix2d bloch(double theta, double phi, double xi, double N) {
    const double c = std::cos(theta) * std::cos(phi), s = std::sin(theta) * std::sin(phi);
    Eigen::Matrix2d h;
    h << -c + s, -xi, -xi, -c - s;
    return 0.5 * N * h;
}

double lower_at_theta0(double phi, double xi, double N) {
    return band_energy(theta0(phi, xi).back(), phi, xi, N, Band::lower);
}

}  // namespace

TEST(Bands, ValuesAtOrigin) {
    EXPECT_DOUBLE_EQ(band_energy(0, 0, 0.5, 100, Band::lower), -75.0);
    EXPECT_DOUBLE_EQ(band_energy(0, 0, 0.5, 100, Band::upper), -25.0);
    const BandPoint bp = band_point(0.3, 0.7, 0.5, 40);
    EXPECT_LE(bp.e_lower, bp.e_upper);
}

TEST(Bands, EdgeOfZoneAtQuarterFlux) {
    const double h = 0.5 * std::numbers::pi;
    EXPECT_NEAR(band_energy(h, h, 0.5, 100, Band::lower), -kBandEdge, 1e-12);
    EXPECT_NEAR(band_energy(h, h, 0.5, 100, Band::upper), kBandEdge, 1e-12);
}

TEST(Bands, EvenInTheta) {
    for (double t : {0.1, 0.8, 2.0, 3.0})
        for (Band b : {Band::lower, Band::upper}) EXPECT_DOUBLE_EQ(band_energy(t, 0.9, 0.5, 60, b), band_energy(-t, 0.9, 0.5, 60, b));
}

TEST(Bands, MatchBlochBlockEigenvalues) {
    for (double t = -3.0; t <= 3.0; t += 0.25) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(bloch(t, 1.1, 0.4, 30));
        EXPECT_NEAR(es.eigenvalues()(0), band_energy(t, 1.1, 0.4, 30, Band::lower), 1e-12);
        EXPECT_NEAR(es.eigenvalues()(1), band_energy(t, 1.1, 0.4, 30, Band::upper), 1e-12);
    }
}

TEST(MixingAngle, Examples) {
    EXPECT_NEAR(mixing_angle(0.0, 1.0, 0.5), 0.5 * std::numbers::pi, 1e-15);
    EXPECT_NEAR(mixing_angle(0.5, 1.0, 0.5), kAlpha, 1e-13);
    EXPECT_NEAR(mixing_angle(1.5, 1.5, 1e-6), std::numbers::pi, 1e-5);
    EXPECT_THROW(mixing_angle(0.1, 0.1, 0.0), std::invalid_argument);
}

TEST(MixingAngle, StateDiagonalizesBlochBlock) {
    for (double phi : {0.3, 1.0, 1.4})
        for (double t = -3.1; t <= 3.1; t += 0.1) {
            const MeanfieldState s = lower_band_state(t, phi, 0.5);
            EXPECT_NEAR(s.amp_L * s.amp_L + s.amp_R * s.amp_R, 1.0, 1e-15);
            const Eigen::Vector2d v(s.amp_L, s.amp_R);
            const double e = band_energy(t, phi, 0.5, 20, Band::lower);
            EXPECT_LE((bloch(t, phi, 0.5, 20) * v - e * v).norm(), 1e-10);
        }
}

TEST(CriticalFlux, Values) {
    EXPECT_DOUBLE_EQ(critical_flux(0.0), 0.0);
    EXPECT_NEAR(critical_flux(0.5), kPhiC05, 1e-14);
    EXPECT_NEAR(critical_flux(1.0), kPhiC10, 1e-14);
    EXPECT_GT(critical_flux(1.0), critical_flux(0.5));
    EXPECT_THROW(critical_flux(-0.1), std::invalid_argument);
}

TEST(Theta0, MeissnerBranch) {
    EXPECT_EQ(theta0(0.5 * kPhiC05, 0.5), std::vector<double>{0.0});
    EXPECT_EQ(theta0(0.0, 0.5), std::vector<double>{0.0});
}

TEST(Theta0, VortexBranch) {
    const auto t = theta0(1.0, 0.5);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t[1], kTheta0, 1e-13);
    EXPECT_NEAR(t[0], -kTheta0, 1e-13);
    EXPECT_NEAR(std::pow(std::sin(t[1]), 2), kSin2Theta0, 1e-13);
}

TEST(Theta0, ContinuousAtCriticalFlux) {
    const double phic = critical_flux(0.5);
    EXPECT_LT(theta0(phic + 1e-10, 0.5).back(), 1e-4);
    EXPECT_LT(theta0(phic + 1e-6, 0.5).back(), theta0(phic + 1e-4, 0.5).back());
}

TEST(Theta0, RejectsOutOfDomain) {
    EXPECT_THROW(theta0(-0.1, 0.5), std::invalid_argument);
    EXPECT_THROW(theta0(1.6, 0.5), std::invalid_argument);
    EXPECT_THROW(theta0(1.0, 0.0), std::invalid_argument);
}

TEST(Theta0, MinimizesLowerBand) {
    const double h = 1e-5;
    for (double xi : {0.3, 0.5, 1.0})
        for (double phi = 0.05; phi < 1.5; phi += 0.1) {
            if (std::abs(phi - critical_flux(xi)) < 0.02) continue;
            for (double t : theta0(phi, xi)) {
                auto e = [&](double x) { return band_energy(x, phi, xi, 1.0, Band::lower); };
                EXPECT_LE(std::abs((e(t + h) - e(t - h)) / (2 * h)), 1e-8) << phi << " " << xi;
                EXPECT_GT(e(t + h) - 2 * e(t) + e(t - h), 0.0) << phi << " " << xi;
            }
        }
}

TEST(ChiralCurrent, Examples) {
    EXPECT_DOUBLE_EQ(chiral_current_analytic(0.0, 0.5), 0.0);
    EXPECT_NEAR(chiral_current_analytic(std::numbers::pi / 6, 0.5), 0.5, 1e-15);
    EXPECT_NEAR(chiral_current_analytic(1.0, 0.5), kVortexCurrent, 1e-13);
}

TEST(ChiralCurrent, BranchesMeetAtCriticalFlux) {
    for (double xi : {0.1, 0.5, 1.0, 2.0}) {
        const double phic = critical_flux(xi), s = std::sin(phic);
        const double vortex = xi * xi * std::cos(phic) / (s * s * std::sqrt(xi * xi + s * s));
        EXPECT_NEAR(vortex, s, 1e-10);
        EXPECT_NEAR(chiral_current_analytic(phic, xi), vortex, 1e-10);
    }
}

TEST(ChiralCurrent, IsFluxDerivativeOfLowerBandMinimum) {
    const double h = 1e-5;
    for (double xi : {0.5, 1.0})
        for (double phi = 0.1; phi < 1.5; phi += 0.1) {
            if (std::abs(phi - critical_flux(xi)) < 0.01) continue;
            const double fd = (lower_at_theta0(phi + h, xi, 2.0) - lower_at_theta0(phi - h, xi, 2.0)) / (2 * h);
            EXPECT_NEAR(fd, chiral_current_analytic(phi, xi), 1e-6) << phi << " " << xi;
        }
}

TEST(MuCritical, Values) {
    EXPECT_DOUBLE_EQ(mu_critical(0.0), -0.5);
    EXPECT_NEAR(mu_critical(0.5), kMuC05, 1e-14);
}

TEST(MuCritical, EqualsHalfCosineOfCriticalFlux) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> xi(0.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        const double x = xi(rng);
        EXPECT_NEAR(-0.5 * std::cos(critical_flux(x)), mu_critical(x), 1e-14) << x;
    }
}

TEST(Entropy, Values) {
    EXPECT_NEAR(entropy_analytic(0.5 * std::numbers::pi, 0.5), kEntropyHalfPi, 1e-13);
    EXPECT_NEAR(entropy_analytic(1.2, 0.5), kEntropy12, 1e-13);
    EXPECT_DOUBLE_EQ(entropy_analytic(0.3, 0.5), 0.0);   // f₊ clamps to 1
    EXPECT_DOUBLE_EQ(entropy_analytic(kPhiC05, 0.5), 0.0);
    EXPECT_THROW(entropy_analytic(0.0, 0.5), std::invalid_argument);
    EXPECT_DOUBLE_EQ(entropy_term(0.0), 0.0);
    EXPECT_DOUBLE_EQ(entropy_term(1.0), 0.0);
}

TEST(Entropy, BoundedOnGrid) {
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 100; ++j) {
            const double xi = 0.2 * i, phi = 0.5 * std::numbers::pi * j / 100.0;
            const double s = entropy_analytic(phi, xi);
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, std::numbers::ln2);
        }
}

TEST(Entropy, AgreesWithThetaZeroSubstitutedForm) {
    // Above φ_c, ξ² + sin²θ0 sin²φ = sin²φ(ξ² + sin²φ), so both root forms coincide.
    for (double phi = 0.7; phi < 1.57; phi += 0.05) {
        const double t = theta0(phi, 0.5).back();
        const double s = std::sin(phi), st = std::sin(t) * s;
        const double r = 0.5 / std::sqrt(0.25 + st * st);
        const double fp = 0.5 * (1 + r), fm = 0.5 * (1 - r);
        EXPECT_NEAR(entropy_analytic(phi, 0.5), entropy_term(fp) + entropy_term(fm), 1e-10) << phi;
    }
}
