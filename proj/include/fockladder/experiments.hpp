// experiments.hpp — flux / interaction scans, finite-size extrapolation and band panels

#pragma once

#include "fockladder/errors.hpp"
#include "fockladder/floquet.hpp"
#include "fockladder/meanfield.hpp"
#include "fockladder/observables.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fockladder::experiments {

// ------------------------------- concurrency ---------------------------------

/// Worker count for scans: FOCKLADDER_THREADS when set, else the hardware concurrency.
inline std::size_t scan_threads() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FOCKLADDER_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0)
            throw std::invalid_argument("FOCKLADDER_THREADS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return hw;
}

/// Evaluates fn(0..n-1) on up to scan_threads() workers; results keep index order and the
/// lowest-index exception is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(scan_threads(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// --------------------------------- grids -------------------------------------

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw std::invalid_argument("grid must not be empty");
    if (n == 1) return {a};
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    g.back() = b;
    return g;
}

inline std::vector<double> default_flux_grid() { return linspace(0.0, 0.5 * std::numbers::pi, 121); }
inline std::vector<double> default_mu_grid() { return linspace(-0.6, 0.1, 71); }
inline std::vector<int> default_sizes() { return {20, 40, 60, 80, 100}; }

inline void require_ascending(const std::vector<double>& g, const char* what) {
    if (g.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
    for (double v : g)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " grid has non-finite values");
    for (std::size_t k = 1; k < g.size(); ++k)
        if (!(g[k] > g[k - 1])) throw std::invalid_argument(std::string(what) + " grid must be strictly ascending");
}

inline void require_flux_grid(const std::vector<double>& g, bool open_at_zero) {
    require_ascending(g, "flux");
    const double top = 0.5 * std::numbers::pi + 1e-12;
    if (g.front() < 0.0 || g.back() > top || (open_at_zero && g.front() <= 0.0))
        throw std::invalid_argument(open_at_zero ? "flux grid must lie within (0, pi/2]"
                                                 : "flux grid must lie within [0, pi/2]");
}

inline SystemParams point(int N, double mu, double xi, double phi, double tau) {
    SystemParams p{N, mu, xi, phi, tau};
    p.validate();
    return p;
}

inline std::string at_flux(double phi) {
    std::ostringstream os;
    os.precision(17);
    os << " (at phi=" << phi << ")";
    return os.str();
}

// ------------------------------- flux scans ----------------------------------

struct ScanRecord {
    SystemParams params;
    double jc_numeric{0.0};   // 2J_C/(NJ)
    double jc_analytic{0.0};  // 2J_C/(NJ)
    std::optional<double> entropy_numeric;
    std::optional<double> entropy_analytic;
};

/// Ground-state chiral current along a flux grid, numeric next to the mean-field value.
inline std::vector<ScanRecord> scan_flux(int N, double mu, double xi, double tau, const std::vector<double>& phi_grid) {
    require_flux_grid(phi_grid, false);
    return parallel_map(phi_grid.size(), [&](std::size_t k) {
        const SystemParams p = point(N, mu, xi, phi_grid[k], tau);
        try {
            const GroundState g = solve_ground_state(p);
            ScanRecord r{p, chiral_current_numeric(g.state, p.phi).normalized,
                         meanfield::chiral_current_analytic(p.phi, xi), std::nullopt, std::nullopt};
            return r;
        } catch (const BranchAmbiguityError& e) {
            throw BranchAmbiguityError(e.what() + at_flux(p.phi));
        }
    });
}

/// Impurity–BEC entanglement of the ground state along a flux grid at μ = 0.
inline std::vector<ScanRecord> entropy_scan(int N, double xi, double tau, const std::vector<double>& phi_grid) {
    require_flux_grid(phi_grid, true);
    return parallel_map(phi_grid.size(), [&](std::size_t k) {
        const SystemParams p = point(N, 0.0, xi, phi_grid[k], tau);
        try {
            const GroundState g = solve_ground_state(p);
            ScanRecord r{p, chiral_current_numeric(g.state, p.phi).normalized,
                         meanfield::chiral_current_analytic(p.phi, xi), entanglement_entropy_numeric(g.state),
                         meanfield::entropy_analytic(p.phi, xi)};
            return r;
        } catch (const BranchAmbiguityError& e) {
            throw BranchAmbiguityError(e.what() + at_flux(p.phi));
        }
    });
}

// --------------------------- maximum over the flux ---------------------------

struct FluxMaximum {
    double phi{0.0};
    double jc{0.0};  // 2J_C/(NJ)
};

namespace detail {

inline constexpr int kCrossingProbes = 16;
inline constexpr double kCrossingTol = 1e-10;
inline constexpr int kBrentBits = 30;

inline int ground_parity(const SystemParams& p) { return solve_sector_ground_states(p, false).parity(); }

inline double sector_current(SystemParams p, double phi, int sign) {
    p.phi = phi;
    return chiral_current_numeric(solve_sector_ground_states(p).sector(sign).state, phi).normalized;
}

}  // namespace detail

/// Supremum of the ground-state current over the flux axis.
///
/// Every vortex entry is a level crossing between the Π-even and Π-odd sector ground
/// states, so the current is a sawtooth in φ whose maximum sits at a crossing. The grid
/// maximum is bracketed by its neighbours, crossings inside the bracket are located by
/// bisection on the sector gap, and the smooth single-sector current is maximized on each
/// piece between crossings.
inline FluxMaximum max_current_over_flux(int N, double mu, double xi, double tau, const std::vector<double>& phi_grid) {
    const auto records = scan_flux(N, mu, xi, tau, phi_grid);
    std::size_t k = 0;
    for (std::size_t j = 1; j < records.size(); ++j)
        if (records[j].jc_numeric > records[k].jc_numeric) k = j;
    FluxMaximum best{phi_grid[k], records[k].jc_numeric};
    if (phi_grid.size() < 2) return best;

    const SystemParams base = point(N, mu, xi, phi_grid[k], tau);
    auto at = [&](double phi) {
        SystemParams p = base;
        p.phi = phi;
        return p;
    };
    const double lo = phi_grid[k == 0 ? 0 : k - 1];
    const double hi = phi_grid[std::min(k + 1, phi_grid.size() - 1)];

    std::vector<double> probes(detail::kCrossingProbes + 1);
    std::vector<int> parity(probes.size());
    for (std::size_t j = 0; j < probes.size(); ++j) {
        probes[j] = lo + (hi - lo) * static_cast<double>(j) / detail::kCrossingProbes;
        parity[j] = detail::ground_parity(at(probes[j]));
    }
    std::vector<double> breaks{lo};
    for (std::size_t j = 0; j + 1 < probes.size(); ++j) {
        if (parity[j] == parity[j + 1]) continue;
        double a = probes[j], b = probes[j + 1];
        while (b - a > detail::kCrossingTol) {
            const double c = 0.5 * (a + b);
            (detail::ground_parity(at(c)) == parity[j] ? a : b) = c;
        }
        breaks.push_back(0.5 * (a + b));
    }
    breaks.push_back(hi);

    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double a = breaks[j], b = breaks[j + 1];
        if (!(b > a)) continue;
        const int sign = detail::ground_parity(at(0.5 * (a + b)));
        auto current = [&](double phi) { return detail::sector_current(base, phi, sign); };
        const auto [arg, neg] = boost::math::tools::brent_find_minima(
            [&](double phi) { return -current(phi); }, a, b, detail::kBrentBits);
        for (auto [phi, jc] : {std::pair{arg, -neg}, std::pair{a, current(a)}, std::pair{b, current(b)}})
            if (jc > best.jc) best = {phi, jc};
    }
    return best;
}

// --------------------------- interaction scan --------------------------------

struct MuMaximum {
    double mu_max{0.0};
    double max_jc{0.0};
    double mu_grid_max{0.0};
    std::vector<double> mus;
    std::vector<FluxMaximum> maxima;  // per entry of `mus`
};

/// Interaction strength that maximizes the peak chiral current. The grid maximum is refined
/// by Brent's successive parabolic interpolation inside its two neighbouring grid cells.
inline MuMaximum find_mu_max(int N, double xi, double tau, const std::vector<double>& mu_grid,
                             const std::vector<double>& phi_grid) {
    require_ascending(mu_grid, "interaction");
    require_flux_grid(phi_grid, false);
    if (mu_grid.size() < 3) throw std::invalid_argument("interaction grid needs at least three points");

    MuMaximum out;
    out.mus = mu_grid;
    out.maxima.reserve(mu_grid.size());
    for (double mu : mu_grid) out.maxima.push_back(max_current_over_flux(N, mu, xi, tau, phi_grid));

    std::size_t k = 0;
    for (std::size_t j = 1; j < mu_grid.size(); ++j)
        if (out.maxima[j].jc > out.maxima[k].jc) k = j;
    if (k == 0 || k + 1 == mu_grid.size()) {
        std::ostringstream os;
        os << "maximum chiral current lies on the interaction grid boundary (mu=" << mu_grid[k] << ", N=" << N
           << "); widen the bracket around mu_c=" << meanfield::mu_critical(xi);
        throw GridBoundaryError(os.str());
    }
    out.mu_grid_max = mu_grid[k];
    const auto [arg, neg] = boost::math::tools::brent_find_minima(
        [&](double mu) { return -max_current_over_flux(N, mu, xi, tau, phi_grid).jc; }, mu_grid[k - 1],
        mu_grid[k + 1], detail::kBrentBits);
    if (-neg >= out.maxima[k].jc) {
        out.mu_max = arg;
        out.max_jc = -neg;
    } else {
        out.mu_max = mu_grid[k];
        out.max_jc = out.maxima[k].jc;
    }
    return out;
}

// ------------------------- finite-size extrapolation -------------------------

struct FitResult {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
    std::vector<std::pair<double, double>> points;  // (1/N, |mu_max - mu_c|)
};

/// Ordinary least-squares line through `points`.
inline FitResult fit_line(std::vector<std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("linear fit needs at least three points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : points) {
        mx += x / n;
        my += y / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("degenerate design matrix: abscissae coincide");
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (auto [x, y] : points) ss_res += std::pow(y - (f.intercept + f.slope * x), 2);
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    f.points = std::move(points);
    return f;
}

struct ExtrapolationResult {
    FitResult fit;
    std::vector<int> sizes;
    std::vector<MuMaximum> per_size;
    double mu_c{0.0};
};

inline ExtrapolationResult finite_size_extrapolation(const std::vector<int>& Ns, double xi, double tau,
                                                     const std::vector<double>& mu_grid,
                                                     const std::vector<double>& phi_grid) {
    if (Ns.size() < 3) throw std::invalid_argument("finite-size extrapolation needs at least three sizes");
    if (std::set<int>(Ns.begin(), Ns.end()).size() != Ns.size())
        throw std::invalid_argument("degenerate design matrix: repeated system size");
    for (int N : Ns) require_particle_number(N);

    ExtrapolationResult out;
    out.mu_c = meanfield::mu_critical(xi);
    out.sizes = Ns;
    std::vector<std::pair<double, double>> pts;
    for (int N : Ns) {
        out.per_size.push_back(find_mu_max(N, xi, tau, mu_grid, phi_grid));
        pts.emplace_back(1.0 / N, std::abs(out.per_size.back().mu_max - out.mu_c));
    }
    out.fit = fit_line(std::move(pts));
    return out;
}

// ------------------------------- band panels ---------------------------------

struct BandPanel {
    double phi{0.0};
    std::vector<double> thetas;
    std::vector<double> e_lower;  // mean-field bands on the phase grid
    std::vector<double> e_upper;
    RealVector quasienergies;     // every Floquet level, ascending
    Eigen::MatrixXd density_left;  // P_{-1}(θ_k, ε_i): rows θ, columns levels
    Eigen::MatrixXd density_right;
    double ground_quasienergy{0.0};
    LegProfile ground;
};

inline std::vector<double> default_panel_fluxes(double xi) {
    const double c = meanfield::critical_flux(xi);
    return {0.5 * c, c, 1.5 * c};
}

inline std::vector<BandPanel> band_panels(int N, double xi, double mu, double tau, const std::vector<double>& fluxes) {
    if (fluxes.empty()) throw std::invalid_argument("flux list is empty");
    return parallel_map(fluxes.size(), [&](std::size_t k) {
        const SystemParams p = point(N, mu, xi, fluxes[k], tau);
        try {
            require_unique_quasienergies(p);
            const Spectrum spec = spectrum(build_floquet(p), tau);
            const GroundState g = ground_state(spec);
            BandPanel panel;
            panel.phi = p.phi;
            panel.thetas = phase_grid(N);
            for (double t : panel.thetas) {
                panel.e_lower.push_back(meanfield::band_energy(t, p.phi, xi, N, meanfield::Band::lower));
                panel.e_upper.push_back(meanfield::band_energy(t, p.phi, xi, N, meanfield::Band::upper));
            }
            panel.quasienergies = spec.quasienergies;
            panel.density_left = phase_energy_map(spec.states, -1);
            panel.density_right = phase_energy_map(spec.states, 1);
            panel.ground_quasienergy = g.quasienergy;
            panel.ground = fock_density_phase(g.state);
            return panel;
        } catch (const BranchAmbiguityError& e) {
            throw BranchAmbiguityError(e.what() + at_flux(p.phi));
        }
    });
}

/// Ground-state phase distribution Σ_m P_m(θ, ε_0) of a panel (column 0 holds the lowest level
/// unless the ground state was a degenerate Π-even combination, so it is recomputed from the strips).
inline std::vector<double> ground_phase_distribution(const BandPanel& panel) {
    std::vector<double> out(panel.thetas.size(), 0.0);
    const int N = panel.ground.N;
    for (std::size_t k = 0; k < panel.thetas.size(); ++k) {
        for (int leg = 0; leg < 2; ++leg) {
            cplx sum = 0.0;
            for (int n = -N / 2; n <= N / 2; ++n) {
                const auto j = static_cast<std::size_t>(n + N / 2);
                const double amp = std::sqrt(panel.ground.density[leg][j]);
                const double arg = panel.ground.phase[leg][j].value_or(0.0);
                sum += amp * std::exp(kI * (panel.thetas[k] * n + arg));
            }
            out[k] += std::norm(sum);
        }
    }
    return out;
}

struct RidgePoint {
    double theta{0.0};
    double quasienergy{0.0};
};

/// Lower-band ridge: every level below the bottom of the upper mean-field band, placed at the
/// θ where its phase density Σ_m P_m(θ, ε_i) peaks.
inline std::vector<RidgePoint> lower_band_ridge(const BandPanel& panel) {
    const double upper_floor = *std::min_element(panel.e_upper.begin(), panel.e_upper.end());
    std::vector<RidgePoint> ridge;
    for (Eigen::Index i = 0; i < panel.quasienergies.size() && panel.quasienergies(i) < upper_floor; ++i) {
        Eigen::Index k = 0;
        (panel.density_left.col(i) + panel.density_right.col(i)).maxCoeff(&k);
        ridge.push_back({panel.thetas[static_cast<std::size_t>(k)], panel.quasienergies(i)});
    }
    return ridge;
}

/// Indices of strict interior local maxima (periodic in θ when `periodic`) whose value
/// exceeds `floor` times the global maximum.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& v, double floor, bool periodic) {
    std::vector<std::size_t> out;
    if (v.size() < 3) return out;
    const double top = *std::max_element(v.begin(), v.end());
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (!periodic && (k == 0 || k + 1 == n)) continue;
        const double left = v[(k + n - 1) % n], right = v[(k + 1) % n];
        if (v[k] > left && v[k] >= right && v[k] >= floor * top) out.push_back(k);
    }
    return out;
}

inline constexpr double kDensityNoiseFloor = 1e-8;  // relative to the peak

/// Holes of a density profile: interior local minima below `fraction` of the global maximum.
/// Minima whose neighbouring peaks sit under the noise floor (round-off ripples in the
/// exponentially small tails) are skipped.
inline std::vector<std::size_t> deep_local_minima(const std::vector<double>& v, double fraction) {
    std::vector<std::size_t> out;
    if (v.size() < 3) return out;
    const double top = *std::max_element(v.begin(), v.end());
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        if (!(v[k] < v[k - 1] && v[k] <= v[k + 1] && v[k] < fraction * top)) continue;
        std::size_t l = k, r = k;
        while (l > 0 && v[l - 1] >= v[l]) --l;
        while (r + 1 < v.size() && v[r + 1] >= v[r]) ++r;
        if (std::min(v[l], v[r]) > kDensityNoiseFloor * top) out.push_back(k);
    }
    return out;
}

}  // namespace fockladder::experiments
