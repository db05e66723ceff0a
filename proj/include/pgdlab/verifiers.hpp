#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "instances.hpp"
#include "random.hpp"

namespace pgdlab {

struct GridSpec {
    Domain domain;
    std::size_t points_per_axis = 2;
    double exclusion_radius = 0.0;
};

/// Outcome of one certification. passed iff worst_ratio <= 1 + tolerance (and not inconclusive).
struct CheckReport {
    std::string name;
    bool passed = false;
    bool inconclusive = false;
    double worst_ratio = 0.0;
    Vector worst_point;
    std::size_t worst_index = 0;
    double tolerance = 0.0;
    std::string details;
    std::vector<std::pair<std::string, double>> metrics;

    void finish()
    {
        passed = !inconclusive && worst_ratio <= 1.0 + tolerance;
    }
};

/// Tensor grid over the domain's bounding box, restricted to the domain, minus points closer
/// than the exclusion radius to any breakpoint (1-D only).
inline std::vector<Vector> grid_points(const GridSpec& grid, const std::vector<double>& breakpoints = {})
{
    if (grid.points_per_axis < 2) throw InvalidArgument("grid: need at least two points per axis");
    Vector lo, hi;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Interval>) {
                lo = scalar_vector(k.lo);
                hi = scalar_vector(k.hi);
            } else if constexpr (std::is_same_v<K, Box>) {
                lo = k.lo;
                hi = k.hi;
            } else if constexpr (std::is_same_v<K, Ball>) {
                lo = k.center.array() - k.radius;
                hi = k.center.array() + k.radius;
            } else {
                throw InvalidArgument("grid: an unbounded domain cannot be gridded");
            }
        },
        grid.domain.kind());

    const Index d = lo.size();
    const std::size_t n = grid.points_per_axis;
    std::vector<Vector> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        Vector x(d);
        for (Index i = 0; i < d; ++i) {
            const double s = static_cast<double>(idx[i]) / static_cast<double>(n - 1);
            x[i] = idx[i] + 1 == n ? hi[i] : lo[i] + s * (hi[i] - lo[i]);
        }
        bool keep = grid.domain.contains(x, 0.0);
        if (keep && d == 1 && grid.exclusion_radius > 0.0) {
            for (double b : breakpoints) {
                if (std::abs(x[0] - b) < grid.exclusion_radius) {
                    keep = false;
                    break;
                }
            }
        }
        if (keep) out.push_back(std::move(x));
        Index i = 0;
        while (i < d && ++idx[i] == n) idx[i++] = 0;
        if (i == d) break;
    }
    return out;
}

namespace detail {

inline constexpr double gap_floor = 1e-14;
inline constexpr double norm_floor = 1e-10;

/// gap / (tau |m|^alpha) with 0/0 := 0 at stationary minima.
inline double dominance_ratio(double gap, double norm, double alpha, double tau)
{
    if (gap <= gap_floor && norm <= norm_floor) return 0.0;
    if (gap <= 0.0) return 0.0;
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    return gap / (tau * std::pow(norm, alpha));
}

inline void track(CheckReport& r, double ratio, const Vector& x, std::size_t i, bool& first)
{
    if (first || ratio > r.worst_ratio || (std::isnan(ratio) && !std::isnan(r.worst_ratio))) {
        r.worst_ratio = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
        r.worst_point = x;
        r.worst_index = i;
        first = false;
    }
}

inline std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

template <class NormFn>
CheckReport dominance_core(const Objective& f, const std::vector<Vector>& pts, double alpha, double tau, double tol,
                           std::optional<double> sublevel, NormFn&& norm_of)
{
    if (!f.has_min_value()) throw Refused("dominance check: objective '" + f.name() + "' has no known minimum");
    CheckReport r;
    r.tolerance = tol;
    bool first = true;
    std::size_t used = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double gap = f.gap(pts[i]);
        if (sublevel && gap > *sublevel) continue;
        ++used;
        track(r, dominance_ratio(gap, norm_of(pts[i]), alpha, tau), pts[i], i, first);
    }
    if (used == 0) {
        r.inconclusive = true;
        r.details = "no grid point in the sublevel set";
    } else {
        r.details = "alpha=" + fmt(alpha) + " tau=" + fmt(tau) + " points=" + std::to_string(used) +
                    " worst_ratio=" + fmt(r.worst_ratio);
    }
    r.metrics.push_back({"points", static_cast<double>(used)});
    r.finish();
    return r;
}

inline std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n, std::size_t random_pairs,
                                                                     std::uint64_t seed)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    CounterRng rng(seed);
    for (std::size_t k = 0; k < random_pairs && n >= 2; ++k) {
        const std::size_t i = rng() % n;
        const std::size_t j = rng() % n;
        if (i != j) pairs.emplace_back(i, j);
    }
    return pairs;
}

} // namespace detail

struct PairSampling {
    std::size_t random_pairs = 10000;
    std::uint64_t seed = 1;
};

/// max |grad F(x) - grad F(y)| / (L |x - y|^{1/(beta-1)}) over adjacent and random grid pairs.
inline CheckReport verify_holder(const Objective& f, const GridSpec& grid, double L, double beta, double tol = 1e-9,
                                 PairSampling sampling = {})
{
    if (!(beta > 1.0)) throw InvalidArgument("verify_holder: beta must exceed 1");
    if (!(L > 0.0)) throw InvalidArgument("verify_holder: L must be positive");
    const auto pts = grid_points(grid, f.breakpoints());
    std::vector<Vector> grads;
    grads.reserve(pts.size());
    for (const auto& x : pts) grads.push_back(f.gradient(x));
    const double nu = 1.0 / (beta - 1.0);

    CheckReport r;
    r.tolerance = tol;
    bool first = true;
    for (const auto& [i, j] : detail::sample_pairs(pts.size(), sampling.random_pairs, sampling.seed)) {
        const double dist = (pts[i] - pts[j]).norm();
        if (dist == 0.0) continue;
        const double ratio = (grads[i] - grads[j]).norm() / (L * (nu == 1.0 ? dist : std::pow(dist, nu)));
        detail::track(r, ratio, pts[i], i, first);
    }
    r.details = "L=" + detail::fmt(L) + " beta=" + detail::fmt(beta) + " worst_ratio=" + detail::fmt(r.worst_ratio);
    r.finish();
    return r;
}

inline CheckReport verify_smoothness(const Objective& f, const GridSpec& grid, double L, double tol = 1e-9,
                                     PairSampling sampling = {})
{
    return verify_holder(f, grid, L, 2.0, tol, sampling);
}

inline CheckReport verify_grad_dominance(const Objective& f, const GridSpec& grid, double alpha, double tau,
                                         double tol = 1e-9)
{
    const auto pts = grid_points(grid, f.breakpoints());
    return detail::dominance_core(f, pts, alpha, tau, tol, std::nullopt,
                                  [&](const Vector& x) { return f.gradient(x).norm(); });
}

/// Dominance with the projected-gradient mapping, maximized over the grid and every eta.
inline CheckReport verify_projected_grad_dominance(const Objective& f, const Domain& domain, const GridSpec& grid,
                                                   double alpha, double tau, const std::vector<double>& etas,
                                                   double tol = 1e-9)
{
    if (etas.empty()) throw InvalidArgument("verify_projected_grad_dominance: need at least one eta");
    std::optional<double> eta0;
    if (f.certificate()) eta0 = f.certificate()->eta0;
    for (double eta : etas) {
        if (!(eta > 0.0)) throw InvalidArgument("verify_projected_grad_dominance: eta must be positive");
        if (eta0 && eta > *eta0 * (1.0 + 1e-12)) throw InvalidArgument("verify_projected_grad_dominance: eta exceeds eta0");
        if (!eta0 && !domain.is_all_space())
            throw InvalidArgument("verify_projected_grad_dominance: objective carries no eta0");
    }
    const auto pts = grid_points(grid, f.breakpoints());
    CheckReport best;
    bool first = true;
    for (double eta : etas) {
        CheckReport r = detail::dominance_core(f, pts, alpha, tau, tol, std::nullopt, [&](const Vector& x) {
            return projected_gradient_mapping(f, domain, x, eta).norm();
        });
        if (first || r.worst_ratio > best.worst_ratio) {
            best = std::move(r);
            first = false;
        }
    }
    return best;
}

/// Dominance restricted to grid points whose gap is at most epsilon.
inline CheckReport verify_local_grad_dominance(const Objective& f, const GridSpec& grid, double alpha, double tau,
                                               double epsilon, double tol = 1e-9)
{
    if (!(epsilon >= 0.0)) throw InvalidArgument("verify_local_grad_dominance: epsilon must be nonnegative");
    const auto pts = grid_points(grid, f.breakpoints());
    return detail::dominance_core(f, pts, alpha, tau, tol, epsilon,
                                  [&](const Vector& x) { return f.gradient(x).norm(); });
}

/// max 1 / (phi'(F - F*) |grad F|) over grid points above the minimum.
inline CheckReport verify_phi_kl(const Objective& f, const GridSpec& grid, const PsiPower& psi, double tol = 1e-9)
{
    if (!f.has_min_value()) throw Refused("verify_phi_kl: objective has no known minimum");
    const auto pts = grid_points(grid, f.breakpoints());
    CheckReport r;
    r.tolerance = tol;
    bool first = true;
    std::size_t used = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double gap = f.gap(pts[i]);
        if (!(gap > 0.0)) continue;
        ++used;
        const double prod = psi.dphi(gap) * f.gradient(pts[i]).norm();
        detail::track(r, prod > 0.0 ? 1.0 / prod : std::numeric_limits<double>::infinity(), pts[i], i, first);
    }
    if (used == 0) r.inconclusive = true;
    r.details = "q=" + detail::fmt(psi.q) + " points=" + std::to_string(used) + " worst_ratio=" + detail::fmt(r.worst_ratio);
    r.finish();
    return r;
}

/// Per-step KL divergence between unit-variance Gaussian oracles on f0 and f1.
inline double kl_per_step(const LowerBoundPair& pair, double sigma, double x)
{
    if (!(x >= 0.0 && x <= pair.R)) throw InvalidArgument("kl_per_step: x must lie in [0, R]");
    if (!(sigma > 0.0)) throw InvalidArgument("kl_per_step: sigma must be positive");
    const Vector v = scalar_vector(x);
    const double d = pair.f0.gradient(v)[0] - pair.f1.gradient(v)[0];
    return d * d / (2.0 * sigma * sigma);
}

struct VarianceRecursionParams {
    double a0;
    double beta0;
    double sigma;
    double L_tilde;
    double R;
    double V0;
    std::uint64_t T;
};

inline double variance_bound_numerator(const VarianceRecursionParams& p)
{
    return p.V0 * (p.a0 - 1.0) + 2.0 * p.sigma * p.sigma * p.a0 * p.a0 * p.a0 +
           2.0 * p.L_tilde * p.L_tilde * p.a0 * p.beta0 * p.beta0 * p.R * p.R;
}

/// Worst-case variance sequence: the momentum recursion iterated at equality.
inline std::vector<double> variance_recursion_sequence(const VarianceRecursionParams& p)
{
    std::vector<double> V(p.T + 1);
    V[0] = p.V0;
    for (std::uint64_t t = 0; t < p.T; ++t) {
        const double a = p.a0 / (t + 1.0);
        const double b = p.beta0 / (t + 1.0);
        V[t + 1] = (1.0 - a) * (1.0 - a) * V[t] + 2.0 * p.sigma * p.sigma * a * a +
                   2.0 * p.L_tilde * p.L_tilde * b * b * p.R * p.R;
    }
    return V;
}

/// Asserts V_t <= E / t for 1 <= t <= T. `perturb` (tests only) rewrites the sequence before the check.
inline CheckReport check_variance_recursion(const VarianceRecursionParams& p, double tol = 1e-9,
                                            const std::function<void(std::vector<double>&)>& perturb = {})
{
    if (!(p.a0 > 1.0 && p.a0 < 2.0)) throw InvalidArgument("check_variance_recursion: a0 must lie in (1, 2)");
    if (p.T < 1) throw InvalidArgument("check_variance_recursion: T must be at least 1");
    if (p.V0 < 0.0 || p.sigma < 0.0 || p.L_tilde < 0.0 || p.R < 0.0 || p.beta0 < 0.0)
        throw InvalidArgument("check_variance_recursion: parameters must be nonnegative");
    auto V = variance_recursion_sequence(p);
    if (perturb) perturb(V);
    const double E = variance_bound_numerator(p);

    CheckReport r;
    r.tolerance = tol;
    bool first = true;
    for (std::uint64_t t = 1; t <= p.T; ++t) {
        double ratio = 0.0;
        if (V[t] > 0.0) ratio = E > 0.0 ? V[t] * t / E : std::numeric_limits<double>::infinity();
        detail::track(r, ratio, scalar_vector(static_cast<double>(t)), t, first);
    }
    r.details = "E=" + detail::fmt(E) + " worst V_t t/E=" + detail::fmt(r.worst_ratio) + " at t=" + std::to_string(r.worst_index);
    r.metrics.push_back({"E", E});
    r.finish();
    return r;
}

struct DeltaRecursionParams {
    double q0;
    double eta0;
    double beta0;
    double c0;
    double tau;
    double alpha;
    double E;
    double delta0;
    std::uint64_t T;
};

/// OLS slope and residual RMS of y against x.
inline std::pair<double, double> ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (my + slope * (x[i] - mx));
        rss += e * e;
    }
    return {slope, std::sqrt(rss / n)};
}

/// Iterates the optimality-gap recursion and fits the log-log slope over [T/10, T].
/// Passes when slope <= -alpha/2 + 0.1; worst_ratio is 1 + slope - (-alpha/2 + 0.1).
inline CheckReport check_delta_recursion(const DeltaRecursionParams& p)
{
    if (!(p.alpha >= 1.0 && p.alpha < 2.0)) throw InvalidArgument("check_delta_recursion: alpha must lie in [1, 2)");
    if (!(p.q0 > 0.0 && p.eta0 > 0.0 && p.beta0 > 0.0 && p.c0 > 0.0 && p.tau > 0.0))
        throw InvalidArgument("check_delta_recursion: constants must be positive");
    if (p.E < 0.0 || p.delta0 < 0.0) throw InvalidArgument("check_delta_recursion: E and delta0 must be nonnegative");
    if (p.T < 20) throw InvalidArgument("check_delta_recursion: T must be at least 20");

    const double a = p.alpha;
    std::vector<double> delta(p.T + 1);
    delta[0] = p.delta0;
    std::uint64_t clamps = 0;
    for (std::uint64_t t = 0; t < p.T; ++t) {
        const double s = t + 1.0;
        const double q = p.q0 * std::pow(s, -2.0 + a / 2.0);
        const double eta = p.eta0 * std::pow(s, 1.0 - a / 2.0);
        const double beta = p.beta0 / s;
        const double c = p.c0 * std::pow(s, -1.0 + a / 2.0);
        double next = delta[t] - q * eta * eta / (2.0 * std::pow(p.tau, 2.0 / a)) * std::pow(delta[t], 2.0 / a) +
                      0.5 * (beta / (2.0 * c) + 2.0 * q * eta * eta) * p.E / s;
        if (next < 0.0) {
            next = 0.0;
            ++clamps;
        }
        delta[t + 1] = next;
    }

    CheckReport r;
    r.tolerance = 0.0;
    const double threshold = -a / 2.0 + 0.1;
    std::vector<double> lx, ly;
    for (std::uint64_t t = std::max<std::uint64_t>(1, p.T / 10); t <= p.T; ++t) {
        if (delta[t] > 0.0) {
            lx.push_back(std::log(static_cast<double>(t)));
            ly.push_back(std::log(delta[t]));
        }
    }
    if (lx.size() < 2) {
        // identically zero tail: faster than any power
        r.worst_ratio = 0.0;
        r.details = "delta vanishes on the fit window";
        r.metrics.push_back({"slope", -std::numeric_limits<double>::infinity()});
    } else {
        const auto [slope, resid] = ols_slope(lx, ly);
        r.worst_ratio = 1.0 + slope - threshold;
        r.details = "slope=" + detail::fmt(slope) + " threshold=" + detail::fmt(threshold) + " residual=" + detail::fmt(resid);
        r.metrics.push_back({"slope", slope});
        r.metrics.push_back({"residual", resid});
    }
    if (clamps > 0) r.details += " clamped_to_zero=" + std::to_string(clamps);
    r.metrics.push_back({"clamps", static_cast<double>(clamps)});
    r.metrics.push_back({"delta_T", delta.back()});
    r.worst_index = p.T;
    r.worst_point = scalar_vector(delta.back());
    r.finish();
    return r;
}

/// Closed-form maximum of A0 B - A1 B^{2/alpha} + A2 over B >= 0.
inline double poly_bound_closed_form(double A0, double A1, double A2, double alpha)
{
    const double e = alpha / (2.0 - alpha);
    return A2 + std::pow(alpha / 2.0, e) * ((2.0 - alpha) / 2.0) * std::pow(A0, 2.0 / (2.0 - alpha)) * std::pow(A1, -e);
}

/// Numeric maximum (Brent plus a grid) against the closed form, the stationary-point identity,
/// and nonpositivity past the threshold.
inline CheckReport check_poly_bound(double A0, double A1, double A2, double alpha, double tol = 1e-12)
{
    if (!(A0 > 0.0 && A1 > 0.0 && A2 >= 0.0)) throw InvalidArgument("check_poly_bound: need A0, A1 > 0 and A2 >= 0");
    if (!(alpha >= 1.0 && alpha < 2.0)) throw InvalidArgument("check_poly_bound: alpha must lie in [1, 2)");
    auto F = [=](double B) { return A0 * B - A1 * std::pow(B, 2.0 / alpha) + A2; };
    const double e = alpha / (2.0 - alpha);
    const double bound = poly_bound_closed_form(A0, A1, A2, alpha);
    const double b_star = std::pow(alpha * A0 / (2.0 * A1), e);
    const double b_tail = std::max(A2 / A0, std::pow(2.0 * A0 / A1, e));
    const double b_hi = 2.0 * b_tail;

    const auto [b_num, neg_max] =
        boost::math::tools::brent_find_minima([&](double B) { return -F(B); }, 0.0, b_hi, 52);
    double num_max = -neg_max;
    constexpr int grid_n = 10000;
    for (int i = 0; i <= grid_n; ++i) num_max = std::max(num_max, F(b_hi * i / grid_n));

    const double core = bound - A2;
    const double identity_err = std::abs((F(b_star) - A2) - core) / std::max(std::abs(core), 1e-300);
    const double scale = std::max({std::abs(A0 * b_tail), std::abs(A2), 1e-300});
    double tail_worst = -std::numeric_limits<double>::infinity();
    for (double m : {1.0, 1.5, 2.0, 10.0}) tail_worst = std::max(tail_worst, F(m * b_tail) / scale);

    CheckReport r;
    r.tolerance = tol;
    r.worst_ratio = num_max / bound;
    r.worst_point = scalar_vector(b_num);
    r.metrics = {{"closed_form", bound},     {"numeric_max", num_max},     {"b_star", b_star},
                 {"identity_rel_err", identity_err}, {"tail_max_scaled", tail_worst}};
    r.details = "closed=" + detail::fmt(bound) + " numeric=" + detail::fmt(num_max) +
                " identity_err=" + detail::fmt(identity_err) + " tail=" + detail::fmt(tail_worst);
    r.finish();
    if (identity_err > tol || tail_worst > 1e-12) r.passed = false;
    return r;
}

/// Distance to the minimizer against both the gap-based bound and the global radius bound.
inline CheckReport verify_distance_bounds(const Objective& f, const GridSpec& grid, double alpha, double tau, double L,
                                          double tol = 1e-9)
{
    if (!(alpha > 1.0 && alpha < 2.0)) throw InvalidArgument("verify_distance_bounds: alpha must lie in (1, 2)");
    if (!f.minimizer() || !f.has_min_value()) throw Refused("verify_distance_bounds: minimizer unknown");
    const Vector& xs = *f.minimizer();
    const double r0 = r0_bound(alpha, L, tau);
    const auto pts = grid_points(grid, f.breakpoints());

    CheckReport r;
    r.tolerance = tol;
    bool first = true;
    double worst_gap_ratio = 0.0, worst_r0_ratio = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dist = (pts[i] - xs).norm();
        const double db = distance_bound(alpha, tau, std::max(f.gap(pts[i]), 0.0));
        double g_ratio = 0.0;
        if (dist > 1e-12) g_ratio = db > 0.0 ? dist / db : std::numeric_limits<double>::infinity();
        const double r_ratio = dist / r0;
        worst_gap_ratio = std::max(worst_gap_ratio, g_ratio);
        worst_r0_ratio = std::max(worst_r0_ratio, r_ratio);
        detail::track(r, std::max(g_ratio, r_ratio), pts[i], i, first);
    }
    r.metrics = {{"gap_bound_ratio", worst_gap_ratio}, {"r0_ratio", worst_r0_ratio}, {"r0", r0}};
    r.details = "gap-bound ratio=" + detail::fmt(worst_gap_ratio) + " r0 ratio=" + detail::fmt(worst_r0_ratio);
    r.finish();
    return r;
}

} // namespace pgdlab
