#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace pgdlab {

/// Constants certifying smoothness and (alpha, tau) dominance of an objective.
struct DominanceCertificate {
    double alpha = 2.0;
    double tau = 1.0;
    std::optional<double> eta0;
    double L = 1.0;
    std::optional<double> L_tilde;
    std::optional<double> G_bound;
};

/**
 * An objective with exact value and gradient, optionally carrying its exact minimum, a
 * certificate, and an analytic gap function that avoids cancellation near the minimizer.
 * Immutable after construction.
 */
class Objective {
public:
    using ValueFn = std::function<double(const Vector&)>;
    using GradientFn = std::function<Vector(const Vector&)>;

    struct Parts {
        std::string name;
        Domain domain;
        ValueFn value;
        GradientFn gradient;
        ValueFn gap;
        std::optional<Vector> minimizer;
        std::optional<double> min_value;
        std::optional<DominanceCertificate> certificate;
        std::vector<double> breakpoints;
    };

    explicit Objective(Parts parts) : p_(std::move(parts))
    {
        if (!p_.value || !p_.gradient) throw InvalidArgument("Objective: value and gradient are required");
        if (p_.gap && !p_.min_value) throw InvalidArgument("Objective: a gap function needs min_value");
    }

    const std::string& name() const { return p_.name; }
    const Domain& domain() const { return p_.domain; }
    Index dim() const { return p_.domain.dim(); }

    double value(const Vector& x) const
    {
        p_.domain.check_dim(x);
        return p_.value(x);
    }

    Vector gradient(const Vector& x) const
    {
        p_.domain.check_dim(x);
        return p_.gradient(x);
    }

    bool has_min_value() const { return p_.min_value.has_value(); }
    const std::optional<double>& min_value() const { return p_.min_value; }
    const std::optional<Vector>& minimizer() const { return p_.minimizer; }
    const std::optional<DominanceCertificate>& certificate() const { return p_.certificate; }
    const std::vector<double>& breakpoints() const { return p_.breakpoints; }

    /// F(x) - F*; refuses when the minimum is unknown.
    double gap(const Vector& x) const
    {
        if (!p_.min_value) throw Refused("objective '" + p_.name + "' has no known minimum");
        p_.domain.check_dim(x);
        if (p_.gap) return p_.gap(x);
        return p_.value(x) - *p_.min_value;
    }

    Objective with_certificate(std::optional<DominanceCertificate> c) const
    {
        Parts parts = p_;
        parts.certificate = std::move(c);
        return Objective(std::move(parts));
    }

private:
    Parts p_;
};

namespace detail {

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

inline void require(bool ok, const std::string& msg)
{
    if (!ok) throw InvalidArgument(msg);
}

} // namespace detail

// ---------------------------------------------------------------------------------------------
// Two-point hard pair

/// f0 = C|x|^{a/(a-1)} on [-R, R] with linear extension; f1 moves the minimizer to rho.
struct LowerBoundPair {
    double alpha;
    double C;
    double R;
    double rho;
    Objective f0;
    Objective f1;
};

namespace detail {

struct PairShape {
    double alpha, C, R, rho;

    double pw() const { return alpha / (alpha - 1.0); }
    double k() const { return 1.0 / (alpha - 1.0); }
    double D() const { return -C * std::pow(R, pw()) / (alpha - 1.0); }

    double f0(double x) const
    {
        if (x > R) return C * pw() * std::pow(R, k()) * x + D();
        if (x < -R) return -C * pw() * std::pow(R, k()) * x + D();
        return C * std::pow(std::abs(x), pw());
    }

    double df0(double x) const
    {
        if (x > R) return C * pw() * std::pow(R, k());
        if (x < -R) return -C * pw() * std::pow(R, k());
        return C * pw() * std::pow(std::abs(x), k()) * sgn(x);
    }

    double f1(double x) const
    {
        const double s = std::pow(2.0, k()) * C;
        if (x < 0.0) return -pw() * s * std::pow(rho, k()) * x + std::pow(2.0, pw()) * C * std::pow(rho, pw());
        if (x <= 2.0 * rho) return s * (std::pow(std::abs(x - rho), pw()) + std::pow(rho, pw()));
        return f0(x);
    }

    double df1(double x) const
    {
        const double s = std::pow(2.0, k()) * C;
        if (x < 0.0) return -pw() * s * std::pow(rho, k());
        if (x <= 2.0 * rho) return s * pw() * std::pow(std::abs(x - rho), k()) * sgn(x - rho);
        return df0(x);
    }

    double f1_min() const { return std::pow(2.0, k()) * C * std::pow(rho, pw()); }

    double gap1(double x) const
    {
        if (x >= 0.0 && x <= 2.0 * rho) return std::pow(2.0, k()) * C * std::pow(std::abs(x - rho), pw());
        return f1(x) - f1_min();
    }

    double L0() const { return C * alpha / ((alpha - 1.0) * (alpha - 1.0)) * std::pow(R, (2.0 - alpha) / (alpha - 1.0)); }

    double L1_inner() const
    {
        return std::pow(2.0, k()) * C * alpha / ((alpha - 1.0) * (alpha - 1.0)) *
               std::pow(rho, (2.0 - alpha) / (alpha - 1.0));
    }

    double tau() const { return std::pow(C, 1.0 - alpha) * std::pow((alpha - 1.0) / alpha, alpha); }

    double eta0() const
    {
        const double a = alpha;
        const double t1 = std::pow(2.0, -k()) / C * ((a - 1.0) / a) * std::pow(rho, -(2.0 - a) / (a - 1.0));
        const double t2 = (a - 1.0) * 2.0 * rho / (a * C * std::pow(R, k()));
        const double t3 = (a - 1.0) / (a * C * std::pow(R, k()));
        return std::min({t1, t2, t3, 1.0});
    }
};

inline Objective scalar_objective(std::string name, Domain domain, std::function<double(double)> f,
                                  std::function<double(double)> df, std::function<double(double)> gap,
                                  std::optional<double> minimizer, std::optional<double> min_value,
                                  std::optional<DominanceCertificate> cert, std::vector<double> breakpoints)
{
    Objective::Parts parts{
        .name = std::move(name),
        .domain = std::move(domain),
        .value = [f](const Vector& x) { return f(x[0]); },
        .gradient = [df](const Vector& x) { return scalar_vector(df(x[0])); },
        .gap = gap ? Objective::ValueFn([gap](const Vector& x) { return gap(x[0]); }) : Objective::ValueFn{},
        .minimizer = minimizer ? std::optional<Vector>(scalar_vector(*minimizer)) : std::nullopt,
        .min_value = min_value,
        .certificate = std::move(cert),
        .breakpoints = std::move(breakpoints),
    };
    return Objective(std::move(parts));
}

} // namespace detail

/// Certificate shared by both members of the pair (smoothness uses the larger curvature of f0 and f1).
inline DominanceCertificate theoretical_constants(const LowerBoundPair& pair)
{
    const detail::PairShape s{pair.alpha, pair.C, pair.R, pair.rho};
    return DominanceCertificate{
        .alpha = pair.alpha,
        .tau = s.tau(),
        .eta0 = s.eta0(),
        .L = std::max(s.L0(), s.L1_inner()),
        .L_tilde = std::max(s.L0(), s.L1_inner()),
        .G_bound = std::nullopt,
    };
}

inline LowerBoundPair make_lower_bound_pair(double alpha, double C, double R, double rho)
{
    detail::require(alpha > 1.0 && alpha < 2.0, "make_lower_bound_pair: alpha must lie in (1, 2); use the Foster instance for alpha = 1");
    detail::require(C > 0.0 && C <= 1.0, "make_lower_bound_pair: C must lie in (0, 1]");
    detail::require(R > 0.0 && std::isfinite(R), "make_lower_bound_pair: R must be positive");
    detail::require(rho > 0.0 && rho <= 0.5, "make_lower_bound_pair: rho must lie in (0, 1/2]");
    detail::require(rho <= R / 2.0, "make_lower_bound_pair: rho must not exceed R/2");

    const detail::PairShape s{alpha, C, R, rho};
    const Domain dom = Domain::interval(0.0, R);

    DominanceCertificate c0{.alpha = alpha, .tau = s.tau(), .eta0 = s.eta0(), .L = s.L0(), .L_tilde = s.L0(), .G_bound = {}};
    const double L1 = std::max(s.L0(), s.L1_inner());
    DominanceCertificate c1{.alpha = alpha, .tau = s.tau(), .eta0 = s.eta0(), .L = L1, .L_tilde = L1, .G_bound = {}};

    Objective f0 = detail::scalar_objective(
        "lower_bound_f0", dom, [s](double x) { return s.f0(x); }, [s](double x) { return s.df0(x); },
        [s](double x) { return s.f0(x); }, 0.0, 0.0, c0, {-R, R});
    Objective f1 = detail::scalar_objective(
        "lower_bound_f1", dom, [s](double x) { return s.f1(x); }, [s](double x) { return s.df1(x); },
        [s](double x) { return s.gap1(x); }, rho, s.f1_min(), c1, {-R, 0.0, 2.0 * rho, R});

    return LowerBoundPair{alpha, C, R, rho, std::move(f0), std::move(f1)};
}

// ---------------------------------------------------------------------------------------------
// Noisy-binary-search instances

/**
 * Layout shared by the binary-search constructions: [0, R] split into N cells with left
 * endpoints a_j = (j-1) R / N, minimizer at the centre of cell j*.
 */
struct BinarySearchLayout {
    double p;
    double G;
    double R;
    int N;
    int j_star;
    /// g_j(x) = sgn(d) |d / h|^{shape_exponent} with d = x - a_j - h, h = R / 2N.
    double shape_exponent;

    double half_width() const { return R / (2.0 * N); }
    double breakpoint(int j) const { return (j - 1) * R / N; }

    /// Cell index j with x in [a_j, a_{j+1}); x = R maps to N.
    int cell_of(double x) const
    {
        if (x >= R) return N;
        if (x <= 0.0) return 1;
        const int j = static_cast<int>(std::floor(x * N / R)) + 1;
        return std::clamp(j, 1, N);
    }

    double shape(int j, double x) const
    {
        const double h = half_width();
        const double d = x - h - breakpoint(j);
        return detail::sgn(d) * std::pow(std::abs(d) / h, shape_exponent);
    }

    /// P[Z_j = +1]; coins above j* lean up, the rest lean down, with E[Z_j] = +-p.
    double coin_up_probability(int j) const { return j > j_star ? 0.5 + 0.5 * p : 0.5 - 0.5 * p; }

    double minimizer() const { return breakpoint(j_star) + half_width(); }
};

struct NbsInstance : BinarySearchLayout {
    double alpha;
    Objective objective;
};

struct NbsParameters {
    double p;
    int N;
    double N_unrounded;
    /// Every point outside the minimizing cell has gap at least 2 epsilon.
    bool identifies_interval;
};

namespace detail {

inline void check_layout(double p, double G, double R, int N, int j_star)
{
    require(p > 0.0 && p < 0.5, "binary-search instance: p must lie in (0, 1/2)");
    require(G > 0.0, "binary-search instance: G must be positive");
    require(R > 0.0, "binary-search instance: R must be positive");
    require(N >= 2, "binary-search instance: N must be at least 2");
    require(j_star >= 1 && j_star <= N - 1, "binary-search instance: j_star must lie in [1, N-1]");
}

inline std::vector<double> layout_breakpoints(const BinarySearchLayout& l)
{
    std::vector<double> b;
    for (int j = 1; j <= l.N; ++j) b.push_back(l.breakpoint(j));
    b.push_back(l.R);
    return b;
}

} // namespace detail

inline NbsInstance make_nbs_instance(double alpha, double p, double G, double R, int N, int j_star)
{
    detail::require(alpha > 1.0 && alpha <= 2.0, "make_nbs_instance: alpha must lie in (1, 2]");
    detail::check_layout(p, G, R, N, j_star);

    const BinarySearchLayout layout{p, G, R, N, j_star, 1.0 / (alpha - 1.0)};
    const double h = layout.half_width();
    const double lo = layout.breakpoint(j_star);
    const double hi = layout.breakpoint(j_star + 1);
    const double pG = p * G;
    const double pw = alpha / (alpha - 1.0);
    const double k = 1.0 / (alpha - 1.0);
    const double depth = pG * (alpha - 1.0) / (2.0 * alpha) * R / N;

    auto inner_gap = [=](double x) { return pG * (alpha - 1.0) / alpha * std::pow(std::abs(x - h - lo), pw) / std::pow(h, k); };
    auto f = [=](double x) {
        if (x >= hi) return pG * (x - hi);
        if (x < lo) return pG * (lo - x);
        return inner_gap(x) - depth;
    };
    auto df = [=](double x) {
        if (x >= hi) return pG;
        if (x < lo) return -pG;
        return pG * layout.shape(j_star, x);
    };
    auto gap = [=](double x) {
        if (x >= hi) return pG * (x - hi) + depth;
        if (x < lo) return pG * (lo - x) + depth;
        return inner_gap(x);
    };

    DominanceCertificate cert{
        .alpha = alpha,
        .tau = (alpha - 1.0) / alpha * h * std::pow(pG, 1.0 - alpha),
        .eta0 = std::nullopt,
        .L = pG * k / h,
        .L_tilde = std::nullopt,
        .G_bound = G,
    };
    Objective obj = detail::scalar_objective("nbs", Domain::interval(0.0, R), f, df, gap, layout.minimizer(), -depth,
                                             cert, detail::layout_breakpoints(layout));
    return NbsInstance{layout, alpha, std::move(obj)};
}

/// p and N sized so that an epsilon-accurate point identifies the minimizing cell.
inline NbsParameters nbs_parameters(double epsilon, double alpha, double tau, double G, double R)
{
    detail::require(alpha > 1.0 && alpha <= 2.0, "nbs_parameters: alpha must lie in (1, 2]");
    detail::require(epsilon > 0.0 && tau > 0.0 && G > 0.0 && R > 0.0, "nbs_parameters: parameters must be positive");
    const double eps_max = std::min(std::pow((alpha - 1.0) / alpha, alpha) * tau, 1.0);
    if (epsilon > eps_max) {
        throw InfeasiblePrecision("nbs_parameters: epsilon exceeds min{((a-1)/a)^a tau, 1} = " + std::to_string(eps_max));
    }
    const double p = 2.0 * std::pow(epsilon, 1.0 / alpha) / (G * std::pow(tau, 1.0 / alpha));
    if (p >= 0.5) {
        throw InfeasiblePrecision("nbs_parameters: p = " + std::to_string(p) + " is not below 1/2");
    }
    const double n_real = (alpha - 1.0) * R / (2.0 * alpha * std::pow(epsilon, (alpha - 1.0) / alpha) * std::pow(tau, 1.0 / alpha));
    const int N = std::max(2, static_cast<int>(std::ceil(n_real - 1e-12)));

    const double local_tau = (alpha - 1.0) / alpha * (R / (2.0 * N)) * std::pow(p * G, 1.0 - alpha);
    if (local_tau > tau * (1.0 + 1e-12)) {
        throw CertificateViolation("nbs_parameters: rounded N breaks the local dominance condition");
    }
    const bool identifies = p * G * (alpha - 1.0) / (2.0 * alpha) * R / N >= 2.0 * epsilon * (1.0 - 1e-12);
    return NbsParameters{p, N, n_real, identifies};
}

/// psi(s) = s^q, q > 1; phi = psi^{-1}.
struct PsiPower {
    double q;

    double psi(double s) const { return std::pow(s, q); }
    double dpsi(double s) const { return q * std::pow(s, q - 1.0); }
    double phi(double u) const { return std::pow(u, 1.0 / q); }
    double dphi(double u) const { return std::pow(u, 1.0 / q - 1.0) / q; }
};

struct PhiKlInstance : BinarySearchLayout {
    PsiPower psi;
    Objective objective;
};

inline PhiKlInstance make_phi_kl_instance(PsiPower psi, double p, double G, double R, int N, int j_star,
                                          bool allow_violation = false)
{
    detail::require(psi.q > 1.0 && std::isfinite(psi.q), "make_phi_kl_instance: psi exponent q must exceed 1");
    detail::check_layout(p, G, R, N, j_star);

    const BinarySearchLayout layout{p, G, R, N, j_star, psi.q - 1.0};
    const double h = layout.half_width();
    const double pG = p * G;
    if (!allow_violation && pG < psi.dpsi(h)) {
        throw CertificateViolation("make_phi_kl_instance: pG is below psi'(R/2N)");
    }
    const double lo = layout.breakpoint(j_star);
    const double hi = layout.breakpoint(j_star + 1);
    const double scale = pG / psi.dpsi(h);
    const double depth = scale * psi.psi(h);

    auto f = [=](double x) {
        if (x >= hi) return pG * (x - hi);
        if (x < lo) return pG * (lo - x);
        return scale * psi.psi(std::abs(x - h - lo)) - depth;
    };
    auto df = [=](double x) {
        if (x >= hi) return pG;
        if (x < lo) return -pG;
        const double d = x - h - lo;
        return scale * psi.dpsi(std::abs(d)) * detail::sgn(d);
    };
    auto gap = [=](double x) {
        if (x >= hi) return pG * (x - hi) + depth;
        if (x < lo) return pG * (lo - x) + depth;
        return scale * psi.psi(std::abs(x - h - lo));
    };
    Objective obj = detail::scalar_objective("phi_kl", Domain::interval(0.0, R), f, df, gap, layout.minimizer(),
                                             -depth, std::nullopt, detail::layout_breakpoints(layout));
    return PhiKlInstance{layout, psi, std::move(obj)};
}

// ---------------------------------------------------------------------------------------------
// Convex quadratic hard instance for alpha = 1

struct FosterInstance {
    double sigma;
    double R;
    int m;
    int d;
    double b;
    Eigen::MatrixXd z_basis; // d x m, orthonormal columns
    Objective objective;
};

inline FosterInstance make_foster_instance(double sigma, double R, int m, int d, std::uint64_t basis_seed)
{
    detail::require(sigma > 0.0 && R > 0.0, "make_foster_instance: sigma and R must be positive");
    detail::require(m >= 1, "make_foster_instance: m must be at least 1");
    detail::require(d >= m, "make_foster_instance: need d >= m");

    CounterRng rng(basis_seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd A(d, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < d; ++i) A(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Z = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
    if ((Z.transpose() * Z - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-12) {
        throw CertificateViolation("make_foster_instance: basis failed the orthonormality check");
    }

    const double b = 2.0 * sigma / (R * std::sqrt(static_cast<double>(m)));
    const Vector zsum = Z.rowwise().sum();
    const Vector lin = (sigma / m) * zsum;
    const Vector xstar = -(sigma / (b * m)) * zsum;
    const double fstar = -sigma * sigma / (2.0 * b * m);

    Objective::Parts parts{
        .name = "foster",
        .domain = Domain::ball(Vector::Zero(d), R),
        .value = [lin, b](const Vector& x) { return lin.dot(x) + 0.5 * b * x.squaredNorm(); },
        .gradient = [lin, b](const Vector& x) -> Vector { return lin + b * x; },
        .gap = {},
        .minimizer = xstar,
        .min_value = fstar,
        .certificate = DominanceCertificate{.alpha = 1.0, .tau = 2.0 * R, .eta0 = 1.0 / b, .L = b, .L_tilde = b, .G_bound = {}},
        .breakpoints = {},
    };
    return FosterInstance{sigma, R, m, d, b, std::move(Z), Objective(std::move(parts))};
}

// ---------------------------------------------------------------------------------------------
// Smooth power objectives

/// lambda |x - x*|^q on `domain`, q > 1; the certificate is filled in only for q >= 2.
inline Objective power_objective(double q, double lambda, const Vector& x_star, const Domain& domain)
{
    detail::require(q > 1.0 && std::isfinite(q), "power_objective: exponent must exceed 1");
    detail::require(lambda > 0.0, "power_objective: lambda must be positive");
    domain.check_dim(x_star);
    require_finite(x_star, "power_objective x_star");
    if (!domain.contains(x_star, 0.0)) throw InvalidArgument("power_objective: x_star must lie in the domain");

    auto value = [=](const Vector& x) { return lambda * std::pow((x - x_star).norm(), q); };
    auto gradient = [=](const Vector& x) -> Vector {
        const Vector d = x - x_star;
        const double r = d.norm();
        if (r == 0.0) return Vector::Zero(x.size());
        return lambda * q * std::pow(r, q - 2.0) * d;
    };

    std::optional<DominanceCertificate> cert;
    if (q >= 2.0) {
        const double alpha = q / (q - 1.0);
        double L = std::numeric_limits<double>::quiet_NaN();
        if (q == 2.0) {
            L = 2.0 * lambda;
        } else if (!domain.is_all_space()) {
            // farthest feasible point from x_star
            double rmax = std::visit(
                [&](const auto& k) -> double {
                    using K = std::decay_t<decltype(k)>;
                    if constexpr (std::is_same_v<K, Interval>) return std::max(x_star[0] - k.lo, k.hi - x_star[0]);
                    else if constexpr (std::is_same_v<K, Box>)
                        return (x_star - k.lo).cwiseAbs().cwiseMax((k.hi - x_star).cwiseAbs()).norm();
                    else if constexpr (std::is_same_v<K, Ball>) return (x_star - k.center).norm() + k.radius;
                    else return std::numeric_limits<double>::infinity();
                },
                domain.kind());
            L = lambda * q * (q - 1.0) * std::pow(rmax, q - 2.0);
        }
        if (std::isfinite(L)) {
            cert = DominanceCertificate{
                .alpha = alpha,
                .tau = std::pow(lambda, 1.0 - alpha) * std::pow(q, -alpha),
                .eta0 = std::nullopt,
                .L = L,
                .L_tilde = L,
                .G_bound = {},
            };
        }
    }

    Objective::Parts parts{
        .name = "power",
        .domain = domain,
        .value = value,
        .gradient = gradient,
        .gap = value,
        .minimizer = x_star,
        .min_value = 0.0,
        .certificate = cert,
        .breakpoints = {},
    };
    return Objective(std::move(parts));
}

/// lambda |x - x*|^{alpha/(alpha-1)}, alpha in (1, 2].
inline Objective make_power_instance(double alpha, double lambda, const Vector& x_star, const Domain& domain)
{
    detail::require(alpha > 1.0 && alpha <= 2.0, "make_power_instance: alpha must lie in (1, 2]");
    return power_objective(alpha / (alpha - 1.0), lambda, x_star, domain);
}

// ---------------------------------------------------------------------------------------------
// Closed-form bounds

/// Radius of the region that smoothness plus dominance confine the iterates to.
inline double r0_bound(double alpha, double L, double tau)
{
    detail::require(alpha > 1.0 && alpha < 2.0, "r0_bound: alpha must lie in (1, 2)");
    detail::require(L > 0.0 && tau > 0.0, "r0_bound: L and tau must be positive");
    return alpha / (alpha - 1.0) * std::pow(2.0 * L, (alpha - 1.0) / (2.0 - alpha)) * std::pow(tau, 1.0 / (2.0 - alpha));
}

/// Largest gap compatible with (L, beta)-Holder gradients and (alpha, tau) dominance.
inline double holder_gap_bound(double alpha, double beta, double L, double tau)
{
    detail::require(alpha >= 1.0 && beta > alpha, "holder_gap_bound: need 1 <= alpha < beta");
    detail::require(L > 0.0 && tau >= 0.0, "holder_gap_bound: need L > 0 and tau >= 0");
    const double w = beta - alpha;
    return std::pow(beta, alpha / w) * std::pow(L, alpha * (beta - 1.0) / w) * std::pow(tau, beta / w);
}

/// Distance-to-minimizer bound implied by dominance at a given gap.
inline double distance_bound(double alpha, double tau, double gap)
{
    detail::require(alpha > 1.0 && alpha <= 2.0, "distance_bound: alpha must lie in (1, 2]");
    detail::require(tau > 0.0 && gap >= 0.0, "distance_bound: need tau > 0 and gap >= 0");
    return alpha / (alpha - 1.0) * std::pow(tau, 1.0 / alpha) * std::pow(gap, (alpha - 1.0) / alpha);
}

} // namespace pgdlab
