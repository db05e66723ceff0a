#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>

#include "errors.hpp"

namespace pgdlab {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Vector scalar_vector(double v) { return Vector::Constant(1, v); }

inline bool all_finite(const Vector& v) { return v.size() > 0 && v.allFinite(); }

inline void require_finite(const Vector& v, const char* what)
{
    if (!all_finite(v)) {
        throw InvalidArgument(std::string(what) + ": vector must be nonempty with finite entries");
    }
}

struct Interval {
    double lo;
    double hi;
};

struct Box {
    Vector lo;
    Vector hi;
};

struct Ball {
    Vector center;
    double radius;
};

struct AllSpace {
    Index dim;
};

/**
 * Closed convex feasible set. Immutable after construction; every factory validates its
 * parameters so that project() is total on finite inputs of the right dimension.
 */
class Domain {
public:
    using Kind = std::variant<Interval, Box, Ball, AllSpace>;

    static Domain interval(double lo, double hi)
    {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
            throw InvalidArgument("Interval: need finite lo <= hi");
        }
        return Domain(Interval{lo, hi});
    }

    static Domain box(Vector lo, Vector hi)
    {
        require_finite(lo, "Box lo");
        require_finite(hi, "Box hi");
        if (lo.size() != hi.size() || (lo.array() > hi.array()).any()) {
            throw InvalidArgument("Box: need lo <= hi componentwise with equal dimensions");
        }
        return Domain(Box{std::move(lo), std::move(hi)});
    }

    static Domain ball(Vector center, double radius)
    {
        require_finite(center, "Ball center");
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw InvalidArgument("Ball: radius must be positive and finite");
        }
        return Domain(Ball{std::move(center), radius});
    }

    static Domain all_space(Index dim)
    {
        if (dim <= 0) {
            throw InvalidArgument("AllSpace: dimension must be positive");
        }
        return Domain(AllSpace{dim});
    }

    const Kind& kind() const { return kind_; }

    bool is_all_space() const { return std::holds_alternative<AllSpace>(kind_); }

    std::string name() const
    {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Interval>) return "interval";
                else if constexpr (std::is_same_v<K, Box>) return "box";
                else if constexpr (std::is_same_v<K, Ball>) return "ball";
                else return "all_space";
            },
            kind_);
    }

    Index dim() const
    {
        return std::visit(
            [](const auto& k) -> Index {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Interval>) return 1;
                else if constexpr (std::is_same_v<K, Box>) return k.lo.size();
                else if constexpr (std::is_same_v<K, Ball>) return k.center.size();
                else return k.dim;
            },
            kind_);
    }

    double diameter() const
    {
        return std::visit(
            [](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Interval>) return k.hi - k.lo;
                else if constexpr (std::is_same_v<K, Box>) return (k.hi - k.lo).norm();
                else if constexpr (std::is_same_v<K, Ball>) return 2.0 * k.radius;
                else return std::numeric_limits<double>::infinity();
            },
            kind_);
    }

    /// Membership with an absolute slack `tol`.
    bool contains(const Vector& x, double tol = 1e-12) const
    {
        check_dim(x);
        if (!x.allFinite()) return false;
        return std::visit(
            [&](const auto& k) -> bool {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Interval>) {
                    return x[0] >= k.lo - tol && x[0] <= k.hi + tol;
                } else if constexpr (std::is_same_v<K, Box>) {
                    return ((x.array() >= k.lo.array() - tol) && (x.array() <= k.hi.array() + tol)).all();
                } else if constexpr (std::is_same_v<K, Ball>) {
                    return (x - k.center).norm() <= k.radius + tol;
                } else {
                    return true;
                }
            },
            kind_);
    }

    /// Euclidean projection onto the set.
    Vector project(const Vector& v) const
    {
        check_dim(v);
        require_finite(v, "project");
        return std::visit(
            [&](const auto& k) -> Vector {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Interval>) {
                    return scalar_vector(std::clamp(v[0], k.lo, k.hi));
                } else if constexpr (std::is_same_v<K, Box>) {
                    return v.cwiseMax(k.lo).cwiseMin(k.hi);
                } else if constexpr (std::is_same_v<K, Ball>) {
                    const Vector d = v - k.center;
                    const double n = d.norm();
                    if (n <= k.radius) return v;
                    return k.center + d * (k.radius / n);
                } else {
                    return v;
                }
            },
            kind_);
    }

    void check_dim(const Vector& v) const
    {
        if (v.size() != dim()) {
            throw InvalidArgument("dimension mismatch: domain has dim " + std::to_string(dim()) +
                                  ", got " + std::to_string(v.size()));
        }
    }

private:
    explicit Domain(Kind k) : kind_(std::move(k)) {}

    Kind kind_;
};

inline Vector project(const Domain& domain, const Vector& v) { return domain.project(v); }

/// Proximal operator of the indicator of `domain`; independent of eta.
inline Vector prox_indicator(const Domain& domain, double eta, const Vector& v)
{
    if (!(eta > 0.0)) throw InvalidArgument("prox_indicator: eta must be positive");
    return domain.project(v);
}

/// Callable prox of a function h: (eta, v) -> argmin_u h(u) + |u - v|^2 / (2 eta).
template <class P>
concept ProxOperator = requires(const P& p, double eta, const Vector& v) {
    { p(eta, v) } -> std::convertible_to<Vector>;
};

struct IndicatorProx {
    Domain domain;

    Vector operator()(double eta, const Vector& v) const { return prox_indicator(domain, eta, v); }
};

/// Prox of lambda * |x|_1 (soft thresholding at lambda * eta).
struct L1Prox {
    double lambda;

    Vector operator()(double eta, const Vector& v) const
    {
        if (!(eta > 0.0)) throw InvalidArgument("L1Prox: eta must be positive");
        if (!(lambda >= 0.0)) throw InvalidArgument("L1Prox: lambda must be nonnegative");
        require_finite(v, "L1Prox");
        const double t = lambda * eta;
        return v.unaryExpr([t](double a) { return std::copysign(std::max(std::abs(a) - t, 0.0), a); });
    }
};

static_assert(ProxOperator<IndicatorProx>);
static_assert(ProxOperator<L1Prox>);

namespace detail {

inline void check_mapping_args(const Domain& domain, const Vector& x, double eta)
{
    if (!(eta > 0.0)) throw InvalidArgument("gradient mapping: eta must be positive");
    domain.check_dim(x);
    if (!domain.contains(x)) throw PreconditionError("gradient mapping: x is outside the domain");
}

} // namespace detail

/// (x - proj(x - eta g)) / eta for a supplied gradient estimate g.
inline Vector estimated_gradient_mapping(const Vector& g, const Domain& domain, const Vector& x, double eta)
{
    detail::check_mapping_args(domain, x, eta);
    domain.check_dim(g);
    if (domain.is_all_space()) return g;
    const Vector y = x - eta * g;
    const Vector p = domain.project(y);
    if (p == y) return g;
    return (x - p) / eta;
}

/// Projected-gradient mapping of any objective exposing gradient(x).
template <class F>
    requires requires(const F& f, const Vector& x) {
        { f.gradient(x) } -> std::convertible_to<Vector>;
    }
Vector projected_gradient_mapping(const F& objective, const Domain& domain, const Vector& x, double eta)
{
    detail::check_mapping_args(domain, x, eta);
    return estimated_gradient_mapping(objective.gradient(x), domain, x, eta);
}

} // namespace pgdlab
