#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "oracles.hpp"

namespace pgdlab {

enum class ScheduleKind { constant, power };

/// base * (t+1)^exponent for power, base for constant.
inline double schedule_eval(ScheduleKind kind, double base, double exponent, double t)
{
    if (t < 0.0) throw InvalidArgument("schedule_eval: t must be nonnegative");
    if (kind == ScheduleKind::constant) return base;
    return base * std::pow(t + 1.0, exponent);
}

struct Schedule {
    ScheduleKind kind = ScheduleKind::constant;
    double base = 1.0;
    double exponent = 0.0;

    double operator()(double t) const { return schedule_eval(kind, base, exponent, t); }
};

struct TrajectoryRecord {
    std::uint64_t t;
    Vector x;
    std::optional<double> gap;
    std::uint64_t queries_cumulative;
    /// |g_t - grad F(x_t)|^2 for the estimate used at this iterate.
    std::optional<double> grad_error_sq;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::vector<std::string> warnings;

    const TrajectoryRecord& final() const { return records.back(); }
};

/// A nonfinite iterate; carries everything recorded before it.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, Trajectory partial) : Error(what), partial_(std::move(partial)) {}

    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

struct SgdOptions {
    std::uint64_t T = 0;
    double eta0 = 0.0;
    double b0 = 1.0;
    double alpha = 1.0;
    /// Skip the eta0 <= 1/(2L) check.
    bool override_step_check = false;
};

struct StormOptions {
    std::uint64_t T = 0;
    double eta0 = 0.0;
    double a0 = 1.5;
    double beta0 = 1.0;
    double alpha = 1.0;
    std::uint64_t g0_batch = 1;
    /// Skip the beta0 * eta0 <= 1/L check.
    bool override_step_check = false;
};

/// Everything one Proj-STORM step computed, handed to an optional observer.
struct StormStep {
    std::uint64_t t;
    const Vector& x;
    const Vector& g;
    double eta;
    double a;
    double beta;
    const Vector& x_hat;
    const Vector& x_next;
};

using StormObserver = std::function<void(const StormStep&)>;

/// Batch size of a growing-batch SGD step: ceil(b0 * max(t,1)^{2/(2-alpha)}).
inline std::uint64_t sgd_batch_size(double b0, double alpha, std::uint64_t t)
{
    const double tt = static_cast<double>(std::max<std::uint64_t>(t, 1));
    return static_cast<std::uint64_t>(std::ceil(b0 * std::pow(tt, 2.0 / (2.0 - alpha)) - 1e-9));
}

namespace detail {

inline std::optional<double> gap_if_known(const Objective& f, const Vector& x)
{
    if (!f.has_min_value()) return std::nullopt;
    return f.gap(x);
}

inline void check_start(const Domain& domain, const Vector& x0)
{
    domain.check_dim(x0);
    if (!domain.contains(x0)) throw PreconditionError("start point is outside the domain");
}

inline void check_finite_iterate(const Vector& x, Trajectory& traj, std::uint64_t t)
{
    if (!x.allFinite()) throw NumericFailure("nonfinite iterate at t = " + std::to_string(t), std::move(traj));
}

template <class Step>
Trajectory growing_batch_sgd(Oracle& oracle, const Vector& x0, const SgdOptions& opt, Step&& step)
{
    if (!(opt.eta0 > 0.0)) throw InvalidArgument("sgd: eta0 must be positive");
    if (!(opt.b0 > 0.0)) throw InvalidArgument("sgd: b0 must be positive");
    if (!(opt.alpha >= 1.0 && opt.alpha < 2.0)) throw InvalidArgument("sgd: alpha must lie in [1, 2)");

    const Objective& f = oracle.objective();
    Trajectory traj;
    if (const auto& c = f.certificate()) {
        if (!opt.override_step_check && opt.eta0 > 1.0 / (2.0 * c->L) * (1.0 + 1e-12)) {
            throw PreconditionError("sgd: eta0 exceeds 1/(2L)");
        }
    } else {
        traj.warnings.push_back("no smoothness certificate; step size not checked");
    }

    const std::uint64_t q_start = oracle.query_count();
    Vector x = x0;
    traj.records.reserve(opt.T + 1);
    for (std::uint64_t t = 0; t < opt.T; ++t) {
        const std::uint64_t b = sgd_batch_size(opt.b0, opt.alpha, t);
        const std::uint64_t q_before = oracle.query_count() - q_start;
        const Vector g = minibatch_mean(oracle, x, b);
        traj.records.push_back({t, x, gap_if_known(f, x), q_before, (g - f.gradient(x)).squaredNorm()});
        Vector next = step(x - opt.eta0 * g);
        check_finite_iterate(next, traj, t + 1);
        x = std::move(next);
    }
    traj.records.push_back({opt.T, x, gap_if_known(f, x), oracle.query_count() - q_start, std::nullopt});
    return traj;
}

} // namespace detail

/// Projected SGD with constant step eta0 and batch sizes ceil(b0 t^{2/(2-alpha)}).
inline Trajectory proj_sgd(Oracle& oracle, const Domain& domain, const Vector& x0, const SgdOptions& opt)
{
    detail::check_start(domain, x0);
    return detail::growing_batch_sgd(oracle, x0, opt, [&](const Vector& v) { return domain.project(v); });
}

/// Proximal SGD: x_{t+1} = prox_h(eta0; x_t - eta0 g_t).
template <ProxOperator Prox>
Trajectory prox_sgd(Oracle& oracle, const Prox& prox, const Vector& x0, const SgdOptions& opt)
{
    require_finite(x0, "prox_sgd x0");
    oracle.objective().domain().check_dim(x0);
    if constexpr (std::is_same_v<Prox, IndicatorProx>) detail::check_start(prox.domain, x0);
    return detail::growing_batch_sgd(oracle, x0, opt, [&](const Vector& v) -> Vector { return prox(opt.eta0, v); });
}

/**
 * Projected stochastic recursive momentum. Each step queries one shared-seed batch at
 * {x_t, x_{t+1}}; a_t and beta_t are clamped to 1 while a0/(t+1) or beta0/(t+1) exceed it.
 */
inline Trajectory proj_storm(Oracle& oracle, const Domain& domain, const Vector& x0, const StormOptions& opt,
                             const StormObserver& observer = {})
{
    detail::check_start(domain, x0);
    if (!(opt.a0 > 1.0 && opt.a0 < 2.0)) throw InvalidArgument("proj_storm: a0 must lie in (1, 2)");
    if (!(opt.eta0 > 0.0) || !(opt.beta0 > 0.0)) throw InvalidArgument("proj_storm: eta0 and beta0 must be positive");
    if (!(opt.alpha >= 1.0 && opt.alpha < 2.0 + 1e-15)) throw InvalidArgument("proj_storm: alpha must lie in [1, 2]");
    if (opt.g0_batch == 0) throw InvalidArgument("proj_storm: g0_batch must be positive");

    const Objective& f = oracle.objective();
    Trajectory traj;
    if (const auto& c = f.certificate()) {
        if (!opt.override_step_check && opt.beta0 * opt.eta0 > 1.0 / c->L * (1.0 + 1e-12)) {
            throw PreconditionError("proj_storm: beta0 * eta0 exceeds 1/L");
        }
    } else {
        traj.warnings.push_back("no smoothness certificate; step size not checked");
    }

    const Schedule eta_s{ScheduleKind::power, opt.eta0, 1.0 - opt.alpha / 2.0};
    const Schedule a_s{ScheduleKind::power, opt.a0, -1.0};
    const Schedule beta_s{ScheduleKind::power, opt.beta0, -1.0};

    const std::uint64_t q_start = oracle.query_count();
    Vector x = x0;
    Vector g = minibatch_mean(oracle, x, opt.g0_batch);
    traj.records.reserve(opt.T + 1);
    std::array<Vector, 2> pts;
    for (std::uint64_t t = 0; t < opt.T; ++t) {
        const double td = static_cast<double>(t);
        const double eta = eta_s(td);
        const double a = std::min(1.0, a_s(td));
        const double beta = std::min(1.0, beta_s(td));

        traj.records.push_back({t, x, detail::gap_if_known(f, x), oracle.query_count() - q_start,
                                (g - f.gradient(x)).squaredNorm()});

        const Vector x_hat = domain.project(x - eta * g);
        Vector x_next = (1.0 - beta) * x + beta * x_hat;
        detail::check_finite_iterate(x_next, traj, t + 1);
        if (observer) observer(StormStep{t, x, g, eta, a, beta, x_hat, x_next});

        pts[0] = x;
        pts[1] = x_next;
        const BatchResponse r = oracle.query_batch(pts);
        g = (1.0 - a) * (g - r.gradients[0]) + r.gradients[1];
        x = std::move(x_next);
    }
    traj.records.push_back({opt.T, x, detail::gap_if_known(f, x), oracle.query_count() - q_start,
                            (g - f.gradient(x)).squaredNorm()});
    return traj;
}

} // namespace pgdlab
