#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "instances.hpp"
#include "random.hpp"

namespace pgdlab {

/// grad F(x) + (sigma / sqrt(d)) N(0, I): E|noise|^2 = sigma^2 in any dimension.
struct GaussianAdditive {
    std::shared_ptr<const Objective> objective;
    double sigma;
};

/// Two-coin noisy-binary-search oracle over a binary-search layout.
struct NbsBernoulli {
    std::shared_ptr<const BinarySearchLayout> layout;
    std::shared_ptr<const Objective> objective;

    static NbsBernoulli from(const std::shared_ptr<const NbsInstance>& inst)
    {
        return {inst, std::shared_ptr<const Objective>(inst, &inst->objective)};
    }

    static NbsBernoulli from(const std::shared_ptr<const PhiKlInstance>& inst)
    {
        return {inst, std::shared_ptr<const Objective>(inst, &inst->objective)};
    }
};

/// sigma z_i + b x with i uniform over the orthonormal atoms.
struct FosterUniform {
    std::shared_ptr<const FosterInstance> instance;
};

struct ExactGradient {
    std::shared_ptr<const Objective> objective;
};

/// One draw of shared randomness evaluated at every queried point.
struct BatchResponse {
    std::vector<Vector> gradients;
    std::uint64_t shared_seed_tag;
};

/**
 * Seeded stochastic first-order oracle. Single owner: it carries a draw counter and a query
 * counter. Draw n uses the child stream split(n) of the seed stream, so outputs depend only on
 * (seed, call sequence).
 */
class Oracle {
public:
    using Kind = std::variant<GaussianAdditive, NbsBernoulli, FosterUniform, ExactGradient>;

    Oracle(Kind kind, std::uint64_t seed) : kind_(std::move(kind)), rng_(seed), seed_(seed)
    {
        std::visit(
            [](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, FosterUniform>) {
                    if (!k.instance) throw InvalidArgument("oracle: missing instance");
                } else if constexpr (std::is_same_v<K, NbsBernoulli>) {
                    if (!k.layout || !k.objective) throw InvalidArgument("oracle: missing instance");
                } else {
                    if (!k.objective) throw InvalidArgument("oracle: missing objective");
                }
                if constexpr (std::is_same_v<K, GaussianAdditive>) {
                    if (!(k.sigma >= 0.0) || !std::isfinite(k.sigma)) throw InvalidArgument("oracle: sigma must be >= 0");
                }
            },
            kind_);
    }

    const Kind& kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t query_count() const { return queries_; }
    std::uint64_t draws() const { return draws_; }

    std::string kind_name() const
    {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, GaussianAdditive>) return "gaussian";
                else if constexpr (std::is_same_v<K, NbsBernoulli>) return "nbs_bernoulli";
                else if constexpr (std::is_same_v<K, FosterUniform>) return "foster_uniform";
                else return "exact";
            },
            kind_);
    }

    const Objective& objective() const
    {
        return std::visit(
            [](const auto& k) -> const Objective& {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, FosterUniform>) return k.instance->objective;
                else return *k.objective;
            },
            kind_);
    }

    Index dim() const { return objective().dim(); }

    BatchResponse query_batch(std::span<const Vector> points)
    {
        for (const auto& x : points) {
            if (x.size() != dim()) throw InvalidArgument("query_batch: point dimension does not match the objective");
        }
        const std::uint64_t tag = draws_++;
        CounterRng draw = rng_.split(tag);
        BatchResponse out{{}, tag};
        out.gradients.reserve(points.size());

        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, GaussianAdditive>) {
                    std::normal_distribution<double> normal;
                    Vector z(dim());
                    for (Index i = 0; i < z.size(); ++i) z[i] = normal(draw);
                    z *= k.sigma / std::sqrt(static_cast<double>(z.size()));
                    for (const auto& x : points) out.gradients.push_back(k.objective->gradient(x) + z);
                } else if constexpr (std::is_same_v<K, NbsBernoulli>) {
                    const BinarySearchLayout& l = *k.layout;
                    auto coin = [&](int j) {
                        CounterRng c = draw.split(static_cast<std::uint64_t>(j));
                        return c.uniform01() < l.coin_up_probability(j) ? 1.0 : -1.0;
                    };
                    for (const auto& x : points) {
                        const int j = l.cell_of(x[0]);
                        const double g = l.shape(j, x[0]);
                        const double v = 0.5 * l.G * (1.0 - g) * coin(j) + 0.5 * l.G * (1.0 + g) * coin(j + 1);
                        out.gradients.push_back(scalar_vector(v));
                    }
                } else if constexpr (std::is_same_v<K, FosterUniform>) {
                    const FosterInstance& f = *k.instance;
                    std::uniform_int_distribution<int> pick(0, f.m - 1);
                    const int i = pick(draw);
                    for (const auto& x : points) out.gradients.push_back(f.sigma * f.z_basis.col(i) + f.b * x);
                } else {
                    for (const auto& x : points) out.gradients.push_back(k.objective->gradient(x));
                }
            },
            kind_);

        queries_ += points.size();
        return out;
    }

    Vector query(const Vector& x)
    {
        return std::move(query_batch(std::span<const Vector>(&x, 1)).gradients.front());
    }

private:
    Kind kind_;
    CounterRng rng_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::uint64_t queries_ = 0;
};

/// Mean of b independent single-point draws.
inline Vector minibatch_mean(Oracle& oracle, const Vector& x, std::uint64_t b)
{
    if (b == 0) throw InvalidArgument("minibatch_mean: batch size must be positive");
    Vector sum = oracle.query(x);
    for (std::uint64_t i = 1; i < b; ++i) sum += oracle.query(x);
    return sum / static_cast<double>(b);
}

struct OracleStatistics {
    double mean_error;
    double var_estimate;
    double max_norm;
};

inline OracleStatistics oracle_statistics(Oracle& oracle, const Vector& x, std::uint64_t n)
{
    if (n < 2) throw InvalidArgument("oracle_statistics: need at least two samples");
    const Vector truth = oracle.objective().gradient(x);
    Vector sum = Vector::Zero(x.size());
    double sq = 0.0;
    double max_norm = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const Vector g = oracle.query(x);
        sum += g;
        sq += (g - truth).squaredNorm();
        max_norm = std::max(max_norm, g.norm());
    }
    const double nn = static_cast<double>(n);
    return {(sum / nn - truth).norm(), sq / nn, max_norm};
}

} // namespace pgdlab
