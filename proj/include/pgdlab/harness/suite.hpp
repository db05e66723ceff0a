#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "../instances.hpp"
#include "../oracles.hpp"
#include "../random.hpp"
#include "../verifiers.hpp"
#include "config.hpp"

namespace pgdlab::harness {

struct NamedCheck {
    std::string name;
    std::function<CheckReport()> run;
};

struct SuiteResult {
    std::vector<CheckReport> reports;
    std::string note;

    bool all_passed() const
    {
        for (const auto& r : reports) {
            if (!r.passed) return false;
        }
        return true;
    }
};

struct PairParams {
    double alpha, C, R, rho;
};

/// The lower-bound parameter matrix: alpha x C x rho with R = 1.
inline std::vector<PairParams> default_pair_matrix()
{
    std::vector<PairParams> out;
    for (double a : {1.2, 1.5, 1.8}) {
        for (double C : {0.25, 0.5, 1.0}) {
            for (double rho : {0.05, 0.1}) out.push_back({a, C, 1.0, rho});
        }
    }
    return out;
}

inline std::string pair_label(const PairParams& p)
{
    std::ostringstream os;
    os << "(alpha=" << p.alpha << ",C=" << p.C << ",R=" << p.R << ",rho=" << p.rho << ")";
    return os.str();
}

inline constexpr std::size_t default_grid_points = 10000;
inline constexpr double default_exclusion = 1e-8;

/// kl_per_step vanishes on [2 rho, R] and its grid maximizer over [0, R] is x = 0.
inline CheckReport check_kl_triangle(const LowerBoundPair& pair, double sigma = 1.0, std::size_t points = 100000)
{
    CheckReport r;
    double best = -1.0;
    std::size_t arg = 0;
    double tail_max = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = pair.R * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = kl_per_step(pair, sigma, x);
        if (v > best) {
            best = v;
            arg = i;
        }
        if (x >= 2.0 * pair.rho) tail_max = std::max(tail_max, v);
    }
    r.worst_index = arg;
    r.worst_point = scalar_vector(pair.R * static_cast<double>(arg) / static_cast<double>(points - 1));
    r.worst_ratio = (arg == 0 && tail_max == 0.0) ? 0.0 : 2.0;
    r.metrics = {{"argmax", r.worst_point[0]}, {"max_kl", best}, {"tail_max", tail_max}};
    r.details = "argmax x=" + pgdlab::detail::fmt(r.worst_point[0]) + " tail max=" + pgdlab::detail::fmt(tail_max);
    r.finish();
    return r;
}

/// Worst case over `draws` random parameter sets of the variance recursion check.
inline CheckReport variance_recursion_draws(std::size_t draws, std::uint64_t seed, std::uint64_t T = 10000)
{
    CounterRng rng(seed);
    auto logu = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo))); };
    CheckReport worst;
    bool first = true;
    bool all = true;
    for (std::size_t k = 0; k < draws; ++k) {
        VarianceRecursionParams p{1.01 + 0.98 * rng.uniform01(), logu(1e-2, 1e1), logu(1e-2, 1e2), logu(1e-2, 1e2),
                                  logu(1e-2, 1e1), logu(1e-3, 1e2), T};
        CheckReport r = check_variance_recursion(p);
        all = all && r.passed;
        if (first || r.worst_ratio > worst.worst_ratio) {
            worst = r;
            worst.worst_index = k;
            first = false;
        }
    }
    worst.details = "draws=" + std::to_string(draws) + " worst V_t t/E=" + pgdlab::detail::fmt(worst.worst_ratio);
    worst.passed = all;
    return worst;
}

inline CheckReport poly_bound_draws(std::size_t draws, std::uint64_t seed)
{
    CounterRng rng(seed);
    auto logu = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo))); };
    CheckReport worst;
    double worst_identity = 0.0;
    bool first = true;
    bool all = true;
    for (std::size_t k = 0; k < draws; ++k) {
        const double alpha = 1.0 + 0.9 * rng.uniform01();
        CheckReport r = check_poly_bound(logu(1e-2, 1e2), logu(1e-2, 1e2), logu(1e-3, 1e2), alpha);
        all = all && r.passed;
        for (const auto& [k2, v] : r.metrics) {
            if (k2 == "identity_rel_err") worst_identity = std::max(worst_identity, v);
        }
        if (first || r.worst_ratio > worst.worst_ratio) {
            worst = r;
            worst.worst_index = k;
            first = false;
        }
    }
    worst.passed = all;
    worst.metrics.push_back({"worst_identity_rel_err", worst_identity});
    worst.details = "draws=" + std::to_string(draws) + " worst numeric/closed=" + pgdlab::detail::fmt(worst.worst_ratio) +
                    " worst identity err=" + pgdlab::detail::fmt(worst_identity);
    return worst;
}

/// Delta recursion with the canonical constants: L = beta0 = eta0 = E = 1, q0 = L beta0^2/4,
/// c0 = L beta0/2, tau = 0.1, delta0 = 0.1, T = 2e5.
inline DeltaRecursionParams canonical_delta_params(double alpha)
{
    const double L = 1.0, beta0 = 1.0;
    return {L * beta0 * beta0 / 4.0, 1.0, beta0, L * beta0 / 2.0, 0.1, alpha, 1.0, 0.1, 200000};
}

/// Every registered check of the default instance matrix.
inline std::vector<NamedCheck> registered_checks()
{
    std::vector<NamedCheck> checks;
    for (const PairParams& pp : default_pair_matrix()) {
        const std::string lbl = pair_label(pp);
        auto pair = std::make_shared<const LowerBoundPair>(make_lower_bound_pair(pp.alpha, pp.C, pp.R, pp.rho));
        for (int which = 0; which < 2; ++which) {
            const std::string fn = which == 0 ? "f0" : "f1";
            auto obj = [pair, which]() -> const Objective& { return which == 0 ? pair->f0 : pair->f1; };
            const GridSpec on_domain{Domain::interval(0.0, pp.R), default_grid_points, default_exclusion};
            const GridSpec wide{Domain::interval(-pp.R, pp.R), default_grid_points, default_exclusion};
            checks.push_back({"dominance.global/" + fn + lbl, [=] {
                                  const auto& c = *obj().certificate();
                                  return verify_grad_dominance(obj(), on_domain, c.alpha, c.tau, 1e-6);
                              }});
            checks.push_back({"dominance.projected/" + fn + lbl, [=] {
                                  const auto& c = *obj().certificate();
                                  return verify_projected_grad_dominance(obj(), obj().domain(), on_domain, c.alpha, c.tau,
                                                                         {*c.eta0, *c.eta0 / 2.0}, 1e-6);
                              }});
            checks.push_back({"smoothness/" + fn + lbl, [=] {
                                  return verify_smoothness(obj(), wide, obj().certificate()->L, 1e-9);
                              }});
            checks.push_back({"distance/" + fn + lbl, [=] {
                                  const auto& c = *obj().certificate();
                                  return verify_distance_bounds(obj(), on_domain, c.alpha, c.tau, c.L, 1e-9);
                              }});
        }
        checks.push_back({"kl.triangle/" + lbl, [pair] { return check_kl_triangle(*pair); }});
    }

    for (double alpha : {1.5, 2.0}) {
        std::ostringstream os;
        os << "dominance.local/nbs(alpha=" << alpha << ",p=0.2,G=1,R=1,N=8,j*=3)";
        checks.push_back({os.str(), [alpha] {
                              const NbsInstance inst = make_nbs_instance(alpha, 0.2, 1.0, 1.0, 8, 3);
                              const double lo = inst.breakpoint(3), hi = inst.breakpoint(4);
                              const GridSpec cell{Domain::interval(lo, hi - 1e-12), default_grid_points, 0.0};
                              const auto& c = *inst.objective.certificate();
                              return verify_local_grad_dominance(inst.objective, cell, c.alpha, c.tau, 1.0 / 8.0, 1e-9);
                          }});
    }
    for (double q : {1.5, 3.0, 5.0}) {
        std::ostringstream os;
        os << "dominance.phi_kl/psi=s^" << q << "(p=0.4,G=2,R=1,N=4,j*=2)";
        checks.push_back({os.str(), [q] {
                              const PhiKlInstance inst = make_phi_kl_instance(PsiPower{q}, 0.4, 2.0, 1.0, 4, 2);
                              const GridSpec cell{Domain::interval(inst.breakpoint(2), inst.breakpoint(3) - 1e-12),
                                                  default_grid_points, 0.0};
                              return verify_phi_kl(inst.objective, cell, inst.psi, 1e-9);
                          }});
    }

    checks.push_back({"recursion.variance/1000-draws", [] { return variance_recursion_draws(1000, 11); }});
    checks.push_back({"recursion.poly/1000-draws", [] { return poly_bound_draws(1000, 12); }});
    for (double alpha : {1.0, 1.5, 1.9}) {
        std::ostringstream os;
        os << "recursion.delta/alpha=" << alpha;
        checks.push_back({os.str(), [alpha] { return check_delta_recursion(canonical_delta_params(alpha)); }});
    }
    return checks;
}

/// Runs every registered check whose name contains a match of `pattern` (ECMAScript regex).
inline SuiteResult run_verification_suite(const std::string& pattern = "")
{
    const std::regex re(pattern);
    SuiteResult out;
    for (auto& c : registered_checks()) {
        if (!pattern.empty() && !std::regex_search(c.name, re)) continue;
        CheckReport r = c.run();
        r.name = c.name;
        out.reports.push_back(std::move(r));
    }
    if (out.reports.empty()) out.note = "no checks selected";
    return out;
}

inline json check_to_json(const CheckReport& r)
{
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    json point = json::array();
    for (Index i = 0; i < r.worst_point.size(); ++i) point.push_back(r.worst_point[i]);
    return {{"name", r.name},       {"passed", r.passed},   {"inconclusive", r.inconclusive},
            {"worst_ratio", std::isfinite(r.worst_ratio) ? json(r.worst_ratio) : json("inf")},
            {"worst_point", point}, {"worst_index", r.worst_index}, {"tolerance", r.tolerance},
            {"details", r.details}, {"metrics", metrics}};
}

inline json suite_to_json(const SuiteResult& s)
{
    json reports = json::array();
    for (const auto& r : s.reports) reports.push_back(check_to_json(r));
    return {{"schema_version", "pgdlab.verify-report/1"},
            {"prng", std::string(CounterRng::algorithm_id)},
            {"all_passed", s.all_passed()},
            {"note", s.note},
            {"reports", reports}};
}

struct LowerBoundRow {
    double epsilon = 0.0;
    bool skipped = false;
    std::string reason;
    double p = 0.0;
    int N = 0;
    bool identifies_interval = false;
    double mean_queries = 0.0;
    int repetitions = 0;
    int capped = 0;
};

struct LowerBoundTable {
    std::vector<LowerBoundRow> rows;
    std::optional<double> exponent;
    bool monotone = false;
    std::string label = "empirical exhibit of query growth on noisy-binary-search instances; not a proof of the lower bound";
};

struct LowerBoundOptions {
    int repetitions = 16;
    std::uint64_t query_cap = 10000000;
};

/**
 * For each epsilon: size an NBS instance, then run projected stochastic subgradient steps of
 * size epsilon/G^2 from x = R until the exact gap is at most epsilon, counting oracle queries.
 */
inline LowerBoundTable lowerbound_demo(const std::vector<double>& epsilons, double alpha, double tau, double G, double R,
                                       std::uint64_t seed, LowerBoundOptions opt = {})
{
    LowerBoundTable table;
    const CounterRng base(seed);
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        LowerBoundRow row;
        row.epsilon = epsilons[i];
        NbsParameters np{};
        try {
            np = nbs_parameters(row.epsilon, alpha, tau, G, R);
        } catch (const Error& e) {
            row.skipped = true;
            row.reason = e.what();
            table.rows.push_back(row);
            continue;
        }
        row.p = np.p;
        row.N = np.N;
        row.identifies_interval = np.identifies_interval;
        const double step = row.epsilon / (G * G);
        double total = 0.0;
        for (int r = 0; r < opt.repetitions; ++r) {
            CounterRng rr = base.split(i).split(static_cast<std::uint64_t>(r));
            const int j_star = 1 + static_cast<int>(rr() % static_cast<std::uint64_t>(np.N - 1));
            auto inst = std::make_shared<const NbsInstance>(make_nbs_instance(alpha, np.p, G, R, np.N, j_star));
            Oracle oracle(NbsBernoulli::from(inst), rr());
            const Domain& dom = inst->objective.domain();
            Vector x = scalar_vector(R);
            while (inst->objective.gap(x) > row.epsilon && oracle.query_count() < opt.query_cap) {
                x = dom.project(x - step * oracle.query(x));
            }
            if (inst->objective.gap(x) > row.epsilon) ++row.capped;
            total += static_cast<double>(oracle.query_count());
        }
        row.repetitions = opt.repetitions;
        row.mean_queries = total / opt.repetitions;
        table.rows.push_back(row);
    }

    std::vector<LowerBoundRow> used;
    for (const auto& r : table.rows) {
        if (!r.skipped) used.push_back(r);
    }
    std::sort(used.begin(), used.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
    table.monotone = used.size() >= 2;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < used.size(); ++k) {
        if (k > 0 && !(used[k].mean_queries > used[k - 1].mean_queries)) table.monotone = false;
        lx.push_back(std::log(used[k].epsilon));
        ly.push_back(std::log(used[k].mean_queries));
    }
    if (lx.size() >= 2) table.exponent = ols_slope(lx, ly).first;
    return table;
}

inline json lowerbound_to_json(const LowerBoundTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows) {
        json j{{"epsilon", r.epsilon}, {"skipped", r.skipped}};
        if (r.skipped) j["reason"] = r.reason;
        else {
            j["p"] = r.p;
            j["N"] = r.N;
            j["identifies_interval"] = r.identifies_interval;
            j["mean_queries"] = r.mean_queries;
            j["repetitions"] = r.repetitions;
            j["capped"] = r.capped;
        }
        rows.push_back(j);
    }
    return {{"schema_version", "pgdlab.lowerbound-demo/1"},
            {"prng", std::string(CounterRng::algorithm_id)},
            {"label", t.label},
            {"rows", rows},
            {"fitted_exponent", t.exponent ? json(*t.exponent) : json(nullptr)},
            {"monotone", t.monotone}};
}

} // namespace pgdlab::harness
