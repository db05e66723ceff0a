// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pgdlab.hpp"

using namespace pgdlab;
using namespace pgdlab::harness;

namespace {

namespace tol {
inline constexpr double dominance = 1e-6;
inline constexpr double smoothness = 1e-6;
inline constexpr double witness_ratio = 0.99;
inline constexpr double witness_near_R = 0.05;
inline constexpr double local_dominance = 1e-9;
inline constexpr std::size_t nbs_bound_samples = 1000000;
inline constexpr double nbs_bound_slack = 4e-16;
inline constexpr std::size_t mc_samples = 100000;
inline constexpr double mc_sigmas = 5.0;
inline constexpr double foster_identity = 1e-10;
inline constexpr double foster_variance = 0.03;
inline constexpr double foster_radius = 1e-10;
inline constexpr std::size_t recursion_draws = 1000;
inline constexpr double poly_identity = 1e-12;
inline constexpr double merged_identity = 1e-14;
inline constexpr double lowerbound_exponent = -0.6;
} // namespace tol

struct Line {
    std::string id;
    std::string title;
    bool passed;
    std::string detail;
};

std::vector<Line> g_lines;

void emit(const std::string& id, const std::string& title, bool passed, const std::string& detail, double seconds)
{
    g_lines.push_back({id, title, passed, detail});
    std::printf("[%s] %-4s %s: %s (%.1fs)\n", passed ? "PASS" : "FAIL", id.c_str(), title.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

template <class Fn>
void criterion(const std::string& id, const std::string& title, Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(id, title, ok, detail, s);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string config_path(const std::string& name) { return std::string(PGDLAB_SOURCE_DIR) + "/demos/configs/" + name + ".json"; }

double metric(const CheckReport& r, const std::string& key)
{
    for (const auto& [k, v] : r.metrics)
        if (k == key) return v;
    return std::nan("");
}

std::vector<LowerBoundPair> pair_matrix()
{
    std::vector<LowerBoundPair> out;
    for (const auto& p : default_pair_matrix()) out.push_back(make_lower_bound_pair(p.alpha, p.C, p.R, p.rho));
    return out;
}

bool rate_line(const std::string& id, const std::string& title, const std::string& config, RateReport* keep = nullptr)
{
    bool result = false;
    criterion(id, title, [&](std::string& d) {
        const ExperimentConfig cfg = load_config(config_path(config));
        RateReport r = run_experiment(cfg);
        const auto show = [](const SlopeFit& f) {
            if (!f.slope) return f.status;
            return "slope " + fmt(*f.slope) + " in [" + fmt(f.target - f.tol) + ", " + fmt(f.target + f.tol) + "]";
        };
        d = "vs T " + show(r.t_fit) + "; vs queries " + show(r.query_fit);
        result = r.t_fit.pass.value_or(false) && r.query_fit.pass.value_or(false) && !r.any_failed_cells();
        if (keep) *keep = std::move(r);
        return result;
    });
    return result;
}

} // namespace

int main()
{
    const auto pairs = pair_matrix();

    criterion("1", "dominance certification", [&](std::string& d) {
        int passed = 0, controls = 0, total = 0;
        double worst = 0.0;
        for (const auto& pair : pairs) {
            const auto c = theoretical_constants(pair);
            const GridSpec grid{Domain::interval(0.0, pair.R), default_grid_points, default_exclusion};
            for (const Objective* f : {&pair.f0, &pair.f1}) {
                ++total;
                const auto g = verify_grad_dominance(*f, grid, c.alpha, c.tau, tol::dominance);
                const auto p = verify_projected_grad_dominance(*f, f->domain(), grid, c.alpha, c.tau,
                                                               {*c.eta0, *c.eta0 / 2, *c.eta0 / 10}, tol::dominance);
                worst = std::max({worst, g.worst_ratio, p.worst_ratio});
                passed += g.passed && p.passed;
                const auto gh = verify_grad_dominance(*f, grid, c.alpha, c.tau / 2, tol::dominance);
                const auto ph = verify_projected_grad_dominance(*f, f->domain(), grid, c.alpha, c.tau / 2,
                                                                {*c.eta0, *c.eta0 / 2, *c.eta0 / 10}, tol::dominance);
                controls += !gh.passed && !ph.passed;
            }
        }
        d = std::to_string(passed) + "/" + std::to_string(total) + " certified (worst ratio " + fmt(worst) + "), " +
            std::to_string(controls) + "/" + std::to_string(total) + " halved-tau controls rejected";
        return passed == total && controls == total;
    });

    criterion("2", "smoothness certification", [&](std::string& d) {
        int passed = 0, witnesses = 0, total = 0, f1_bare = 0;
        for (const auto& pair : pairs) {
            const GridSpec wide{Domain::interval(-pair.R, pair.R), default_grid_points, default_exclusion};
            for (int which = 0; which < 2; ++which) {
                const Objective& f = which == 0 ? pair.f0 : pair.f1;
                ++total;
                const auto r = verify_smoothness(f, wide, f.certificate()->L, tol::smoothness);
                passed += r.passed;
                if (which == 1) f1_bare += verify_smoothness(f, wide, pair.f0.certificate()->L, tol::smoothness).passed;
                if (which == 0) {
                    witnesses += r.worst_ratio >= tol::witness_ratio &&
                                 std::abs(std::abs(r.worst_point[0]) - pair.R) <= tol::witness_near_R * pair.R;
                }
            }
        }
        d = std::to_string(passed) + "/" + std::to_string(total) + " pass, " + std::to_string(witnesses) + "/" +
            std::to_string(pairs.size()) + " f0 equality witnesses near |x| = R; informational: f1 within bare L0 " +
            std::to_string(f1_bare) + "/" + std::to_string(pairs.size());
        return passed == total && witnesses == static_cast<int>(pairs.size());
    });

    criterion("3", "noisy binary search instance", [&](std::string& d) {
        bool ok = true;
        std::ostringstream os;
        for (double alpha : {1.5, 2.0}) {
            auto inst = std::make_shared<const NbsInstance>(make_nbs_instance(alpha, 0.2, 1.0, 1.0, 8, 3));
            const auto& c = *inst->objective.certificate();
            const double tau = (alpha - 1.0) / alpha * (1.0 / 16.0) * std::pow(0.2 * 1.0, 1.0 - alpha);
            const GridSpec cell{Domain::interval(inst->breakpoint(3), inst->breakpoint(4) - 1e-12), default_grid_points, 0.0};
            const auto local = verify_local_grad_dominance(inst->objective, cell, alpha, tau, 1.0 / 8.0, tol::local_dominance);
            ok = ok && local.passed && std::abs(c.tau - tau) <= 1e-12 * tau;

            Oracle o(NbsBernoulli::from(inst), 17);
            CounterRng where(23);
            std::size_t violations = 0;
            for (std::size_t i = 0; i < tol::nbs_bound_samples; ++i) {
                const double x = where.uniform01() * inst->R;
                violations += o.query(scalar_vector(x)).norm() > inst->G * (1.0 + tol::nbs_bound_slack);
            }
            int unbiased = 0;
            for (int k = 0; k < 10; ++k) {
                const Vector x = scalar_vector(inst->R * (0.05 + 0.1 * k));
                const auto s = oracle_statistics(o, x, tol::mc_samples);
                unbiased += s.mean_error <= tol::mc_sigmas * std::sqrt(s.var_estimate / tol::mc_samples);
            }
            ok = ok && violations == 0 && unbiased == 10;
            os << "alpha=" << alpha << ": local worst " << fmt(local.worst_ratio) << ", |g|>G " << violations << ", unbiased "
               << unbiased << "/10; ";
        }
        d = os.str();
        return ok;
    });

    criterion("4", "Foster instance", [&](std::string& d) {
        auto f = std::make_shared<const FosterInstance>(make_foster_instance(1.0, 1.0, 4, 4, 7));
        const Objective& F = f->objective;
        CounterRng rng(29);
        std::normal_distribution<double> n;
        double worst_identity = 0.0;
        for (int i = 0; i < 1000; ++i) {
            Vector x(f->d);
            for (Index k = 0; k < x.size(); ++k) x[k] = n(rng);
            x = F.domain().project(x * rng.uniform01());
            const double lhs = F.gradient(x).squaredNorm();
            const double rhs = 2.0 * f->b * F.gap(x);
            worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
        }
        Oracle o(FosterUniform{f}, 31);
        const auto s = oracle_statistics(o, Vector::Constant(f->d, 0.1), tol::mc_samples);
        const double expected_var = f->sigma * f->sigma * (1.0 - 1.0 / f->m);
        const double var_err = std::abs(s.var_estimate - expected_var) / expected_var;
        const double radius_err = std::abs(F.minimizer()->norm() - f->R / 2.0) / (f->R / 2.0);
        d = "identity rel err " + fmt(worst_identity) + ", variance rel err " + fmt(var_err) + ", |x*| rel err " + fmt(radius_err);
        return worst_identity <= tol::foster_identity && var_err <= tol::foster_variance && radius_err <= tol::foster_radius;
    });

    criterion("5", "KL integrand", [&](std::string& d) {
        int ok = 0;
        for (const auto& pair : pairs) ok += check_kl_triangle(pair, 1.0, 100000).passed;
        d = std::to_string(ok) + "/" + std::to_string(pairs.size()) + " vanish on [2 rho, R] with argmax at x = 0";
        return ok == static_cast<int>(pairs.size());
    });

    criterion("6", "recursion inequalities", [&](std::string& d) {
        const auto v = variance_recursion_draws(tol::recursion_draws, 11);
        const auto p = poly_bound_draws(tol::recursion_draws, 12);
        const double identity = metric(p, "worst_identity_rel_err");
        bool ok = v.passed && p.passed && identity <= tol::poly_identity;
        std::ostringstream os;
        os << "variance worst " << fmt(v.worst_ratio) << ", poly identity " << fmt(identity) << ", delta slopes";
        for (double alpha : {1.0, 1.5, 1.9}) {
            const auto r = check_delta_recursion(canonical_delta_params(alpha));
            ok = ok && r.passed;
            os << ' ' << fmt(metric(r, "slope")) << "<=" << fmt(-alpha / 2 + 0.1);
        }
        d = os.str();
        return ok;
    });

    RateReport first_run;
    rate_line("7", "Proj-STORM rate on f1, alpha=1.5", "storm_f1_alpha1.5", &first_run);
    rate_line("7b", "Proj-STORM rate at alpha=1 (Foster instance)", "storm_foster_alpha1");
    rate_line("8", "Proj-SGD rate at alpha=1 (Foster instance)", "sgd_foster_alpha1");

    criterion("9", "merged-update identity", [&](std::string& d) {
        const auto pair = make_lower_bound_pair(1.5, 1.0, 1.0, 0.1);
        auto f1 = std::make_shared<const Objective>(pair.f1);
        const double L = f1->certificate()->L;
        Oracle o(GaussianAdditive{f1, 1.0}, 41);
        double worst = 0.0;
        std::size_t steps = 0;
        proj_storm(o, f1->domain(), scalar_vector(0.2), StormOptions{.T = 1000, .eta0 = 0.5 / L, .alpha = 1.5},
                   [&](const StormStep& s) {
                       const Vector G = estimated_gradient_mapping(s.g, f1->domain(), s.x, s.eta);
                       worst = std::max(worst, (s.x_next - (s.x - s.beta * s.eta * G)).norm());
                       ++steps;
                   });
        d = std::to_string(steps) + " steps, max deviation " + fmt(worst);
        return steps == 1000 && worst <= tol::merged_identity;
    });

    criterion("10", "prox/projection coherence", [&](std::string& d) {
        int same = 0, total = 0;
        std::uint64_t seed = 100;
        const auto compare = [&](const std::shared_ptr<const Objective>& f, const Oracle::Kind& kind, const Vector& x0,
                                 double eta0) {
            ++total;
            Oracle a(kind, seed), b(kind, seed);
            ++seed;
            const SgdOptions opt{.T = 30, .eta0 = eta0, .b0 = 1.0, .alpha = 1.0};
            const auto ta = proj_sgd(a, f->domain(), x0, opt);
            const auto tb = prox_sgd(b, IndicatorProx{f->domain()}, x0, opt);
            bool eq = ta.records.size() == tb.records.size();
            for (std::size_t i = 0; eq && i < ta.records.size(); ++i) eq = ta.records[i].x == tb.records[i].x;
            same += eq;
        };
        for (const auto& pair : pairs) {
            for (const Objective* f : {&pair.f0, &pair.f1}) {
                auto fp = std::make_shared<const Objective>(*f);
                compare(fp, GaussianAdditive{fp, 1.0}, scalar_vector(0.5 * pair.R), 1.0 / (2.0 * f->certificate()->L));
            }
        }
        auto foster = std::make_shared<const FosterInstance>(make_foster_instance(1.0, 1.0, 4, 4, 7));
        auto fo = std::make_shared<const Objective>(foster->objective);
        compare(fo, FosterUniform{foster}, Vector::Zero(4), 1.0 / (2.0 * foster->b));
        d = std::to_string(same) + "/" + std::to_string(total) + " trajectories bitwise identical";
        return same == total;
    });

    criterion("11", "lower-bound exhibit", [&](std::string& d) {
        const auto t = lowerbound_demo({0.04, 0.02, 0.01, 0.005}, 2.0, 1.0, 1.0, 1.0, 2024);
        std::ostringstream os;
        os << "queries";
        for (const auto& r : t.rows) os << ' ' << (r.skipped ? std::string("skipped") : fmt(r.mean_queries));
        os << ", monotone " << (t.monotone ? "yes" : "no") << ", exponent "
           << (t.exponent ? fmt(*t.exponent) : std::string("n/a")) << " <= " << tol::lowerbound_exponent;
        d = os.str();
        const bool labelled = t.label.find("empirical exhibit") != std::string::npos && t.label.find("not a proof") != std::string::npos;
        return t.monotone && t.exponent && *t.exponent <= tol::lowerbound_exponent && labelled;
    });

    criterion("12", "determinism", [&](std::string& d) {
        const ExperimentConfig cfg = load_config(config_path("storm_f1_alpha1.5"));
        const std::string a = report_to_json(cfg, first_run).dump();
        const std::string b = report_to_json(cfg, run_experiment(cfg)).dump();
        const std::string c = report_to_json(cfg, run_experiment(cfg, 1)).dump();
        d = std::string("rerun ") + (a == b ? "identical" : "differs") + ", serial rerun " + (a == c ? "identical" : "differs");
        return a == b && a == c;
    });

    int failed = 0;
    for (const auto& l : g_lines) failed += !l.passed;
    std::printf("%zu criteria lines, %d failed\n", g_lines.size(), failed);
    return failed == 0 ? 0 : 1;
}
