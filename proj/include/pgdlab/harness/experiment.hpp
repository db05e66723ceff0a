#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../instances.hpp"
#include "../optimizers.hpp"
#include "../oracles.hpp"
#include "../random.hpp"
#include "../verifiers.hpp"
#include "config.hpp"

namespace pgdlab::harness {

inline constexpr const char* report_schema_version = "pgdlab.rate-report/1";
inline constexpr double gap_floor = 1e-14;

enum ExitCode : int { exit_ok = 0, exit_check_failed = 2, exit_config_error = 3, exit_numeric_failure = 4 };

/// Everything a run needs, resolved from a configuration. Immutable and shareable across threads.
struct Setup {
    std::shared_ptr<const Objective> objective;
    std::shared_ptr<const NbsInstance> nbs;
    std::shared_ptr<const FosterInstance> foster;
    std::optional<Domain> domain;
    Vector x0;
    std::string optimizer;
    std::string oracle;
    double oracle_sigma = 0.0;
    double alpha = 1.0;
    SgdOptions sgd;
    StormOptions storm;

    Oracle make_oracle(std::uint64_t seed) const
    {
        if (oracle == "gaussian") return Oracle(GaussianAdditive{objective, oracle_sigma}, seed);
        if (oracle == "nbs_bernoulli") return Oracle(NbsBernoulli::from(nbs), seed);
        if (oracle == "foster_uniform") return Oracle(FosterUniform{foster}, seed);
        return Oracle(ExactGradient{objective}, seed);
    }

    double t_slope_target() const
    {
        return optimizer == "proj_storm" ? -alpha / 2.0 : -alpha / (2.0 - alpha);
    }

    double query_slope_target() const
    {
        return optimizer == "proj_storm" ? -alpha / 2.0 : -alpha / (4.0 - alpha);
    }
};

/// Builds instance, oracle factory and optimizer options; module errors become config errors.
inline Setup build_setup(const ExperimentConfig& cfg)
{
    std::vector<std::string> errors;
    Setup s;
    const InstanceSpec& in = cfg.instance;
    try {
        if (in.kind == "lower_bound_f0" || in.kind == "lower_bound_f1") {
            LowerBoundPair pair = make_lower_bound_pair(in.alpha, in.C, in.R, in.rho);
            s.objective = std::make_shared<const Objective>(in.kind == "lower_bound_f0" ? pair.f0 : pair.f1);
        } else if (in.kind == "nbs") {
            s.nbs = std::make_shared<const NbsInstance>(make_nbs_instance(in.alpha, in.p, in.G, in.R, in.N, in.j_star));
            s.objective = std::shared_ptr<const Objective>(s.nbs, &s.nbs->objective);
        } else if (in.kind == "foster") {
            s.foster = std::make_shared<const FosterInstance>(make_foster_instance(in.sigma, in.R, in.m, in.d, in.basis_seed));
            s.objective = std::shared_ptr<const Objective>(s.foster, &s.foster->objective);
        } else {
            const Vector xs = Eigen::Map<const Vector>(in.x_star.data(), in.x_star.size());
            s.objective = std::make_shared<const Objective>(make_power_instance(in.alpha, in.lambda, xs, in.domain.build()));
        }
        s.domain = s.objective->domain();
    } catch (const Error& e) {
        errors.push_back(std::string("instance: ") + e.what());
        throw ConfigError(std::move(errors));
    }

    const auto& cert = s.objective->certificate();
    const OptimizerSpec& o = cfg.optimizer;
    s.optimizer = o.kind;
    s.oracle = cfg.oracle.kind;
    s.oracle_sigma = cfg.oracle.sigma;
    s.alpha = o.alpha.value_or(cert ? cert->alpha : in.alpha);

    double eta0 = o.eta0.value_or(0.0);
    if (o.eta0_rule == "certificate") {
        if (!cert || !cert->eta0) errors.push_back("optimizer.eta0: the instance certificate carries no eta0");
        else eta0 = *cert->eta0;
    } else if (o.eta0_rule == "inverse_2L") {
        if (!cert) errors.push_back("optimizer.eta0: the instance carries no smoothness constant");
        else eta0 = 1.0 / (2.0 * cert->L);
    }
    double beta0 = o.beta0.value_or(1.0);
    if (o.beta0_eta0_L) {
        if (!cert) errors.push_back("optimizer.beta0_eta0_L: the instance carries no smoothness constant");
        else if (eta0 > 0.0) beta0 = *o.beta0_eta0_L / (cert->L * eta0);
    }

    const Index d = s.objective->dim();
    if (o.x0.size() == 1) s.x0 = Vector::Constant(d, o.x0[0]);
    else if (static_cast<Index>(o.x0.size()) == d) s.x0 = Eigen::Map<const Vector>(o.x0.data(), d);
    else errors.push_back("optimizer.x0: dimension does not match the instance");
    if (s.x0.size() == d && !s.domain->contains(s.x0)) errors.push_back("optimizer.x0: outside the instance domain");

    if (o.kind == "proj_storm") {
        s.storm = StormOptions{0, eta0, o.a0, beta0, s.alpha, o.g0_batch, o.override_step_check};
        if (!(s.alpha >= 1.0 && s.alpha <= 2.0)) errors.push_back("optimizer.alpha: must lie in [1, 2]");
        if (cert && !o.override_step_check && beta0 * eta0 > (1.0 + 1e-12) / cert->L)
            errors.push_back("optimizer: beta0 * eta0 exceeds 1/L");
    } else {
        s.sgd = SgdOptions{0, eta0, o.b0, s.alpha, o.override_step_check};
        if (!(s.alpha >= 1.0 && s.alpha < 2.0)) errors.push_back("optimizer.alpha: must lie in [1, 2) for growing-batch SGD");
        if (cert && !o.override_step_check && eta0 > (1.0 + 1e-12) / (2.0 * cert->L))
            errors.push_back("optimizer.eta0: exceeds 1/(2L)");
    }
    if (!s.objective->has_min_value()) errors.push_back("instance: minimum unknown, gaps cannot be reported");
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return s;
}

struct CellResult {
    std::uint64_t T = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    double gap = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t queries = 0;
    std::optional<double> grad_error_sq;
    std::string error;
};

/// One fresh oracle and one fresh optimizer run of length T.
inline CellResult run_cell(const Setup& s, std::uint64_t T, std::uint64_t seed, std::vector<std::string>* warnings = nullptr)
{
    CellResult c;
    c.T = T;
    c.seed = seed;
    Oracle oracle = s.make_oracle(seed);
    try {
        Trajectory tr;
        if (s.optimizer == "proj_storm") {
            StormOptions opt = s.storm;
            opt.T = T;
            tr = proj_storm(oracle, *s.domain, s.x0, opt);
        } else if (s.optimizer == "prox_sgd") {
            SgdOptions opt = s.sgd;
            opt.T = T;
            tr = prox_sgd(oracle, IndicatorProx{*s.domain}, s.x0, opt);
        } else {
            SgdOptions opt = s.sgd;
            opt.T = T;
            tr = proj_sgd(oracle, *s.domain, s.x0, opt);
        }
        c.ok = true;
        c.gap = *tr.final().gap;
        c.queries = tr.final().queries_cumulative;
        c.grad_error_sq = tr.final().grad_error_sq;
        if (warnings) *warnings = tr.warnings;
    } catch (const NumericFailure& e) {
        c.error = e.what();
        c.queries = oracle.query_count();
    }
    return c;
}

struct TRow {
    std::uint64_t T;
    double mean_gap;
    double stderr_gap;
    double mean_queries;
    std::size_t n_ok;
    std::size_t n_failed;
    bool below_floor;
};

struct SlopeFit {
    std::string status; // ok | converged_below_floor | insufficient_points | failed_cells
    std::optional<double> slope;
    std::optional<double> residual;
    std::size_t points = 0;
    double target = 0.0;
    double tol = 0.0;
    std::optional<bool> pass;
};

struct RateReport {
    std::vector<TRow> rows;
    SlopeFit t_fit;
    SlopeFit query_fit;
    std::vector<CellResult> cells;
    std::vector<std::string> warnings;

    bool any_failed_cells() const
    {
        for (const auto& c : cells) {
            if (!c.ok) return true;
        }
        return false;
    }

    int exit_code() const
    {
        if (any_failed_cells()) return exit_numeric_failure;
        if (t_fit.pass == false || query_fit.pass == false) return exit_check_failed;
        return exit_ok;
    }
};

namespace detail {

/// OLS of log(mean gap) against log(x) over the upper half of the T-list.
inline SlopeFit fit_upper_half(const std::vector<TRow>& rows, bool against_queries, double target, double tol)
{
    SlopeFit f;
    f.target = target;
    f.tol = tol;
    std::vector<double> lx, ly;
    bool below = false, failed = false;
    for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
        const TRow& r = rows[i];
        if (r.n_ok == 0 || r.n_failed > 0) failed = true;
        else if (r.below_floor) below = true;
        else {
            lx.push_back(std::log(against_queries ? r.mean_queries : static_cast<double>(r.T)));
            ly.push_back(std::log(r.mean_gap));
        }
    }
    if (failed) f.status = "failed_cells";
    else if (below) f.status = "converged_below_floor";
    else if (lx.size() < 2) f.status = "insufficient_points";
    else {
        const auto [slope, resid] = ols_slope(lx, ly);
        f.status = "ok";
        f.slope = slope;
        f.residual = resid;
        f.pass = std::abs(slope - target) <= tol;
    }
    f.points = lx.size();
    return f;
}

} // namespace detail

/// Ordered reduction of cell results (T-major, seed order as listed) into the rate report.
inline RateReport aggregate(const Setup& s, const CheckSpec& check, std::vector<CellResult> cells)
{
    RateReport rep;
    std::vector<std::uint64_t> order;
    std::map<std::uint64_t, std::vector<const CellResult*>> byT;
    for (const auto& c : cells) {
        if (!byT.count(c.T)) order.push_back(c.T);
        byT[c.T].push_back(&c);
    }
    for (std::uint64_t T : order) {
        TRow row{T, 0.0, 0.0, 0.0, 0, 0, false};
        double sum = 0.0, qsum = 0.0;
        for (const CellResult* c : byT[T]) {
            if (!c->ok) {
                ++row.n_failed;
                continue;
            }
            ++row.n_ok;
            sum += c->gap;
            qsum += static_cast<double>(c->queries);
        }
        if (row.n_ok > 0) {
            const double n = static_cast<double>(row.n_ok);
            row.mean_gap = sum / n;
            row.mean_queries = qsum / n;
            double ss = 0.0;
            for (const CellResult* c : byT[T]) {
                if (c->ok) ss += (c->gap - row.mean_gap) * (c->gap - row.mean_gap);
            }
            row.stderr_gap = row.n_ok > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
            row.below_floor = row.mean_gap < gap_floor;
        }
        rep.rows.push_back(row);
    }
    rep.t_fit = detail::fit_upper_half(rep.rows, false, check.t_slope_target.value_or(s.t_slope_target()), check.t_slope_tol);
    rep.query_fit = detail::fit_upper_half(rep.rows, true, check.query_slope_target.value_or(s.query_slope_target()),
                                           check.query_slope_tol);
    rep.cells = std::move(cells);
    return rep;
}

/// Runs every seed x T cell on up to `parallelism` threads; results do not depend on the thread count.
inline RateReport run_experiment(const ExperimentConfig& cfg, std::optional<int> jobs = std::nullopt)
{
    const Setup s = build_setup(cfg);
    const std::size_t nseeds = cfg.run.seeds.size();
    const std::size_t ncells = cfg.run.T.size() * nseeds;
    std::vector<CellResult> cells(ncells);
    std::vector<std::vector<std::string>> warnings(ncells);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < ncells; i = next++) {
            try {
                cells[i] = run_cell(s, cfg.run.T[i / nseeds], cfg.run.seeds[i % nseeds], &warnings[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const int par = std::max(1, jobs.value_or(cfg.run.parallelism));
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(par), ncells);
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < nthreads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    RateReport rep = aggregate(s, cfg.check, std::move(cells));
    for (const auto& w : warnings) {
        for (const auto& m : w) {
            if (std::find(rep.warnings.begin(), rep.warnings.end(), m) == rep.warnings.end()) rep.warnings.push_back(m);
        }
    }
    return rep;
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline json fit_to_json(const SlopeFit& f)
{
    json j{{"status", f.status}, {"points", f.points}, {"target", f.target}, {"tolerance", f.tol}};
    j["slope"] = f.slope ? json(*f.slope) : json(nullptr);
    j["residual"] = f.residual ? json(*f.residual) : json(nullptr);
    j["pass"] = f.pass ? json(*f.pass) : json(nullptr);
    return j;
}

/// The part of the report recomputable from curves.csv alone.
inline json summary_to_json(const RateReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"T", row.T},
                        {"mean_gap", row.mean_gap},
                        {"stderr_gap", row.stderr_gap},
                        {"mean_queries", row.mean_queries},
                        {"n_ok", row.n_ok},
                        {"n_failed", row.n_failed},
                        {"converged_below_floor", row.below_floor}});
    }
    return {{"per_T", rows}, {"fit_vs_T", fit_to_json(r.t_fit)}, {"fit_vs_queries", fit_to_json(r.query_fit)}};
}

inline json report_to_json(const ExperimentConfig& cfg, const RateReport& r)
{
    json failed = json::array();
    for (const auto& c : r.cells) {
        if (!c.ok) failed.push_back({{"T", c.T}, {"seed", c.seed}, {"error", c.error}});
    }
    return {{"schema_version", report_schema_version},
            {"prng", std::string(CounterRng::algorithm_id)},
            {"config", cfg.source},
            {"summary", summary_to_json(r)},
            {"failed_cells", failed},
            {"warnings", r.warnings},
            {"fit_window", "upper half of the T-list"},
            {"calibration_note", "run budgets, seed counts and tolerance bands are calibration choices"},
            {"exit_code", r.exit_code()}};
}

inline void write_curves_csv(const RateReport& r, std::ostream& out)
{
    out << "t,queries,seed,gap,grad_error_sq\n";
    for (const auto& c : r.cells) {
        out << c.T << ',' << c.queries << ',' << c.seed << ',' << (c.ok ? format_double(c.gap) : "nan") << ','
            << (c.grad_error_sq ? format_double(*c.grad_error_sq) : "") << '\n';
    }
}

/// Reads curves.csv back into cell results (rows with gap "nan" are failed cells).
inline std::vector<CellResult> read_curves_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "t,queries,seed,gap,grad_error_sq")
        throw ConfigError({"curves.csv: unexpected header"});
    std::vector<CellResult> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 5) throw ConfigError({"curves.csv: malformed row '" + line + "'"});
        CellResult c;
        auto parse_u = [&](const std::string& s) {
            std::uint64_t v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc()) throw ConfigError({"curves.csv: bad integer '" + s + "'"});
            return v;
        };
        auto parse_d = [&](const std::string& s) {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc()) throw ConfigError({"curves.csv: bad number '" + s + "'"});
            return v;
        };
        c.T = parse_u(f[0]);
        c.queries = parse_u(f[1]);
        c.seed = parse_u(f[2]);
        c.ok = f[3] != "nan";
        if (c.ok) c.gap = parse_d(f[3]);
        if (!f[4].empty()) c.grad_error_sq = parse_d(f[4]);
        cells.push_back(c);
    }
    return cells;
}

/// Writes report.json and/or curves.csv into dir; format is json, csv or both.
inline void write_outputs(const ExperimentConfig& cfg, const RateReport& r, const std::string& dir,
                          const std::string& format = "both")
{
    std::filesystem::create_directories(dir);
    if (format == "json" || format == "both") {
        std::ofstream(std::filesystem::path(dir) / "report.json") << report_to_json(cfg, r).dump(2) << '\n';
    }
    if (format == "csv" || format == "both") {
        std::ofstream out(std::filesystem::path(dir) / "curves.csv");
        write_curves_csv(r, out);
    }
}

/// Recomputes the rate summary from the curves.csv of a previous run.
inline RateReport rates_from_curves(const ExperimentConfig& cfg, const std::string& dir)
{
    const Setup s = build_setup(cfg);
    std::ifstream in(std::filesystem::path(dir) / "curves.csv");
    if (!in) throw ConfigError({(std::filesystem::path(dir) / "curves.csv").string() + ": cannot open"});
    return aggregate(s, cfg.check, read_curves_csv(in));
}

} // namespace pgdlab::harness
