#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pgdlab.hpp"

namespace h = pgdlab::harness;

namespace {

struct Globals {
    std::string out;
    int jobs = 0;
    std::string format = "both";
};

void print_fit(const char* label, const h::SlopeFit& f)
{
    std::cout << label << ": status=" << f.status;
    if (f.slope) std::cout << " slope=" << *f.slope << " residual=" << *f.residual;
    std::cout << " target=" << f.target << " +- " << f.tol;
    if (f.pass) std::cout << (*f.pass ? " PASS" : " FAIL");
    std::cout << '\n';
}

void print_rates(const h::RateReport& r)
{
    std::cout << "T,mean_gap,stderr,mean_queries,n_ok,n_failed\n";
    for (const auto& row : r.rows) {
        std::cout << row.T << ',' << h::format_double(row.mean_gap) << ',' << h::format_double(row.stderr_gap) << ','
                  << h::format_double(row.mean_queries) << ',' << row.n_ok << ',' << row.n_failed
                  << (row.below_floor ? ",converged below floor" : "") << '\n';
    }
    print_fit("fit vs T", r.t_fit);
    print_fit("fit vs queries", r.query_fit);
}

int cmd_run(const Globals& g, const std::string& path)
{
    const h::ExperimentConfig cfg = h::load_config(path);
    const h::RateReport r = h::run_experiment(cfg, g.jobs > 0 ? std::optional<int>(g.jobs) : std::nullopt);
    const std::string dir = g.out.empty() ? cfg.output_dir : g.out;
    h::write_outputs(cfg, r, dir, g.format);
    print_rates(r);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "report written to " << dir << '\n';
    return r.exit_code();
}

int cmd_rates(const Globals& g, const std::string& path)
{
    const h::ExperimentConfig cfg = h::load_config(path);
    const std::string dir = g.out.empty() ? cfg.output_dir : g.out;
    const h::RateReport r = h::rates_from_curves(cfg, dir);
    std::ofstream(std::filesystem::path(dir) / "rates.json") << h::summary_to_json(r).dump(2) << '\n';
    print_rates(r);
    return r.exit_code();
}

int cmd_verify(const Globals& g, const std::string& filter)
{
    const h::SuiteResult s = h::run_verification_suite(filter);
    for (const auto& r : s.reports) {
        std::cout << (r.passed ? "PASS " : (r.inconclusive ? "INCONCLUSIVE " : "FAIL ")) << r.name << "  " << r.details
                  << '\n';
    }
    if (!s.note.empty()) std::cout << s.note << '\n';
    std::cout << s.reports.size() << " checks, " << (s.all_passed() ? "all passed" : "failures present") << '\n';
    if (!g.out.empty()) {
        std::filesystem::create_directories(g.out);
        std::ofstream(std::filesystem::path(g.out) / "verify.json") << h::suite_to_json(s).dump(2) << '\n';
    }
    return s.all_passed() ? h::exit_ok : h::exit_check_failed;
}

int cmd_lowerbound(const Globals& g, double alpha, double tau, double G, double R, const std::vector<double>& eps,
                   std::uint64_t seed)
{
    const h::LowerBoundTable t = h::lowerbound_demo(eps, alpha, tau, G, R, seed);
    std::cout << t.label << '\n' << "epsilon,p,N,mean_queries,capped\n";
    for (const auto& r : t.rows) {
        if (r.skipped) std::cout << r.epsilon << ",skipped: " << r.reason << '\n';
        else std::cout << r.epsilon << ',' << r.p << ',' << r.N << ',' << r.mean_queries << ',' << r.capped << '\n';
    }
    if (t.exponent) std::cout << "fitted exponent of queries vs epsilon: " << *t.exponent << '\n';
    std::cout << "monotone: " << (t.monotone ? "yes" : "no") << '\n';
    if (!g.out.empty()) {
        std::filesystem::create_directories(g.out);
        std::ofstream(std::filesystem::path(g.out) / "lowerbound.json") << h::lowerbound_to_json(t).dump(2) << '\n';
    }
    return h::exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pgdlab: gradient-dominance instances, verifiers and rate experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--jobs", g.jobs, "Worker threads (overrides run.parallelism)")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "Output files to write")->check(CLI::IsMember({"json", "csv", "both"}));

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a multi-seed rate experiment");
    run->add_option("config", config_path, "Configuration file (JSON)")->required();
    run->fallthrough();

    std::string rates_path;
    auto* rates = app.add_subcommand("rates", "Recompute rate fits from a previous run's curves.csv");
    rates->add_option("config", rates_path, "Configuration file (JSON)")->required();
    rates->fallthrough();

    std::string filter;
    auto* verify = app.add_subcommand("verify", "Run the verification suite");
    verify->add_option("--filter", filter, "Regex selecting check names");
    verify->fallthrough();

    double alpha = 2.0, tau = 1.0, G = 1.0, R = 1.0;
    std::vector<double> eps;
    std::uint64_t seed = 1;
    auto* lb = app.add_subcommand("lowerbound-demo", "Queries needed on noisy-binary-search instances");
    lb->add_option("--alpha", alpha)->required();
    lb->add_option("--tau", tau)->required();
    lb->add_option("--g", G)->required();
    lb->add_option("--r", R)->required();
    lb->add_option("--eps", eps)->required()->delimiter(',');
    lb->add_option("--seed", seed);
    lb->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : h::exit_config_error;
    }

    try {
        if (*run) return cmd_run(g, config_path);
        if (*rates) return cmd_rates(g, rates_path);
        if (*verify) return cmd_verify(g, filter);
        return cmd_lowerbound(g, alpha, tau, G, R, eps, seed);
    } catch (const pgdlab::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return h::exit_numeric_failure;
    } catch (const pgdlab::Error& e) {
        std::cerr << e.what() << '\n';
        return h::exit_config_error;
    } catch (const std::regex_error& e) {
        std::cerr << "bad filter pattern: " << e.what() << '\n';
        return h::exit_config_error;
    }
}
