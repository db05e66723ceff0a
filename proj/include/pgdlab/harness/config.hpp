#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../geometry.hpp"

namespace pgdlab::harness {

using json = nlohmann::json;

struct DomainSpec {
    std::string kind = "interval"; // interval | box | ball | all_space
    std::vector<double> lo, hi, center;
    double radius = 1.0;
    int dim = 1;

    Domain build() const
    {
        const auto vec = [](const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()).eval(); };
        if (kind == "interval") return Domain::interval(lo.at(0), hi.at(0));
        if (kind == "box") return Domain::box(vec(lo), vec(hi));
        if (kind == "ball") return Domain::ball(vec(center), radius);
        return Domain::all_space(dim);
    }
};

/// Instance kinds: lower_bound_f0, lower_bound_f1, nbs, foster, power.
struct InstanceSpec {
    std::string kind;
    double alpha = 0.0;
    double C = 1.0;
    double R = 1.0;
    double rho = 0.1;
    double p = 0.0;
    double G = 1.0;
    int N = 0;
    int j_star = 1;
    double sigma = 1.0;
    int m = 0;
    int d = 0;
    std::uint64_t basis_seed = 0;
    double lambda = 1.0;
    std::vector<double> x_star;
    DomainSpec domain;
};

/// Oracle kinds: gaussian, nbs_bernoulli, foster_uniform, exact.
struct OracleSpec {
    std::string kind;
    double sigma = 1.0;
};

/**
 * Optimizer kinds: proj_sgd, prox_sgd (indicator prox of the instance domain), proj_storm.
 * eta0 is a number or a rule: "certificate" (the instance's eta0) or "inverse_2L" (1/(2L)).
 * beta0 is a number, or derived from beta0_eta0_L = beta0 * eta0 * L.
 */
struct OptimizerSpec {
    std::string kind;
    std::optional<double> eta0;
    std::string eta0_rule;
    double b0 = 1.0;
    double a0 = 1.5;
    std::optional<double> beta0;
    std::optional<double> beta0_eta0_L;
    std::uint64_t g0_batch = 1;
    std::optional<double> alpha;
    std::vector<double> x0;
    bool override_step_check = false;
};

struct RunSpec {
    std::vector<std::uint64_t> seeds;
    std::vector<std::uint64_t> T;
    int parallelism = 1;
};

/// Optional overrides of the theoretical slope targets and tolerance bands.
struct CheckSpec {
    std::optional<double> t_slope_target;
    double t_slope_tol = 0.15;
    std::optional<double> query_slope_target;
    double query_slope_tol = 0.15;
};

struct ExperimentConfig {
    InstanceSpec instance;
    OracleSpec oracle;
    OptimizerSpec optimizer;
    RunSpec run;
    std::string output_dir = "out";
    CheckSpec check;
    json source;
};

namespace detail {

/// Reads a JSON object while remembering consumed keys so leftovers can be reported.
class Section {
public:
    Section(const json& root, std::string path, std::vector<std::string>& errors) : path_(std::move(path)), errors_(errors)
    {
        if (root.is_object()) obj_ = &root;
        else errors_.push_back(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

    const json* raw(const std::string& key)
    {
        used_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }

    template <class T>
    void get(const std::string& key, T& out, bool required = false)
    {
        const json* v = raw(key);
        if (!v) {
            if (required && obj_) errors_.push_back(where(key) + ": required");
            return;
        }
        try {
            if constexpr (std::is_floating_point_v<T>) {
                if (!v->is_number()) throw std::runtime_error("expected a number");
                out = v->get<T>();
                if (!std::isfinite(static_cast<double>(out))) throw std::runtime_error("must be finite");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v->is_number_integer()) throw std::runtime_error("expected an integer");
                if constexpr (std::is_unsigned_v<T>) {
                    if (v->get<long long>() < 0) throw std::runtime_error("must be nonnegative");
                }
                out = v->get<T>();
            } else {
                out = v->get<T>();
            }
        } catch (const std::exception& e) {
            errors_.push_back(where(key) + ": " + e.what());
        }
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out, bool required = false)
    {
        if (!has(key)) {
            raw(key);
            if (required && obj_) errors_.push_back(where(key) + ": required");
            return;
        }
        T v{};
        get(key, v);
        out = v;
    }

    void finish()
    {
        if (!obj_) return;
        for (const auto& [k, v] : obj_->items()) {
            if (!used_.count(k)) errors_.push_back(where(k) + ": unknown key");
        }
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    void error(const std::string& key, const std::string& msg) { errors_.push_back(where(key) + ": " + msg); }

private:
    const json* obj_ = nullptr;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

inline void read_vector(Section& s, const std::string& key, std::vector<double>& out, bool required)
{
    const json* v = s.raw(key);
    if (!v) {
        if (required) s.error(key, "required");
        return;
    }
    if (v->is_number()) {
        out = {v->get<double>()};
        return;
    }
    if (!v->is_array() || v->empty()) {
        s.error(key, "expected a number or a nonempty array of numbers");
        return;
    }
    out.clear();
    for (const auto& e : *v) {
        if (!e.is_number()) {
            s.error(key, "expected numbers");
            return;
        }
        out.push_back(e.get<double>());
    }
}

inline void read_domain(const json& j, const std::string& path, DomainSpec& d, std::vector<std::string>& errors)
{
    Section s(j, path, errors);
    s.get("kind", d.kind, true);
    if (d.kind == "interval" || d.kind == "box") {
        read_vector(s, "lo", d.lo, true);
        read_vector(s, "hi", d.hi, true);
    } else if (d.kind == "ball") {
        read_vector(s, "center", d.center, true);
        s.get("radius", d.radius, true);
    } else if (d.kind == "all_space") {
        s.get("dim", d.dim, true);
    } else {
        s.error("kind", "unknown domain kind '" + d.kind + "'");
    }
    s.finish();
}

} // namespace detail

/// Parses and validates a configuration document, collecting every violation before throwing.
inline ExperimentConfig parse_config(const json& root)
{
    std::vector<std::string> errors;
    ExperimentConfig cfg;
    cfg.source = root;
    detail::Section top(root, "", errors);

    const auto section = [&](const char* name, bool required) -> const json* {
        const json* j = top.raw(name);
        if (!j && required) errors.push_back(std::string(name) + ": required section");
        return j;
    };

    if (const json* j = section("instance", true)) {
        detail::Section s(*j, "instance", errors);
        InstanceSpec& in = cfg.instance;
        s.get("kind", in.kind, true);
        if (in.kind == "lower_bound_f0" || in.kind == "lower_bound_f1") {
            s.get("alpha", in.alpha, true);
            s.get("C", in.C);
            s.get("R", in.R);
            s.get("rho", in.rho);
        } else if (in.kind == "nbs") {
            s.get("alpha", in.alpha, true);
            s.get("p", in.p, true);
            s.get("G", in.G);
            s.get("R", in.R);
            s.get("N", in.N, true);
            s.get("j_star", in.j_star, true);
        } else if (in.kind == "foster") {
            s.get("sigma", in.sigma);
            s.get("R", in.R);
            s.get("m", in.m, true);
            s.get("d", in.d, true);
            s.get("basis_seed", in.basis_seed);
            in.alpha = 1.0;
        } else if (in.kind == "power") {
            s.get("alpha", in.alpha, true);
            s.get("lambda", in.lambda);
            detail::read_vector(s, "x_star", in.x_star, true);
            if (const json* d = s.raw("domain")) detail::read_domain(*d, "instance.domain", in.domain, errors);
            else s.error("domain", "required");
        } else if (!in.kind.empty()) {
            s.error("kind", "unknown instance kind '" + in.kind + "'");
        }
        s.finish();
    }

    if (const json* j = section("oracle", true)) {
        detail::Section s(*j, "oracle", errors);
        s.get("kind", cfg.oracle.kind, true);
        const std::string& k = cfg.oracle.kind;
        if (k == "gaussian") {
            s.get("sigma", cfg.oracle.sigma, true);
            if (cfg.oracle.sigma < 0.0) s.error("sigma", "must be nonnegative");
        } else if (k == "nbs_bernoulli") {
            if (cfg.instance.kind != "nbs") s.error("kind", "nbs_bernoulli needs instance.kind = nbs");
        } else if (k == "foster_uniform") {
            if (cfg.instance.kind != "foster") s.error("kind", "foster_uniform needs instance.kind = foster");
        } else if (k != "exact" && !k.empty()) {
            s.error("kind", "unknown oracle kind '" + k + "'");
        }
        s.finish();
    }

    if (const json* j = section("optimizer", true)) {
        detail::Section s(*j, "optimizer", errors);
        OptimizerSpec& o = cfg.optimizer;
        s.get("kind", o.kind, true);
        if (o.kind != "proj_sgd" && o.kind != "prox_sgd" && o.kind != "proj_storm" && !o.kind.empty())
            s.error("kind", "unknown optimizer kind '" + o.kind + "'");
        if (const json* e = s.raw("eta0")) {
            if (e->is_number()) {
                o.eta0 = e->get<double>();
                if (!(*o.eta0 > 0.0)) s.error("eta0", "must be positive");
            } else if (e->is_string() && (e->get<std::string>() == "certificate" || e->get<std::string>() == "inverse_2L")) {
                o.eta0_rule = e->get<std::string>();
            } else {
                s.error("eta0", "expected a positive number, \"certificate\" or \"inverse_2L\"");
            }
        } else {
            s.error("eta0", "required");
        }
        detail::read_vector(s, "x0", o.x0, true);
        s.get("alpha", o.alpha);
        s.get("override_step_check", o.override_step_check);
        if (o.kind == "proj_storm") {
            s.get("a0", o.a0);
            s.get("beta0", o.beta0);
            s.get("beta0_eta0_L", o.beta0_eta0_L);
            s.get("g0_batch", o.g0_batch);
            if (o.beta0 && o.beta0_eta0_L) s.error("beta0", "give either beta0 or beta0_eta0_L, not both");
            if (!(o.a0 > 1.0 && o.a0 < 2.0)) s.error("a0", "must lie in (1, 2)");
            if (o.g0_batch == 0) s.error("g0_batch", "must be positive");
        } else {
            s.get("b0", o.b0);
            if (!(o.b0 > 0.0)) s.error("b0", "must be positive");
        }
        s.finish();
    }

    if (const json* j = section("run", true)) {
        detail::Section s(*j, "run", errors);
        s.get("seeds", cfg.run.seeds, true);
        s.get("T", cfg.run.T, true);
        s.get("parallelism", cfg.run.parallelism);
        if (s.has("seeds") && cfg.run.seeds.empty()) s.error("seeds", "must be nonempty");
        if (s.has("T") && cfg.run.T.empty()) s.error("T", "must be nonempty");
        for (std::size_t i = 1; i < cfg.run.T.size(); ++i) {
            if (cfg.run.T[i] <= cfg.run.T[i - 1]) {
                s.error("T", "must be strictly increasing");
                break;
            }
        }
        if (!cfg.run.T.empty() && cfg.run.T.front() == 0) s.error("T", "budgets must be positive");
        if (cfg.run.parallelism < 1) s.error("parallelism", "must be a positive integer");
        s.finish();
    }

    if (const json* j = section("output", false)) {
        detail::Section s(*j, "output", errors);
        s.get("dir", cfg.output_dir);
        s.finish();
    }

    if (const json* j = section("check", false)) {
        detail::Section s(*j, "check", errors);
        s.get("t_slope_target", cfg.check.t_slope_target);
        s.get("t_slope_tol", cfg.check.t_slope_tol);
        s.get("query_slope_target", cfg.check.query_slope_target);
        s.get("query_slope_tol", cfg.check.query_slope_tol);
        s.finish();
    }

    top.finish();
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({path + ": cannot open"});
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
    return parse_config(root);
}

} // namespace pgdlab::harness
