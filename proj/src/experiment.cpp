#include "iafb/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "iafb/afb_solver.hpp"
#include "iafb/ahpe_solver.hpp"
#include "iafb/problems.hpp"

namespace iafb {

namespace {

std::string config_message(const std::string& source, std::size_t line, const std::string& message) {
    if (line == 0) return source + ": " + message;
    return source + ":" + std::to_string(line) + ": " + message;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string shortest(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& text) {
    double out = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("expected a number, got '" + text + "'");
    if (!std::isfinite(out)) throw std::invalid_argument("value must be finite");
    return out;
}

std::uint64_t to_u64(const std::string& text) {
    std::uint64_t out = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, out);
    if (text.empty() || res.ec != std::errc() || res.ptr != end) {
        throw std::invalid_argument("expected a nonnegative integer, got '" + text + "'");
    }
    return out;
}

std::size_t to_size(const std::string& text) { return static_cast<std::size_t>(to_u64(text)); }

bool to_bool(const std::string& text) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + text + "'");
}

bool is_none(const std::string& text) { return text == "none" || text == "auto"; }

std::string rule_text(const SequenceRule& r) { return r.describe(); }

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
    const char* name;
    Setter set;
    Getter get;
};

template <typename T>
std::string opt_text(const std::optional<T>& v) {
    if (!v) return "none";
    if constexpr (std::is_floating_point_v<T>) {
        return shortest(*v);
    } else {
        return std::to_string(*v);
    }
}

#define IAFB_SIZE_KEY(field)                                                                     \
    KeySpec {                                                                                    \
        #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_size(v); },         \
            [](const ExperimentConfig& c) { return std::to_string(c.field); }                    \
    }
#define IAFB_DOUBLE_KEY(field)                                                                   \
    KeySpec {                                                                                    \
        #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); },       \
            [](const ExperimentConfig& c) { return shortest(c.field); }                          \
    }
#define IAFB_BOOL_KEY(field)                                                                     \
    KeySpec {                                                                                    \
        #field, [](ExperimentConfig& c, const std::string& v) { c.field = to_bool(v); },         \
            [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); }    \
    }
#define IAFB_STRING_KEY(field)                                                                   \
    KeySpec {                                                                                    \
        #field, [](ExperimentConfig& c, const std::string& v) { c.field = v; },                  \
            [](const ExperimentConfig& c) { return c.field; }                                    \
    }
#define IAFB_RULE_KEY(field)                                                                     \
    KeySpec {                                                                                    \
        #field, [](ExperimentConfig& c, const std::string& v) { c.field = parse_rule(v); },      \
            [](const ExperimentConfig& c) { return rule_text(c.field); }                         \
    }

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table = {
        IAFB_STRING_KEY(problem),
        IAFB_STRING_KEY(solver),
        KeySpec{"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64(v); },
                [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
        IAFB_SIZE_KEY(lasso_rows),
        IAFB_SIZE_KEY(lasso_dim),
        IAFB_SIZE_KEY(lasso_nonzeros),
        IAFB_DOUBLE_KEY(lasso_l1),
        IAFB_DOUBLE_KEY(lasso_mu_reg),
        IAFB_SIZE_KEY(cur_m),
        IAFB_SIZE_KEY(cur_p),
        IAFB_DOUBLE_KEY(cur_lambda_row),
        IAFB_DOUBLE_KEY(cur_mu_scale),
        IAFB_BOOL_KEY(cur_normalize),
        IAFB_STRING_KEY(cur_input),
        IAFB_SIZE_KEY(tv_size),
        IAFB_SIZE_KEY(tv_kernel),
        IAFB_DOUBLE_KEY(tv_noise_rel),
        IAFB_DOUBLE_KEY(tv_lambda_reg),
        IAFB_DOUBLE_KEY(tv_mu_scale),
        IAFB_STRING_KEY(tv_input),
        KeySpec{"lambda0",
                [](ExperimentConfig& c, const std::string& v) {
                    if (is_none(v)) {
                        c.lambda0.reset();
                    } else {
                        c.lambda0 = to_double(v);
                    }
                },
                [](const ExperimentConfig& c) { return c.lambda0 ? shortest(*c.lambda0) : std::string("auto"); }},
        IAFB_DOUBLE_KEY(alpha),
        IAFB_DOUBLE_KEY(beta),
        KeySpec{"mu",
                [](ExperimentConfig& c, const std::string& v) {
                    if (v != "reg") to_double(v);
                    c.mu = v;
                },
                [](const ExperimentConfig& c) { return c.mu; }},
        IAFB_RULE_KEY(sigma),
        IAFB_RULE_KEY(zeta),
        IAFB_RULE_KEY(xi),
        IAFB_RULE_KEY(steps),
        IAFB_SIZE_KEY(max_outer),
        KeySpec{"max_total_inner",
                [](ExperimentConfig& c, const std::string& v) {
                    if (is_none(v)) {
                        c.max_total_inner.reset();
                    } else {
                        c.max_total_inner = to_size(v);
                    }
                },
                [](const ExperimentConfig& c) { return opt_text(c.max_total_inner); }},
        IAFB_SIZE_KEY(max_inner_per_prox),
        KeySpec{"target_gap",
                [](ExperimentConfig& c, const std::string& v) {
                    if (is_none(v)) {
                        c.target_gap.reset();
                    } else {
                        c.target_gap = to_double(v);
                    }
                },
                [](const ExperimentConfig& c) { return opt_text(c.target_gap); }},
        IAFB_BOOL_KEY(warm_start),
        KeySpec{"fstar",
                [](ExperimentConfig& c, const std::string& v) {
                    if (is_none(v)) {
                        c.fstar.reset();
                    } else {
                        c.fstar = to_double(v);
                    }
                },
                [](const ExperimentConfig& c) { return opt_text(c.fstar); }},
        IAFB_BOOL_KEY(calibrate_fstar),
        IAFB_DOUBLE_KEY(calibrate_factor),
    };
    return table;
}

#undef IAFB_SIZE_KEY
#undef IAFB_DOUBLE_KEY
#undef IAFB_BOOL_KEY
#undef IAFB_STRING_KEY
#undef IAFB_RULE_KEY

const KeySpec* find_key(const std::string& key) {
    for (const auto& spec : key_table()) {
        if (key == spec.name) return &spec;
    }
    return nullptr;
}

std::size_t line_of(const ExperimentConfig& c, const std::string& key) {
    const auto it = c.key_lines.find(key);
    return it == c.key_lines.end() ? 0 : it->second;
}

[[noreturn]] void fail(const ExperimentConfig& c, const std::string& key, const std::string& message) {
    throw ConfigError(c.source, line_of(c, key), key + ": " + message);
}

bool needs_smooth_part(const std::string& problem) {
    return problem == "lasso" || problem == "cur" || problem == "tv";
}

/// Problem instance plus the parameters that identify it.
struct Instance {
    Problem problem;
    double L = 0.0;
    std::string signature;
};

Matrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return read_csv(in);
    } catch (const std::exception& e) {
        throw IoError("cannot read matrix from '" + path + "': " + e.what());
    }
}

Instance build_instance(const ExperimentConfig& c) {
    Instance out;
    std::ostringstream sig;
    sig << c.problem;
    if (c.problem == "lasso") {
        LassoProblem lp = make_planted_lasso(c.lasso_rows, c.lasso_dim, c.lasso_nonzeros, c.lasso_l1,
                                             c.lasso_mu_reg, c.seed);
        out.problem = std::move(lp.problem);
        out.L = lp.L;
        sig << " rows=" << c.lasso_rows << " dim=" << c.lasso_dim << " nnz=" << c.lasso_nonzeros
            << " l1=" << shortest(c.lasso_l1) << " mu_reg=" << shortest(c.lasso_mu_reg) << " seed=" << c.seed;
    } else if (c.problem == "quadratic_l1") {
        Vector b = random_normal_vector(c.lasso_dim, c.seed);
        out.problem = make_quadratic_l1_problem(std::move(b), c.lasso_l1, c.lasso_mu_reg, Vector(c.lasso_dim));
        sig << " dim=" << c.lasso_dim << " l1=" << shortest(c.lasso_l1) << " mu_reg=" << shortest(c.lasso_mu_reg)
            << " seed=" << c.seed;
    } else if (c.problem == "cur") {
        Matrix W = c.cur_input.empty() ? synthetic_cur_matrix(c.cur_m, c.cur_p, c.seed) : load_matrix(c.cur_input);
        CurProblem cp = make_cur_instance(std::move(W), c.cur_lambda_row, c.cur_mu_scale, c.cur_normalize);
        out.problem = std::move(cp.problem);
        out.L = cp.L;
        sig << " W=" << (c.cur_input.empty() ? "synthetic " + std::to_string(c.cur_m) + "x" + std::to_string(c.cur_p)
                                              : c.cur_input)
            << " lambda_row=" << shortest(c.cur_lambda_row) << " mu_scale=" << shortest(c.cur_mu_scale)
            << " normalize=" << c.cur_normalize << " seed=" << c.seed;
    } else {
        Matrix clean = c.tv_input.empty() ? synthetic_piecewise_image(c.tv_size) : load_matrix(c.tv_input);
        TvProblem tp = make_tv_instance(clean, c.tv_kernel, c.tv_noise_rel, c.seed, c.tv_lambda_reg, c.tv_mu_scale);
        if (c.problem == "tv") {
            out.problem = std::move(tp.problem);
            out.L = tp.L;
        } else {
            out.problem = make_tv_denoise_problem(tp.observed, c.tv_lambda_reg, tp.mu_reg);
        }
        sig << " image=" << (c.tv_input.empty() ? "synthetic " + std::to_string(c.tv_size) : c.tv_input)
            << " kernel=" << c.tv_kernel << " noise_rel=" << shortest(c.tv_noise_rel)
            << " lambda_reg=" << shortest(c.tv_lambda_reg) << " mu_scale=" << shortest(c.tv_mu_scale)
            << " seed=" << c.seed;
    }
    out.signature = sig.str();
    return out;
}

double resolve_mu(const ExperimentConfig& c, const Problem& p) {
    const double mu_g = p.g->strong_convexity();
    if (c.mu == "reg") return mu_g;
    const double mu = to_double(c.mu);
    if (mu > mu_g) {
        fail(c, "mu", "exceeds the strong convexity of g (" + shortest(mu_g) + ")");
    }
    return mu;
}

struct Runner {
    const ExperimentConfig& config;
    AfbConfig afb;
    AhpeConfig ahpe;

    SolveResult operator()(const Problem& problem, const StopRule& stop) const {
        if (config.solver == "afb") return afb_solve(problem, afb, stop);
        return ahpe_solve(problem, ahpe, stop);
    }
};

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(config_message(source, line, message)), line_(line) {}

SequenceRule parse_rule(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    if (tokens.empty()) throw std::invalid_argument("empty rule");
    const std::string& head = tokens.front();
    std::vector<double> args;
    const bool numeric_head = head != "zero" && head != "constant" && head != "geometric" &&
                              head != "polynomial" && head != "list";
    for (std::size_t i = numeric_head ? 0 : 1; i < tokens.size(); ++i) args.push_back(to_double(tokens[i]));
    auto want = [&](std::size_t n) {
        if (args.size() != n) {
            throw std::invalid_argument("rule '" + head + "' takes " + std::to_string(n) + " argument(s)");
        }
    };
    if (numeric_head) {
        want(1);
        return SequenceRule::constant(args[0]);
    }
    if (head == "zero") {
        want(0);
        return SequenceRule::zero();
    }
    if (head == "constant") {
        want(1);
        return SequenceRule::constant(args[0]);
    }
    if (head == "geometric") {
        want(2);
        return SequenceRule::geometric(args[0], args[1]);
    }
    if (head == "polynomial") {
        want(2);
        return SequenceRule::polynomial(args[0], args[1]);
    }
    if (args.empty()) throw std::invalid_argument("rule 'list' needs at least one value");
    return SequenceRule::list(std::move(args));
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(config.source, 0, "unknown key '" + key + "'");
    try {
        spec->set(config, value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(config.source, 0, key + ": " + e.what());
    }
    config.key_lines[key] = 0;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig config;
    config.source = source;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line_no, "missing key");
        const KeySpec* spec = find_key(key);
        if (!spec) throw ConfigError(source, line_no, "unknown key '" + key + "'");
        if (auto it = config.key_lines.find(key); it != config.key_lines.end()) {
            throw ConfigError(source, line_no,
                              "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
        }
        if (value.empty()) throw ConfigError(source, line_no, key + ": missing value");
        try {
            spec->set(config, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(source, line_no, key + ": " + e.what());
        }
        config.key_lines[key] = line_no;
    }
    if (in.bad()) throw IoError("read failure on " + source);
    return config;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_config(in, source);
}

void validate_config(const ExperimentConfig& c) {
    static const std::vector<std::string> problems = {"lasso", "cur", "tv", "tv_denoise", "quadratic_l1"};
    if (std::find(problems.begin(), problems.end(), c.problem) == problems.end()) {
        fail(c, "problem", "expected one of lasso, cur, tv, tv_denoise, quadratic_l1");
    }
    if (c.solver != "afb" && c.solver != "ahpe") fail(c, "solver", "expected afb or ahpe");
    if (c.solver == "ahpe" && needs_smooth_part(c.problem)) {
        fail(c, "solver", "ahpe needs a problem without a smooth part (tv_denoise or quadratic_l1)");
    }

    if (c.problem == "lasso" || c.problem == "quadratic_l1") {
        if (c.lasso_dim == 0) fail(c, "lasso_dim", "must be positive");
        if (c.problem == "lasso") {
            if (c.lasso_rows < c.lasso_dim) fail(c, "lasso_rows", "must be at least lasso_dim");
            if (c.lasso_nonzeros > c.lasso_dim) fail(c, "lasso_nonzeros", "must not exceed lasso_dim");
        }
        if (c.lasso_l1 < 0.0) fail(c, "lasso_l1", "must be nonnegative");
        if (c.lasso_mu_reg < 0.0) fail(c, "lasso_mu_reg", "must be nonnegative");
    }
    if (c.problem == "cur") {
        if (c.cur_input.empty() && (c.cur_m == 0)) fail(c, "cur_m", "must be positive");
        if (c.cur_input.empty() && (c.cur_p == 0)) fail(c, "cur_p", "must be positive");
        if (c.cur_lambda_row < 0.0) fail(c, "cur_lambda_row", "must be nonnegative");
        if (c.cur_mu_scale < 0.0) fail(c, "cur_mu_scale", "must be nonnegative");
    }
    if (c.problem == "tv" || c.problem == "tv_denoise") {
        if (c.tv_input.empty() && c.tv_size < 2) fail(c, "tv_size", "must be at least 2");
        if (c.tv_kernel == 0 || c.tv_kernel % 2 == 0) fail(c, "tv_kernel", "must be odd");
        if (c.tv_noise_rel < 0.0) fail(c, "tv_noise_rel", "must be nonnegative");
        if (c.tv_lambda_reg < 0.0) fail(c, "tv_lambda_reg", "must be nonnegative");
        if (c.tv_mu_scale < 0.0) fail(c, "tv_mu_scale", "must be nonnegative");
    }

    if (c.lambda0 && !(*c.lambda0 > 0.0)) fail(c, "lambda0", "must be positive");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail(c, "alpha", "must lie in (0, 1)");
    if (!(c.beta >= 1.0)) fail(c, "beta", "must be at least 1");
    if (c.mu != "reg" && !(to_double(c.mu) >= 0.0)) fail(c, "mu", "must be nonnegative or 'reg'");

    const bool ahpe = c.solver == "ahpe";
    auto check_rule = [&](const SequenceRule& r, const char* key, double hi, bool open) {
        try {
            r.require_range(0.0, hi, open, key);
        } catch (const std::invalid_argument& e) {
            fail(c, key, e.what());
        }
    };
    check_rule(c.sigma, "sigma", 1.0, !ahpe);
    check_rule(c.zeta, "zeta", 1.0, true);
    check_rule(c.xi, "xi", std::numeric_limits<double>::infinity(), true);
    if (ahpe) {
        if (c.zeta.kind() != SequenceRule::Kind::Zero) fail(c, "zeta", "not used by ahpe; leave it at zero");
        if (c.xi.kind() != SequenceRule::Kind::Zero) fail(c, "xi", "not used by ahpe; leave it at zero");
        AhpeConfig probe;
        probe.steps = c.steps;
        probe.sigma = c.sigma;
        probe.mu = c.mu == "reg" ? 1.0 : to_double(c.mu);
        try {
            probe.validate();
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            fail(c, what.find("step") != std::string::npos ? "steps" : "sigma", what);
        }
    }

    if (c.max_inner_per_prox == 0) fail(c, "max_inner_per_prox", "must be positive");
    if (c.target_gap && !(*c.target_gap >= 0.0)) fail(c, "target_gap", "must be nonnegative");
    if (!(c.calibrate_factor >= 1.0)) fail(c, "calibrate_factor", "must be at least 1");
    const bool exact_fstar = c.problem == "lasso" || c.problem == "quadratic_l1";
    if (c.target_gap && !exact_fstar && !c.fstar && !c.calibrate_fstar) {
        fail(c, "target_gap", "needs fstar or calibrate_fstar for this problem");
    }
}

std::optional<std::string> RunLog::header_value(const std::string& key) const {
    for (const auto& [k, v] : header) {
        if (k == key) return v;
    }
    return std::nullopt;
}

RunLog run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    Instance inst = build_instance(config);
    Problem& problem = inst.problem;
    const double mu = resolve_mu(config, problem);

    Runner runner{config, {}, {}};
    if (config.solver == "afb") {
        const double sigma0 = config.sigma(0);
        double lambda0 = 1.0;
        if (config.lambda0) {
            lambda0 = *config.lambda0;
        } else if (inst.L > 0.0) {
            lambda0 = (1.0 - sigma0 * sigma0) / inst.L;
        }
        runner.afb.lambda0 = lambda0;
        runner.afb.alpha = config.alpha;
        runner.afb.beta = config.beta;
        runner.afb.mu = mu;
        runner.afb.schedule = ToleranceSchedule{config.sigma, config.zeta, config.xi};
        runner.afb.max_inner_per_prox = config.max_inner_per_prox;
        runner.afb.warm_start = config.warm_start;
        try {
            runner.afb.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(config.source, 0, e.what());
        }
    } else {
        runner.ahpe.steps = config.steps;
        runner.ahpe.sigma = config.sigma;
        runner.ahpe.mu = mu;
        runner.ahpe.max_inner_per_prox = config.max_inner_per_prox;
        runner.ahpe.warm_start = config.warm_start;
        try {
            runner.ahpe.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(config.source, line_of(config, "sigma"), e.what());
        }
    }

    std::optional<double> fstar;
    std::string fstar_source = "none";
    if (config.fstar) {
        fstar = config.fstar;
        fstar_source = "config";
        problem.minimizer.reset();
    } else if (problem.optimal_value) {
        fstar = problem.optimal_value;
        fstar_source = "exact";
    } else if (config.calibrate_fstar) {
        const double factor = config.calibrate_factor;
        StopRule long_stop;
        long_stop.max_outer = static_cast<std::size_t>(std::ceil(factor * static_cast<double>(config.max_outer)));
        if (config.max_total_inner) {
            long_stop.max_total_inner =
                static_cast<std::size_t>(std::ceil(factor * static_cast<double>(*config.max_total_inner)));
        }
        Problem bare = problem;
        bare.optimal_value.reset();
        bare.minimizer.reset();
        const SolveResult long_run = runner(bare, long_stop);
        double best = bare.objective(bare.x0);
        for (const auto& rec : long_run.records) best = std::min(best, rec.objective);
        fstar = best;
        fstar_source = "calibrated";
    }
    problem.optimal_value = fstar;
    if (!fstar) problem.minimizer.reset();

    StopRule stop;
    stop.max_outer = config.max_outer;
    stop.max_total_inner = config.max_total_inner;
    stop.target_gap = config.target_gap;
    const SolveResult result = runner(problem, stop);

    RunLog log;
    for (const auto& spec : key_table()) log.header.emplace_back(spec.name, spec.get(config));
    log.header.emplace_back("resolved.problem_signature", inst.signature);
    log.header.emplace_back("resolved.dimension", std::to_string(problem.x0.size()));
    log.header.emplace_back("resolved.L", shortest(inst.L));
    log.header.emplace_back("resolved.mu", shortest(mu));
    if (config.solver == "afb") log.header.emplace_back("resolved.lambda0", shortest(runner.afb.lambda0));
    log.header.emplace_back("resolved.fstar", fstar ? shortest(*fstar) : std::string("none"));
    log.header.emplace_back("resolved.fstar_source", fstar_source);
    log.header.emplace_back("resolved.weight_overflow", result.weight_overflow ? "true" : "false");

    log.rows.reserve(result.records.size());
    for (const auto& rec : result.records) {
        LogRow row;
        row.k = rec.k;
        row.cumulative_inner = rec.cumulative_inner;
        row.objective_gap = rec.objective_gap;
        row.lambda = rec.lambda;
        row.A = rec.A;
        row.lyapunov = rec.lyapunov;
        log.rows.push_back(row);
    }
    return log;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string format_opt(const std::optional<double>& x) { return x ? format_double(*x) : "nan"; }

std::optional<double> parse_opt(const std::string& text) {
    if (text == "nan") return std::nullopt;
    return std::stod(text);
}

}  // namespace

void write_log(std::ostream& out, const RunLog& log) {
    for (const auto& [k, v] : log.header) {
        out << "# " << k << " =";
        if (!v.empty()) out << ' ' << v;
        out << '\n';
    }
    out << kLogColumns << '\n';
    for (const auto& r : log.rows) {
        out << r.k << ',' << r.cumulative_inner << ',' << format_opt(r.objective_gap) << ','
            << format_double(r.lambda) << ',' << format_double(r.A) << ',' << format_opt(r.lyapunov) << '\n';
    }
    if (!out) throw IoError("write failure");
}

RunLog read_log(std::istream& in) {
    RunLog log;
    std::string line;
    bool have_columns = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw IoError("line " + std::to_string(line_no) + ": malformed header");
            log.header.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
            continue;
        }
        if (!have_columns) {
            if (line != kLogColumns) throw IoError("line " + std::to_string(line_no) + ": unexpected column header");
            have_columns = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 6) throw IoError("line " + std::to_string(line_no) + ": expected 6 fields");
        try {
            LogRow r;
            r.k = to_size(fields[0]);
            r.cumulative_inner = to_size(fields[1]);
            r.objective_gap = parse_opt(fields[2]);
            r.lambda = std::stod(fields[3]);
            r.A = std::stod(fields[4]);
            r.lyapunov = parse_opt(fields[5]);
            log.rows.push_back(r);
        } catch (const std::exception& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_columns) throw IoError("missing column header");
    return log;
}

std::vector<RunSummary> compare_runs(const std::vector<std::pair<std::string, RunLog>>& runs) {
    std::optional<std::string> signature;
    for (const auto& [name, log] : runs) {
        const auto sig = log.header_value("resolved.problem_signature");
        if (!sig) throw std::invalid_argument(name + ": log has no problem signature");
        if (signature && *sig != *signature) {
            throw std::invalid_argument(name + ": problem differs (" + *sig + " vs " + *signature + ")");
        }
        signature = sig;
    }
    std::vector<RunSummary> out;
    for (const auto& [name, log] : runs) {
        RunSummary s;
        s.name = name;
        s.decades.assign(kSummaryDecades, std::nullopt);
        if (!log.rows.empty()) {
            const LogRow& last = log.rows.back();
            s.final_gap = last.objective_gap;
            s.total_inner = last.cumulative_inner;
            s.outer_iterations = last.k;
        }
        for (const auto& r : log.rows) {
            if (!r.objective_gap) continue;
            for (int d = 0; d < kSummaryDecades; ++d) {
                if (!s.decades[d] && *r.objective_gap <= std::pow(10.0, -d)) {
                    s.decades[d] = std::make_pair(r.k, r.cumulative_inner);
                }
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_summary(std::ostream& out, const std::vector<RunSummary>& summaries) {
    out << "run,outer_iterations,total_inner,final_gap";
    for (int d = 0; d < kSummaryDecades; ++d) out << ",k@1e-" << d << ",inner@1e-" << d;
    out << '\n';
    for (const auto& s : summaries) {
        out << s.name << ',' << s.outer_iterations << ',' << s.total_inner << ',' << format_opt(s.final_gap);
        for (const auto& d : s.decades) {
            if (d) {
                out << ',' << d->first << ',' << d->second;
            } else {
                out << ",-,-";
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure");
}

}  // namespace iafb
