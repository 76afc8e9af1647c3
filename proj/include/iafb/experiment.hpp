#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iafb/schedules.hpp"

namespace iafb {

/// Invalid configuration. `line` is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Read or write failure on a log or data file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string problem = "lasso";  ///< lasso | cur | tv | tv_denoise | quadratic_l1
    std::string solver = "afb";     ///< afb | ahpe
    std::uint64_t seed = 1;

    std::size_t lasso_rows = 80;
    std::size_t lasso_dim = 40;
    std::size_t lasso_nonzeros = 8;
    double lasso_l1 = 0.1;
    double lasso_mu_reg = 0.0;

    std::size_t cur_m = 30;
    std::size_t cur_p = 20;
    double cur_lambda_row = 2e-3;
    double cur_mu_scale = 2e-3;
    bool cur_normalize = true;
    std::string cur_input;  ///< CSV file with W; synthetic when empty

    std::size_t tv_size = 32;
    std::size_t tv_kernel = 5;
    double tv_noise_rel = 0.01;
    double tv_lambda_reg = 1.0;
    double tv_mu_scale = 1e-2;
    std::string tv_input;  ///< CSV file with the clean image; synthetic when empty

    std::optional<double> lambda0;  ///< default (1 - sigma_0^2) / L
    double alpha = 0.5;
    double beta = 1.0;
    /// "reg" selects the strong convexity of g; otherwise a number.
    std::string mu = "0";
    SequenceRule sigma = SequenceRule::zero();
    SequenceRule zeta = SequenceRule::zero();
    SequenceRule xi = SequenceRule::zero();
    SequenceRule steps = SequenceRule::constant(1.0);  ///< extragradient step sizes

    std::size_t max_outer = 100;
    std::optional<std::size_t> max_total_inner;
    std::size_t max_inner_per_prox = 10000;
    std::optional<double> target_gap;
    bool warm_start = true;

    std::optional<double> fstar;
    bool calibrate_fstar = false;
    double calibrate_factor = 10.0;

    std::string source = "<config>";
    /// Line on which each key was set.
    std::map<std::string, std::size_t> key_lines;
};

/// Parses flat `key = value` text; '#' starts a comment. Throws ConfigError
/// naming the offending line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

/// Sets one key as if it appeared in the file (line 0).
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Cross-field checks against the solver preconditions.
void validate_config(const ExperimentConfig& config);

/// Parses "zero", "constant c", "geometric C rho", "polynomial C q",
/// "list a b ...", or a bare number (constant).
SequenceRule parse_rule(const std::string& text);

struct LogRow {
    std::size_t k = 0;
    std::size_t cumulative_inner = 0;
    std::optional<double> objective_gap;
    double lambda = 0.0;
    double A = 0.0;
    std::optional<double> lyapunov;
};

struct RunLog {
    /// Ordered (key, value) pairs written as the '#' header block.
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<LogRow> rows;

    std::optional<std::string> header_value(const std::string& key) const;
};

inline constexpr const char* kLogColumns = "k,cumulative_inner,objective_gap,lambda,A,lyapunov";

RunLog run_experiment(const ExperimentConfig& config);

void write_log(std::ostream& out, const RunLog& log);
RunLog read_log(std::istream& in);

struct RunSummary {
    std::string name;
    std::optional<double> final_gap;
    std::size_t total_inner = 0;
    std::size_t outer_iterations = 0;
    /// For decade d (gap <= 10^-d, d = 0..12): first (k, cumulative_inner).
    std::vector<std::optional<std::pair<std::size_t, std::size_t>>> decades;
};

inline constexpr int kSummaryDecades = 13;

/// Throws std::invalid_argument when the logs come from different problems.
std::vector<RunSummary> compare_runs(const std::vector<std::pair<std::string, RunLog>>& runs);
void write_summary(std::ostream& out, const std::vector<RunSummary>& summaries);

/// printf("%.17g") formatting, "nan" for empty values.
std::string format_double(double x);

}  // namespace iafb
