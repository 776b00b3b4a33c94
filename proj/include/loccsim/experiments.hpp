#ifndef LOCCSIM_EXPERIMENTS_HPP
#define LOCCSIM_EXPERIMENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "loccsim/errors.hpp"
#include "loccsim/kraus.hpp"
#include "loccsim/lindblad.hpp"

namespace loccsim {

// A malformed or incomplete experiment configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

struct ExperimentConfig {
    std::string experiment; // revival | trajectories | kraus-audit | rates | blackhole
    nlohmann::json parameters;
    std::string output_path;
    std::string output_format; // csv | json

    nlohmann::json resolved() const;
};

// Parse and validate a config document. Parse failures carry the line
// number; semantic failures name the offending key.
ExperimentConfig parse_config(const std::string& text);

// Apply a "dotted.path=value" override (values parsed as JSON when
// possible, else taken as strings).
void apply_override(nlohmann::json& doc, const std::string& assignment);

ExperimentConfig config_from_json(const nlohmann::json& doc);

// Run the configured experiment and write its output file(s).
// Deterministic given the config (including seed).
void run_experiment(const ExperimentConfig& config, std::ostream& log);

// Least-squares slope of log(y) against log(x).
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// LoccParams out of a parameter block: either explicit alpha/beta or
// symmetric_rate (in units of omega).
LoccParams locc_params_from_json(const nlohmann::json& params);

nlohmann::json kraus_set_json(const KrausSet& set);

nlohmann::json scenario_table_json();

// Full-precision CSV writer; rows of equal width, config and format
// version embedded as comment lines.
void write_csv(const std::string& path, const nlohmann::json& config,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::string& path, const nlohmann::json& config,
                const nlohmann::json& results);

std::string format_full_precision(double v);

} // namespace loccsim

#endif
