#pragma once
// Experiment configuration: a JSON document whose schema is the default
// configuration itself. Every key is optional, unknown keys are rejected, and
// the document must carry the current schema_version. See README.md for the
// key reference.

#include "genboot/gan/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genboot::harness {

inline constexpr int kSchemaVersion = 1;

/// Invalid, unreadable or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { Gb, Cbb, Oracle };

std::string method_name(Method method);

/// Which AR(1) coefficient oracle sampling uses: the least-squares estimate
/// from the observed path (a parametric bootstrap) or the true value.
enum class OraclePhi { Estimated, True };

/// Statistic bootstrapped by the coverage experiment and the value its
/// intervals should cover: phi for the LS estimator, 0 for the sample mean
/// of the zero-mean process.
enum class CoverageStatistic { Ls, Mean };

struct GbSettings {
    std::size_t block_length = 150;   // b1
    std::size_t sample_length = 0;    // b2; 0 means the path length (complete sampling)
    std::size_t samples = 10000;      // m
    std::size_t replications = 1000;  // R for gb and oracle
};

struct CbbSettings {
    std::vector<std::size_t> block_lengths{50, 100, 150};
    std::size_t replications = 5000;
    std::size_t resamples = 10000;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t workers = 0;  // 0: OpenMP default
    std::string output_dir = "out";

    std::vector<double> phis{0.5, 0.8, 0.9};
    double sigma = 1.0;
    std::size_t length = 1000;  // T

    gan::GanConfig gan;
    GbSettings gb;
    CbbSettings cbb;

    std::vector<Method> methods{Method::Gb, Method::Cbb};
    OraclePhi oracle_phi = OraclePhi::Estimated;
    CoverageStatistic statistic = CoverageStatistic::Ls;
    std::vector<double> levels{0.99, 0.95, 0.90, 0.80};
    std::size_t max_lag = 20;
    std::size_t theory_replications = 1000;

    std::string input_path;  // observed path CSV; empty: simulate from phis[0]
    std::string checkpoint;  // generator checkpoint for `sample`

    std::size_t sample_length() const noexcept { return gb.sample_length == 0 ? length : gb.sample_length; }
    bool uses(Method m) const;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);

/// Defaults overlaid with `doc`, validated.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file. An empty path gives the defaults.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Applies "dotted.key=value" to `doc`. The value is parsed as JSON when it
/// is valid JSON and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Text embedded at the top of every output: the command, the master seed
/// and the resolved configuration. workers and output_dir are left out
/// because they do not affect any result.
std::string provenance(const ExperimentConfig& config, std::string_view command);

}  // namespace genboot::harness
