#pragma once
// CLI subcommands. Each writes its outputs into config.output_dir (created if
// needed) and returns what it computed. ConfigError signals a configuration
// problem; any other exception is a runtime failure, raised after whatever
// outputs were complete at that point have been written.

#include "genboot/bootstrap/statistics.hpp"
#include "genboot/harness/experiments.hpp"

#include <span>
#include <string>
#include <vector>

namespace genboot::harness {

/// The observed path of the single-run commands: input.path if set,
/// otherwise a simulation at dgp.phi[0] with the streams of replication 0.
SamplePath observed_path(const ExperimentConfig& config);

/// path.csv, path.svg
SamplePath simulate_command(const ExperimentConfig& config);

/// checkpoint.bin, trace.csv, trace.svg
gan::TrainResult train_command(const ExperimentConfig& config);

/// samples.csv, samples_acf.csv, samples_acf.svg from input.checkpoint.
std::vector<SamplePath> sample_command(const ExperimentConfig& config);

struct GbOutcome {
    gan::TrainResult training;
    bootstrap::BootstrapResult bootstrap;  // LS estimates of the generated paths
    timeseries::CorrelogramStats acf;      // across generated paths
    timeseries::CorrelogramStats pacf;
};

/// Train, sample and bootstrap the LS estimator: checkpoint.bin, trace.csv,
/// trace.svg, estimates.csv, summary.csv, acf.csv, pacf.csv, acf.svg,
/// pacf.svg, estimates.svg.
GbOutcome gb_command(const ExperimentConfig& config);

/// estimates_b<b>.csv, summary_b<b>.csv, estimates_b<b>.svg for every CBB block length.
std::vector<bootstrap::BootstrapResult> cbb_command(const ExperimentConfig& config);

/// Per phi: acf_/pacf_ CSVs for the theory and every method cell, acf_phi<phi>.svg,
/// pacf_phi<phi>.svg; plus acf_report.csv and failures.csv.
AcfReport acf_experiment_command(const ExperimentConfig& config);

/// coverage.csv, coverage_level<level>.svg, failures.csv.
CoverageReport coverage_experiment_command(const ExperimentConfig& config);

/// Checkpoint metadata: the resolved config, block length, completed steps
/// and the training RNG state after the run, as JSON.
std::string checkpoint_metadata(const ExperimentConfig& config, std::size_t steps, const Rng& rng);

/// Full command line handling: `genboot <subcommand> [config.json] [options]`.
/// Returns the process exit code (0 ok, 1 config error, 2 runtime failure).
int run_cli(std::span<const std::string> args);

}  // namespace genboot::harness
