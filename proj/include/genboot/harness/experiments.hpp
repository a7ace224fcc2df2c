#pragma once
// Monte Carlo experiments: correlogram fidelity and CI coverage of the
// generative bootstrap, the circular block bootstrap and the true-DGP oracle.
//
// Stream layout under the master seed, for phi index k and replication r:
//   {k, r, Data}            observed path
//   {k, r, Training}        network init and training
//   {k, r, Sampling, i}     generator noise for bootstrap path i
//   {k, r, Oracle, i}       oracle bootstrap path i
//   {k, r, Resampling, b, i} CBB resample i with block length b
//   {k, r, Reference, i}    true-DGP path i of theoretical-band set r
// Replications run in parallel; every result is a function of its streams
// only, so outputs do not depend on the thread count.

#include "genboot/bootstrap/statistics.hpp"
#include "genboot/gan/train.hpp"
#include "genboot/harness/config.hpp"
#include "genboot/timeseries/ar1.hpp"
#include "genboot/timeseries/correlogram.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace genboot::harness {

using timeseries::SamplePath;

struct ReplicationStreams {
    std::uint64_t master = 0;
    std::size_t phi_index = 0;
    std::size_t replication = 0;

    Rng data() const;
    Rng training() const;
    StreamFamily sampling() const;
    StreamFamily oracle() const;
    StreamFamily resampling(std::size_t block_length) const;
    StreamFamily reference() const;
};

SamplePath simulate_observed(const ExperimentConfig& config, double phi, const ReplicationStreams& streams);

/// Trains on the overlapping b1-blocks of `observed`.
gan::TrainResult train_on_path(const ExperimentConfig& config, const SamplePath& observed, Rng& rng,
                               const gan::TrainOptions& options = {});

/// gb.samples paths of length b2 from the AR(1) law with the configured
/// coefficient (see OraclePhi).
std::vector<SamplePath> oracle_sample(const ExperimentConfig& config, const SamplePath& observed, double true_phi,
                                      const StreamFamily& streams);

/// gb.samples generated paths of length b2.
std::vector<SamplePath> generate_paths(const ExperimentConfig& config, const nn::NetworkParams& generator,
                                       const StreamFamily& streams);

/// Bootstrap paths of one replication. block_length is used by CBB only.
std::vector<SamplePath> bootstrap_paths(const ExperimentConfig& config, Method method, std::size_t block_length,
                                        const SamplePath& observed, double true_phi, const ReplicationStreams& streams);

struct Failure {
    Method method = Method::Gb;
    double phi = 0.0;
    std::size_t block_length = 0;
    std::size_t replication = 0;
    std::string message;
};

/// Block length column value: b1 for gb, the CBB block length, empty for oracle.
std::string block_label(Method method, std::size_t block_length);

// ---- coverage ---------------------------------------------------------------

struct CoverageRow {
    Method method = Method::Gb;
    double phi = 0.0;
    std::size_t block_length = 0;
    double level = 0.0;
    double coverage = 0.0;     // NaN when no replication succeeded
    double mean_length = 0.0;  // mean CI length over valid replications
    std::size_t replications = 0;
    std::size_t excluded = 0;
};

/// One row from the intervals of the valid replications at `level`;
/// coverage counts the intervals containing `phi`.
CoverageRow summarize_coverage(Method method, double phi, std::size_t block_length, double level,
                               std::span<const bootstrap::Interval> intervals, std::size_t excluded);

struct CoverageReport {
    std::vector<CoverageRow> rows;
    std::vector<Failure> failures;
};

/// Calls `on_phi` with the report so far after each phi completes.
CoverageReport run_coverage_experiment(const ExperimentConfig& config,
                                       const std::function<void(const CoverageReport&)>& on_phi = {});

/// method,phi,block_length,level,coverage,mean_length,replications,excluded
void write_coverage_csv(std::ostream& out, const CoverageReport& report, const std::string& preamble = {});

// ---- correlograms -------------------------------------------------------------

struct AcfCell {
    Method method = Method::Gb;
    std::size_t block_length = 0;
    std::optional<timeseries::CorrelogramStats> acf;  // empty when every replication failed
    std::optional<timeseries::CorrelogramStats> pacf;
    std::size_t excluded = 0;
};

struct AcfPhiResult {
    double phi = 0.0;
    std::vector<double> theory_acf;   // phi^j
    std::vector<double> theory_pacf;  // 1, phi, 0, ...
    timeseries::CorrelogramStats reference_acf;  // true-DGP sample sets of the same size
    timeseries::CorrelogramStats reference_pacf;
    std::vector<AcfCell> cells;
};

struct AcfReport {
    std::vector<AcfPhiResult> results;
    std::vector<Failure> failures;
};

/// Per replication: bootstrap paths, then the mean sample ACF and PACF over
/// them. Statistics are across replications.
AcfReport run_acf_experiment(const ExperimentConfig& config,
                             const std::function<void(const AcfReport&)>& on_phi = {});

/// Mean ACF and PACF (lags 0..max_lag) over a set of paths. Throws
/// timeseries::ConstantPathError if any path is constant.
std::pair<std::vector<double>, std::vector<double>> mean_correlograms(const std::vector<SamplePath>& paths,
                                                                      std::size_t max_lag);

/// method,phi,block_length,replications,excluded
void write_acf_report_csv(std::ostream& out, const AcfReport& report, const std::string& preamble = {});

/// method,phi,block_length,replication,message
void write_failures_csv(std::ostream& out, const std::vector<Failure>& failures, const std::string& preamble = {});

}  // namespace genboot::harness
