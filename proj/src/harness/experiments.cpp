#include "genboot/harness/experiments.hpp"

#include "bootstrap/parallel_map.hpp"
#include "genboot/bootstrap/blocks.hpp"
#include "genboot/bootstrap/cbb.hpp"
#include "genboot/bootstrap/generative.hpp"
#include "genboot/io/csv.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace genboot::harness {

namespace {

std::vector<std::uint64_t> cell_path(const ReplicationStreams& s, StreamPurpose purpose) {
    return {s.phi_index, s.replication, tag(purpose)};
}

double coverage_statistic(CoverageStatistic s, std::span<const double> path) {
    if (s == CoverageStatistic::Mean) return std::accumulate(path.begin(), path.end(), 0.0) / static_cast<double>(path.size());
    return timeseries::ls_estimate(path);
}

// Runs body(r) for every replication and collects per-replication failures
// instead of stopping. Outer parallelism only when there is more than one
// replication, so a single replication keeps the kernels' own threads.
template <class Body>
std::vector<std::string> for_replications(std::size_t n, Body&& body) {
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic, 1) if (n > 1)
    for (long r = 0; r < static_cast<long>(n); ++r) {
        try {
            body(static_cast<std::size_t>(r));
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(r)] = e.what();
            if (errors[static_cast<std::size_t>(r)].empty()) errors[static_cast<std::size_t>(r)] = "unknown error";
        }
    }
    return errors;
}

struct CellSpec {
    Method method;
    std::size_t block_length;
    std::size_t replications;
};

// The (method, block length) cells of an experiment in output order.
std::vector<CellSpec> cells_of(const ExperimentConfig& config) {
    std::vector<CellSpec> cells;
    for (Method m : config.methods) {
        if (m == Method::Cbb) {
            for (auto b : config.cbb.block_lengths) cells.push_back({m, b, config.cbb.replications});
        } else {
            cells.push_back({m, m == Method::Gb ? config.gb.block_length : 0, config.gb.replications});
        }
    }
    return cells;
}

std::size_t max_replications(const std::vector<CellSpec>& cells) {
    std::size_t n = 0;
    for (const auto& c : cells) n = std::max(n, c.replications);
    return n;
}

std::string cell_error(const std::string& replication_error, const std::string& cell_error) {
    return replication_error.empty() ? cell_error : replication_error;
}

}  // namespace

Rng ReplicationStreams::data() const { return make_stream(master, cell_path(*this, StreamPurpose::Data)); }
Rng ReplicationStreams::training() const { return make_stream(master, cell_path(*this, StreamPurpose::Training)); }
StreamFamily ReplicationStreams::sampling() const { return {master, cell_path(*this, StreamPurpose::Sampling)}; }
StreamFamily ReplicationStreams::oracle() const { return {master, cell_path(*this, StreamPurpose::Oracle)}; }
StreamFamily ReplicationStreams::reference() const { return {master, cell_path(*this, StreamPurpose::Reference)}; }
StreamFamily ReplicationStreams::resampling(std::size_t block_length) const {
    auto path = cell_path(*this, StreamPurpose::Resampling);
    path.push_back(block_length);
    return {master, path};
}

SamplePath simulate_observed(const ExperimentConfig& config, double phi, const ReplicationStreams& streams) {
    Rng rng = streams.data();
    return timeseries::simulate_ar1({phi, config.sigma, config.length}, rng);
}

gan::TrainResult train_on_path(const ExperimentConfig& config, const SamplePath& observed, Rng& rng,
                               const gan::TrainOptions& options) {
    const auto blocks = bootstrap::make_blocks(observed, config.gb.block_length);
    const gan::BatchSupplier supplier = [&blocks](std::size_t nb, Rng& r) {
        return bootstrap::training_batch(blocks, nb, r);
    };
    return gan::train(config.gan, config.gb.block_length, supplier, rng, options);
}

std::vector<SamplePath> oracle_sample(const ExperimentConfig& config, const SamplePath& observed, double true_phi,
                                      const StreamFamily& streams) {
    const double phi = config.oracle_phi == OraclePhi::True ? true_phi : timeseries::ls_estimate(observed);
    const timeseries::Ar1Spec spec{phi, config.sigma, config.sample_length()};
    spec.validate();
    std::vector<SamplePath> paths(config.gb.samples);
    bootstrap::detail::parallel_for_indexed(paths.size(), "oracle sample", [&](std::size_t i) {
        Rng rng = streams.at(i);
        paths[i] = timeseries::simulate_ar1(spec, rng);
    });
    return paths;
}

std::vector<SamplePath> generate_paths(const ExperimentConfig& config, const nn::NetworkParams& generator,
                                       const StreamFamily& streams) {
    return bootstrap::gb_sample(gan::Generator(config.gan.generator), generator, config.sample_length(),
                                config.gb.samples, streams);
}

std::vector<SamplePath> bootstrap_paths(const ExperimentConfig& config, Method method, std::size_t block_length,
                                        const SamplePath& observed, double true_phi, const ReplicationStreams& streams) {
    switch (method) {
        case Method::Gb: {
            Rng rng = streams.training();
            const auto trained = train_on_path(config, observed, rng);
            return generate_paths(config, trained.generator, streams.sampling());
        }
        case Method::Oracle:
            return oracle_sample(config, observed, true_phi, streams.oracle());
        case Method::Cbb: {
            const auto family = streams.resampling(block_length);
            std::vector<SamplePath> paths(config.cbb.resamples);
            bootstrap::detail::parallel_for_indexed(paths.size(), "cbb resample", [&](std::size_t i) {
                Rng rng = family.at(i);
                paths[i] = bootstrap::cbb_resample(observed, block_length, rng);
            });
            return paths;
        }
    }
    throw std::logic_error("bootstrap_paths: unknown method");
}

std::string block_label(Method method, std::size_t block_length) {
    return method == Method::Oracle ? std::string() : std::to_string(block_length);
}

// ---- coverage ---------------------------------------------------------------

CoverageRow summarize_coverage(Method method, double phi, std::size_t block_length, double level,
                               std::span<const bootstrap::Interval> intervals, std::size_t excluded) {
    CoverageRow row{method, phi, block_length, level, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN(), intervals.size(), excluded};
    if (intervals.empty()) return row;
    std::size_t hits = 0;
    double length = 0.0;
    for (const auto& i : intervals) {
        hits += i.contains(phi) ? 1 : 0;
        length += i.length();
    }
    row.coverage = static_cast<double>(hits) / static_cast<double>(intervals.size());
    row.mean_length = length / static_cast<double>(intervals.size());
    return row;
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config,
                                       const std::function<void(const CoverageReport&)>& on_phi) {
    config.validate();
    const auto cells = cells_of(config);
    const std::size_t reps = max_replications(cells);
    CoverageReport report;

    for (std::size_t k = 0; k < config.phis.size(); ++k) {
        const double phi = config.phis[k];
        const double target = config.statistic == CoverageStatistic::Ls ? phi : 0.0;
        // results[r][c]: the bootstrap result of cell c in replication r, or an error.
        std::vector<std::vector<std::optional<bootstrap::BootstrapResult>>> results(
            reps, std::vector<std::optional<bootstrap::BootstrapResult>>(cells.size()));
        std::vector<std::vector<std::string>> cell_errors(reps, std::vector<std::string>(cells.size()));

        const auto rep_errors = for_replications(reps, [&](std::size_t r) {
            const ReplicationStreams streams{config.seed, k, r};
            const auto observed = simulate_observed(config, phi, streams);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (r >= cells[c].replications) continue;
                try {
                    const auto paths = bootstrap_paths(config, cells[c].method, cells[c].block_length, observed, phi, streams);
                    std::vector<double> estimates(paths.size());
                    bootstrap::detail::parallel_for_indexed(paths.size(), "bootstrap path", [&](std::size_t i) {
                        estimates[i] = coverage_statistic(config.statistic, paths[i]);
                    });
                    results[r][c] = bootstrap::gb_statistics(std::move(estimates), config.levels);
                } catch (const std::exception& e) {
                    cell_errors[r][c] = e.what();
                }
            }
        });

        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::vector<const bootstrap::BootstrapResult*> valid;
            std::size_t excluded = 0;
            for (std::size_t r = 0; r < cells[c].replications; ++r) {
                if (results[r][c]) {
                    valid.push_back(&*results[r][c]);
                } else {
                    ++excluded;
                    report.failures.push_back({cells[c].method, phi, cells[c].block_length, r,
                                               cell_error(rep_errors[r], cell_errors[r][c])});
                }
            }
            for (double level : config.levels) {
                std::vector<bootstrap::Interval> intervals;
                for (const auto* v : valid) intervals.push_back(v->interval(level));
                auto row = summarize_coverage(cells[c].method, target, cells[c].block_length, level, intervals, excluded);
                row.phi = phi;
                report.rows.push_back(row);
            }
        }
        if (on_phi) on_phi(report);
    }
    return report;
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    out << "method,phi,block_length,level,coverage,mean_length,replications,excluded\n";
    for (const auto& r : report.rows) {
        io::write_row(out, {method_name(r.method), io::format_double(r.phi), block_label(r.method, r.block_length),
                            io::format_double(r.level), io::format_double(r.coverage), io::format_double(r.mean_length),
                            std::to_string(r.replications), std::to_string(r.excluded)});
    }
}

// ---- correlograms -------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> mean_correlograms(const std::vector<SamplePath>& paths,
                                                                      std::size_t max_lag) {
    std::vector<std::vector<double>> acfs(paths.size());
    std::vector<std::vector<double>> pacfs(paths.size());
    bootstrap::detail::parallel_for_indexed(paths.size(), "correlogram of path", [&](std::size_t i) {
        acfs[i] = timeseries::acf(paths[i], max_lag);
        pacfs[i] = timeseries::pacf_from_acf(acfs[i], max_lag);
    });
    return {timeseries::mean_curve(acfs), timeseries::mean_curve(pacfs)};
}

AcfReport run_acf_experiment(const ExperimentConfig& config, const std::function<void(const AcfReport&)>& on_phi) {
    config.validate();
    const auto cells = cells_of(config);
    const std::size_t reps = max_replications(cells);
    const std::size_t lag = config.max_lag;
    AcfReport report;

    for (std::size_t k = 0; k < config.phis.size(); ++k) {
        const double phi = config.phis[k];
        AcfPhiResult result;
        result.phi = phi;
        const auto refs = timeseries::theoretical_refs(phi, config.sample_length(), lag);
        result.theory_acf = refs.acf;
        result.theory_pacf = refs.pacf;

        // Reference band: the same statistic on sets of gb.samples true-DGP paths.
        std::vector<std::vector<double>> ref_acf(config.theory_replications), ref_pacf(config.theory_replications);
        ExperimentConfig true_law = config;
        true_law.oracle_phi = OraclePhi::True;
        const auto ref_errors = for_replications(config.theory_replications, [&](std::size_t r) {
            const ReplicationStreams streams{config.seed, k, r};
            auto curves = mean_correlograms(oracle_sample(true_law, {}, phi, streams.reference()), lag);
            ref_acf[r] = std::move(curves.first);
            ref_pacf[r] = std::move(curves.second);
        });
        for (const auto& e : ref_errors) {
            if (!e.empty()) throw std::runtime_error("reference band for phi " + io::format_double(phi) + ": " + e);
        }
        result.reference_acf = timeseries::correlogram_stats(ref_acf);
        result.reference_pacf = timeseries::correlogram_stats(ref_pacf);

        std::vector<std::vector<std::optional<std::pair<std::vector<double>, std::vector<double>>>>> curves(
            reps, std::vector<std::optional<std::pair<std::vector<double>, std::vector<double>>>>(cells.size()));
        std::vector<std::vector<std::string>> cell_errors(reps, std::vector<std::string>(cells.size()));
        const auto rep_errors = for_replications(reps, [&](std::size_t r) {
            const ReplicationStreams streams{config.seed, k, r};
            const auto observed = simulate_observed(config, phi, streams);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (r >= cells[c].replications) continue;
                try {
                    curves[r][c] = mean_correlograms(
                        bootstrap_paths(config, cells[c].method, cells[c].block_length, observed, phi, streams), lag);
                } catch (const std::exception& e) {
                    cell_errors[r][c] = e.what();
                }
            }
        });

        for (std::size_t c = 0; c < cells.size(); ++c) {
            AcfCell cell{cells[c].method, cells[c].block_length, std::nullopt, std::nullopt, 0};
            std::vector<std::vector<double>> acfs, pacfs;
            for (std::size_t r = 0; r < cells[c].replications; ++r) {
                if (curves[r][c]) {
                    acfs.push_back(curves[r][c]->first);
                    pacfs.push_back(curves[r][c]->second);
                } else {
                    ++cell.excluded;
                    report.failures.push_back({cells[c].method, phi, cells[c].block_length, r,
                                               cell_error(rep_errors[r], cell_errors[r][c])});
                }
            }
            if (!acfs.empty()) {
                cell.acf = timeseries::correlogram_stats(acfs);
                cell.pacf = timeseries::correlogram_stats(pacfs);
            }
            result.cells.push_back(std::move(cell));
        }
        report.results.push_back(std::move(result));
        if (on_phi) on_phi(report);
    }
    return report;
}

void write_acf_report_csv(std::ostream& out, const AcfReport& report, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    out << "method,phi,block_length,replications,excluded\n";
    for (const auto& res : report.results) {
        for (const auto& c : res.cells) {
            io::write_row(out, {method_name(c.method), io::format_double(res.phi), block_label(c.method, c.block_length),
                                std::to_string(c.acf ? c.acf->replications : 0), std::to_string(c.excluded)});
        }
    }
}

void write_failures_csv(std::ostream& out, const std::vector<Failure>& failures, const std::string& preamble) {
    if (!preamble.empty()) io::write_comment(out, preamble);
    out << "method,phi,block_length,replication,message\n";
    for (const auto& f : failures) {
        std::string message = f.message;
        for (auto& ch : message) {
            if (ch == '"') ch = '\'';
            if (ch == '\n') ch = ' ';
        }
        io::write_row(out, {method_name(f.method), io::format_double(f.phi), block_label(f.method, f.block_length),
                            std::to_string(f.replication), "\"" + message + "\""});
    }
}

}  // namespace genboot::harness
