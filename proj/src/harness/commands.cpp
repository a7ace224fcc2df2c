#include "genboot/harness/commands.hpp"

#include "genboot/bootstrap/cbb.hpp"
#include "genboot/harness/chart.hpp"
#include "genboot/io/csv.hpp"
#include "genboot/nn/checkpoint.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace genboot::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const ExperimentConfig& config) {
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<double> lags(std::size_t max_lag) {
    std::vector<double> x(max_lag + 1);
    for (std::size_t j = 0; j <= max_lag; ++j) x[j] = static_cast<double>(j);
    return x;
}

Series band_series(std::string label, const timeseries::CorrelogramStats& s) {
    return {std::move(label), lags(s.max_lag()), s.mean, s.q25, s.q75, SeriesStyle::Solid};
}

Chart histogram(const std::string& title, const std::vector<double>& values, double marker) {
    constexpr std::size_t kBins = 30;
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double width = *hi_it > lo ? (*hi_it - lo) / kBins : 1.0;
    std::vector<double> centres(kBins), counts(kBins, 0.0);
    for (std::size_t i = 0; i < kBins; ++i) centres[i] = lo + (static_cast<double>(i) + 0.5) * width;
    for (double v : values) {
        const auto bin = std::min(kBins - 1, static_cast<std::size_t>((v - lo) / width));
        counts[bin] += 1.0;
    }
    const double top = *std::max_element(counts.begin(), counts.end());
    Chart c{title, "estimate", "count", {{"bootstrap estimates", centres, counts, {}, {}, SeriesStyle::Bars}}};
    c.series.push_back({"reference phi", {marker, marker}, {0.0, top}, {}, {}, SeriesStyle::Dashed});
    return c;
}

Chart trace_chart(const gan::TrainingTrace& trace) {
    Series d{"loss_d", {}, {}, {}, {}, SeriesStyle::Solid};
    Series g{"loss_g", {}, {}, {}, {}, SeriesStyle::Solid};
    for (const auto& r : trace.records) {
        d.x.push_back(static_cast<double>(r.step));
        d.y.push_back(r.loss_d);
        g.x.push_back(static_cast<double>(r.step));
        g.y.push_back(r.loss_g);
    }
    return {"Training losses", "step", "loss", {d, g}};
}

void write_trace(const fs::path& dir, const gan::TrainingTrace& trace, const std::string& prov) {
    write_file(dir / "trace.csv", [&](std::ostream& o) { trace.write_csv(o, prov); });
    if (!trace.records.empty()) emit_chart(trace_chart(trace), dir / "trace.svg", prov);
}

// Trains on the observed path and writes the trace and checkpoint. An aborted
// run still leaves its partial trace behind.
gan::TrainResult train_and_save(const ExperimentConfig& config, const SamplePath& observed, const fs::path& dir,
                                const std::string& prov) {
    Rng rng = ReplicationStreams{config.seed, 0, 0}.training();
    gan::TrainResult result;
    try {
        result = train_on_path(config, observed, rng);
    } catch (const gan::TrainingAborted& e) {
        write_trace(dir, e.trace(), prov);
        throw;
    }
    write_trace(dir, result.trace, prov);
    nn::Checkpoint ck{checkpoint_metadata(config, result.trace.records.size(), rng), {}};
    for (const auto* params : {&result.generator, &result.discriminator}) {
        for (std::size_t i = 0; i < params->block_count(); ++i) ck.blocks.add(params->name(i), params->value(i));
    }
    nn::save_checkpoint(dir / "checkpoint.bin", ck);
    return result;
}

std::vector<double> ls_estimates(const std::vector<SamplePath>& paths) {
    std::vector<double> out(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            out[i] = timeseries::ls_estimate(paths[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

std::pair<timeseries::CorrelogramStats, timeseries::CorrelogramStats> path_correlograms(
    const std::vector<SamplePath>& paths, std::size_t max_lag) {
    std::vector<std::vector<double>> acfs, pacfs;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            acfs.push_back(timeseries::acf(paths[i], max_lag));
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + std::to_string(i) + ": " + e.what());
        }
        pacfs.push_back(timeseries::pacf_from_acf(acfs.back(), max_lag));
    }
    return {timeseries::correlogram_stats(acfs), timeseries::correlogram_stats(pacfs)};
}

Chart correlogram_chart(const std::string& title, const std::vector<double>& theory,
                        const timeseries::CorrelogramStats* reference, const std::string& label,
                        const timeseries::CorrelogramStats& estimated) {
    Chart c{title, "lag", title.substr(0, title.find(' ')), {}};
    Series t{"theoretical", lags(theory.size() - 1), theory, {}, {}, SeriesStyle::Dashed};
    if (reference) {
        t.lower = reference->q25;
        t.upper = reference->q75;
    }
    c.series.push_back(std::move(t));
    c.series.push_back(band_series(label, estimated));
    return c;
}

std::string phi_label(double phi) { return "phi" + io::format_double(phi); }

std::string cell_label(Method method, std::size_t block_length) {
    return method == Method::Cbb ? "cbb_b" + std::to_string(block_length) : method_name(method);
}

}  // namespace

std::string checkpoint_metadata(const ExperimentConfig& config, std::size_t steps, const Rng& rng) {
    json cfg = to_json(config);
    cfg.erase("workers");
    cfg.erase("output_dir");
    return json{{"kind", "genboot-gan"},
                {"config", cfg},
                {"block_length", config.gb.block_length},
                {"steps_completed", steps},
                {"rng_state", serialize_state(rng)}}
        .dump(1);
}

SamplePath observed_path(const ExperimentConfig& config) {
    if (config.input_path.empty()) return simulate_observed(config, config.phis.front(), {config.seed, 0, 0});
    std::ifstream in(config.input_path);
    if (!in) throw ConfigError("input.path: cannot open '" + config.input_path + "'");
    SamplePath path;
    try {
        path = timeseries::read_path_csv(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("input.path: " + std::string(e.what()));
    }
    if (path.size() != config.length) {
        throw ConfigError("input.path: has " + std::to_string(path.size()) + " values but dgp.length is " +
                          std::to_string(config.length));
    }
    return path;
}

SamplePath simulate_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    const std::string prov = provenance(config, "simulate");
    const auto path = observed_path(config);
    write_file(dir / "path.csv", [&](std::ostream& o) { timeseries::write_path_csv(o, path, prov); });
    Series s{"y", lags(path.size() - 1), path, {}, {}, SeriesStyle::Solid};
    emit_chart({"AR(1) sample path, phi = " + io::format_double(config.phis.front()), "t", "y", {s}}, dir / "path.svg",
               prov);
    return path;
}

gan::TrainResult train_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    return train_and_save(config, observed_path(config), dir, provenance(config, "train"));
}

std::vector<SamplePath> sample_command(const ExperimentConfig& config) {
    config.validate();
    if (config.checkpoint.empty()) throw ConfigError("input.checkpoint: required by sample");
    nn::Checkpoint ck;
    try {
        ck = nn::load_checkpoint(config.checkpoint);
    } catch (const std::exception& e) {
        throw ConfigError("input.checkpoint: " + std::string(e.what()));
    }
    const json meta = json::parse(ck.metadata, nullptr, false);
    if (meta.is_discarded() || !meta.contains("config")) {
        throw ConfigError("input.checkpoint: metadata is not a genboot training checkpoint");
    }
    // The architecture comes from the checkpoint; sizes and seed from the current config.
    ExperimentConfig run = config;
    run.gan = parse_config(meta.at("config")).gan;
    nn::NetworkParams generator;
    for (std::size_t i = 0; i < ck.blocks.block_count(); ++i) {
        if (ck.blocks.name(i).rfind("g.", 0) == 0) generator.add(ck.blocks.name(i), ck.blocks.value(i));
    }
    const gan::Generator g(run.gan.generator);
    for (const auto& spec : g.params().specs()) {
        if (!generator.contains(spec.name) || generator.at(spec.name).shape() != spec.shape) {
            throw ConfigError("input.checkpoint: generator block '" + spec.name + "' missing or misshapen");
        }
    }

    const auto dir = output_dir(config);
    const std::string prov = provenance(run, "sample");
    const auto paths = generate_paths(run, generator, ReplicationStreams{run.seed, 0, 0}.sampling());
    write_file(dir / "samples.csv", [&](std::ostream& o) {
        io::write_comment(o, prov);
        o << "sample_index,t,value\n";
        for (std::size_t i = 0; i < paths.size(); ++i) {
            for (std::size_t t = 0; t < paths[i].size(); ++t) {
                io::write_row(o, {std::to_string(i), std::to_string(t), io::format_double(paths[i][t])});
            }
        }
    });
    const auto [acf, pacf] = path_correlograms(paths, run.max_lag);
    write_file(dir / "samples_acf.csv", [&](std::ostream& o) { timeseries::write_correlogram_csv(o, acf, prov); });
    const auto refs = timeseries::theoretical_refs(run.phis.front(), run.sample_length(), run.max_lag);
    emit_chart(correlogram_chart("ACF of generated paths", refs.acf, nullptr, "generated", acf), dir / "samples_acf.svg",
               prov);
    return paths;
}

GbOutcome gb_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    const std::string prov = provenance(config, "gb");
    const auto observed = observed_path(config);

    GbOutcome out;
    out.training = train_and_save(config, observed, dir, prov);
    const auto paths = generate_paths(config, out.training.generator, ReplicationStreams{config.seed, 0, 0}.sampling());
    out.bootstrap = bootstrap::gb_statistics(ls_estimates(paths), config.levels);
    write_file(dir / "estimates.csv", [&](std::ostream& o) { bootstrap::write_estimates_csv(o, out.bootstrap, prov); });
    write_file(dir / "summary.csv", [&](std::ostream& o) { bootstrap::write_summary_csv(o, out.bootstrap, prov); });
    emit_chart(histogram("GB estimates of phi", out.bootstrap.estimates, config.phis.front()), dir / "estimates.svg", prov);

    std::tie(out.acf, out.pacf) = path_correlograms(paths, config.max_lag);
    write_file(dir / "acf.csv", [&](std::ostream& o) { timeseries::write_correlogram_csv(o, out.acf, prov); });
    write_file(dir / "pacf.csv", [&](std::ostream& o) { timeseries::write_correlogram_csv(o, out.pacf, prov); });
    const auto refs = timeseries::theoretical_refs(config.phis.front(), config.sample_length(), config.max_lag);
    emit_chart(correlogram_chart("ACF of generated paths", refs.acf, nullptr, "generated", out.acf), dir / "acf.svg", prov);
    emit_chart(correlogram_chart("PACF of generated paths", refs.pacf, nullptr, "generated", out.pacf), dir / "pacf.svg",
               prov);
    return out;
}

std::vector<bootstrap::BootstrapResult> cbb_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    const std::string prov = provenance(config, "cbb");
    const auto observed = observed_path(config);
    const ReplicationStreams streams{config.seed, 0, 0};
    std::vector<bootstrap::BootstrapResult> results;
    for (auto b : config.cbb.block_lengths) {
        const auto r = bootstrap::cbb_bootstrap(
            observed, b, [](std::span<const double> x) { return timeseries::ls_estimate(x); }, config.cbb.resamples,
            config.levels, streams.resampling(b));
        const std::string suffix = "_b" + std::to_string(b);
        write_file(dir / ("estimates" + suffix + ".csv"), [&](std::ostream& o) { bootstrap::write_estimates_csv(o, r, prov); });
        write_file(dir / ("summary" + suffix + ".csv"), [&](std::ostream& o) { bootstrap::write_summary_csv(o, r, prov); });
        emit_chart(histogram("CBB estimates of phi, b = " + std::to_string(b), r.estimates, config.phis.front()),
                   dir / ("estimates" + suffix + ".svg"), prov);
        results.push_back(r);
    }
    return results;
}

AcfReport acf_experiment_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    const std::string prov = provenance(config, "acf-experiment");
    std::size_t written = 0;
    const auto write = [&](const AcfReport& report) {
        for (; written < report.results.size(); ++written) {
            const auto& res = report.results[written];
            const std::string p = phi_label(res.phi);
            for (const char* kind : {"acf", "pacf"}) {
                const bool is_acf = std::string(kind) == "acf";
                const auto& reference = is_acf ? res.reference_acf : res.reference_pacf;
                write_file(dir / (std::string(kind) + "_reference_" + p + ".csv"),
                           [&](std::ostream& o) { timeseries::write_correlogram_csv(o, reference, prov); });
                const auto& theory = is_acf ? res.theory_acf : res.theory_pacf;
                Chart chart{std::string(is_acf ? "ACF" : "PACF") + ", phi = " + io::format_double(res.phi), "lag", kind, {}};
                chart.series.push_back({"theoretical", lags(theory.size() - 1), theory, reference.q25, reference.q75,
                                        SeriesStyle::Dashed});
                for (const auto& cell : res.cells) {
                    const auto& stats = is_acf ? cell.acf : cell.pacf;
                    if (!stats) continue;
                    write_file(dir / (std::string(kind) + "_" + cell_label(cell.method, cell.block_length) + "_" + p + ".csv"),
                               [&](std::ostream& o) { timeseries::write_correlogram_csv(o, *stats, prov); });
                    chart.series.push_back(band_series(cell_label(cell.method, cell.block_length), *stats));
                }
                emit_chart(chart, dir / (std::string(kind) + "_" + p + ".svg"), prov);
            }
        }
        write_file(dir / "acf_report.csv", [&](std::ostream& o) { write_acf_report_csv(o, report, prov); });
        write_file(dir / "failures.csv", [&](std::ostream& o) { write_failures_csv(o, report.failures, prov); });
    };
    const auto report = run_acf_experiment(config, write);
    for (const auto& res : report.results) {
        for (const auto& cell : res.cells) {
            if (!cell.acf) {
                throw std::runtime_error("every " + cell_label(cell.method, cell.block_length) + " replication failed at " +
                                         phi_label(res.phi) + "; see failures.csv");
            }
        }
    }
    return report;
}

CoverageReport coverage_experiment_command(const ExperimentConfig& config) {
    config.validate();
    const auto dir = output_dir(config);
    const std::string prov = provenance(config, "coverage-experiment");
    const auto write = [&](const CoverageReport& report) {
        write_file(dir / "coverage.csv", [&](std::ostream& o) { write_coverage_csv(o, report, prov); });
        write_file(dir / "failures.csv", [&](std::ostream& o) { write_failures_csv(o, report.failures, prov); });
    };
    const auto report = run_coverage_experiment(config, write);

    for (double level : config.levels) {
        Chart chart{"Coverage at nominal level " + io::format_double(level), "phi", "empirical coverage", {}};
        std::vector<std::string> labels;
        for (const auto& row : report.rows) {
            if (row.level != level || std::isnan(row.coverage)) continue;
            const auto label = cell_label(row.method, row.block_length);
            auto it = std::find(labels.begin(), labels.end(), label);
            if (it == labels.end()) {
                labels.push_back(label);
                chart.series.push_back({label, {}, {}, {}, {}, SeriesStyle::Points});
                it = labels.end() - 1;
            }
            auto& s = chart.series[static_cast<std::size_t>(it - labels.begin())];
            s.x.push_back(row.phi);
            s.y.push_back(row.coverage);
        }
        const auto [lo, hi] = std::minmax_element(config.phis.begin(), config.phis.end());
        const double pad = *hi > *lo ? 0.0 : 0.1;
        chart.series.push_back({"nominal", {*lo - pad, *hi + pad}, {level, level}, {}, {}, SeriesStyle::Dashed});
        emit_chart(chart, dir / ("coverage_level" + io::format_double(level) + ".svg"), prov);
    }
    for (const auto& row : report.rows) {
        if (std::isnan(row.coverage)) {
            throw std::runtime_error("every " + cell_label(row.method, row.block_length) + " replication failed at " +
                                     phi_label(row.phi) + "; see failures.csv");
        }
    }
    return report;
}

int run_cli(std::span<const std::string> args) {
    CLI::App app{"Generative bootstrap experiments for AR(1) time series", "genboot"};
    app.require_subcommand(1);
    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out_dir, input, checkpoint;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "Simulate the observed AR(1) path"},
        {"train", "Train the GAN on the observed path and save a checkpoint"},
        {"sample", "Generate bootstrap paths from a checkpoint"},
        {"gb", "Generative bootstrap of the LS estimator on the observed path"},
        {"cbb", "Circular block bootstrap of the LS estimator on the observed path"},
        {"acf-experiment", "Monte Carlo ACF/PACF fidelity experiment"},
        {"coverage-experiment", "Monte Carlo CI coverage experiment"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_file, "JSON config file (defaults when omitted)");
        sub->add_option("--set", overrides, "Override a config key, e.g. --set gan.training.steps=2000");
        sub->add_option("--seed", seed, "Master seed (seed)");
        sub->add_option("--workers", workers, "OpenMP threads, 0 for the default (workers)");
        sub->add_option("--out", out_dir, "Output directory (output_dir)");
        sub->add_option("--input", input, "Observed path CSV (input.path)");
        sub->add_option("--checkpoint", checkpoint, "Checkpoint for sample (input.checkpoint)");
    }

    std::vector<std::string> argv(args.begin(), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        argv.pop_back();  // program name
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    ExperimentConfig config;
    try {
        json doc = read_config_file(config_file);
        for (const auto& o : overrides) apply_override(doc, o);
        if (seed) doc["seed"] = *seed;
        if (workers) doc["workers"] = *workers;
        if (!out_dir.empty()) doc["output_dir"] = out_dir;
        if (!input.empty()) doc["input"]["path"] = input;
        if (!checkpoint.empty()) doc["input"]["checkpoint"] = checkpoint;
        config = parse_config(doc);
    } catch (const ConfigError& e) {
        std::cerr << "genboot: config error: " << e.what() << '\n';
        return 1;
    }

    const int saved_threads = omp_get_max_threads();
    if (config.workers > 0) omp_set_num_threads(static_cast<int>(config.workers));
    int code = 0;
    try {
        if (command == "simulate") simulate_command(config);
        else if (command == "train") train_command(config);
        else if (command == "sample") sample_command(config);
        else if (command == "gb") gb_command(config);
        else if (command == "cbb") cbb_command(config);
        else if (command == "acf-experiment") acf_experiment_command(config);
        else if (command == "coverage-experiment") coverage_experiment_command(config);
    } catch (const ConfigError& e) {
        std::cerr << "genboot " << command << ": config error: " << e.what() << '\n';
        code = 1;
    } catch (const std::exception& e) {
        std::cerr << "genboot " << command << ": " << e.what() << '\n';
        code = 2;
    }
    omp_set_num_threads(saved_threads);
    return code;
}

}  // namespace genboot::harness
