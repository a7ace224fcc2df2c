#pragma once

#include "genboot/gan/losses.hpp"
#include "genboot/nn/adam.hpp"
#include "genboot/tensor/evaluate.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace genboot::gan {

/// One row per outer training step. loss_d and penalty are from the last
/// discriminator update of the step, loss_g from the last generator update.
/// penalty is the lambda-weighted term, so loss_d = critic + penalty. Under
/// the basic objective loss_d is the descended value (the negated ascent
/// objective) and penalty is 0.
struct TraceRecord {
    std::size_t step = 0;
    double loss_d = 0.0;
    double loss_g = 0.0;
    double penalty = 0.0;
    double grad_norm_d = 0.0;
    double grad_norm_g = 0.0;
    double wall_ms = 0.0;
};

struct TrainingTrace {
    std::vector<TraceRecord> records;

    /// Columns step,loss_d,loss_g,penalty,wall_ms after `preamble` as # comments.
    void write_csv(std::ostream& out, std::string_view preamble = {}) const;
};

class TrainingAborted : public std::runtime_error {
public:
    TrainingAborted(const std::string& what, TrainingTrace trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const TrainingTrace& trace() const noexcept { return trace_; }

private:
    TrainingTrace trace_;
};

/// Returns a (n_b, block_length) batch of real blocks.
using BatchSupplier = std::function<Array(std::size_t n_b, Rng& rng)>;

struct TrainOptions {
    std::function<void(const TraceRecord&)> on_step;
    tensor::EvalProfile* profile = nullptr;
};

struct TrainResult {
    nn::NetworkParams generator;
    nn::NetworkParams discriminator;
    TrainingTrace trace;
};

/// Initialises both networks from `rng`, runs hyper.n_init discriminator
/// updates, then hyper.total_steps outer steps of n_discriminator
/// discriminator updates (fresh real and fake batches each) followed by
/// n_generator generator updates. Every random draw comes from `rng`, in a
/// fixed order, so the run is reproducible from its state.
TrainResult train(const GanConfig& config, std::size_t block_length, const BatchSupplier& supplier, Rng& rng,
                  const TrainOptions& options = {});

}  // namespace genboot::gan
