#include "genboot/gan/train.hpp"

#include "genboot/io/csv.hpp"
#include "genboot/tensor/autodiff.hpp"
#include "genboot/tensor/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace genboot::gan {

using namespace genboot::tensor;

void TrainingTrace::write_csv(std::ostream& out, std::string_view preamble) const {
    if (!preamble.empty()) io::write_comment(out, preamble);
    io::write_row(out, {"step", "loss_d", "loss_g", "penalty", "wall_ms"});
    for (const auto& r : records) {
        io::write_row(out, {std::to_string(r.step), io::format_double(r.loss_d), io::format_double(r.loss_g),
                            io::format_double(r.penalty), io::format_double(r.wall_ms)});
    }
}

namespace {

double global_norm(std::span<const Array> grads) {
    double s = 0.0;
    for (const auto& g : grads)
        for (double v : g.values()) s += v * v;
    return std::sqrt(s);
}

class Session {
public:
    Session(const GanConfig& config, std::size_t block_length, const BatchSupplier& supplier, Rng& rng)
        : config_(config),
          gen_(config.generator),
          disc_(config.discriminator),
          supplier_(supplier),
          rng_(rng),
          nb_(config.hyper.batch_size),
          b1_(block_length),
          rows_(block_length + gen_.receptive_field()) {
        config.validate();
        if (b1_ < disc_.min_length()) {
            throw std::invalid_argument("train: block length " + std::to_string(b1_) +
                                        " is shorter than the discriminator accepts (" +
                                        std::to_string(disc_.min_length()) + ")");
        }
        generator_ = nn::init_network(gen_.params().specs(), config.hyper.init, rng_);
        discriminator_ = nn::init_network(disc_.params().specs(), config.hyper.init, rng_);
        adam_g_ = nn::adam_init(generator_, config.hyper.adam);
        adam_d_ = nn::adam_init(discriminator_, config.hyper.adam);
        build_graphs();
    }

    void run(const TrainOptions& options) {
        eval_.profile = options.profile;
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < config_.hyper.n_init; ++i) discriminator_update(0);
        for (std::size_t step = 1; step <= config_.hyper.total_steps; ++step) {
            TraceRecord rec;
            rec.step = step;
            for (std::size_t i = 0; i < config_.hyper.n_discriminator; ++i) {
                const auto [loss, penalty, norm] = discriminator_update(step);
                rec.loss_d = loss;
                rec.penalty = penalty;
                rec.grad_norm_d = norm;
            }
            for (std::size_t i = 0; i < config_.hyper.n_generator; ++i) {
                const auto [loss, norm] = generator_update(step);
                rec.loss_g = loss;
                rec.grad_norm_g = norm;
            }
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            trace_.records.push_back(rec);
            if (options.on_step) options.on_step(rec);
        }
    }

    TrainResult result() && { return {std::move(generator_), std::move(discriminator_), std::move(trace_)}; }

private:
    void build_graphs() {
        noise_ = leaf("noise", {nb_, rows_, config_.generator.noise_dim});
        const Expr real = leaf("real", {nb_, b1_});
        const Expr fake = leaf("fake", {nb_, b1_});
        fake_forward_ = gen_.build(noise_);

        Expr loss_d;
        Expr penalty;
        Expr loss_g;
        if (config_.objective == Objective::WganGp) {
            const Expr interp = leaf("interp", {nb_, b1_});
            const auto l = wgan_discriminator_loss(disc_, real, fake, interp, config_.hyper.lambda);
            loss_d = l.total;
            penalty = l.penalty;
            loss_g = wgan_generator_loss(gen_, disc_, noise_);
        } else {
            loss_d = -basic_gan_losses_from_scores(disc_.build(real), disc_.build(fake)).loss_d;
            penalty = scalar(0.0);
            const Expr s = disc_.build(gen_.build(noise_));
            loss_g = basic_gan_losses_from_scores(s, s).loss_g;
        }
        disc_roots_ = {loss_d, penalty};
        for (auto& g : gradient(loss_d, disc_.params().leaves())) disc_roots_.push_back(g);
        gen_roots_ = {loss_g};
        for (auto& g : gradient(loss_g, gen_.params().leaves())) gen_roots_.push_back(g);
    }

    Array draw_noise() {
        Array z({nb_, rows_, config_.generator.noise_dim});
        fill_standard_normal(rng_, z.values());
        return z;
    }

    [[noreturn]] void abort(const std::string& what, std::size_t step) {
        throw TrainingAborted("training aborted at step " + std::to_string(step) + ": " + what, trace_);
    }

    struct DiscStats {
        double loss;
        double penalty;
        double norm;
    };

    DiscStats discriminator_update(std::size_t step) {
        const Array real = supplier_(nb_, rng_);
        if (real.shape() != Shape{nb_, b1_}) {
            throw std::invalid_argument("train: batch supplier returned " + shape_string(real.shape()) +
                                        ", expected " + shape_string({nb_, b1_}));
        }
        const Array noise = draw_noise();
        Bindings bg;
        generator_.bind(bg);
        bg.set("noise", noise);
        const Array fake = evaluate(fake_forward_, bg, eval_);

        Bindings bd;
        discriminator_.bind(bd);
        bd.set("real", real).set("fake", fake);
        Array interp;
        if (config_.objective == Objective::WganGp) {
            interp = interpolate(real, fake, rng_);
            bd.set("interp", interp);
        }
        auto values = evaluate(disc_roots_, bd, eval_);
        const double loss = values[0].item();
        if (!std::isfinite(loss)) abort("non-finite discriminator loss", step);
        const std::span<const Array> grads(values.data() + 2, values.size() - 2);
        try {
            nn::adam_step(discriminator_, grads, adam_d_, config_.hyper.lr_d);
        } catch (const nn::NonFiniteError& e) {
            abort(e.what(), step);
        }
        return {loss, values[1].item(), global_norm(grads)};
    }

    std::pair<double, double> generator_update(std::size_t step) {
        const Array noise = draw_noise();
        Bindings b;
        generator_.bind(b);
        discriminator_.bind(b);
        b.set("noise", noise);
        auto values = evaluate(gen_roots_, b, eval_);
        const double loss = values[0].item();
        if (!std::isfinite(loss)) abort("non-finite generator loss", step);
        const std::span<const Array> grads(values.data() + 1, values.size() - 1);
        try {
            nn::adam_step(generator_, grads, adam_g_, config_.hyper.lr_g);
        } catch (const nn::NonFiniteError& e) {
            abort(e.what(), step);
        }
        return {loss, global_norm(grads)};
    }

    const GanConfig& config_;
    Generator gen_;
    Discriminator disc_;
    const BatchSupplier& supplier_;
    Rng& rng_;
    std::size_t nb_;
    std::size_t b1_;
    std::size_t rows_;

    nn::NetworkParams generator_;
    nn::NetworkParams discriminator_;
    nn::AdamState adam_g_;
    nn::AdamState adam_d_;
    TrainingTrace trace_;

    EvalOptions eval_;
    Expr noise_;
    Expr fake_forward_;
    std::vector<Expr> disc_roots_;
    std::vector<Expr> gen_roots_;
};

}  // namespace

TrainResult train(const GanConfig& config, std::size_t block_length, const BatchSupplier& supplier, Rng& rng,
                  const TrainOptions& options) {
    Session session(config, block_length, supplier, rng);
    session.run(options);
    return std::move(session).result();
}

}  // namespace genboot::gan
