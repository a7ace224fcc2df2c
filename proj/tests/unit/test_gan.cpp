#include "doctest.h"

#include "genboot/bootstrap/generative.hpp"
#include "genboot/gan/train.hpp"
#include "genboot/tensor/autodiff.hpp"
#include "support/fd_oracle.hpp"
#include "support/toy_gan.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

using namespace genboot;
using namespace genboot::gan;
using genboot::testing::random_array;
using tensor::Array;
using tensor::Bindings;
using tensor::evaluate;
using tensor::leaf;

namespace {

GeneratorArch small_generator() {
    GeneratorArch a;
    a.filters = {4, 3, 1};
    a.dilations = {1, 2, 4};
    a.noise_dim = 3;
    return a;
}

DiscriminatorArch small_discriminator() {
    DiscriminatorArch a;
    a.filters = {2, 3, 4};
    a.dilations = {1, 2, 4};
    a.pool_taps = {1, 3};
    a.pool_bins = 4;
    a.hidden = 5;
    return a;
}

nn::NetworkParams random_params(const nn::ParamLeaves& leaves, Rng& rng, double scale) {
    nn::NetworkParams p;
    for (const auto& s : leaves.specs()) p.add(s.name, random_array(s.shape, rng, scale));
    return p;
}

nn::NetworkParams zero_params(const nn::ParamLeaves& leaves) {
    nn::NetworkParams p;
    for (const auto& s : leaves.specs()) p.add(s.name, Array(s.shape));
    return p;
}

double eval_scalar(const Expr& e, const Bindings& b) { return evaluate(e, b).item(); }

// Trace without the wall-clock column.
std::vector<std::array<double, 5>> trace_values(const TrainingTrace& t) {
    std::vector<std::array<double, 5>> out;
    for (const auto& r : t.records) {
        out.push_back({static_cast<double>(r.step), r.loss_d, r.loss_g, r.penalty, r.grad_norm_d + r.grad_norm_g});
    }
    return out;
}

GanConfig tiny_training_config() {
    GanConfig c;
    c.generator = small_generator();
    c.discriminator = small_discriminator();
    c.hyper.batch_size = 4;
    c.hyper.n_init = 2;
    c.hyper.n_discriminator = 2;
    c.hyper.total_steps = 3;
    return c;
}

BatchSupplier gaussian_supplier(std::size_t length) {
    return [length](std::size_t nb, Rng& rng) { return random_array({nb, length}, rng); };
}

}  // namespace

TEST_CASE("receptive field sums (kernel - 1) * dilation") {
    CHECK(receptive_field(std::vector<std::size_t>{1}, 2) == 1);
    CHECK(receptive_field(std::vector<std::size_t>{1, 2, 4}, 2) == 7);
    CHECK(receptive_field(std::vector<std::size_t>{1, 2, 4, 8, 16, 32}, 2) == 63);
    CHECK(receptive_field(std::vector<std::size_t>{3, 5}, 1) == 0);
    CHECK(receptive_field(std::vector<std::size_t>{1, 2}, 3) == 6);
    CHECK_THROWS(receptive_field(std::vector<std::size_t>{}, 2));
}

TEST_CASE("default architecture sizes") {
    const GanConfig c;
    CHECK_NOTHROW(c.validate());
    const Generator g(c.generator);
    const Discriminator d(c.discriminator);
    CHECK(g.receptive_field() == 63);
    CHECK(nn::parameter_count(g.params().specs()) == 89393);
    // Conv stack plus 48 -> hidden -> 1.
    CHECK(nn::parameter_count(d.params().specs()) == 15848 + 50 * c.discriminator.hidden + 1);
    CHECK(d.min_length() == 2);
}

TEST_CASE("config validation") {
    GanConfig c;
    c.generator.dilations.pop_back();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = GanConfig{};
    c.generator.filters.back() = 2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = GanConfig{};
    c.hyper.lambda = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = GanConfig{};
    c.discriminator.pool_taps = {7};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(parse_objective("wgan-gp") == Objective::WganGp);
    CHECK(parse_objective(objective_name(Objective::BasicGan)) == Objective::BasicGan);
    CHECK_THROWS_AS(parse_objective("lsgan"), std::invalid_argument);
}

TEST_CASE("generator shape contract and determinism") {
    Rng rng = make_stream(3, {1});
    const Generator g(small_generator());
    const auto params = random_params(g.params(), rng, 0.5);
    const std::size_t p = g.receptive_field();
    const Array z = random_array({10 + p, 3}, rng);
    const Array y = generate(g, params, z);
    CHECK(y.shape() == tensor::Shape{10});
    CHECK(generate(g, params, z) == y);

    CHECK_THROWS_AS(generate(g, params, random_array({10 + p, 4}, rng)), tensor::ShapeError);
    CHECK_THROWS_AS(generate(g, params, random_array({p, 3}, rng)), tensor::ShapeError);

    auto zeroed = params;
    zeroed.at("g.c3.w") = Array(zeroed.at("g.c3.w").shape());
    zeroed.at("g.c3.b") = Array(zeroed.at("g.c3.b").shape());
    const Array flat = generate(g, zeroed, z);
    for (double v : flat.values()) CHECK(v == 0.0);
}

TEST_CASE("generator output at t depends only on its own noise window") {
    Rng rng = make_stream(3, {2});
    const Generator g(small_generator());
    const auto params = random_params(g.params(), rng, 0.5);
    const std::size_t p = g.receptive_field();
    const std::size_t b = 12;
    const Array z = random_array({b + p, 3}, rng);
    const Array y = generate(g, params, z);
    for (std::size_t t = 0; t < b; ++t) {
        // Output t reads noise rows t .. t + p.
        Array outside = z;
        for (std::size_t r = 0; r < b + p; ++r) {
            if (r >= t && r <= t + p) continue;
            for (std::size_t c = 0; c < 3; ++c) outside[r * 3 + c] += 10.0;
        }
        CHECK(generate(g, params, outside)[t] == y[t]);

        Array inside = z;
        inside[(t + p) * 3] += 1.0;
        CHECK(generate(g, params, inside)[t] != y[t]);
    }
}

TEST_CASE("one pass equals the sliding-window formulation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_stream(4, {seed});
        const auto config = testing::toy_config(rng);
        const Generator g(config.generator);
        const auto params = random_params(g.params(), rng, 0.7);
        const std::size_t p = g.receptive_field();
        const std::size_t b = 8;
        const std::size_t nd = config.generator.noise_dim;
        const Array z = random_array({b + p, nd}, rng);
        const Array full = generate(g, params, z);
        for (std::size_t t = 0; t < b; ++t) {
            Array window({p + 1, nd});
            std::copy_n(z.data() + t * nd, (p + 1) * nd, window.data());
            const Array single = generate(g, params, window);
            REQUIRE(single.size() == 1);
            CHECK(std::abs(single[0] - full[t]) <= 1e-14 * std::max(1.0, std::abs(full[t])));
        }
    }
}

TEST_CASE("discriminator basics") {
    Rng rng = make_stream(5, {1});
    const Discriminator d(small_discriminator());
    const Array x = random_array({20}, rng);
    CHECK(discriminate(d, zero_params(d.params()), x).item() == 0.0);

    const auto params = random_params(d.params(), rng, 0.5);
    const double s1 = discriminate(d, params, x).item();
    const double s2 = discriminate(d, params, random_array({20}, rng)).item();
    CHECK(std::isfinite(s1));
    CHECK(s1 != s2);
    CHECK(discriminate(d, params, x).item() == s1);

    const Array batch = random_array({3, 20}, rng);
    const Array scores = discriminate(d, params, batch);
    REQUIRE(scores.shape() == tensor::Shape{3});
    for (std::size_t i = 0; i < 3; ++i) {
        Array row({20});
        std::copy_n(batch.data() + i * 20, 20, row.data());
        CHECK(std::abs(discriminate(d, params, row).item() - scores[i]) <= 1e-14 * std::max(1.0, std::abs(scores[i])));
    }

    // 2 channels * 1 step cannot fill 4 bins.
    CHECK(d.min_length() == 2);
    CHECK_THROWS_AS(discriminate(d, params, random_array({1}, rng)), std::invalid_argument);
    CHECK_NOTHROW(discriminate(d, params, random_array({2}, rng)));
}

TEST_CASE("discriminator input gradient is finite and matches finite differences") {
    Rng rng = make_stream(5, {2});
    const Discriminator d(small_discriminator());
    const Expr x = leaf("x", {2, 16});
    const Expr score = tensor::reduce_sum(d.build(x));
    testing::LeafValues values;
    for (const auto& s : d.params().specs()) values[s.name] = random_array(s.shape, rng, 0.5);
    values["x"] = random_array({2, 16}, rng);
    const auto report = testing::check_gradient(score, {x}, values);
    CHECK(report.max_rel_smooth <= 1e-5);
    CHECK(report.max_rel_kink <= 1e-3);
}

TEST_CASE("constant critic gives WGAN-GP loss exactly lambda") {
    Rng rng = make_stream(6, {1});
    const Discriminator d(small_discriminator());
    auto params = zero_params(d.params());
    params.at("d.fc2.b")[0] = 0.37;
    const std::size_t nb = 4;
    const std::size_t T = 12;
    const Expr real = leaf("real", {nb, T});
    const Expr fake = leaf("fake", {nb, T});
    const Expr interp = leaf("interp", {nb, T});
    const double lambda = 20.0;
    const auto loss = wgan_discriminator_loss(d, real, fake, interp, lambda);
    const Array rv = random_array({nb, T}, rng);
    const Array fv = random_array({nb, T}, rng);
    const Array iv = interpolate(rv, fv, rng);
    Bindings b;
    params.bind(b);
    b.set("real", rv).set("fake", fv).set("interp", iv);
    CHECK(eval_scalar(loss.total, b) == lambda);
    CHECK(eval_scalar(loss.critic, b) == 0.0);

    const Expr noise = leaf("noise", {nb, T + 7, 3});
    const Generator g(small_generator());
    const auto gp = random_params(g.params(), rng, 0.5);
    gp.bind(b);
    const Array zv = random_array(noise.shape(), rng);
    b.set("noise", zv);
    const Expr lg = wgan_generator_loss(g, d, noise);
    CHECK(eval_scalar(lg, b) == -0.37);
    for (const auto& grad : evaluate(tensor::gradient(lg, g.params().leaves()), b)) {
        for (double v : grad.values()) CHECK(v == 0.0);
    }
}

TEST_CASE("unit-gradient linear critic has zero penalty") {
    Rng rng = make_stream(6, {2});
    const std::size_t nb = 5;
    const std::size_t T = 30;
    Array w({T, 1});
    for (std::size_t t = 0; t < T; ++t) w[t] = (t % 3 == 0 ? -1.0 : 1.0) / std::sqrt(static_cast<double>(T));
    const Critic linear = [&](const Expr& x) {
        return tensor::reshape(tensor::matmul(x, tensor::constant(w)), {x.shape()[0]});
    };
    const Expr real = leaf("real", {nb, T});
    const Expr fake = leaf("fake", {nb, T});
    const Expr interp = leaf("interp", {nb, T});
    const auto loss = wgan_discriminator_loss(linear, real, fake, interp, 20.0);
    const Array rv = random_array({nb, T}, rng);
    const Array fv = random_array({nb, T}, rng);
    const Array iv = interpolate(rv, fv, rng);
    Bindings b;
    b.set("real", rv).set("fake", fv).set("interp", iv);
    CHECK(std::abs(eval_scalar(loss.penalty, b)) < 1e-12);

    // Scaling the map to gradient norm 2 gives penalty lambda * (2 - 1)^2.
    const Critic doubled = [&](const Expr& x) { return 2.0 * linear(x); };
    const auto loss2 = wgan_discriminator_loss(doubled, real, fake, interp, 20.0);
    CHECK(eval_scalar(loss2.penalty, b) == doctest::Approx(20.0).epsilon(1e-12));

    // With lambda = 0 the generator loss is -mean(w . G(z)).
    const Generator g(small_generator());
    const Expr noise = leaf("noise", {nb, T + g.receptive_field(), 3});
    const Expr lg = wgan_generator_loss(linear, g.build(noise));
    testing::LeafValues values;
    for (const auto& s : g.params().specs()) values[s.name] = random_array(s.shape, rng, 0.5);
    values["noise"] = random_array(noise.shape(), rng);
    const auto report = testing::check_gradient(lg, g.params().leaves(), values);
    CHECK(report.max_rel_smooth <= 1e-5);
    CHECK(report.kinks == 0);
}

TEST_CASE("paired real and fake batches cancel in the critic term") {
    Rng rng = make_stream(6, {3});
    const Discriminator d(small_discriminator());
    const auto params = random_params(d.params(), rng, 0.5);
    const Expr real = leaf("real", {3, 10});
    const Expr fake = leaf("fake", {3, 10});
    const Expr interp = leaf("interp", {3, 10});
    const auto loss = wgan_discriminator_loss(d, real, fake, interp, 5.0);
    const Array v = random_array({3, 10}, rng);
    Bindings b;
    params.bind(b);
    b.set("real", v).set("fake", v).set("interp", v);
    CHECK(eval_scalar(loss.critic, b) == 0.0);
    CHECK(eval_scalar(loss.total, b) == eval_scalar(loss.penalty, b));

    CHECK_THROWS_AS(wgan_discriminator_loss(d, real, leaf("f2", {4, 10}), interp, 5.0), tensor::ShapeError);
    CHECK_THROWS_AS(wgan_discriminator_loss(d, real, fake, real + fake, 5.0), std::invalid_argument);
}

TEST_CASE("interpolation draws one coefficient per pair") {
    Rng rng = make_stream(6, {4});
    Array real({3, 4}, 1.0);
    Array fake({3, 4}, 0.0);
    const Array x = interpolate(real, fake, rng);
    for (std::size_t i = 0; i < 3; ++i) {
        const double a = x[i * 4];
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        for (std::size_t t = 1; t < 4; ++t) CHECK(x[i * 4 + t] == a);
    }
    CHECK(x[0] != x[4]);
    CHECK_THROWS_AS(interpolate(real, Array({2, 4}), rng), tensor::ShapeError);
}

TEST_CASE("basic GAN losses at fixed discriminator outputs") {
    const Expr sr = leaf("sr", {4});
    const Expr sf = leaf("sf", {4});
    const auto losses = basic_gan_losses_from_scores(sr, sf);

    Bindings half;
    const Array zero({4}, 0.0);
    half.set("sr", zero).set("sf", zero);
    CHECK(eval_scalar(losses.loss_d, half) == doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(eval_scalar(losses.loss_d, half) == doctest::Approx(-1.3862943611198906).epsilon(1e-15));
    CHECK(eval_scalar(losses.loss_g, half) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

    // Scores far past the clamp: D(real) = 1 - 1e-7, D(fake) = 1e-7.
    Bindings perfect;
    const Array hi({4}, 60.0);
    const Array lo({4}, -60.0);
    perfect.set("sr", hi).set("sf", lo);
    const double ld = eval_scalar(losses.loss_d, perfect);
    CHECK(std::isfinite(ld));
    CHECK(ld == doctest::Approx(2.0 * std::log1p(-kProbabilityFloor)).epsilon(1e-9));
    CHECK(std::abs(ld) < 1e-6);

    // The worst case stays finite thanks to the clamp.
    Bindings worst;
    worst.set("sr", lo).set("sf", hi);
    CHECK(eval_scalar(losses.loss_d, worst) == doctest::Approx(2.0 * std::log(kProbabilityFloor)).epsilon(1e-9));

    CHECK_THROWS_AS(basic_gan_losses_from_scores(sr, leaf("x", {3})), tensor::ShapeError);
}

TEST_CASE("toy-network loss gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng = make_stream(7, {seed});
        const testing::ToyProblem toy(rng);
        const auto d1 = toy.d1();
        const auto r_d = testing::check_gradient(d1.total, toy.disc.params().leaves(), toy.values);
        const auto r_pen = testing::check_gradient(d1.penalty, toy.disc.params().leaves(), toy.values);
        const auto r_g = testing::check_gradient(toy.g1(), toy.gen.params().leaves(), toy.values);
        const auto basic = toy.basic();
        const auto r_bd = testing::check_gradient(basic.loss_d, toy.disc.params().leaves(), toy.values);
        const auto r_bg = testing::check_gradient(basic.loss_g, toy.gen.params().leaves(), toy.values);
        INFO("seed " << seed);
        CHECK(r_d.max_rel_smooth <= 1e-5);
        CHECK(r_d.max_rel_kink <= 1e-3);
        CHECK(r_pen.max_rel_smooth <= 1e-4);
        CHECK(r_pen.max_rel_kink <= 1e-3);
        CHECK(r_g.max_rel_smooth <= 1e-5);
        CHECK(r_g.max_rel_kink <= 1e-3);
        CHECK(r_bd.max_rel_smooth <= 1e-5);
        CHECK(r_bg.max_rel_smooth <= 1e-5);
    }
}

TEST_CASE("training with no updates returns the initialisation") {
    auto c = tiny_training_config();
    c.hyper.n_init = 0;
    c.hyper.total_steps = 0;
    Rng rng = make_stream(8, {1});
    const auto result = train(c, 12, gaussian_supplier(12), rng);
    Rng again = make_stream(8, {1});
    const auto g0 = nn::init_network(Generator(c.generator).params().specs(), c.hyper.init, again);
    const auto d0 = nn::init_network(Discriminator(c.discriminator).params().specs(), c.hyper.init, again);
    CHECK(result.generator == g0);
    CHECK(result.discriminator == d0);
    CHECK(result.trace.records.empty());
}

TEST_CASE("discriminator updates leave the generator alone and vice versa") {
    auto c = tiny_training_config();
    c.hyper.total_steps = 0;
    c.hyper.n_init = 3;
    Rng rng = make_stream(8, {2});
    const auto disc_only = train(c, 12, gaussian_supplier(12), rng);
    Rng again = make_stream(8, {2});
    const auto g0 = nn::init_network(Generator(c.generator).params().specs(), c.hyper.init, again);
    const auto d0 = nn::init_network(Discriminator(c.discriminator).params().specs(), c.hyper.init, again);
    CHECK(disc_only.generator == g0);
    CHECK_FALSE(disc_only.discriminator == d0);

    c.hyper.n_init = 0;
    c.hyper.n_discriminator = 0;
    c.hyper.total_steps = 2;
    Rng rng2 = make_stream(8, {2});
    const auto gen_only = train(c, 12, gaussian_supplier(12), rng2);
    CHECK(gen_only.discriminator == d0);
    CHECK_FALSE(gen_only.generator == g0);
}

TEST_CASE("training is replayable from the seed") {
    for (auto objective : {Objective::WganGp, Objective::BasicGan}) {
        auto c = tiny_training_config();
        c.objective = objective;
        std::vector<std::size_t> seen;
        Rng r1 = make_stream(9, {1});
        const auto a = train(c, 12, gaussian_supplier(12), r1, {[&](const TraceRecord& r) { seen.push_back(r.step); }});
        Rng r2 = make_stream(9, {1});
        const auto b = train(c, 12, gaussian_supplier(12), r2);
        CHECK(a.generator == b.generator);
        CHECK(a.discriminator == b.discriminator);
        CHECK(trace_values(a.trace) == trace_values(b.trace));
        CHECK(r1() == r2());
        CHECK(seen == std::vector<std::size_t>{1, 2, 3});
        for (const auto& r : a.trace.records) {
            CHECK(std::isfinite(r.loss_d));
            CHECK(std::isfinite(r.loss_g));
            if (objective == Objective::BasicGan) CHECK(r.penalty == 0.0);
        }
    }
}

TEST_CASE("non-finite data aborts training with the partial trace") {
    auto c = tiny_training_config();
    c.hyper.n_init = 0;
    std::size_t calls = 0;
    const BatchSupplier poisoned = [&](std::size_t nb, Rng& rng) {
        Array a = random_array({nb, 12}, rng);
        // Two discriminator updates per step: the third call is in step 2.
        if (++calls == 3) a[0] = std::numeric_limits<double>::quiet_NaN();
        return a;
    };
    Rng rng = make_stream(9, {2});
    try {
        train(c, 12, poisoned, rng);
        FAIL("expected TrainingAborted");
    } catch (const TrainingAborted& e) {
        CHECK(std::string(e.what()).find("step 2") != std::string::npos);
        CHECK(e.trace().records.size() == 1);
    }
}

TEST_CASE("training rejects malformed inputs") {
    auto c = tiny_training_config();
    Rng rng = make_stream(9, {3});
    CHECK_THROWS_AS(train(c, 12, gaussian_supplier(11), rng), std::invalid_argument);
    CHECK_THROWS_AS(train(c, 1, gaussian_supplier(1), rng), std::invalid_argument);
    c.hyper.lr_d = 0.0;
    CHECK_THROWS_AS(train(c, 12, gaussian_supplier(12), rng), std::invalid_argument);
}

TEST_CASE("a small WGAN-GP learns an iid standard normal marginal") {
    GanConfig c;
    c.generator.filters = {8, 8, 1};
    c.generator.dilations = {1, 2, 4};
    c.generator.noise_dim = 4;
    c.discriminator.filters = {4, 8};
    c.discriminator.dilations = {1, 2};
    c.discriminator.pool_taps = {1, 2};
    c.discriminator.pool_bins = 4;
    c.discriminator.hidden = 32;
    c.hyper.batch_size = 32;
    c.hyper.n_init = 10;
    c.hyper.total_steps = 400;
    c.hyper.lr_d = c.hyper.lr_g = 0.001;
    c.hyper.lambda = 10.0;
    // At sigma 0.02 three tanh layers pass almost no noise to the output and
    // short runs can stall with only the output bias trained.
    c.hyper.init.sigma = 0.3;
    const std::size_t length = 16;

    Rng rng = make_stream(4, {1});
    const auto result = train(c, length, gaussian_supplier(length), rng);
    const auto paths = bootstrap::gb_sample(Generator(c.generator), result.generator, length, 1000, {4, {2}});
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& p : paths) {
        for (double v : p) {
            sum += v;
            sq += v * v;
        }
    }
    const double n = 1000.0 * length;
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    INFO("mean " << mean << " sd " << sd);
    CHECK(std::abs(mean) <= 0.3);
    CHECK(sd >= 0.6);
    CHECK(sd <= 1.4);
}

TEST_CASE("trace CSV layout") {
    TrainingTrace t;
    t.records.push_back({1, 0.5, -0.25, 0.125, 1.0, 2.0, 3.5});
    std::ostringstream os;
    t.write_csv(os, "seed=1");
    CHECK(os.str() == "# seed=1\nstep,loss_d,loss_g,penalty,wall_ms\n1,0.5,-0.25,0.125,3.5\n");
}
