#include "genboot/gan/losses.hpp"

#include "genboot/tensor/autodiff.hpp"

#include <stdexcept>

namespace genboot::gan {

using namespace genboot::tensor;

WganDiscriminatorLoss wgan_discriminator_loss(const Critic& critic, const Expr& real, const Expr& fake,
                                              const Expr& interpolates, double lambda) {
    if (real.shape().size() != 2 || real.shape() != fake.shape() || real.shape() != interpolates.shape()) {
        throw ShapeError("wgan discriminator loss: real " + shape_string(real.shape()) + ", fake " +
                         shape_string(fake.shape()) + " and interpolates " + shape_string(interpolates.shape()) +
                         " must be equal (batch, T) shapes");
    }
    if (interpolates.kind() != OpKind::Leaf) {
        throw std::invalid_argument("wgan discriminator loss: interpolates must be a leaf");
    }
    WganDiscriminatorLoss loss;
    loss.critic = reduce_mean(critic(fake)) - reduce_mean(critic(real));
    // Samples are independent, so the gradient of the summed scores holds every
    // per-sample input gradient in its rows.
    const Expr scores = reduce_sum(critic(interpolates));
    const Expr input_grad = gradient(scores, std::span<const Expr>(&interpolates, 1)).front();
    loss.penalty = lambda * reduce_mean(square(l2_norm(input_grad) - 1.0));
    loss.total = loss.critic + loss.penalty;
    return loss;
}

WganDiscriminatorLoss wgan_discriminator_loss(const Discriminator& discriminator, const Expr& real, const Expr& fake,
                                              const Expr& interpolates, double lambda) {
    return wgan_discriminator_loss([&](const Expr& x) { return discriminator.build(x); }, real, fake, interpolates,
                                   lambda);
}

Array interpolate(const Array& real, const Array& fake, Rng& rng) {
    if (real.rank() != 2 || real.shape() != fake.shape()) {
        throw ShapeError("interpolate: real " + shape_string(real.shape()) + " and fake " + shape_string(fake.shape()) +
                         " must be equal (batch, T) shapes");
    }
    Array out(real.shape());
    const std::size_t T = real.dim(1);
    for (std::size_t i = 0; i < real.dim(0); ++i) {
        const double a = uniform01(rng);
        for (std::size_t t = 0; t < T; ++t) out[i * T + t] = a * real[i * T + t] + (1.0 - a) * fake[i * T + t];
    }
    return out;
}

Expr wgan_generator_loss(const Critic& critic, const Expr& fake) { return -reduce_mean(critic(fake)); }

Expr wgan_generator_loss(const Generator& generator, const Discriminator& discriminator, const Expr& noise) {
    return -reduce_mean(discriminator.build(generator.build(noise)));
}

BasicGanLosses basic_gan_losses_from_scores(const Expr& score_real, const Expr& score_fake) {
    if (score_real.shape() != score_fake.shape()) {
        throw ShapeError("basic gan losses: batch size mismatch " + shape_string(score_real.shape()) + " vs " +
                         shape_string(score_fake.shape()));
    }
    auto prob = [](const Expr& s) { return clamp(sigmoid(s), kProbabilityFloor, 1.0 - kProbabilityFloor); };
    const Expr log_not_fake = log(affine(prob(score_fake), -1.0, 1.0));
    BasicGanLosses out;
    out.loss_d = reduce_mean(log(prob(score_real)) + log_not_fake);
    out.loss_g = reduce_mean(log_not_fake);
    return out;
}

BasicGanLosses basic_gan_losses(const Discriminator& discriminator, const Generator& generator, const Expr& real,
                                const Expr& noise) {
    return basic_gan_losses_from_scores(discriminator.build(real), discriminator.build(generator.build(noise)));
}

}  // namespace genboot::gan
