#pragma once

#include "genboot/gan/networks.hpp"
#include "genboot/rng.hpp"

#include <functional>

namespace genboot::gan {

/// total = critic + penalty, with
///   critic  = mean(D(fake)) - mean(D(real))
///   penalty = lambda * mean((||grad_x D(x_interp)||_2 - 1)^2)
/// `interpolates` must be a leaf so the input gradient can be taken; its
/// value comes from interpolate().
struct WganDiscriminatorLoss {
    Expr total;
    Expr critic;
    Expr penalty;
};

/// Maps a (batch, T) path expression to (batch) scores. The Discriminator
/// overloads use Discriminator::build; tests plug in hand-built critics.
using Critic = std::function<Expr(const Expr&)>;

WganDiscriminatorLoss wgan_discriminator_loss(const Critic& critic, const Expr& real, const Expr& fake,
                                              const Expr& interpolates, double lambda);
WganDiscriminatorLoss wgan_discriminator_loss(const Discriminator& discriminator, const Expr& real, const Expr& fake,
                                              const Expr& interpolates, double lambda);

/// Row i is a_i * real_i + (1 - a_i) * fake_i with one a_i ~ U(0, 1) per pair.
Array interpolate(const Array& real, const Array& fake, Rng& rng);

/// mean(-D(fake)) for a generated batch.
Expr wgan_generator_loss(const Critic& critic, const Expr& fake);
/// mean(-D(G(noise))).
Expr wgan_generator_loss(const Generator& generator, const Discriminator& discriminator, const Expr& noise);

/// Batch losses of the original GAN objective with D = sigmoid(score) clamped
/// to [1e-7, 1 - 1e-7]:
///   loss_d = mean(log D(real) + log(1 - D(fake)))   (the discriminator ascends this)
///   loss_g = mean(log(1 - D(fake)))                 (the generator descends this)
struct BasicGanLosses {
    Expr loss_d;
    Expr loss_g;
};

inline constexpr double kProbabilityFloor = 1e-7;

BasicGanLosses basic_gan_losses_from_scores(const Expr& score_real, const Expr& score_fake);
BasicGanLosses basic_gan_losses(const Discriminator& discriminator, const Generator& generator, const Expr& real,
                                const Expr& noise);

}  // namespace genboot::gan
