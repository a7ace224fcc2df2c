#include "genboot/gan/config.hpp"

#include <stdexcept>

namespace genboot::gan {

std::string objective_name(Objective objective) {
    return objective == Objective::WganGp ? "wgan-gp" : "basic-gan";
}

Objective parse_objective(const std::string& name) {
    if (name == "wgan-gp") return Objective::WganGp;
    if (name == "basic-gan") return Objective::BasicGan;
    throw std::invalid_argument("unknown objective '" + name + "' (expected wgan-gp or basic-gan)");
}

namespace {

void check_stack(const std::string& what, const std::vector<std::size_t>& filters,
                 const std::vector<std::size_t>& dilations, std::size_t kernel) {
    if (filters.empty()) throw std::invalid_argument(what + ": needs at least one conv layer");
    if (filters.size() != dilations.size()) {
        throw std::invalid_argument(what + ": " + std::to_string(filters.size()) + " filter counts but " +
                                    std::to_string(dilations.size()) + " dilations");
    }
    if (kernel == 0) throw std::invalid_argument(what + ": kernel_size must be at least 1");
    for (auto f : filters) {
        if (f == 0) throw std::invalid_argument(what + ": filter counts must be positive");
    }
    for (auto d : dilations) {
        if (d == 0) throw std::invalid_argument(what + ": dilations must be at least 1");
    }
}

}  // namespace

void GanConfig::validate() const {
    check_stack("generator", generator.filters, generator.dilations, generator.kernel_size);
    check_stack("discriminator", discriminator.filters, discriminator.dilations, discriminator.kernel_size);
    if (generator.filters.back() != 1) throw std::invalid_argument("generator: last layer must have 1 filter");
    if (generator.noise_dim == 0) throw std::invalid_argument("generator: noise_dim must be positive");
    if (discriminator.pool_taps.empty()) throw std::invalid_argument("discriminator: needs at least one pooling tap");
    for (auto t : discriminator.pool_taps) {
        if (t == 0 || t > discriminator.filters.size()) {
            throw std::invalid_argument("discriminator: pooling tap " + std::to_string(t) + " is not a conv layer");
        }
    }
    if (discriminator.pool_bins == 0) throw std::invalid_argument("discriminator: pool_bins must be positive");
    if (discriminator.hidden == 0) throw std::invalid_argument("discriminator: hidden width must be positive");
    if (!(hyper.lr_d > 0.0) || !(hyper.lr_g > 0.0)) throw std::invalid_argument("learning rates must be positive");
    if (!(hyper.lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (hyper.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (!(hyper.init.sigma > 0.0)) throw std::invalid_argument("init sigma must be positive");
    const auto& a = hyper.adam;
    if (!(a.beta1 >= 0.0 && a.beta1 < 1.0 && a.beta2 >= 0.0 && a.beta2 < 1.0 && a.epsilon > 0.0)) {
        throw std::invalid_argument("adam: need 0 <= beta < 1 and epsilon > 0");
    }
}

std::size_t receptive_field(std::span<const std::size_t> dilations, std::size_t kernel_size) {
    if (dilations.empty()) throw std::invalid_argument("receptive_field: empty dilation list");
    if (kernel_size == 0) throw std::invalid_argument("receptive_field: kernel_size must be at least 1");
    std::size_t p = 0;
    for (auto d : dilations) p += (kernel_size - 1) * d;
    return p;
}

}  // namespace genboot::gan
