#include "genboot/bootstrap/blocks.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace genboot::bootstrap {

BlockSet::BlockSet(std::vector<double> source, std::size_t block_length)
    : source_(std::move(source)), block_length_(block_length) {
    if (block_length_ == 0 || block_length_ >= source_.size()) {
        throw std::invalid_argument("make_blocks: block length " + std::to_string(block_length_) +
                                    " must be in [1, " + std::to_string(source_.size()) + ")");
    }
}

std::span<const double> BlockSet::block(std::size_t j) const {
    if (j >= count()) throw std::out_of_range("block index " + std::to_string(j) + " out of range");
    return std::span<const double>(source_).subspan(j, block_length_);
}

BlockSet make_blocks(std::span<const double> path, std::size_t block_length) {
    return BlockSet(std::vector<double>(path.begin(), path.end()), block_length);
}

std::vector<std::size_t> training_batch_starts(const BlockSet& blocks, std::size_t n_b, Rng& rng) {
    const std::size_t n = blocks.count();
    if (n_b == 0 || n_b > n) {
        throw std::invalid_argument("training_batch: cannot draw " + std::to_string(n_b) + " distinct blocks from " +
                                    std::to_string(n));
    }
    // Partial Fisher-Yates shuffle.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_b; ++i) {
        const std::size_t j = i + uniform_index(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n_b);
    return idx;
}

tensor::Array training_batch(const BlockSet& blocks, std::size_t n_b, Rng& rng) {
    const auto starts = training_batch_starts(blocks, n_b, rng);
    const std::size_t b = blocks.block_length();
    tensor::Array out({n_b, b});
    for (std::size_t i = 0; i < n_b; ++i) {
        const auto blk = blocks.block(starts[i]);
        std::copy(blk.begin(), blk.end(), out.data() + i * b);
    }
    return out;
}

}  // namespace genboot::bootstrap
