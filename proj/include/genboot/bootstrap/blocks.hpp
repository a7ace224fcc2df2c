#pragma once

#include "genboot/rng.hpp"
#include "genboot/tensor/array.hpp"

#include <span>
#include <vector>

namespace genboot::bootstrap {

/// All overlapping windows of length block_length of a path, in order of start.
class BlockSet {
public:
    BlockSet(std::vector<double> source, std::size_t block_length);

    std::size_t count() const noexcept { return source_.size() - block_length_ + 1; }
    std::size_t block_length() const noexcept { return block_length_; }
    std::span<const double> block(std::size_t j) const;
    const std::vector<double>& source() const noexcept { return source_; }

private:
    std::vector<double> source_;
    std::size_t block_length_;
};

/// Throws std::invalid_argument unless 1 <= b1 < length(path).
BlockSet make_blocks(std::span<const double> path, std::size_t block_length);

/// n_b distinct block starts drawn uniformly without replacement.
std::vector<std::size_t> training_batch_starts(const BlockSet& blocks, std::size_t n_b, Rng& rng);

/// The blocks of training_batch_starts as an (n_b, block_length) array.
tensor::Array training_batch(const BlockSet& blocks, std::size_t n_b, Rng& rng);

}  // namespace genboot::bootstrap
