#pragma once

// Seeded random streams.
//
// Every stream is a std::mt19937_64 seeded through std::seed_seq from the
// master seed followed by a path of stream ids (replication index, purpose,
// sample index, ...). seed_seq and mt19937_64 are fully specified by the
// standard and the Boost distributions below are implemented in headers, so a
// given (master, path) produces the same numbers on every platform and in any
// execution order.

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace genboot {

using Rng = std::mt19937_64;

/// Stream for `path` under `master`. Distinct paths give unrelated streams.
Rng make_stream(std::uint64_t master, std::span<const std::uint64_t> path);
Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Streams make_stream(master, prefix + {index}) for index = 0, 1, ...
struct StreamFamily {
    std::uint64_t master = 0;
    std::vector<std::uint64_t> prefix;

    Rng at(std::uint64_t index) const;
    StreamFamily child(std::uint64_t id) const;
};

/// Fixed purpose tags used as the second element of a stream path.
enum class StreamPurpose : std::uint64_t {
    Data = 1,      // simulated sample path
    Init = 2,      // network initialisation
    Training = 3,  // batches, noise and interpolation weights during training
    Sampling = 4,  // generator noise for bootstrap samples
    Resampling = 5,
    Oracle = 6,    // true-DGP draws standing in for the generator
    Reference = 7, // true-DGP draws for theoretical bands
};

inline std::uint64_t tag(StreamPurpose p) { return static_cast<std::uint64_t>(p); }

inline double standard_normal(Rng& rng) {
    return boost::random::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform01(Rng& rng) { return boost::random::uniform_01<double>()(rng); }

/// Uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

void fill_standard_normal(Rng& rng, std::span<double> out);

/// Text form of the engine state (the standard's operator<< format), for checkpoints.
std::string serialize_state(const Rng& rng);
Rng deserialize_state(const std::string& text);

}  // namespace genboot
