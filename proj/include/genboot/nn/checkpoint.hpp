#pragma once

// Binary checkpoint: free-form metadata text plus ordered parameter blocks.
// Byte layout is described in docs/checkpoint_format.md.

#include "genboot/nn/params.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace genboot::nn {

inline constexpr char kCheckpointMagic[9] = "GBCKPT01";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    std::string metadata;
    NetworkParams blocks;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace genboot::nn
