#include "genboot/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace genboot::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    return value;
}

std::string get_string(std::istream& in, std::uint64_t length, const char* what) {
    std::string s(length, '\0');
    if (length > 0 && !in.read(s.data(), static_cast<std::streamsize>(length))) {
        throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
    out.write(kCheckpointMagic, 8);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::uint64_t>(out, checkpoint.metadata.size());
    out.write(checkpoint.metadata.data(), static_cast<std::streamsize>(checkpoint.metadata.size()));
    const auto& blocks = checkpoint.blocks;
    put<std::uint64_t>(out, blocks.block_count());
    for (std::size_t i = 0; i < blocks.block_count(); ++i) {
        const auto& name = blocks.name(i);
        const auto& value = blocks.value(i);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(value.rank()));
        for (auto d : value.shape()) put<std::uint64_t>(out, d);
        out.write(reinterpret_cast<const char*>(value.data()), static_cast<std::streamsize>(value.size() * 8));
    }
    if (!out) throw CheckpointError("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
        throw CheckpointError("not a checkpoint (bad magic)");
    }
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint cp;
    cp.metadata = get_string(in, get<std::uint64_t>(in, "metadata length"), "metadata");
    const auto count = get<std::uint64_t>(in, "block count");
    for (std::uint64_t b = 0; b < count; ++b) {
        auto name = get_string(in, get<std::uint32_t>(in, "name length"), "block name");
        const auto rank = get<std::uint32_t>(in, "rank");
        if (rank > 16) throw CheckpointError("block '" + name + "' has implausible rank " + std::to_string(rank));
        tensor::Shape shape(rank);
        for (auto& d : shape) d = get<std::uint64_t>(in, "dimension");
        Array value(shape);
        if (value.size() > 0 &&
            !in.read(reinterpret_cast<char*>(value.data()), static_cast<std::streamsize>(value.size() * 8))) {
            throw CheckpointError("checkpoint truncated in block '" + name + "'");
        }
        cp.blocks.add(std::move(name), std::move(value));
    }
    return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
    write_checkpoint(out, checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    return read_checkpoint(in);
}

}  // namespace genboot::nn
