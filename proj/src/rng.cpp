#include "genboot/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace genboot {

Rng make_stream(std::uint64_t master, std::span<const std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 2));
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    push(path.size());
    for (auto id : path) push(id);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return make_stream(master, std::span<const std::uint64_t>(path.begin(), path.size()));
}

Rng StreamFamily::at(std::uint64_t index) const {
    std::vector<std::uint64_t> path = prefix;
    path.push_back(index);
    return make_stream(master, path);
}

StreamFamily StreamFamily::child(std::uint64_t id) const {
    StreamFamily f{master, prefix};
    f.prefix.push_back(id);
    return f;
}

void fill_standard_normal(Rng& rng, std::span<double> out) {
    boost::random::normal_distribution<double> nd(0.0, 1.0);
    for (auto& x : out) x = nd(rng);
}

std::string serialize_state(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

Rng deserialize_state(const std::string& text) {
    std::istringstream is(text);
    Rng rng;
    is >> rng;
    if (!is) throw std::invalid_argument("rng state: malformed engine state");
    return rng;
}

}  // namespace genboot
