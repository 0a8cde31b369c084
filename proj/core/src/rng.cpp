#include "trigof/rng.hpp"

namespace trigof::rng {

namespace {
constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_key(std::uint64_t seed, std::uint64_t cell, std::uint64_t replication) noexcept {
    std::uint64_t k = mix64(seed + golden);
    k = mix64(k ^ (cell * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    k = mix64(k ^ (replication * 0xaf251af3b0f025b5ULL + 0x632be59bd9b4e019ULL));
    return k;
}

std::uint64_t Stream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * golden);
}

double Stream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace trigof::rng
