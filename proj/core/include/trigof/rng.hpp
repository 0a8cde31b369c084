#pragma once

#include <cstdint>

namespace trigof::rng {

std::uint64_t mix64(std::uint64_t x) noexcept;

// Key of the substream for (seed, cell, replication).
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t cell, std::uint64_t replication) noexcept;

// Counter-based generator: the i-th output is mix64(key + i * golden), so a
// stream is fully determined by its key and position, independent of how
// work is scheduled across threads.
class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept : key_(key) {}
    static Stream substream(std::uint64_t seed, std::uint64_t cell, std::uint64_t replication) noexcept {
        return Stream(substream_key(seed, cell, replication));
    }

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform() noexcept;
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace trigof::rng
