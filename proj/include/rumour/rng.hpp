#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rumour {

/// Seeded generator with portable derived distributions.
///
/// std::uniform_int_distribution and friends are implementation-defined, so
/// shuffles and samples built on them differ between standard libraries.
/// mt19937_64 itself is fully specified; everything here is derived from its
/// raw output so results are identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    /// Standard normal deviate (Box-Muller, no cached second value).
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace rumour
