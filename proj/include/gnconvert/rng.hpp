#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace gnc {

// std::mt19937_64's output sequence is fixed by the standard but the
// <random> distributions are not, so the few draws we need are spelled out
// here to keep seeded runs identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal (Box-Muller, one value per call).
    double normal();

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gnc
