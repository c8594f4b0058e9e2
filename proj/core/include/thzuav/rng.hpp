#pragma once

#include <cstdint>
#include <random>

namespace thzuav {

// mt19937_64 with fixed bit-to-double conversions, so draws do not depend on
// the standard library's distribution implementations.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n), n > 0; rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do
            x = engine_();
        while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace thzuav
