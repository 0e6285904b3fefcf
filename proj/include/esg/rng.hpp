#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace esg {

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded generator with platform-stable derived draws.
///
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// are done here by rejection on the raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    std::size_t below(std::size_t n)
    {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool chance(double p) { return unit() < p; }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <class T>
    const T& pick(std::span<const T> items)
    {
        return items[below(items.size())];
    }

    template <class Container>
    void shuffle(Container& c)
    {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::size_t j = below(i);
            using std::swap;
            swap(c[i - 1], c[j]);
        }
    }

    Rng fork(std::uint64_t salt) { return Rng(mix_seed(engine_(), salt)); }

private:
    std::mt19937_64 engine_;
};

} // namespace esg
