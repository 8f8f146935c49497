#pragma once

#include <cstdint>
#include <vector>

namespace deckpoly {

// SplitMix64. Deliberately not std::uniform_int_distribution: report
// determinism across platforms requires a pinned sampling scheme.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n), n >= 1, by rejection
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % n;
    }

    // uniform integer in [lo, hi] inclusive
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1u) != 0; }

    // uniform in [0,1) with 53 bits
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // k distinct values from [0, n), sorted
    std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k);

private:
    std::uint64_t state_;
};

inline std::vector<std::uint64_t> Rng::sample_distinct(std::uint64_t n, std::uint64_t k) {
    // Floyd's algorithm
    std::vector<std::uint64_t> out;
    std::vector<bool> seen;
    if (n <= 4 * k + 16) {
        seen.assign(n, false);
        std::uint64_t taken = 0;
        while (taken < k && taken < n) {
            std::uint64_t v = below(n);
            if (!seen[v]) { seen[v] = true; ++taken; }
        }
        for (std::uint64_t i = 0; i < n; ++i)
            if (seen[i]) out.push_back(i);
        return out;
    }
    seen.assign(n, false);
    for (std::uint64_t j = n - k; j < n; ++j) {
        std::uint64_t v = below(j + 1);
        if (seen[v]) v = j;
        seen[v] = true;
    }
    for (std::uint64_t i = 0; i < n; ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

} // namespace deckpoly
