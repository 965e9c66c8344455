#pragma once

// Deterministic random utilities. mt19937_64 output is fully specified by the
// standard; the transforms below avoid std::uniform_*_distribution, whose
// algorithms are implementation-defined, so seeded runs are reproducible
// across compilers and platforms.

#include <cstdint>
#include <random>
#include <vector>

namespace seghyp {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n >= 1. Rejection-free modulo is avoided to
    /// keep the draw unbiased.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (deterministic, no cached spare).
    double normal();

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// Deterministic stream splitting: derive an independent child seed from a
/// parent seed and a stream index (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

}  // namespace seghyp
