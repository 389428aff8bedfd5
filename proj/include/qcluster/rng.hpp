#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qcluster {

// Thin wrapper over mt19937_64 with hand-rolled variate transforms so that
// generated streams depend only on the seed, not on the standard library's
// distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double mean) {
        // Inverse transform; uniform() < 1 keeps the log argument positive.
        return -mean * std::log(1.0 - uniform());
    }

    std::uint64_t next_u64() { return gen_(); }

    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace qcluster
