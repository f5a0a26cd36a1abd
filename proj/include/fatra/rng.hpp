#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace fatra {

// All randomness flows from one user seed. Sub-streams use fixed offsets so
// that every consumer is reproducible independently of call order:
//   seed + 0  split masks
//   seed + 1  weight init
//   seed + 2  graph pool edits
//   seed + 3  pool presentation order
//   seed + 4  synthetic sampling
//   seed + 5  theory trials (plus trial index)
enum class SeedStream : std::uint64_t {
    Split = 0,
    Init = 1,
    Pool = 2,
    PoolOrder = 3,
    Synthetic = 4,
    Theory = 5,
};

inline std::uint64_t sub_seed(std::uint64_t seed, SeedStream s) {
    return seed + static_cast<std::uint64_t>(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double normal(double mean = 0.0, double stddev = 1.0) {
        std::normal_distribution<double> d(mean, stddev);
        return d(gen_);
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen_);
    }

    // inclusive bounds
    std::size_t uniform_index(std::size_t lo, std::size_t hi) {
        std::uniform_int_distribution<std::size_t> d(lo, hi);
        return d(gen_);
    }

    bool bernoulli(double p) {
        std::bernoulli_distribution d(p);
        return d(gen_);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        std::shuffle(v.begin(), v.end(), gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace fatra
