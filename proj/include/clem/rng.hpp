#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace clem {

// mt19937_64 with hand-rolled draw functions. std:: distributions are
// implementation-defined, so sampling goes through these helpers to keep
// seeded streams byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform integer in [lo, hi], rejection-sampled to stay unbiased
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        if (span == 0) return gen_();  // full 64-bit range
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % span;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return lo + x % span;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_int(0, n - 1)); }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return mean + stddev * (u * f);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    // k distinct indices from [0, n), order arbitrary but deterministic
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            std::swap(idx[i], idx[i + uniform_int(0, n - 1 - i)]);
        }
        idx.resize(k < n ? k : n);
        return idx;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace clem
