#ifndef PROPFLOW_RNG_HPP
#define PROPFLOW_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace propflow {

// All randomness in the project flows through this wrapper so experiment
// outputs can record the generator name, and so index/real mappings are
// pinned down rather than left to the standard library's discretion.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, n), n >= 1; multiply-shift mapping
    std::size_t next_index(std::size_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::size_t>(m >> 64);
    }

    // uniform in [lo, hi] inclusive
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_index(static_cast<std::size_t>(hi - lo + 1)));
    }

    // uniform in [0, 1)
    double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_real(double lo, double hi) { return lo + (hi - lo) * next_real(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // derive an independent stream for a sub-experiment
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9e3779b97f4a7c15ull));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace propflow

#endif
