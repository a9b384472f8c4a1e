#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wosr {

using cplx = std::complex<double>;

// Error taxonomy; the CLI maps these onto exit codes.
struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidState : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64 step; the workhorse for deriving per-record seeds.
uint64_t splitmix64(uint64_t& state);

// Hash-combine seeds into a new 64-bit seed. Order-sensitive.
uint64_t mix_seed(uint64_t a, uint64_t b);
uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c);

// Deterministic RNG: mt19937_64 engine (output sequence fixed by the
// standard) with explicit transforms on top, so streams are reproducible
// across standard libraries. std::*_distribution is never used.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }
    double uniform();                             // [0, 1)
    double uniform(double lo, double hi);         // [lo, hi)
    int64_t uniform_int(int64_t lo, int64_t hi);  // inclusive bounds
    double gauss();                               // N(0, 1), Box-Muller
    cplx cgauss();                                // circular complex, E|z|^2 = 1

    // k distinct indices out of [0, n), partial Fisher-Yates order.
    std::vector<size_t> sample_without_replacement(size_t n, size_t k);

private:
    std::mt19937_64 engine_;
    bool have_gauss_ = false;
    double cached_gauss_ = 0.0;
};

// Max worker threads: WOSR_THREADS env var if set, else hardware_concurrency.
size_t thread_budget();

// Runs fn(begin, end) over disjoint chunks of [0, n). Results must not depend
// on the partition; callers only write disjoint outputs per index.
void parallel_for(size_t n, const std::function<void(size_t, size_t)>& fn,
                  size_t min_chunk = 1);

uint32_t crc32(const void* data, size_t len, uint32_t crc = 0);
uint64_t fnv1a64(std::string_view s);

}  // namespace wosr
