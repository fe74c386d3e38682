#include "vismem/bench.hpp"

#include <chrono>
#include <memory>

#include "vismem/memory.hpp"
#include "vismem/rand.hpp"

namespace vismem {

namespace {

FeatureCube random_cube(Rng& rng, int c, int h, int w, double scale) {
    FeatureCube x(c, h, w);
    for (std::size_t i = 0; i < x.size(); ++i)
        x.data()[i] = static_cast<float>(rng.normal() * scale);
    return x;
}

struct BenchSetup {
    VisualMemory bank;
    std::vector<FeatureCube> queries;

    BenchSetup(int n, int c, int h, int w, std::uint64_t seed)
        : bank(n, c, h, w, 5.0, 5.0, seed) {
        Rng rng(seed + 1);
        for (int i = 0; i < 8; ++i) bank.write(random_cube(rng, c, h, w, 3.0));
        for (int i = 0; i < 4; ++i) queries.push_back(random_cube(rng, c, h, w, 3.0));
    }

    double round_ms(int reads) {
        auto t0 = std::chrono::steady_clock::now();
        double sink = 0.0;
        for (int i = 0; i < reads; ++i)
            sink += bank.read(queries[i % queries.size()]).confidence;
        auto t1 = std::chrono::steady_clock::now();
        if (sink == -12345.0) return -1.0;  // keep the loop observable
        return std::chrono::duration<double, std::milli>(t1 - t0).count() / reads;
    }
};

}  // namespace

BenchPoint bench_read(int n, int c, int h, int w, std::uint64_t seed, int rounds,
                      int reads_per_round) {
    BenchSetup setup(n, c, h, w, seed);
    setup.round_ms(1);  // warm plan cache and page in the bank
    double best = 1e300;
    for (int r = 0; r < rounds; ++r) {
        double ms = setup.round_ms(reads_per_round);
        if (ms < best) best = ms;
    }
    return {n, c, h, w, best};
}

ScalingResult bench_scaling(int n, int c, int h_small, int h_big, std::uint64_t seed,
                            int rounds, int reads_per_round) {
    BenchSetup small(n, c, h_small, h_small, seed);
    BenchSetup big(n, c, h_big, h_big, seed);
    small.round_ms(1);
    big.round_ms(1);
    ScalingResult res;
    res.small = {n, c, h_small, h_small, 1e300};
    res.big = {n, c, h_big, h_big, 1e300};
    for (int r = 0; r < rounds; ++r) {
        double ms_s = small.round_ms(reads_per_round);
        double ms_b = big.round_ms(reads_per_round);
        if (ms_s < res.small.ms_per_read) res.small.ms_per_read = ms_s;
        if (ms_b < res.big.ms_per_read) res.big.ms_per_read = ms_b;
    }
    res.ratio = res.big.ms_per_read / res.small.ms_per_read;
    return res;
}

}  // namespace vismem
