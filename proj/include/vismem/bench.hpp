#pragma once

#include <cstdint>
#include <vector>

namespace vismem {

struct BenchPoint {
    int n = 0, c = 0, h = 0, w = 0;
    double ms_per_read = 0.0;  // best observed round mean
};

// Times read() on a freshly built bank that has absorbed a few writes.
// One round = `reads_per_round` reads; the best round mean over `rounds` is
// returned (minimum-latency estimator, robust to scheduling noise).
BenchPoint bench_read(int n, int c, int h, int w, std::uint64_t seed, int rounds,
                      int reads_per_round);

// Interleaves rounds of the two spatial sizes and compares per-size bests, so
// transient load hits both sizes alike.
struct ScalingResult {
    BenchPoint small, big;
    double ratio = 0.0;
};

ScalingResult bench_scaling(int n, int c, int h_small, int h_big, std::uint64_t seed,
                            int rounds, int reads_per_round);

}  // namespace vismem
