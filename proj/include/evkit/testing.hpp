#pragma once

#include <cstdint>

#include "evkit/event_core.hpp"
#include "evkit/voxelizer.hpp"

namespace evkit {

struct RandomStreamSpec {
    std::uint16_t width = 64;
    std::uint16_t height = 64;
    std::size_t count = 1000;
    std::int64_t t_begin = 0;
    std::int64_t t_end = 100'000'000;
};

// Deterministic for a given seed: uniform pixels and timestamps in the
// window, polarity +-1, sorted by t.
EventStream make_random_stream(const RandomStreamSpec& spec, std::uint64_t seed);

struct BenchResult {
    std::size_t events = 0;
    double seconds = 0.0;
    double events_per_second = 0.0;
};

// Times a single-threaded voxelize run over a synthetic 1-second stream.
BenchResult bench_voxelize(std::size_t events, std::uint16_t width, std::uint16_t height,
                           std::size_t bins);

} // namespace evkit
