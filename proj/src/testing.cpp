#include "evkit/testing.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace evkit {

EventStream make_random_stream(const RandomStreamSpec& spec, std::uint64_t seed) {
    if (spec.width == 0 || spec.height == 0) throw InvalidArgument("sensor must be non-empty");
    if (spec.t_begin > spec.t_end) throw InvalidArgument("invalid window");
    if (spec.count > 0 && spec.t_begin == spec.t_end) {
        throw InvalidArgument("empty window cannot hold events");
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint16_t> dx(0, spec.width - 1);
    std::uniform_int_distribution<std::uint16_t> dy(0, spec.height - 1);
    std::uniform_int_distribution<std::int64_t> dt(spec.t_begin, spec.t_end - 1);

    EventStream stream;
    stream.width = spec.width;
    stream.height = spec.height;
    stream.t_begin = spec.t_begin;
    stream.t_end = spec.t_end;
    stream.events.resize(spec.count);
    for (Event& e : stream.events) {
        e.t = dt(rng);
        e.x = dx(rng);
        e.y = dy(rng);
        e.p = (rng() & 1) ? 1 : -1;
    }
    std::stable_sort(stream.events.begin(), stream.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return stream;
}

BenchResult bench_voxelize(std::size_t events, std::uint16_t width, std::uint16_t height,
                           std::size_t bins) {
    RandomStreamSpec spec;
    spec.width = width;
    spec.height = height;
    spec.count = events;
    spec.t_begin = 0;
    spec.t_end = 1'000'000'000;
    const EventStream stream = make_random_stream(spec, 0xb0b5eed);

    VoxelizeOptions opts;
    opts.bins = bins;
    opts.jobs = 1;

    const auto start = std::chrono::steady_clock::now();
    const VoxelGrid grid = voxelize(stream, opts);
    const auto stop = std::chrono::steady_clock::now();

    BenchResult result;
    result.events = events;
    result.seconds = std::chrono::duration<double>(stop - start).count();
    result.events_per_second =
        result.seconds > 0.0 ? double(events) / result.seconds : 0.0;
    // Touch the output so the work cannot be elided.
    if (!grid.values.empty() && grid.values[0] > 2e9f) result.events = 0;
    return result;
}

} // namespace evkit
