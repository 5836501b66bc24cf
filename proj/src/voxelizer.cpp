#include "evkit/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace evkit {

namespace {

constexpr std::int64_t kNsPerSecond = 1'000'000'000;

// Frame boundaries b_0..b_T for the window; b_T = t_end absorbs the
// remainder of the integer frame width.
std::vector<std::int64_t> frame_boundaries(std::int64_t t_begin, std::int64_t t_end,
                                           std::uint32_t fps) {
    if (fps == 0) throw InvalidArgument("fps must be > 0");
    if (t_begin > t_end) throw InvalidArgument("invalid window: t_begin > t_end");

    const std::int64_t span = t_end - t_begin;
    if (span == 0) return {};

    using i128 = __int128;
    const i128 frames = (i128(span) * fps + (kNsPerSecond - 1)) / kNsPerSecond;
    if (frames > (i128(1) << 40)) {
        throw InvalidArgument("window too large for the requested fps");
    }
    const auto t = static_cast<std::size_t>(frames);
    const std::int64_t delta = kNsPerSecond / fps;

    std::vector<std::int64_t> bounds(t + 1);
    for (std::size_t k = 0; k < t; ++k) bounds[k] = t_begin + static_cast<std::int64_t>(k) * delta;
    bounds[t] = t_end;
    return bounds;
}

// Event index ranges per frame, one linear sweep over the sorted stream.
std::vector<std::size_t> frame_offsets(const EventStream& stream,
                                       const std::vector<std::int64_t>& bounds) {
    if (bounds.empty()) return {};
    const std::size_t t = bounds.size() - 1;
    std::vector<std::size_t> offsets(t + 1, 0);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < t; ++k) {
        offsets[k] = idx;
        while (idx < stream.events.size() && stream.events[idx].t < bounds[k + 1]) ++idx;
    }
    offsets[t] = stream.events.size();
    return offsets;
}

void accumulate_into(std::span<const Event> events, std::int64_t t_start, std::int64_t t_end,
                     std::size_t bins, std::size_t height, std::size_t width,
                     std::vector<double>& scratch, std::span<float> out) {
    const std::size_t plane = height * width;
    std::fill(scratch.begin(), scratch.end(), 0.0);

    const double span = static_cast<double>(t_end - t_start);
    const double bin_scale = static_cast<double>(bins - 1);
    for (const Event& e : events) {
        if (e.t < t_start || e.t >= t_end) {
            throw InvalidArgument("accumulate_frame: event at t=" + std::to_string(e.t) +
                                  " outside window [" + std::to_string(t_start) + ", " +
                                  std::to_string(t_end) + ")");
        }
        if (e.x >= width || e.y >= height) {
            throw ShapeError("accumulate_frame: pixel (" + std::to_string(e.x) + "," +
                             std::to_string(e.y) + ") outside " + std::to_string(width) + "x" +
                             std::to_string(height));
        }
        const double tstar = static_cast<double>(e.t - t_start) / span * bin_scale;
        auto bin = static_cast<std::size_t>(tstar);
        double frac = tstar - static_cast<double>(bin);
        if (bin >= bins - 1) { // rounding can push t* to exactly B-1
            bin = bins - 1;
            frac = 0.0;
        }
        const std::size_t cell = bin * plane + std::size_t(e.y) * width + e.x;
        scratch[cell] += e.p * (1.0 - frac);
        if (frac > 0.0) scratch[cell + plane] += e.p * frac;
    }

    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(scratch[i]);
}

} // namespace

const char* to_string(NormMode mode) {
    switch (mode) {
        case NormMode::Frame: return "frame";
        case NormMode::Bin: return "bin";
        case NormMode::Grid: return "grid";
    }
    return "frame";
}

NormMode norm_mode_from_string(const std::string& name) {
    if (name == "frame") return NormMode::Frame;
    if (name == "bin") return NormMode::Bin;
    if (name == "grid") return NormMode::Grid;
    throw InvalidArgument("unknown normalization mode: " + name);
}

std::vector<FrameSlice> segment_stream(const EventStream& stream, std::uint32_t fps) {
    const auto bounds = frame_boundaries(stream.t_begin, stream.t_end, fps);
    if (bounds.empty()) return {};
    const auto offsets = frame_offsets(stream, bounds);

    const std::size_t t = bounds.size() - 1;
    std::vector<FrameSlice> slices;
    slices.reserve(t);
    for (std::size_t k = 0; k < t; ++k) {
        FrameSlice slice;
        slice.frame = k;
        slice.events.width = stream.width;
        slice.events.height = stream.height;
        slice.events.t_begin = bounds[k];
        slice.events.t_end = bounds[k + 1];
        slice.events.events.assign(stream.events.begin() + offsets[k],
                                   stream.events.begin() + offsets[k + 1]);
        slices.push_back(std::move(slice));
    }
    return slices;
}

std::vector<float> accumulate_frame(std::span<const Event> events,
                                    std::int64_t t_start, std::int64_t t_end,
                                    std::size_t bins, std::size_t height, std::size_t width) {
    if (bins == 0) throw InvalidArgument("accumulate_frame: bins must be >= 1");
    if (t_start >= t_end) throw InvalidArgument("accumulate_frame: empty window");

    std::vector<float> out(bins * height * width, 0.0f);
    std::vector<double> scratch(out.size());
    accumulate_into(events, t_start, t_end, bins, height, width, scratch, out);
    return out;
}

void normalize_frame(std::span<float> frame) {
    if (frame.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(frame.begin(), frame.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        std::fill(frame.begin(), frame.end(), 0.0f);
        return;
    }
    const double range = hi - lo;
    for (float& v : frame) v = static_cast<float>((v - lo) / range);
}

VoxelGrid voxelize(const EventStream& stream, const VoxelizeOptions& options) {
    if (options.bins == 0) throw InvalidArgument("voxelize: bins must be >= 1");

    const auto bounds = frame_boundaries(stream.t_begin, stream.t_end, options.fps);
    const std::size_t t = bounds.empty() ? 0 : bounds.size() - 1;
    const auto offsets = frame_offsets(stream, bounds);

    VoxelGrid grid;
    grid.frames = t;
    grid.bins = options.bins;
    grid.height = stream.height;
    grid.width = stream.width;
    grid.fps = options.fps;
    grid.values.assign(t * options.bins * stream.height * stream.width, 0.0f);
    grid.provenance.push_back("voxelize(fps=" + std::to_string(options.fps) +
                              ",bins=" + std::to_string(options.bins) + ")");

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, t == 0 ? 1 : static_cast<unsigned>(t)));
    auto work = [&](std::size_t first, std::size_t last) {
        std::vector<double> scratch(grid.frame_size());
        for (std::size_t k = first; k < last; ++k) {
            std::span<const Event> events{stream.events.data() + offsets[k],
                                          offsets[k + 1] - offsets[k]};
            accumulate_into(events, bounds[k], bounds[k + 1], grid.bins, grid.height, grid.width,
                            scratch, grid.frame(k));
        }
    };

    if (jobs == 1 || t <= 1) {
        if (t > 0) work(0, t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            const std::size_t first = t * j / jobs;
            const std::size_t last = t * (j + 1) / jobs;
            pool.emplace_back(work, first, last);
        }
        for (auto& th : pool) th.join();
    }

    if (options.normalize) normalize_grid(grid, options.norm_mode);
    return grid;
}

void normalize_grid(VoxelGrid& grid, NormMode mode) {
    switch (mode) {
        case NormMode::Frame:
            for (std::size_t k = 0; k < grid.frames; ++k) normalize_frame(grid.frame(k));
            break;
        case NormMode::Bin: {
            const std::size_t plane = grid.height * grid.width;
            for (std::size_t k = 0; k < grid.frames; ++k) {
                for (std::size_t b = 0; b < grid.bins; ++b) {
                    normalize_frame(grid.frame(k).subspan(b * plane, plane));
                }
            }
            break;
        }
        case NormMode::Grid:
            normalize_frame(grid.values);
            break;
    }
    grid.normalized = true;
    grid.provenance.push_back(std::string("normalize(") + to_string(mode) + ")");
}

} // namespace evkit
