#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evkit/event_core.hpp"

namespace evkit {

enum class NormMode { Frame, Bin, Grid };

const char* to_string(NormMode mode);
NormMode norm_mode_from_string(const std::string& name);

/// Dense T x B x H x W grid of temporally binned polarity. Values are
/// 32-bit floats stored with bins outermost within a frame, so each
/// per-bin image is a contiguous H*W block.
struct VoxelGrid {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::uint32_t fps = 0;
    bool normalized = false;
    bool mask_applied = false;
    std::vector<std::string> provenance; // pipeline steps, in application order
    std::vector<float> values;           // [T][B][H][W]

    std::size_t frame_size() const noexcept { return bins * height * width; }
    std::size_t index(std::size_t t, std::size_t b, std::size_t y, std::size_t x) const noexcept {
        return ((t * bins + b) * height + y) * width + x;
    }
    float at(std::size_t t, std::size_t b, std::size_t y, std::size_t x) const {
        return values[index(t, b, y, x)];
    }
    std::span<float> frame(std::size_t t) {
        return {values.data() + t * frame_size(), frame_size()};
    }
    std::span<const float> frame(std::size_t t) const {
        return {values.data() + t * frame_size(), frame_size()};
    }
};

struct FrameSlice {
    std::size_t frame = 0;
    EventStream events;
};

/// Splits the stream's validity window into frames of width
/// 10^9 / fps nanoseconds (integer division); the last frame absorbs
/// the remainder so the slices exactly partition [t_begin, t_end).
/// An empty window yields zero frames.
std::vector<FrameSlice> segment_stream(const EventStream& stream, std::uint32_t fps);

/// Accumulates one frame's events into a B x H x W voxel block with
/// bilinear temporal weighting: the normalized bin coordinate is
/// t* = (t - t_start) / (t_end - t_start) * (B - 1), and polarity p
/// contributes p*(1-frac) to bin floor(t*) and p*frac to the next bin.
/// For B = 1 all weight goes to bin 0. Cells accumulate in event order.
/// Throws InvalidArgument on an empty window or B = 0, ShapeError on an
/// out-of-bounds pixel, and InvalidArgument on an out-of-window event.
std::vector<float> accumulate_frame(std::span<const Event> events,
                                    std::int64_t t_start, std::int64_t t_end,
                                    std::size_t bins, std::size_t height, std::size_t width);

/// Min-max normalization over the whole block, in place:
/// out = (v - min) / (max - min). A constant block becomes all zeros.
void normalize_frame(std::span<float> frame);

struct VoxelizeOptions {
    std::uint32_t fps = 30;
    std::size_t bins = 3;
    bool normalize = true;
    NormMode norm_mode = NormMode::Frame;
    unsigned jobs = 1;
};

/// Full pipeline: segment_stream -> accumulate_frame per frame ->
/// optional normalization. Frames may be processed in parallel
/// (`jobs` threads); the output is bit-identical for any job count.
VoxelGrid voxelize(const EventStream& stream, const VoxelizeOptions& options = {});

/// Applies the requested normalization mode to a raw grid, in place.
void normalize_grid(VoxelGrid& grid, NormMode mode);

} // namespace evkit
