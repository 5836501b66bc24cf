#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evkit/errors.hpp"
#include "evkit/mask_gen.hpp"
#include "evkit/voxelizer.hpp"

namespace evkit {

struct SoftMask {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<float> values; // row-major, each in [0,1]

    float& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
    float at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
    bool operator==(const SoftMask&) const = default;
};

// Zeroes every bin of each masked pixel in one B x H x W frame, in place.
void apply_mask(std::span<float> frame, std::size_t bins, const BinaryMask& mask);

// One mask per frame, or a single mask reused for every frame. Sets the
// grid's mask_applied flag.
void apply_masks(VoxelGrid& grid, std::span<const BinaryMask> masks);

// Mean of -[M ln(M^) + (1 - M) ln(1 - M^)] with predictions clamped to
// [clamp_eps, 1 - clamp_eps] before the logs.
double bce_loss(const SoftMask& pred, const BinaryMask& gt, double clamp_eps = 1e-7);

// Pixel set iff value >= tau.
BinaryMask threshold_mask(const SoftMask& pred, double tau = 0.5);

// |pred n gt| / |pred u gt|; 1 when both masks are empty.
double mask_iou(const BinaryMask& pred, const BinaryMask& gt);

} // namespace evkit
