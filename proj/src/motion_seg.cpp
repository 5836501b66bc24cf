#include "evkit/motion_seg.hpp"

#include <cmath>

namespace evkit {

void apply_mask(std::span<float> frame, std::size_t bins, const BinaryMask& mask) {
    const std::size_t plane = std::size_t(mask.width) * mask.height;
    if (mask.values.size() != plane) throw ShapeError("mask size does not match width*height");
    if (bins == 0 || frame.size() != bins * plane) {
        throw ShapeError("frame size does not match bins*height*width");
    }
    for (std::size_t i = 0; i < plane; ++i) {
        if (!mask.values[i]) continue;
        for (std::size_t b = 0; b < bins; ++b) frame[b * plane + i] = 0.0f;
    }
}

void apply_masks(VoxelGrid& grid, std::span<const BinaryMask> masks) {
    if (masks.empty()) throw InvalidArgument("no masks given");
    if (masks.size() != 1 && masks.size() != grid.frames) {
        throw ShapeError("mask count " + std::to_string(masks.size()) + " does not match " +
                         std::to_string(grid.frames) + " frames");
    }
    for (const BinaryMask& m : masks) {
        if (m.width != grid.width || m.height != grid.height) {
            throw ShapeError("mask dimensions do not match grid");
        }
    }
    for (std::size_t t = 0; t < grid.frames; ++t) {
        apply_mask(grid.frame(t), grid.bins, masks.size() == 1 ? masks[0] : masks[t]);
    }
    grid.mask_applied = true;
    grid.provenance.push_back("mask");
}

double bce_loss(const SoftMask& pred, const BinaryMask& gt, double clamp_eps) {
    if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
        throw InvalidArgument("clamp_eps must be in (0, 0.5)");
    }
    if (pred.width != gt.width || pred.height != gt.height) {
        throw ShapeError("prediction/ground-truth dimensions differ");
    }
    const std::size_t n = std::size_t(pred.width) * pred.height;
    if (pred.values.size() != n || gt.values.size() != n) {
        throw ShapeError("mask size does not match width*height");
    }
    if (n == 0) throw ShapeError("empty masks");

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = pred.values[i];
        if (p < clamp_eps) p = clamp_eps;
        if (p > 1.0 - clamp_eps) p = 1.0 - clamp_eps;
        sum -= gt.values[i] ? std::log(p) : std::log(1.0 - p);
    }
    return sum / double(n);
}

BinaryMask threshold_mask(const SoftMask& pred, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("tau must be in [0,1]");
    BinaryMask out = make_empty_mask(pred.width, pred.height);
    if (pred.values.size() != out.values.size()) {
        throw ShapeError("mask size does not match width*height");
    }
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        out.values[i] = pred.values[i] >= tau ? 1 : 0;
    }
    return out;
}

double mask_iou(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw ShapeError("prediction/ground-truth dimensions differ");
    }
    if (pred.values.size() != gt.values.size()) {
        throw ShapeError("mask size does not match width*height");
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        const bool a = pred.values[i] != 0;
        const bool b = gt.values[i] != 0;
        inter += a && b;
        uni += a || b;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

} // namespace evkit
