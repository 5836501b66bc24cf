#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evkit/event_core.hpp"

namespace evkit {

/// A grayscale intensity sequence, values in [0,1], strictly
/// increasing per-frame timestamps.
struct FrameSequence {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::vector<float>> frames; // each H*W, row-major
    std::vector<std::int64_t> timestamps;   // ns
};

/// Threshold-crossing simulator parameters. Contrast thresholds are in
/// log-intensity units. `threshold_jitter` is the standard deviation of
/// a per-pixel additive perturbation of both thresholds, drawn once per
/// pixel from a generator seeded with `seed`; zero disables the hook.
struct SynthConfig {
    double c_pos = 0.2;
    double c_neg = 0.2;
    double eps_log = 1e-3;
    std::int64_t refractory_ns = 0;
    double threshold_jitter = 0.0;
    std::uint64_t seed = 0;
};

/// Elementwise ln(I + eps_log).
std::vector<double> log_intensity(std::span<const float> frame, double eps_log);

/// Deterministic threshold-crossing event synthesis. Per pixel, a
/// reference level starts at the first frame's log intensity; between
/// consecutive frames the log intensity is linear in time, and every
/// crossing of reference + c_pos (or - c_neg) emits an event and moves
/// the reference by exactly that threshold. Crossing times are linearly
/// interpolated and rounded to the nearest nanosecond. Events closer
/// than refractory_ns to the previous emitted event of the same pixel
/// are dropped (the reference still advances). The output is globally
/// sorted by t, ties in row-major pixel order, and carries the window
/// [first timestamp, last timestamp + 1).
EventStream generate_events(const FrameSequence& sequence, const SynthConfig& config = {});

} // namespace evkit
