#include "evkit/event_synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace evkit {

namespace {

void check_sequence(const FrameSequence& seq) {
    if (seq.frames.empty()) throw ValidationError("frame sequence is empty");
    if (seq.timestamps.size() != seq.frames.size()) {
        throw ValidationError("frame/timestamp count mismatch: " +
                              std::to_string(seq.frames.size()) + " frames, " +
                              std::to_string(seq.timestamps.size()) + " timestamps");
    }
    const std::size_t pixels = std::size_t(seq.width) * seq.height;
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        if (seq.frames[k].size() != pixels) {
            throw ValidationError("frame " + std::to_string(k) + " has " +
                                  std::to_string(seq.frames[k].size()) + " pixels, expected " +
                                  std::to_string(pixels));
        }
        if (k > 0 && seq.timestamps[k] <= seq.timestamps[k - 1]) {
            throw ValidationError("timestamps not strictly increasing at frame " +
                                  std::to_string(k));
        }
        for (float v : seq.frames[k]) {
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw ValidationError("intensity outside [0,1] in frame " + std::to_string(k));
            }
        }
    }
}

void check_config(const SynthConfig& cfg) {
    if (!(cfg.c_pos > 0.0)) throw InvalidArgument("c_pos must be > 0");
    if (!(cfg.c_neg > 0.0)) throw InvalidArgument("c_neg must be > 0");
    if (!(cfg.eps_log > 0.0)) throw InvalidArgument("eps_log must be > 0");
    if (cfg.refractory_ns < 0) throw InvalidArgument("refractory_ns must be >= 0");
    if (cfg.threshold_jitter < 0.0) throw InvalidArgument("threshold_jitter must be >= 0");
}

struct RawEvent {
    std::int64_t t;
    std::uint32_t pix; // row-major, orders ties
    std::int8_t p;
};

} // namespace

std::vector<double> log_intensity(std::span<const float> frame, double eps_log) {
    std::vector<double> out(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out[i] = std::log(static_cast<double>(frame[i]) + eps_log);
    }
    return out;
}

EventStream generate_events(const FrameSequence& seq, const SynthConfig& cfg) {
    check_config(cfg);
    check_sequence(seq);

    EventStream out;
    out.width = seq.width;
    out.height = seq.height;
    out.t_begin = seq.timestamps.front();
    out.t_end = seq.timestamps.back() + 1;
    const std::size_t pixels = std::size_t(seq.width) * seq.height;
    if (seq.frames.size() < 2 || pixels == 0) return out;

    // Per-pixel thresholds; the jitter hook perturbs them once up front.
    std::vector<double> cpos, cneg;
    if (cfg.threshold_jitter > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> jitter(0.0, cfg.threshold_jitter);
        cpos.resize(pixels);
        cneg.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i) {
            cpos[i] = std::max(1e-6, cfg.c_pos + jitter(rng));
            cneg[i] = std::max(1e-6, cfg.c_neg + jitter(rng));
        }
    }

    std::vector<double> log_prev = log_intensity(seq.frames[0], cfg.eps_log);
    std::vector<double> ref = log_prev;
    std::vector<std::int64_t> last_emit(pixels, std::numeric_limits<std::int64_t>::min() / 2);

    std::vector<RawEvent> raw;
    for (std::size_t k = 0; k + 1 < seq.frames.size(); ++k) {
        const std::vector<double> log_cur = log_intensity(seq.frames[k + 1], cfg.eps_log);
        const std::int64_t ta = seq.timestamps[k];
        const std::int64_t tb = seq.timestamps[k + 1];
        const double dt = static_cast<double>(tb - ta);

        for (std::size_t pix = 0; pix < pixels; ++pix) {
            const double la = log_prev[pix];
            const double lb = log_cur[pix];
            if (la == lb) continue;

            const double cp = cpos.empty() ? cfg.c_pos : cpos[pix];
            const double cn = cneg.empty() ? cfg.c_neg : cneg[pix];
            const double r = ref[pix];

            auto emit = [&](std::int64_t t, std::int8_t p) {
                if (cfg.refractory_ns > 0 && t - last_emit[pix] < cfg.refractory_ns) return;
                last_emit[pix] = t;
                raw.push_back({t, static_cast<std::uint32_t>(pix), p});
            };

            // Crossings are swept as offsets above the interval's start level,
            // so a rising interval and its fallen mirror run the same
            // arithmetic; the reference still advances by exactly one
            // threshold per event.
            const bool rising = lb > la;
            const double span = rising ? lb - la : la - lb;
            const double c = rising ? cp : cn;
            const double o_start = rising ? r - la : la - r;
            double o = o_start;
            while (o + c <= span) {
                o += c;
                double frac = o / span;
                if (frac < 0.0) frac = 0.0;
                emit(ta + std::llround(frac * dt), rising ? +1 : -1);
            }
            if (o != o_start) ref[pix] = rising ? la + o : la - o;
        }
        log_prev = log_cur;
    }

    // Canonical order: by t, ties by row-major pixel, then emission order.
    // The buffer is already in per-pixel emission order, so a stable sort
    // on (t, pix) yields exactly that.
    std::stable_sort(raw.begin(), raw.end(), [](const RawEvent& a, const RawEvent& b) {
        return a.t != b.t ? a.t < b.t : a.pix < b.pix;
    });

    out.events.reserve(raw.size());
    for (const RawEvent& e : raw) {
        out.events.push_back({e.t, static_cast<std::uint16_t>(e.pix % seq.width),
                              static_cast<std::uint16_t>(e.pix / seq.width), e.p});
    }
    return out;
}

} // namespace evkit
