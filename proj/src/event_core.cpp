#include "evkit/event_core.hpp"

#include <algorithm>

namespace evkit {

ValidationReport validate_stream(const EventStream& stream, std::size_t max_violations) {
    ValidationReport report;
    auto add = [&](std::int64_t index, std::string message) {
        report.ok = false;
        if (report.violations.size() < max_violations) {
            report.violations.push_back({index, std::move(message)});
        }
    };
    auto full = [&] { return report.violations.size() >= max_violations; };

    if (stream.t_begin > stream.t_end) {
        add(-1, "window invalid: t_begin " + std::to_string(stream.t_begin) +
                    " > t_end " + std::to_string(stream.t_end));
    }

    std::int64_t prev_t = stream.t_begin;
    for (std::size_t i = 0; i < stream.events.size() && !full(); ++i) {
        const Event& e = stream.events[i];
        if (e.x >= stream.width) {
            add(static_cast<std::int64_t>(i),
                "x " + std::to_string(e.x) + " out of sensor width " + std::to_string(stream.width));
        }
        if (e.y >= stream.height) {
            add(static_cast<std::int64_t>(i),
                "y " + std::to_string(e.y) + " out of sensor height " + std::to_string(stream.height));
        }
        if (e.p != -1 && e.p != 1) {
            add(static_cast<std::int64_t>(i), "polarity not in {-1,+1}");
        }
        if (e.t < stream.t_begin || e.t >= stream.t_end) {
            add(static_cast<std::int64_t>(i),
                "timestamp " + std::to_string(e.t) + " outside window [" +
                    std::to_string(stream.t_begin) + ", " + std::to_string(stream.t_end) + ")");
        }
        if (i > 0 && e.t < prev_t) {
            add(static_cast<std::int64_t>(i), "unsorted at index " + std::to_string(i));
        }
        prev_t = e.t;
    }
    return report;
}

EventStream slice_time(const EventStream& stream, std::int64_t t0, std::int64_t t1) {
    if (t0 > t1) {
        throw InvalidArgument("slice_time: invalid range, t0 " + std::to_string(t0) +
                              " > t1 " + std::to_string(t1));
    }
    auto by_time = [](const Event& e, std::int64_t t) { return e.t < t; };
    auto first = std::lower_bound(stream.events.begin(), stream.events.end(), t0, by_time);
    auto last = std::lower_bound(first, stream.events.end(), t1, by_time);

    EventStream out;
    out.width = stream.width;
    out.height = stream.height;
    out.t_begin = t0;
    out.t_end = t1;
    out.events.assign(first, last);
    return out;
}

} // namespace evkit
