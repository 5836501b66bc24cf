#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evkit/errors.hpp"

namespace evkit {

/// One brightness-change event. Timestamps are integer nanoseconds;
/// polarity is exactly -1 or +1.
struct Event {
    std::int64_t t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int8_t p = 1;

    friend bool operator==(const Event&, const Event&) = default;
};

/// A time-ordered event cloud with sensor geometry and a half-open
/// validity window [t_begin, t_end). Every event must satisfy
/// t_begin <= t < t_end, x < width, y < height, and the sequence is
/// non-decreasing in t (input order is kept for equal timestamps).
struct EventStream {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::int64_t t_begin = 0;
    std::int64_t t_end = 0;
    std::vector<Event> events;

    std::size_t size() const noexcept { return events.size(); }
    bool empty() const noexcept { return events.empty(); }

    friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// A single invariant violation. `index` is the offending event index,
/// or -1 for stream-level problems (e.g. t_begin > t_end).
struct Violation {
    std::int64_t index = -1;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

/// Checks all EventStream invariants. Reports up to `max_violations`
/// offending indices; never throws.
ValidationReport validate_stream(const EventStream& stream,
                                 std::size_t max_violations = 10);

/// Returns the sub-stream of events with t0 <= t < t1, order preserved,
/// with the validity window set to [t0, t1). Requires a sorted stream.
/// Throws InvalidArgument if t0 > t1.
EventStream slice_time(const EventStream& stream, std::int64_t t0, std::int64_t t1);

} // namespace evkit
