#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "injectkit/pcap_io.hpp"

namespace injectkit {

inline constexpr std::size_t kDefaultWindowCount = 100;

/// How a capture span is cut into windows: either a fixed number of equal
/// windows, or windows of a fixed length in seconds.
class WindowSpec {
public:
    static WindowSpec count(std::size_t n);
    static WindowSpec seconds(double length);
    static WindowSpec defaults() { return count(kDefaultWindowCount); }

    bool by_count() const noexcept { return by_count_; }
    std::size_t window_count() const noexcept { return count_; }
    TimeUs window_length_us() const noexcept { return length_us_; }

    /// File-name fragment identifying this spec in the stats cache:
    /// "<ms>" for seconds windows, "n<count>" for equal-count windows.
    std::string cache_tag() const;

    bool operator==(const WindowSpec&) const = default;

private:
    bool by_count_ = true;
    std::size_t count_ = kDefaultWindowCount;
    TimeUs length_us_ = 0;
};

/// Contiguous, non-overlapping windows covering [start, end]. The packet at
/// `end` belongs to the last window.
class WindowPartition {
public:
    WindowPartition(TimeUs start, TimeUs end, const WindowSpec& spec);

    std::size_t size() const noexcept { return n_; }
    std::size_t index_of(TimeUs t) const noexcept;

    TimeUs start_us(std::size_t w) const noexcept;
    TimeUs end_us(std::size_t w) const noexcept { return start_us(w + 1); }

    /// Window length in seconds (exact, may be fractional microseconds).
    double length_seconds() const noexcept;
    std::vector<double> start_times() const;

private:
    TimeUs start_;
    TimeUs span_;
    std::size_t n_;
    TimeUs fixed_len_ = 0;  // nonzero for seconds windows
};

struct TimeWindowSeries {
    std::string feature_name;
    double window_length = 0.0;
    std::vector<double> window_start_times;  // UNIX epoch seconds
    std::vector<double> values;

    bool operator==(const TimeWindowSeries&) const = default;
};

} // namespace injectkit
