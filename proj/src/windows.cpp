#include "injectkit/windows.hpp"

#include <algorithm>
#include <cmath>

#include "injectkit/error.hpp"

namespace injectkit {

WindowSpec WindowSpec::count(std::size_t n) {
    if (n == 0) throw Error(Errc::InvalidValue, "window count must be at least 1");
    WindowSpec s;
    s.by_count_ = true;
    s.count_ = n;
    return s;
}

WindowSpec WindowSpec::seconds(double length) {
    const auto us = static_cast<TimeUs>(std::llround(length * 1e6));
    if (!(length > 0.0) || us <= 0) throw Error(Errc::InvalidValue, "window length must be positive");
    WindowSpec s;
    s.by_count_ = false;
    s.count_ = 0;
    s.length_us_ = us;
    return s;
}

std::string WindowSpec::cache_tag() const {
    if (by_count_) return "n" + std::to_string(count_);
    // whole milliseconds when exact, otherwise microsecond precision
    if (length_us_ % 1000 == 0) return std::to_string(length_us_ / 1000);
    return std::to_string(length_us_ / 1000) + "." + std::to_string(length_us_ % 1000);
}

WindowPartition::WindowPartition(TimeUs start, TimeUs end, const WindowSpec& spec)
    : start_(start), span_(std::max<TimeUs>(0, end - start)) {
    if (spec.by_count()) {
        n_ = spec.window_count();
    } else {
        fixed_len_ = spec.window_length_us();
        n_ = static_cast<std::size_t>(std::max<TimeUs>(1, (span_ + fixed_len_ - 1) / fixed_len_));
    }
}

std::size_t WindowPartition::index_of(TimeUs t) const noexcept {
    if (t <= start_ || n_ == 1) return 0;
    const auto offset = static_cast<unsigned __int128>(t - start_);
    std::size_t w;
    if (fixed_len_ > 0) {
        w = static_cast<std::size_t>(offset / static_cast<unsigned __int128>(fixed_len_));
    } else if (span_ == 0) {
        w = 0;
    } else {
        w = static_cast<std::size_t>(offset * n_ / static_cast<unsigned __int128>(span_));
    }
    return std::min(w, n_ - 1);
}

TimeUs WindowPartition::start_us(std::size_t w) const noexcept {
    if (fixed_len_ > 0) return start_ + static_cast<TimeUs>(w) * fixed_len_;
    // smallest t with index_of(t) >= w, i.e. ceil(w * span / n)
    const auto num = static_cast<unsigned __int128>(w) * static_cast<unsigned __int128>(span_);
    return start_ + static_cast<TimeUs>((num + n_ - 1) / n_);
}

double WindowPartition::length_seconds() const noexcept {
    if (fixed_len_ > 0) return static_cast<double>(fixed_len_) / 1e6;
    return static_cast<double>(span_) / 1e6 / static_cast<double>(n_);
}

std::vector<double> WindowPartition::start_times() const {
    std::vector<double> out(n_);
    for (std::size_t w = 0; w < n_; ++w) out[w] = static_cast<double>(start_us(w)) / 1e6;
    return out;
}

} // namespace injectkit
