#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "injectkit/entropy.hpp"
#include "injectkit/windows.hpp"

namespace injectkit {

/// The three per-window diversity series for one feature.
struct DiversitySeries {
    TimeWindowSeries entropy;     // entropy of the values inside each window
    TimeWindowSeries novelty;     // values first seen in each window
    TimeWindowSeries cumulative;  // entropy of all values up to each window
    Counts totals;                // whole-capture counts
};

/// Collects (window, value) observations for one feature. Observations may
/// arrive in any window order.
class DiversityAccumulator {
public:
    explicit DiversityAccumulator(const WindowPartition& windows);

    void add(std::size_t window, std::uint64_t value);

    DiversitySeries finish(const std::string& feature) const;

private:
    std::size_t n_;
    double length_;
    std::vector<double> starts_;
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> per_window_;
    std::unordered_map<std::uint64_t, std::size_t> first_seen_;
};

} // namespace injectkit
