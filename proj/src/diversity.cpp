#include "injectkit/diversity.hpp"

#include <algorithm>

namespace injectkit {

DiversityAccumulator::DiversityAccumulator(const WindowPartition& windows)
    : n_(windows.size()), length_(windows.length_seconds()), starts_(windows.start_times()), per_window_(n_) {}

void DiversityAccumulator::add(std::size_t window, std::uint64_t value) {
    ++per_window_[window][value];
    auto [it, inserted] = first_seen_.try_emplace(value, window);
    if (!inserted && window < it->second) it->second = window;
}

DiversitySeries DiversityAccumulator::finish(const std::string& feature) const {
    DiversitySeries out;
    for (auto* s : {&out.entropy, &out.novelty, &out.cumulative}) {
        s->feature_name = feature;
        s->window_length = length_;
        s->window_start_times = starts_;
        s->values.assign(n_, 0.0);
    }

    for (const auto& [value, window] : first_seen_) out.novelty.values[window] += 1.0;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted;
    for (std::size_t w = 0; w < n_; ++w) {
        const auto& bucket = per_window_[w];
        sorted.assign(bucket.begin(), bucket.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::uint64_t> flat;
        flat.reserve(sorted.size());
        for (const auto& [value, count] : sorted) {
            flat.push_back(count);
            out.totals[value] += count;
        }
        out.entropy.values[w] = entropy_of_counts(flat);
        // prefix entropy over the running totals, same routine and order as
        // the whole-capture entropy so the final window matches it exactly
        out.cumulative.values[w] = (bucket.empty() && w > 0) ? out.cumulative.values[w - 1] : entropy(out.totals);
    }
    return out;
}

} // namespace injectkit
