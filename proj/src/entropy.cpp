#include "injectkit/entropy.hpp"

#include <algorithm>

#include "injectkit/error.hpp"

namespace injectkit {

double entropy_of_counts(std::span<const std::uint64_t> counts) noexcept {
    long double total = 0;
    for (auto c : counts) total += static_cast<long double>(c);
    if (total <= 0) return 0.0;
    long double h = 0;
    for (auto c : counts) {
        if (c == 0) continue;
        const long double p = static_cast<long double>(c) / total;
        h -= p * std::log2(p);
    }
    // rounding can leave a tiny negative value for a single symbol
    return std::max(0.0, static_cast<double>(h));
}

double normalized_entropy_of_counts(std::span<const std::uint64_t> counts) {
    const auto distinct = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
    if (distinct == 0) throw Error(Errc::EmptyInput, "normalized entropy of an empty distribution");
    if (distinct == 1) return 0.0;
    const double h = entropy_of_counts(counts) / std::log2(static_cast<double>(distinct));
    return std::clamp(h, 0.0, 1.0);
}

} // namespace injectkit
