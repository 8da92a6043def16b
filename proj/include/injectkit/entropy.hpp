#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace injectkit {

/// Value -> occurrence count. Ordered so that every derived sum is computed
/// in the same order on every run.
using Counts = std::map<std::uint64_t, std::uint64_t>;

/// Shannon entropy in bits of the distribution given by raw counts.
/// Zero counts contribute nothing; an empty or all-zero input yields 0.
double entropy_of_counts(std::span<const std::uint64_t> counts) noexcept;

template <typename Map>
    requires requires(const Map& m) {
        { m.begin()->second } -> std::convertible_to<std::uint64_t>;
    }
double entropy(const Map& counts) {
    std::vector<std::uint64_t> flat;
    flat.reserve(counts.size());
    for (const auto& [value, count] : counts) flat.push_back(static_cast<std::uint64_t>(count));
    return entropy_of_counts(flat);
}

/// Entropy divided by log2 of the number of distinct values with a nonzero
/// count. A single distinct value gives 0. Throws EmptyInput when every
/// count is zero.
double normalized_entropy_of_counts(std::span<const std::uint64_t> counts);

template <typename Map>
double normalized_entropy(const Map& counts) {
    std::vector<std::uint64_t> flat;
    flat.reserve(counts.size());
    for (const auto& [value, count] : counts) flat.push_back(static_cast<std::uint64_t>(count));
    return normalized_entropy_of_counts(flat);
}

} // namespace injectkit
