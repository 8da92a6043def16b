#pragma once

// Helpers shared by the attack generators. Not installed.

#include <optional>

#include "injectkit/attacks.hpp"
#include "injectkit/error.hpp"
#include "injectkit/rng.hpp"

namespace injectkit::detail {

inline constexpr std::uint16_t kDynamicPortLow = 49152;

inline std::uint16_t dynamic_port(Rng& rng) {
    return static_cast<std::uint16_t>(rng.uniform_between(kDynamicPortLow, 65535));
}

/// Delay before a host answers a segment, in microseconds.
inline TimeUs reply_delay(Rng& rng) { return static_cast<TimeUs>(rng.uniform_between(150, 900)); }

/// Background packets per second in the db's own windows.
const TimeWindowSeries& background_rate(const StatsDb& db);

/// Header-field samplers for one host: its own sent-packet distributions
/// when it has any, else the whole-capture ones.
class HostProfile {
public:
    HostProfile(const StatsDb& db, Ipv4Address ip);

    std::uint8_t ttl(Rng& rng) const;
    std::uint16_t window(Rng& rng) const;
    std::uint16_t mss(Rng& rng) const;

private:
    HeaderSamplers global_;
    std::optional<FieldSampler> ttl_, window_, mss_;
};

/// Per-purpose generator derived from the attack seed.
inline Rng stream(const AttackParams& p, std::uint64_t purpose) { return Rng(split_seed(p.seed, purpose)); }

enum Stream : std::uint64_t { kTiming = 1, kHeaders, kPorts, kSeqs, kPayload, kHosts, kReplies };

inline std::uint16_t ip_id(Rng& rng) { return static_cast<std::uint16_t>(rng.next()); }
inline std::uint32_t isn(Rng& rng) { return static_cast<std::uint32_t>(rng.next()); }

/// Distinct ports from the dynamic range.
std::vector<std::uint16_t> distinct_dynamic_ports(Rng& rng, std::size_t n);

} // namespace injectkit::detail
