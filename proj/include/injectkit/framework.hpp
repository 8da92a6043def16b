#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "injectkit/entropy.hpp"
#include "injectkit/net.hpp"
#include "injectkit/packet.hpp"
#include "injectkit/rng.hpp"
#include "injectkit/stats.hpp"

namespace injectkit {

// --- parameter schema ------------------------------------------------------

enum class ParamType { Ip, IpList, Mac, Port, PortList, Integer, Number, Boolean, Text, Path, Hex };

enum class DefaultSource { UserRequired, StatsDerived, Constant };

std::string_view param_type_name(ParamType t) noexcept;
std::string_view default_source_name(DefaultSource s) noexcept;

struct ParamSpec {
    std::string key;
    ParamType type = ParamType::Text;
    DefaultSource source = DefaultSource::Constant;
    std::string default_text;  // for Constant; may be empty meaning "unset"
    std::string help;
};

struct AttackSchema {
    std::string attack_name;
    std::string description;
    std::vector<ParamSpec> params;

    const ParamSpec* find(std::string_view key) const noexcept;
};

/// The parameters every attack accepts.
std::vector<ParamSpec> common_params();

/// key=value pairs as given by the user, in order.
using UserParams = std::vector<std::pair<std::string, std::string>>;

UserParams parse_user_params(std::span<const std::string> tokens);

struct Endpoint {
    Ipv4Address ip;
    MacAddress mac;

    bool operator==(const Endpoint&) const = default;
};

inline constexpr double kDefaultIntensity = 1000.0;

/// Fully resolved parameters for one attack instance.
struct AttackParams {
    std::string attack_name;
    std::vector<Endpoint> attackers;
    std::vector<Endpoint> victims;
    std::vector<std::uint16_t> ports;
    TimeUs start_time = 0;
    double intensity = kDefaultIntensity;  // packets per second
    std::uint64_t seed = 0;
    /// Attack-specific keys, stored in canonical text form.
    std::map<std::string, std::string> extra;

    const Endpoint& attacker() const { return attackers.front(); }
    const Endpoint& victim() const { return victims.front(); }

    bool has(const std::string& key) const { return extra.contains(key); }
    std::string text(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    double number(const std::string& key) const;
    bool boolean(const std::string& key) const;

    /// Deterministic text form of every resolved value.
    std::string canonical() const;
    /// Hex SHA-224 of canonical().
    std::string digest() const;
};

/// Checks user values against the schema and fills the rest from the
/// background statistics.
AttackParams validate_and_default(const UserParams& user, const StatsDb& db, const AttackSchema& schema,
                                  std::uint64_t seed);

// --- timing ----------------------------------------------------------------

struct TimestampPlan {
    std::vector<TimeUs> timestamps;
};

/// Fraction of R used where the background is at its peak.
inline constexpr double kComplementFloor = 0.05;
inline constexpr double kJitterLow = 0.9;
inline constexpr double kJitterHigh = 1.1;

/// Injection rate for each background window: R * (1 - b_i / max b), never
/// below kComplementFloor * R. With no background at all every window is R.
std::vector<double> complementary_rates(const TimeWindowSeries& bg_rate, double R);

/// Places `budget` timestamps from `start` onward, following the
/// complementary rates window by window and continuing at R after the last
/// background window. Positions are jittered but never leave their window.
TimestampPlan complementary_rate_plan(const TimeWindowSeries& bg_rate, double R, TimeUs start, std::size_t budget,
                                      std::uint64_t seed);

/// `budget` timestamps at a constant rate with the same jitter.
TimestampPlan uniform_rate_plan(double rate, TimeUs start, std::size_t budget, std::uint64_t seed);

// --- header field sampling -------------------------------------------------

/// Draws values in proportion to their counts.
class FieldSampler {
public:
    explicit FieldSampler(const Counts& counts);

    std::uint64_t operator()(Rng& rng) const;

private:
    std::vector<std::uint64_t> values_;
    std::vector<std::uint64_t> cumulative_;
};

std::vector<std::uint64_t> sample_field(const FieldDistribution& dist, std::uint64_t seed, std::size_t n);

/// Values used when the background never showed a field.
inline constexpr std::uint8_t kFallbackTtl = 64;
inline constexpr std::uint16_t kFallbackWindow = 29200;
inline constexpr std::uint16_t kFallbackMss = 1460;

/// Samplers for the header fields an attacker host should imitate.
struct HeaderSamplers {
    std::optional<FieldSampler> ttl;
    std::optional<FieldSampler> window;
    std::optional<FieldSampler> mss;

    explicit HeaderSamplers(const StatsDb& db);

    std::uint8_t draw_ttl(Rng& rng) const;
    std::uint16_t draw_window(Rng& rng) const;
    std::uint16_t draw_mss(Rng& rng) const;
};

// --- packet building helpers ------------------------------------------------

struct TcpSegment {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t flags = 0;
    std::uint16_t window = 0;
    std::optional<std::uint16_t> mss;
};

/// Builds a finalized Ethernet/IPv4/TCP packet.
ParsedPacket make_tcp(const Endpoint& src, const Endpoint& dst, std::uint8_t ttl, std::uint16_t ip_id,
                      const TcpSegment& seg, std::vector<std::uint8_t> payload = {});

ParsedPacket make_udp(const Endpoint& src, const Endpoint& dst, std::uint8_t ttl, std::uint16_t ip_id,
                      std::uint16_t src_port, std::uint16_t dst_port, std::vector<std::uint8_t> payload);

// --- templates ---------------------------------------------------------------

enum class Role { AttackerToVictim, VictimToAttacker };

struct TemplatePcap {
    std::vector<TimedPacket> packets;
    std::vector<Role> roles;
    /// Packet indices grouped by TCP connection, in order of first appearance;
    /// each group keeps the original packet order.
    std::vector<std::vector<std::size_t>> connections;
    Ipv4Address attacker_ip;
    Ipv4Address victim_ip;
};

/// Loads a two-endpoint template. The attacker is the first host to send a
/// bare SYN unless `attacker` names one of the endpoints explicitly.
TemplatePcap load_template(const std::filesystem::path& path, std::optional<Ipv4Address> attacker = std::nullopt);
TemplatePcap make_template(std::vector<TimedPacket> packets, std::optional<Ipv4Address> attacker = std::nullopt);

/// Maps the template onto the resolved endpoints and the given timestamps.
std::vector<TimedPacket> rewrite_template(const TemplatePcap& tpl, const AttackParams& params,
                                          const TimestampPlan& plan, const StatsDb& db);

} // namespace injectkit
