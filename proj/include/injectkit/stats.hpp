#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "injectkit/entropy.hpp"
#include "injectkit/net.hpp"
#include "injectkit/packet.hpp"
#include "injectkit/windows.hpp"

namespace injectkit {

/// Header fields whose value distributions are tracked.
enum class Field { ttl, mss, window_size, tos, protocol, src_port, dst_port, src_ip, dst_ip };

inline constexpr std::array kAllFields = {Field::ttl,      Field::mss,      Field::window_size,
                                          Field::tos,      Field::protocol, Field::src_port,
                                          Field::dst_port, Field::src_ip,   Field::dst_ip};

/// Features tracked per window for the diversity tests.
inline constexpr std::array kDiversityFields = {Field::src_ip, Field::dst_ip, Field::ttl,
                                                Field::mss,    Field::window_size, Field::tos};

std::string_view field_name(Field f) noexcept;
Field field_from_name(std::string_view name);

/// The value of `f` in `pkt`, or nullopt when the packet does not carry it.
std::optional<std::uint64_t> field_value(const ParsedPacket& pkt, Field f);

struct FileStats {
    std::uint64_t packet_count = 0;
    TimeUs capture_start = 0;
    TimeUs capture_end = 0;
    double duration = 0.0;  // seconds
    double avg_packet_size = 0.0;
    std::uint64_t total_bytes = 0;
    double avg_packet_rate = 0.0;
    std::uint64_t payload_packet_count = 0;
    std::uint64_t ipv4_packet_count = 0;

    bool operator==(const FileStats&) const = default;
};

struct HostStats {
    Ipv4Address ip;
    std::uint64_t pkts_sent = 0;
    std::uint64_t pkts_received = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
    std::set<std::uint16_t> ports_open;  // ports this host sent SYN+ACK from
    Counts ttl_dist;
    Counts window_dist;
    Counts mss_dist;
    std::optional<MacAddress> mac;  // most recent source MAC

    bool operator==(const HostStats&) const = default;
};

struct FieldDistribution {
    Field field = Field::ttl;
    Counts counts;

    std::uint64_t total() const noexcept;
    bool empty() const noexcept { return counts.empty(); }

    bool operator==(const FieldDistribution&) const = default;
};

/// Direction-independent connection key: the lower (ip, port) endpoint is
/// always `a`.
struct FiveTuple {
    Ipv4Address a_ip;
    std::uint16_t a_port = 0;
    Ipv4Address b_ip;
    std::uint16_t b_port = 0;
    std::uint8_t protocol = 0;

    static FiveTuple canonical(Ipv4Address src, std::uint16_t sport, Ipv4Address dst, std::uint16_t dport,
                               std::uint8_t protocol);

    friend constexpr auto operator<=>(const FiveTuple&, const FiveTuple&) = default;
};

struct ConnStats {
    FiveTuple five_tuple;
    std::uint64_t packet_count = 0;
    TimeUs first_seen = 0;
    TimeUs last_seen = 0;
    double avg_packet_rate = 0.0;
    double mean_interarrival = 0.0;
    double interarrival_stddev = 0.0;

    bool operator==(const ConnStats&) const = default;
};

/// Packet counts over a fine, fixed subdivision of the capture span. Any
/// window count dividing kBins is answered exactly from it.
struct RateHistogram {
    static constexpr std::size_t kBins = 138600;  // lcm(1..12) * 5
    std::vector<std::uint32_t> bins;

    bool operator==(const RateHistogram&) const = default;
};

struct StatsDb {
    std::string content_hash;  // hex SHA-224 of the file bytes
    WindowSpec window_spec;
    FileStats file;
    std::map<Ipv4Address, HostStats> hosts;
    std::map<Field, FieldDistribution> distributions;
    std::map<FiveTuple, ConnStats> connections;
    /// "packet_rate" plus "<series>.<field>" for series in
    /// {entropy, novelty, cumulative} and every diversity field.
    std::map<std::string, TimeWindowSeries> interval_tables;
    RateHistogram rate_histogram;

    bool operator==(const StatsDb&) const = default;
};

std::string content_hash(const std::filesystem::path& path);

/// One pass over the packets (after a header-only scan for the time span).
StatsDb compute_statistics(const std::filesystem::path& path, const WindowSpec& windows = WindowSpec::defaults());

struct CacheOptions {
    std::filesystem::path dir;
    bool enabled = true;
};

/// Cache entry path for a given file hash and window spec.
std::filesystem::path cache_entry_path(const std::filesystem::path& dir, const std::string& hash,
                                       const WindowSpec& windows);

StatsDb load_or_compute(const std::filesystem::path& path, const WindowSpec& windows, const CacheOptions& cache);

// Cache (de)serialization. Exposed for tests.
std::string encode_stats(const StatsDb& db);
StatsDb decode_stats(const std::string& text);

// --- queries ---------------------------------------------------------------

const FieldDistribution& distribution(const StatsDb& db, Field f);

/// Most frequent value; ties go to the smaller value.
std::uint64_t most_used(const StatsDb& db, Field f);

const HostStats& host(const StatsDb& db, Ipv4Address ip);
const std::set<std::uint16_t>& open_ports(const StatsDb& db, Ipv4Address ip);

/// Host with the most sent+received packets; ties go to the lower address.
Ipv4Address most_active_host(const StatsDb& db);

/// Uniformly chosen host, deterministic in `seed`.
Ipv4Address random_host(const StatsDb& db, std::uint64_t seed);

/// Packets per second in each of `n` equal windows over the capture span.
TimeWindowSeries packet_rate_series(const StatsDb& db, std::size_t n);

std::optional<double> avg_mss(const StatsDb& db);

const ConnStats& connection(const StatsDb& db, const FiveTuple& key);

/// bytes_sent / capture duration, in bytes per second.
double avg_bandwidth(const StatsDb& db, Ipv4Address ip);

} // namespace injectkit
