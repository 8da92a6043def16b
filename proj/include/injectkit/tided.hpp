#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "injectkit/entropy.hpp"
#include "injectkit/packet.hpp"
#include "injectkit/stats.hpp"
#include "injectkit/windows.hpp"

// Dataset-quality tests: payload availability, TCP checksum and port
// validity, and per-feature diversity metrics over time windows.
namespace injectkit::tided {

/// A capture with at least this many TCP packets and no bad checksum is
/// flagged as unrealistically clean.
inline constexpr std::uint64_t kCleanlinessMinTcpPackets = 1000;

inline constexpr int kReportFormatVersion = 1;

struct ChecksumResult {
    std::uint64_t correct_count = 0;
    std::uint64_t incorrect_count = 0;
    double incorrect_ratio = 0.0;
};

struct PortResult {
    std::uint64_t well_known_count = 0;  // [1, 1023]
    std::uint64_t registered_count = 0;  // [1024, 49151]
    std::uint64_t dynamic_count = 0;     // [49152, 65535]
    std::uint64_t unassigned_count = 0;  // in the first two ranges but not IANA-assigned
    std::uint64_t port_zero_count = 0;
};

struct DiversityResult {
    std::string feature_name;
    TimeWindowSeries entropy_series;
    double normalized_entropy = 0.0;
    TimeWindowSeries novelty_series;
    double novelty_normalized_entropy = 0.0;
    TimeWindowSeries cumulative_entropy_series;
};

struct TidedReport {
    std::string input_name;
    std::string content_hash;
    std::uint64_t packet_count = 0;
    double payload_ratio = 0.0;
    ChecksumResult checksum_result;
    PortResult port_result;
    std::vector<DiversityResult> diversity;
    std::vector<std::string> warnings;
};

// --- diversity metrics over an in-memory packet list ------------------------
// Windows partition [min time, max time] of all given packets; packets that
// do not carry the feature are ignored.

TimeWindowSeries entropy_series(std::span<const TimedPacket> packets, Field feature, std::size_t n_windows);
TimeWindowSeries novelty_distribution(std::span<const TimedPacket> packets, Field feature, std::size_t n_windows);
TimeWindowSeries cumulative_entropy_series(std::span<const TimedPacket> packets, Field feature,
                                           std::size_t n_windows);

/// Normalized entropy of the per-window first-seen counts. Throws EmptyInput
/// when the series sums to zero.
double novelty_normalized_entropy(const TimeWindowSeries& novelty);

// --- availability and validity ----------------------------------------------

double payload_availability(const StatsDb& db);

ChecksumResult checksum_validity(const std::filesystem::path& path);
ChecksumResult checksum_validity(std::span<const ParsedPacket> packets);

PortResult port_validity(const StatsDb& db);

std::vector<std::string> checksum_warnings(const ChecksumResult& r);
std::vector<std::string> port_warnings(const PortResult& r);

/// Diversity results for the default feature set, read from the stats db.
std::vector<DiversityResult> diversity_from_stats(const StatsDb& db);

/// Runs every test. Only the checksum test re-reads packets from `path`.
TidedReport build_report(const std::filesystem::path& path, const StatsDb& db);

/// Writes summary.txt, report.json and series/<feature>_<metric>.csv.
void emit_report(const TidedReport& report, const std::filesystem::path& out_dir);

std::string summary_text(const TidedReport& report);
std::string report_json(const TidedReport& report);
std::string series_csv(const TimeWindowSeries& series);

} // namespace injectkit::tided
