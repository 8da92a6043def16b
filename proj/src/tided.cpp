#include "injectkit/tided.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "injectkit/data_tables.hpp"
#include "injectkit/diversity.hpp"
#include "injectkit/error.hpp"

namespace injectkit::tided {

namespace {

DiversitySeries diversity_over(std::span<const TimedPacket> packets, Field feature, std::size_t n_windows) {
    TimeUs start = 0, end = 0;
    if (!packets.empty()) {
        auto [lo, hi] = std::minmax_element(packets.begin(), packets.end(),
                                            [](const TimedPacket& a, const TimedPacket& b) { return a.time < b.time; });
        start = lo->time;
        end = hi->time;
    }
    const WindowPartition partition(start, end, WindowSpec::count(n_windows));
    DiversityAccumulator acc(partition);
    for (const auto& tp : packets) {
        if (auto v = field_value(tp.packet, feature)) acc.add(partition.index_of(tp.time), *v);
    }
    return acc.finish(std::string(field_name(feature)));
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
}

const TimeWindowSeries& table(const StatsDb& db, const std::string& name) {
    auto it = db.interval_tables.find(name);
    if (it == db.interval_tables.end()) throw Error(Errc::UnknownField, "stats db has no series '" + name + "'");
    return it->second;
}

} // namespace

TimeWindowSeries entropy_series(std::span<const TimedPacket> packets, Field feature, std::size_t n_windows) {
    return diversity_over(packets, feature, n_windows).entropy;
}

TimeWindowSeries novelty_distribution(std::span<const TimedPacket> packets, Field feature, std::size_t n_windows) {
    return diversity_over(packets, feature, n_windows).novelty;
}

TimeWindowSeries cumulative_entropy_series(std::span<const TimedPacket> packets, Field feature,
                                           std::size_t n_windows) {
    return diversity_over(packets, feature, n_windows).cumulative;
}

double novelty_normalized_entropy(const TimeWindowSeries& novelty) {
    std::vector<std::uint64_t> counts;
    counts.reserve(novelty.values.size());
    for (double v : novelty.values) counts.push_back(static_cast<std::uint64_t>(std::llround(v)));
    return normalized_entropy_of_counts(counts);
}

double payload_availability(const StatsDb& db) {
    if (db.file.packet_count == 0) throw Error(Errc::EmptyCapture, "capture has no packets");
    return static_cast<double>(db.file.payload_packet_count) / static_cast<double>(db.file.packet_count);
}

namespace {
void tally_checksum(const ParsedPacket& pkt, ChecksumResult& r) {
    // segments cut short by the snap length cannot be verified
    if (!pkt.tcp || pkt.truncated()) return;
    if (verify_tcp_checksum(pkt)) {
        ++r.correct_count;
    } else {
        ++r.incorrect_count;
    }
}

void finish_ratio(ChecksumResult& r) {
    const auto total = r.correct_count + r.incorrect_count;
    r.incorrect_ratio = total > 0 ? static_cast<double>(r.incorrect_count) / static_cast<double>(total) : 0.0;
}
} // namespace

ChecksumResult checksum_validity(const std::filesystem::path& path) {
    ChecksumResult r;
    PcapReader reader(path);
    PacketRecord rec;
    while (reader.next(rec)) {
        try {
            tally_checksum(parse_packet(rec.data), r);
        } catch (const Error&) {
        }
    }
    finish_ratio(r);
    return r;
}

ChecksumResult checksum_validity(std::span<const ParsedPacket> packets) {
    ChecksumResult r;
    for (const auto& p : packets) tally_checksum(p, r);
    finish_ratio(r);
    return r;
}

PortResult port_validity(const StatsDb& db) {
    PortResult r;
    for (const auto& [value, count] : distribution(db, Field::dst_port).counts) {
        const auto port = static_cast<std::uint16_t>(value);
        if (port == 0) {
            r.port_zero_count += count;
            continue;
        }
        if (port <= 1023) {
            r.well_known_count += count;
        } else if (port <= 49151) {
            r.registered_count += count;
        } else {
            r.dynamic_count += count;
            continue;
        }
        if (!iana_assigned(port)) r.unassigned_count += count;
    }
    return r;
}

std::vector<std::string> checksum_warnings(const ChecksumResult& r) {
    std::vector<std::string> w;
    const auto total = r.correct_count + r.incorrect_count;
    if (r.incorrect_count == 0 && total >= kCleanlinessMinTcpPackets) {
        w.push_back("unrealistic cleanness: none of " + std::to_string(total) +
                    " TCP packets has an incorrect checksum; real traffic usually contains a few");
    }
    return w;
}

std::vector<std::string> port_warnings(const PortResult& r) {
    std::vector<std::string> w;
    if (r.port_zero_count > 0) {
        w.push_back("port zero: " + std::to_string(r.port_zero_count) +
                    " packets are directed to port 0, which real networks seldom observe");
    }
    return w;
}

std::vector<DiversityResult> diversity_from_stats(const StatsDb& db) {
    std::vector<DiversityResult> out;
    for (Field f : kDiversityFields) {
        const std::string name(field_name(f));
        DiversityResult d;
        d.feature_name = name;
        d.entropy_series = table(db, "entropy." + name);
        d.novelty_series = table(db, "novelty." + name);
        d.cumulative_entropy_series = table(db, "cumulative." + name);
        const auto& dist = distribution(db, f);
        if (!dist.empty()) {
            d.normalized_entropy = normalized_entropy(dist.counts);
            d.novelty_normalized_entropy = novelty_normalized_entropy(d.novelty_series);
        }
        out.push_back(std::move(d));
    }
    return out;
}

TidedReport build_report(const std::filesystem::path& path, const StatsDb& db) {
    TidedReport report;
    report.input_name = path.filename().string();
    report.content_hash = db.content_hash;
    report.packet_count = db.file.packet_count;
    if (db.file.packet_count == 0) {
        report.warnings.push_back("EmptyCapture: the capture contains no packets; every test is vacuous");
    } else {
        report.payload_ratio = payload_availability(db);
        if (report.payload_ratio == 0.0) {
            report.warnings.push_back("payload availability: no packet carries payload; payload-based detectors cannot be evaluated");
        }
    }
    report.checksum_result = checksum_validity(path);
    report.port_result = port_validity(db);
    report.diversity = diversity_from_stats(db);
    for (auto& w : checksum_warnings(report.checksum_result)) report.warnings.push_back(std::move(w));
    for (auto& w : port_warnings(report.port_result)) report.warnings.push_back(std::move(w));
    for (const auto& d : report.diversity) {
        if (db.file.packet_count > 0 && distribution(db, field_from_name(d.feature_name)).empty()) {
            report.warnings.push_back("diversity: feature " + d.feature_name + " never observed");
        }
    }
    return report;
}

std::string series_csv(const TimeWindowSeries& series) {
    std::string out = "window_start,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += fixed6(series.window_start_times[i]);
        out += ',';
        out += fixed6(series.values[i]);
        out += '\n';
    }
    return out;
}

std::string summary_text(const TidedReport& r) {
    std::ostringstream s;
    s << "TIDED report\n";
    s << "input: " << r.input_name << "\n";
    s << "sha224: " << r.content_hash << "\n";
    s << "packets: " << r.packet_count << "\n\n";
    s << "availability\n";
    s << "  payload ratio: " << fixed6(r.payload_ratio) << "\n\n";
    s << "validity\n";
    s << "  tcp checksums: correct=" << r.checksum_result.correct_count
      << " incorrect=" << r.checksum_result.incorrect_count
      << " incorrect_ratio=" << fixed6(r.checksum_result.incorrect_ratio) << "\n";
    const auto& p = r.port_result;
    s << "  destination ports: well_known=" << p.well_known_count << " registered=" << p.registered_count
      << " dynamic=" << p.dynamic_count << " unassigned=" << p.unassigned_count
      << " port_zero=" << p.port_zero_count << "\n\n";
    s << "diversity (bits; normalized values in [0,1])\n";
    for (const auto& d : r.diversity) {
        const double distinct = std::accumulate(d.novelty_series.values.begin(), d.novelty_series.values.end(), 0.0);
        s << "  " << d.feature_name << ": normalized_entropy=" << fixed6(d.normalized_entropy)
          << " novelty_normalized_entropy=" << fixed6(d.novelty_normalized_entropy)
          << " distinct_values=" << static_cast<std::uint64_t>(distinct) << "\n";
    }
    s << "\n";
    if (r.warnings.empty()) {
        s << "warnings: none\n";
    } else {
        s << "warnings:\n";
        for (const auto& w : r.warnings) s << "  - " << w << "\n";
    }
    return s.str();
}

std::string report_json(const TidedReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format_version"] = kReportFormatVersion;
    j["input"] = r.input_name;
    j["content_hash"] = r.content_hash;
    j["packet_count"] = r.packet_count;
    j["payload_ratio"] = r.payload_ratio;
    j["checksum"] = {{"correct_count", r.checksum_result.correct_count},
                     {"incorrect_count", r.checksum_result.incorrect_count},
                     {"incorrect_ratio", r.checksum_result.incorrect_ratio}};
    const auto& p = r.port_result;
    j["ports"] = {{"well_known_count", p.well_known_count}, {"registered_count", p.registered_count},
                  {"dynamic_count", p.dynamic_count},       {"unassigned_count", p.unassigned_count},
                  {"port_zero_count", p.port_zero_count}};
    ordered_json div = ordered_json::object();
    auto series = [](const TimeWindowSeries& s) {
        return ordered_json{{"window_length", s.window_length},
                            {"window_start_times", s.window_start_times},
                            {"values", s.values}};
    };
    for (const auto& d : r.diversity) {
        div[d.feature_name] = {{"normalized_entropy", d.normalized_entropy},
                               {"novelty_normalized_entropy", d.novelty_normalized_entropy},
                               {"entropy_series", series(d.entropy_series)},
                               {"novelty_series", series(d.novelty_series)},
                               {"cumulative_entropy_series", series(d.cumulative_entropy_series)}};
    }
    j["diversity"] = std::move(div);
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

void emit_report(const TidedReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "series", ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + (out_dir / "series").string() + ": " + ec.message());
    write_file(out_dir / "summary.txt", summary_text(report));
    write_file(out_dir / "report.json", report_json(report));
    for (const auto& d : report.diversity) {
        write_file(out_dir / "series" / (d.feature_name + "_entropy.csv"), series_csv(d.entropy_series));
        write_file(out_dir / "series" / (d.feature_name + "_novelty.csv"), series_csv(d.novelty_series));
        write_file(out_dir / "series" / (d.feature_name + "_cumulative.csv"), series_csv(d.cumulative_entropy_series));
    }
}

} // namespace injectkit::tided
