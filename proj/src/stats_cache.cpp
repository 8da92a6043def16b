#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "injectkit/error.hpp"
#include "injectkit/stats.hpp"

namespace injectkit {

namespace {

using nlohmann::json;

constexpr int kCacheFormatVersion = 1;

json counts_to_json(const Counts& c) {
    json arr = json::array();
    for (const auto& [value, count] : c) arr.push_back({value, count});
    return arr;
}

Counts counts_from_json(const json& arr) {
    Counts c;
    for (const auto& pair : arr) c.emplace(pair.at(0).get<std::uint64_t>(), pair.at(1).get<std::uint64_t>());
    return c;
}

json series_to_json(const TimeWindowSeries& s) {
    return {{"feature_name", s.feature_name},
            {"window_length", s.window_length},
            {"window_start_times", s.window_start_times},
            {"values", s.values}};
}

TimeWindowSeries series_from_json(const json& j) {
    TimeWindowSeries s;
    s.feature_name = j.at("feature_name").get<std::string>();
    s.window_length = j.at("window_length").get<double>();
    s.window_start_times = j.at("window_start_times").get<std::vector<double>>();
    s.values = j.at("values").get<std::vector<double>>();
    if (s.values.size() != s.window_start_times.size()) throw std::runtime_error("series length mismatch");
    return s;
}

} // namespace

std::string encode_stats(const StatsDb& db) {
    json j;
    j["format_version"] = kCacheFormatVersion;
    j["content_hash"] = db.content_hash;
    j["window_spec"] = {{"by_count", db.window_spec.by_count()},
                        {"count", db.window_spec.window_count()},
                        {"length_us", db.window_spec.window_length_us()}};
    const auto& f = db.file;
    j["file"] = {{"packet_count", f.packet_count},
                 {"capture_start", f.capture_start},
                 {"capture_end", f.capture_end},
                 {"duration", f.duration},
                 {"avg_packet_size", f.avg_packet_size},
                 {"total_bytes", f.total_bytes},
                 {"avg_packet_rate", f.avg_packet_rate},
                 {"payload_packet_count", f.payload_packet_count},
                 {"ipv4_packet_count", f.ipv4_packet_count}};

    json hosts = json::array();
    for (const auto& [ip, h] : db.hosts) {
        hosts.push_back({{"ip", h.ip.value},
                         {"pkts_sent", h.pkts_sent},
                         {"pkts_received", h.pkts_received},
                         {"bytes_sent", h.bytes_sent},
                         {"bytes_received", h.bytes_received},
                         {"ports_open", h.ports_open},
                         {"ttl_dist", counts_to_json(h.ttl_dist)},
                         {"window_dist", counts_to_json(h.window_dist)},
                         {"mss_dist", counts_to_json(h.mss_dist)},
                         {"mac", h.mac ? json(h.mac->to_string()) : json(nullptr)}});
    }
    j["hosts"] = std::move(hosts);

    json dists = json::object();
    for (const auto& [field, d] : db.distributions) dists[std::string(field_name(field))] = counts_to_json(d.counts);
    j["distributions"] = std::move(dists);

    json conns = json::array();
    for (const auto& [key, c] : db.connections) {
        conns.push_back({key.a_ip.value, key.a_port, key.b_ip.value, key.b_port, key.protocol, c.packet_count,
                         c.first_seen, c.last_seen, c.avg_packet_rate, c.mean_interarrival, c.interarrival_stddev});
    }
    j["connections"] = std::move(conns);

    json tables = json::object();
    for (const auto& [name, s] : db.interval_tables) tables[name] = series_to_json(s);
    j["interval_tables"] = std::move(tables);

    json bins = json::array();
    for (std::size_t b = 0; b < db.rate_histogram.bins.size(); ++b) {
        if (db.rate_histogram.bins[b] != 0) bins.push_back({b, db.rate_histogram.bins[b]});
    }
    j["rate_histogram"] = {{"size", db.rate_histogram.bins.size()}, {"nonzero", std::move(bins)}};
    return j.dump();
}

StatsDb decode_stats(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("format_version").get<int>() != kCacheFormatVersion) throw std::runtime_error("cache format version mismatch");

    StatsDb db;
    db.content_hash = j.at("content_hash").get<std::string>();
    const auto& ws = j.at("window_spec");
    db.window_spec = ws.at("by_count").get<bool>()
                         ? WindowSpec::count(ws.at("count").get<std::size_t>())
                         : WindowSpec::seconds(static_cast<double>(ws.at("length_us").get<TimeUs>()) / 1e6);

    const auto& f = j.at("file");
    auto& fs = db.file;
    fs.packet_count = f.at("packet_count").get<std::uint64_t>();
    fs.capture_start = f.at("capture_start").get<TimeUs>();
    fs.capture_end = f.at("capture_end").get<TimeUs>();
    fs.duration = f.at("duration").get<double>();
    fs.avg_packet_size = f.at("avg_packet_size").get<double>();
    fs.total_bytes = f.at("total_bytes").get<std::uint64_t>();
    fs.avg_packet_rate = f.at("avg_packet_rate").get<double>();
    fs.payload_packet_count = f.at("payload_packet_count").get<std::uint64_t>();
    fs.ipv4_packet_count = f.at("ipv4_packet_count").get<std::uint64_t>();

    for (const auto& h : j.at("hosts")) {
        HostStats hs;
        hs.ip = Ipv4Address{h.at("ip").get<std::uint32_t>()};
        hs.pkts_sent = h.at("pkts_sent").get<std::uint64_t>();
        hs.pkts_received = h.at("pkts_received").get<std::uint64_t>();
        hs.bytes_sent = h.at("bytes_sent").get<std::uint64_t>();
        hs.bytes_received = h.at("bytes_received").get<std::uint64_t>();
        hs.ports_open = h.at("ports_open").get<std::set<std::uint16_t>>();
        hs.ttl_dist = counts_from_json(h.at("ttl_dist"));
        hs.window_dist = counts_from_json(h.at("window_dist"));
        hs.mss_dist = counts_from_json(h.at("mss_dist"));
        if (!h.at("mac").is_null()) {
            auto mac = MacAddress::parse(h.at("mac").get<std::string>());
            if (!mac) throw std::runtime_error("bad MAC in cache");
            hs.mac = *mac;
        }
        db.hosts.emplace(hs.ip, std::move(hs));
    }
    for (const auto& [name, arr] : j.at("distributions").items()) {
        const Field field = field_from_name(name);
        db.distributions[field] = FieldDistribution{field, counts_from_json(arr)};
    }
    for (const auto& c : j.at("connections")) {
        ConnStats cs;
        cs.five_tuple = FiveTuple{Ipv4Address{c.at(0).get<std::uint32_t>()}, c.at(1).get<std::uint16_t>(),
                                  Ipv4Address{c.at(2).get<std::uint32_t>()}, c.at(3).get<std::uint16_t>(),
                                  c.at(4).get<std::uint8_t>()};
        cs.packet_count = c.at(5).get<std::uint64_t>();
        cs.first_seen = c.at(6).get<TimeUs>();
        cs.last_seen = c.at(7).get<TimeUs>();
        cs.avg_packet_rate = c.at(8).get<double>();
        cs.mean_interarrival = c.at(9).get<double>();
        cs.interarrival_stddev = c.at(10).get<double>();
        db.connections.emplace(cs.five_tuple, cs);
    }
    for (const auto& [name, s] : j.at("interval_tables").items()) db.interval_tables[name] = series_from_json(s);

    const auto& rh = j.at("rate_histogram");
    db.rate_histogram.bins.assign(rh.at("size").get<std::size_t>(), 0);
    for (const auto& pair : rh.at("nonzero")) {
        db.rate_histogram.bins.at(pair.at(0).get<std::size_t>()) = pair.at(1).get<std::uint32_t>();
    }
    return db;
}

std::filesystem::path cache_entry_path(const std::filesystem::path& dir, const std::string& hash,
                                       const WindowSpec& windows) {
    return dir / (hash + "-" + windows.cache_tag() + ".stats");
}

StatsDb load_or_compute(const std::filesystem::path& path, const WindowSpec& windows, const CacheOptions& cache) {
    if (!cache.enabled || cache.dir.empty()) return compute_statistics(path, windows);

    const std::string hash = content_hash(path);
    const auto entry = cache_entry_path(cache.dir, hash, windows);
    std::error_code ec;
    if (std::filesystem::exists(entry, ec)) {
        try {
            std::ifstream in(entry, std::ios::binary);
            std::ostringstream text;
            text << in.rdbuf();
            StatsDb db = decode_stats(text.str());
            if (db.content_hash == hash && db.window_spec == windows) return db;
            std::cerr << "warning: stats cache entry " << entry.string() << " does not match; recomputing\n";
        } catch (const std::exception& e) {
            std::cerr << "warning: stats cache entry " << entry.string() << " unreadable (" << e.what()
                      << "); recomputing\n";
        }
    }

    StatsDb db = compute_statistics(path, windows);
    // Cache writes are best effort; a read-only cache dir must not fail the run.
    try {
        std::filesystem::create_directories(cache.dir);
        const auto tmp = entry.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << encode_stats(db);
            if (!out) throw Error(Errc::IoError, "cannot write " + tmp);
        }
        std::filesystem::rename(tmp, entry);
    } catch (const std::exception& e) {
        std::cerr << "warning: could not write stats cache: " << e.what() << "\n";
    }
    return db;
}

} // namespace injectkit
