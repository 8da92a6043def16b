#include "injectkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "injectkit/digest.hpp"
#include "injectkit/diversity.hpp"
#include "injectkit/error.hpp"
#include "injectkit/rng.hpp"

namespace injectkit {

namespace {

struct FiveTupleHash {
    std::size_t operator()(const FiveTuple& k) const noexcept {
        std::uint64_t h = (std::uint64_t{k.a_ip.value} << 32) | k.b_ip.value;
        h = mix64(h ^ ((std::uint64_t{k.a_port} << 24) | (std::uint64_t{k.b_port} << 8) | k.protocol));
        return static_cast<std::size_t>(h);
    }
};

using FlatCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

Counts to_ordered(const FlatCounts& flat) { return Counts(flat.begin(), flat.end()); }

struct ConnAccumulator {
    std::uint64_t count = 0;
    TimeUs first = 0;
    TimeUs last = 0;
    TimeUs prev = 0;
    double mean = 0.0;  // Welford over inter-arrival gaps (seconds)
    double m2 = 0.0;
    std::uint64_t gaps = 0;

    void add(TimeUs t) {
        if (count == 0) {
            first = last = prev = t;
        } else {
            const double gap = static_cast<double>(std::max<TimeUs>(0, t - prev)) / 1e6;
            ++gaps;
            const double delta = gap - mean;
            mean += delta / static_cast<double>(gaps);
            m2 += delta * (gap - mean);
            first = std::min(first, t);
            last = std::max(last, t);
            prev = t;
        }
        ++count;
    }
};

struct HostAccumulator {
    HostStats stats;
    FlatCounts ttl, window, mss;
};

} // namespace

std::string_view field_name(Field f) noexcept {
    switch (f) {
    case Field::ttl: return "ttl";
    case Field::mss: return "mss";
    case Field::window_size: return "window_size";
    case Field::tos: return "tos";
    case Field::protocol: return "protocol";
    case Field::src_port: return "src_port";
    case Field::dst_port: return "dst_port";
    case Field::src_ip: return "src_ip";
    case Field::dst_ip: return "dst_ip";
    }
    return "?";
}

Field field_from_name(std::string_view name) {
    for (Field f : kAllFields) {
        if (field_name(f) == name) return f;
    }
    throw Error(Errc::UnknownField, "unknown field '" + std::string(name) + "'");
}

std::optional<std::uint64_t> field_value(const ParsedPacket& pkt, Field f) {
    if (!pkt.ip) return std::nullopt;
    switch (f) {
    case Field::ttl: return pkt.ip->ttl;
    case Field::tos: return pkt.ip->tos;
    case Field::protocol: return pkt.ip->protocol;
    case Field::src_ip: return pkt.ip->src.value;
    case Field::dst_ip: return pkt.ip->dst.value;
    case Field::mss:
        if (pkt.tcp && pkt.tcp->mss) return *pkt.tcp->mss;
        return std::nullopt;
    case Field::window_size:
        if (pkt.tcp) return pkt.tcp->window_size;
        return std::nullopt;
    case Field::src_port:
        if (pkt.tcp) return pkt.tcp->src_port;
        if (pkt.udp) return pkt.udp->src_port;
        return std::nullopt;
    case Field::dst_port:
        if (pkt.tcp) return pkt.tcp->dst_port;
        if (pkt.udp) return pkt.udp->dst_port;
        return std::nullopt;
    }
    return std::nullopt;
}

std::uint64_t FieldDistribution::total() const noexcept {
    std::uint64_t sum = 0;
    for (const auto& [value, count] : counts) sum += count;
    return sum;
}

FiveTuple FiveTuple::canonical(Ipv4Address src, std::uint16_t sport, Ipv4Address dst, std::uint16_t dport,
                               std::uint8_t protocol) {
    if (std::pair(src, sport) <= std::pair(dst, dport)) return FiveTuple{src, sport, dst, dport, protocol};
    return FiveTuple{dst, dport, src, sport, protocol};
}

std::string content_hash(const std::filesystem::path& path) { return to_hex(sha224_file(path)); }

StatsDb compute_statistics(const std::filesystem::path& path, const WindowSpec& windows) {
    StatsDb db;
    db.content_hash = content_hash(path);
    db.window_spec = windows;

    // Header-only scan: window boundaries need the capture span up front.
    TimeUs start = std::numeric_limits<TimeUs>::max();
    TimeUs end = std::numeric_limits<TimeUs>::min();
    std::uint64_t record_count = 0;
    {
        PcapReader scan(path);
        TimeUs ts = 0;
        while (scan.skip_next(ts)) {
            start = std::min(start, ts);
            end = std::max(end, ts);
            ++record_count;
        }
    }
    if (record_count == 0) start = end = 0;
    const WindowPartition partition(start, end, windows);
    const auto span = static_cast<unsigned __int128>(std::max<TimeUs>(0, end - start));

    std::vector<std::uint64_t> window_packets(partition.size(), 0);
    db.rate_histogram.bins.assign(record_count > 0 ? RateHistogram::kBins : 0, 0);
    std::vector<DiversityAccumulator> diversity;
    for (std::size_t i = 0; i < kDiversityFields.size(); ++i) diversity.emplace_back(partition);

    std::unordered_map<std::uint32_t, HostAccumulator> hosts;
    std::array<FlatCounts, kAllFields.size()> dists;
    std::unordered_map<FiveTuple, ConnAccumulator, FiveTupleHash> conns;

    FileStats& fs = db.file;
    PcapReader reader(path);
    const auto variant = reader.meta().magic_variant;
    PacketRecord rec;
    while (reader.next(rec)) {
        const TimeUs t = rec.time_us(variant);
        const std::size_t bytes = rec.data.size();
        ++fs.packet_count;
        fs.total_bytes += bytes;

        const std::size_t w = partition.index_of(t);
        ++window_packets[w];
        {
            std::size_t bin = 0;
            if (span > 0) {
                bin = static_cast<std::size_t>(static_cast<unsigned __int128>(t - start) * RateHistogram::kBins / span);
            }
            ++db.rate_histogram.bins[std::min(bin, RateHistogram::kBins - 1)];
        }

        ParsedPacket pkt;
        try {
            pkt = parse_packet(rec.data);
        } catch (const Error&) {
            continue;  // runt frame: counted at file level only
        }
        if (!pkt.payload.empty()) ++fs.payload_packet_count;
        if (!pkt.ip) continue;
        ++fs.ipv4_packet_count;
        const auto& ip = *pkt.ip;

        auto& src = hosts[ip.src.value];
        src.stats.ip = ip.src;
        ++src.stats.pkts_sent;
        src.stats.bytes_sent += bytes;
        src.stats.mac = pkt.eth.src;
        ++src.ttl[ip.ttl];
        if (pkt.tcp) {
            ++src.window[pkt.tcp->window_size];
            if (pkt.tcp->mss) ++src.mss[*pkt.tcp->mss];
            if (pkt.tcp->has(tcp_flags::SYN | tcp_flags::ACK)) src.stats.ports_open.insert(pkt.tcp->src_port);
        }
        auto& dst = hosts[ip.dst.value];
        dst.stats.ip = ip.dst;
        ++dst.stats.pkts_received;
        dst.stats.bytes_received += bytes;

        for (std::size_t i = 0; i < kAllFields.size(); ++i) {
            if (auto v = field_value(pkt, kAllFields[i])) ++dists[i][*v];
        }
        for (std::size_t i = 0; i < kDiversityFields.size(); ++i) {
            if (auto v = field_value(pkt, kDiversityFields[i])) diversity[i].add(w, *v);
        }

        if (pkt.tcp || pkt.udp) {
            const std::uint16_t sport = pkt.tcp ? pkt.tcp->src_port : pkt.udp->src_port;
            const std::uint16_t dport = pkt.tcp ? pkt.tcp->dst_port : pkt.udp->dst_port;
            conns[FiveTuple::canonical(ip.src, sport, ip.dst, dport, ip.protocol)].add(t);
        }
    }

    if (fs.packet_count > 0) {
        fs.capture_start = start;
        fs.capture_end = end;
        fs.duration = static_cast<double>(end - start) / 1e6;
        fs.avg_packet_size = static_cast<double>(fs.total_bytes) / static_cast<double>(fs.packet_count);
        fs.avg_packet_rate = fs.duration > 0 ? static_cast<double>(fs.packet_count) / fs.duration : 0.0;
    }

    for (auto& [addr, acc] : hosts) {
        acc.stats.ttl_dist = to_ordered(acc.ttl);
        acc.stats.window_dist = to_ordered(acc.window);
        acc.stats.mss_dist = to_ordered(acc.mss);
        db.hosts.emplace(Ipv4Address{addr}, std::move(acc.stats));
    }
    for (std::size_t i = 0; i < kAllFields.size(); ++i) {
        db.distributions[kAllFields[i]] = FieldDistribution{kAllFields[i], to_ordered(dists[i])};
    }
    for (const auto& [key, acc] : conns) {
        ConnStats c;
        c.five_tuple = key;
        c.packet_count = acc.count;
        c.first_seen = acc.first;
        c.last_seen = acc.last;
        const double dur = static_cast<double>(acc.last - acc.first) / 1e6;
        c.avg_packet_rate = dur > 0 ? static_cast<double>(acc.count) / dur : 0.0;
        c.mean_interarrival = acc.mean;
        c.interarrival_stddev = acc.gaps > 1 ? std::sqrt(acc.m2 / static_cast<double>(acc.gaps)) : 0.0;
        db.connections.emplace(key, c);
    }

    TimeWindowSeries rate;
    rate.feature_name = "packet_rate";
    rate.window_length = partition.length_seconds();
    rate.window_start_times = partition.start_times();
    rate.values.resize(partition.size());
    for (std::size_t w = 0; w < partition.size(); ++w) {
        rate.values[w] = rate.window_length > 0 ? static_cast<double>(window_packets[w]) / rate.window_length : 0.0;
    }
    db.interval_tables["packet_rate"] = std::move(rate);
    for (std::size_t i = 0; i < kDiversityFields.size(); ++i) {
        const std::string name(field_name(kDiversityFields[i]));
        auto series = diversity[i].finish(name);
        db.interval_tables["entropy." + name] = std::move(series.entropy);
        db.interval_tables["novelty." + name] = std::move(series.novelty);
        db.interval_tables["cumulative." + name] = std::move(series.cumulative);
    }
    return db;
}

// --- queries ---------------------------------------------------------------

const FieldDistribution& distribution(const StatsDb& db, Field f) {
    auto it = db.distributions.find(f);
    if (it == db.distributions.end()) {
        throw Error(Errc::UnknownField, "no distribution for field '" + std::string(field_name(f)) + "'");
    }
    return it->second;
}

std::uint64_t most_used(const StatsDb& db, Field f) {
    const auto& dist = distribution(db, f);
    if (dist.empty()) {
        throw Error(Errc::EmptyDistribution, "no observations of field '" + std::string(field_name(f)) + "'");
    }
    // std::map iterates ascending, so strict > keeps the smaller value on ties
    auto best = dist.counts.begin();
    for (auto it = dist.counts.begin(); it != dist.counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

const HostStats& host(const StatsDb& db, Ipv4Address ip) {
    auto it = db.hosts.find(ip);
    if (it == db.hosts.end()) throw Error(Errc::UnknownHost, "host " + ip.to_string() + " not in capture");
    return it->second;
}

const std::set<std::uint16_t>& open_ports(const StatsDb& db, Ipv4Address ip) { return host(db, ip).ports_open; }

Ipv4Address most_active_host(const StatsDb& db) {
    if (db.hosts.empty()) throw Error(Errc::EmptyBackground, "capture contains no IPv4 hosts");
    const HostStats* best = nullptr;
    for (const auto& [ip, h] : db.hosts) {
        if (!best || h.pkts_sent + h.pkts_received > best->pkts_sent + best->pkts_received) best = &h;
    }
    return best->ip;
}

Ipv4Address random_host(const StatsDb& db, std::uint64_t seed) {
    if (db.hosts.empty()) throw Error(Errc::EmptyBackground, "capture contains no IPv4 hosts");
    Rng rng(seed);
    auto it = db.hosts.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng.uniform(db.hosts.size())));
    return it->first;
}

TimeWindowSeries packet_rate_series(const StatsDb& db, std::size_t n) {
    if (n == 0) throw Error(Errc::InvalidValue, "window count must be at least 1");
    const WindowPartition partition(db.file.capture_start, db.file.capture_end, WindowSpec::count(n));
    TimeWindowSeries out;
    out.feature_name = "packet_rate";
    out.window_length = partition.length_seconds();
    out.window_start_times = partition.start_times();
    out.values.assign(n, 0.0);
    const auto& bins = db.rate_histogram.bins;
    if (bins.empty() || out.window_length <= 0) return out;
    // exact when n divides kBins; otherwise each bin is attributed to the
    // window containing its start
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const std::size_t w = std::min(n - 1, b * n / RateHistogram::kBins);
        out.values[w] += bins[b];
    }
    for (auto& v : out.values) v /= out.window_length;
    return out;
}

std::optional<double> avg_mss(const StatsDb& db) {
    const auto& dist = distribution(db, Field::mss);
    const auto total = dist.total();
    if (total == 0) return std::nullopt;
    long double sum = 0;
    for (const auto& [value, count] : dist.counts) sum += static_cast<long double>(value) * count;
    return static_cast<double>(sum / total);
}

const ConnStats& connection(const StatsDb& db, const FiveTuple& key) {
    auto it = db.connections.find(key);
    if (it == db.connections.end()) {
        throw Error(Errc::UnknownHost, "no connection between " + key.a_ip.to_string() + ":" +
                                           std::to_string(key.a_port) + " and " + key.b_ip.to_string() + ":" +
                                           std::to_string(key.b_port));
    }
    return it->second;
}

double avg_bandwidth(const StatsDb& db, Ipv4Address ip) {
    const auto& h = host(db, ip);
    return db.file.duration > 0 ? static_cast<double>(h.bytes_sent) / db.file.duration : 0.0;
}

} // namespace injectkit
