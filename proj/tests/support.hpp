#pragma once

// Shared test helpers. The frame encoder and the decoding oracles below work
// on raw bytes with hand-computed offsets, so they do not share code with the
// library codec they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "injectkit/net.hpp"
#include "injectkit/pcap_io.hpp"
#include "injectkit/rng.hpp"

namespace testkit {

using injectkit::Ipv4Address;
using injectkit::MacAddress;
using injectkit::Rng;
using injectkit::TimeUs;
using Bytes = std::vector<std::uint8_t>;

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "injectkit-test-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) std::abort();
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Bytes read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// --- byte helpers ----------------------------------------------------------

inline void put16(Bytes& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}
inline void put32(Bytes& b, std::uint32_t v) {
    put16(b, static_cast<std::uint16_t>(v >> 16));
    put16(b, static_cast<std::uint16_t>(v));
}
inline std::uint16_t get16(const Bytes& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]);
}
inline std::uint32_t get32(const Bytes& b, std::size_t at) {
    return std::uint32_t{get16(b, at)} << 16 | get16(b, at + 2);
}
inline void set16(Bytes& b, std::size_t at, std::uint16_t v) {
    b[at] = static_cast<std::uint8_t>(v >> 8);
    b[at + 1] = static_cast<std::uint8_t>(v);
}

/// Ones'-complement checksum done the schoolbook way: 32-bit running sum of
/// big-endian words, odd byte padded with zero, carries folded at the end.
inline std::uint16_t naive_checksum(const Bytes& data) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < data.size(); i += 2) {
        std::uint32_t word = std::uint32_t{data[i]} << 8;
        if (i + 1 < data.size()) word |= data[i + 1];
        sum += word;
        while (sum > 0xFFFF) sum = (sum & 0xFFFF) + (sum >> 16);
    }
    return static_cast<std::uint16_t>(~sum & 0xFFFF);
}

// --- hosts -----------------------------------------------------------------

struct Host {
    Ipv4Address ip;
    MacAddress mac;
};

inline Host make_host(std::uint32_t index) {
    Host h;
    h.ip = Ipv4Address(10, 0, static_cast<std::uint8_t>(index >> 8), static_cast<std::uint8_t>(1 + (index & 0xFF) % 250));
    h.mac.bytes = {0x00, 0x16, 0x3e, static_cast<std::uint8_t>(index >> 16), static_cast<std::uint8_t>(index >> 8),
                   static_cast<std::uint8_t>(index)};
    return h;
}

// --- raw frame encoder -------------------------------------------------------

struct RawTcp {
    std::uint16_t sport = 0, dport = 0;
    std::uint32_t seq = 0, ack = 0;
    std::uint8_t flags = 0x02;
    std::uint16_t window = 0;
    std::optional<std::uint16_t> mss;
    bool wscale = false;
};

struct RawIp {
    Host src, dst;
    std::uint8_t ttl = 64, tos = 0;
    std::uint16_t id = 0;
    std::uint16_t flags_fragment = 0x4000;
    Bytes options;  // multiple of 4
};

inline Bytes eth_header(const Host& src, const Host& dst, std::uint16_t type) {
    Bytes b(dst.mac.bytes.begin(), dst.mac.bytes.end());
    b.insert(b.end(), src.mac.bytes.begin(), src.mac.bytes.end());
    put16(b, type);
    return b;
}

inline Bytes ip_header(const RawIp& ip, std::uint8_t proto, std::size_t body_len) {
    Bytes h;
    h.push_back(static_cast<std::uint8_t>(0x40 | (5 + ip.options.size() / 4)));
    h.push_back(ip.tos);
    put16(h, static_cast<std::uint16_t>(20 + ip.options.size() + body_len));
    put16(h, ip.id);
    put16(h, ip.flags_fragment);
    h.push_back(ip.ttl);
    h.push_back(proto);
    put16(h, 0);
    put32(h, ip.src.ip.value);
    put32(h, ip.dst.ip.value);
    h.insert(h.end(), ip.options.begin(), ip.options.end());
    set16(h, 10, naive_checksum(h));
    return h;
}

inline std::uint16_t pseudo_checksum(Ipv4Address src, Ipv4Address dst, std::uint8_t proto, const Bytes& segment) {
    Bytes ph;
    put32(ph, src.value);
    put32(ph, dst.value);
    ph.push_back(0);
    ph.push_back(proto);
    put16(ph, static_cast<std::uint16_t>(segment.size()));
    ph.insert(ph.end(), segment.begin(), segment.end());
    return naive_checksum(ph);
}

inline Bytes tcp_frame(const RawIp& ip, const RawTcp& t, const Bytes& payload) {
    Bytes opts;
    if (t.mss) {
        opts.push_back(2);
        opts.push_back(4);
        put16(opts, *t.mss);
    }
    if (t.wscale) {
        opts.push_back(1);
        opts.push_back(3);
        opts.push_back(3);
        opts.push_back(7);
    }
    Bytes seg;
    put16(seg, t.sport);
    put16(seg, t.dport);
    put32(seg, t.seq);
    put32(seg, t.ack);
    seg.push_back(static_cast<std::uint8_t>((5 + opts.size() / 4) << 4));
    seg.push_back(t.flags);
    put16(seg, t.window);
    put16(seg, 0);
    put16(seg, 0);
    seg.insert(seg.end(), opts.begin(), opts.end());
    seg.insert(seg.end(), payload.begin(), payload.end());
    set16(seg, 16, pseudo_checksum(ip.src.ip, ip.dst.ip, 6, seg));
    Bytes f = eth_header(ip.src, ip.dst, 0x0800);
    const Bytes h = ip_header(ip, 6, seg.size());
    f.insert(f.end(), h.begin(), h.end());
    f.insert(f.end(), seg.begin(), seg.end());
    return f;
}

inline Bytes udp_frame(const RawIp& ip, std::uint16_t sport, std::uint16_t dport, const Bytes& payload,
                       bool zero_checksum = false) {
    Bytes seg;
    put16(seg, sport);
    put16(seg, dport);
    put16(seg, static_cast<std::uint16_t>(8 + payload.size()));
    put16(seg, 0);
    seg.insert(seg.end(), payload.begin(), payload.end());
    if (!zero_checksum) set16(seg, 6, pseudo_checksum(ip.src.ip, ip.dst.ip, 17, seg));
    Bytes f = eth_header(ip.src, ip.dst, 0x0800);
    const Bytes h = ip_header(ip, 17, seg.size());
    f.insert(f.end(), h.begin(), h.end());
    f.insert(f.end(), seg.begin(), seg.end());
    return f;
}

inline Bytes icmp_frame(const RawIp& ip, std::uint8_t type, const Bytes& payload) {
    Bytes seg{type, 0, 0, 0};
    put32(seg, 0x12340001);
    seg.insert(seg.end(), payload.begin(), payload.end());
    set16(seg, 2, naive_checksum(seg));
    Bytes f = eth_header(ip.src, ip.dst, 0x0800);
    const Bytes h = ip_header(ip, 1, seg.size());
    f.insert(f.end(), h.begin(), h.end());
    f.insert(f.end(), seg.begin(), seg.end());
    return f;
}

inline Bytes random_bytes(Rng& rng, std::size_t n) {
    Bytes b(n);
    rng.fill(b);
    return b;
}

struct FrameMix {
    std::size_t hosts = 12;
    double p_bad_checksum = 0.05;
    double p_truncate = 0.03;
    double p_trailer = 0.03;
    double p_runt = 0.0;  // frames shorter than an Ethernet header
    double p_port_zero = 0.01;
    double p_odd = 0.04;  // non-IPv4, fragments, bad IHL
    std::size_t max_payload = 300;
};

/// A random frame exercising the shapes the codec has to handle.
inline Bytes random_frame(Rng& rng, const FrameMix& mix = {}) {
    static constexpr std::uint8_t kTtls[] = {64, 128, 255, 57, 63, 121};
    static constexpr std::uint16_t kMss[] = {1460, 1380, 536, 1440, 8960};
    static constexpr std::uint16_t kPorts[] = {80, 443, 22, 53, 25, 8080, 3389, 445, 1234, 50000};
    static constexpr std::uint8_t kTos[] = {0, 0, 0, 0x10, 0x28, 0xb8};

    if (rng.uniform01() < mix.p_runt) return random_bytes(rng, rng.uniform(14));

    RawIp ip;
    ip.src = make_host(static_cast<std::uint32_t>(rng.uniform(mix.hosts)));
    do {
        ip.dst = make_host(static_cast<std::uint32_t>(rng.uniform(mix.hosts)));
    } while (ip.dst.ip == ip.src.ip && mix.hosts > 1);
    ip.ttl = kTtls[rng.uniform(std::size(kTtls))];
    ip.tos = kTos[rng.uniform(std::size(kTos))];
    ip.id = static_cast<std::uint16_t>(rng.next());
    if (rng.uniform(10) == 0) ip.options = {0x01, 0x01, 0x01, 0x00};
    const Bytes payload = random_bytes(rng, rng.uniform(3) == 0 ? 0 : rng.uniform(mix.max_payload + 1));

    auto port = [&] {
        if (rng.uniform01() < mix.p_port_zero) return std::uint16_t{0};
        return rng.uniform(3) == 0 ? static_cast<std::uint16_t>(rng.uniform_between(1, 65535))
                                   : kPorts[rng.uniform(std::size(kPorts))];
    };

    Bytes f;
    const double odd = rng.uniform01();
    if (odd < mix.p_odd / 4) {
        f = eth_header(ip.src, ip.dst, rng.uniform(2) ? 0x0806 : 0x86DD);
        const Bytes body = random_bytes(rng, 28 + rng.uniform(40));
        f.insert(f.end(), body.begin(), body.end());
        return f;
    }
    if (odd < mix.p_odd / 2) {
        ip.flags_fragment = static_cast<std::uint16_t>(0x2000 | (1 + rng.uniform(100)));
    }

    const auto kind = rng.uniform(10);
    if (kind < 7) {
        RawTcp t;
        t.sport = port();
        t.dport = port();
        t.seq = static_cast<std::uint32_t>(rng.next());
        t.ack = static_cast<std::uint32_t>(rng.next());
        t.flags = static_cast<std::uint8_t>(rng.uniform(64));
        t.window = static_cast<std::uint16_t>(rng.uniform(4) == 0 ? rng.uniform(65536) : 1000 * (1 + rng.uniform(60)));
        if (rng.uniform(3) == 0) t.mss = kMss[rng.uniform(std::size(kMss))];
        t.wscale = rng.uniform(4) == 0;
        f = tcp_frame(ip, t, payload);
        if (rng.uniform01() < mix.p_bad_checksum) {
            const std::size_t at = 14 + 20 + ip.options.size() + 16;
            f[at] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
        }
    } else if (kind < 9) {
        f = udp_frame(ip, port(), port(), payload, rng.uniform(8) == 0);
    } else {
        f = icmp_frame(ip, rng.uniform(2) ? 8 : 0, payload);
    }

    if (odd >= mix.p_odd / 2 && odd < mix.p_odd) {
        // broken IHL: claims more header than the frame holds, or a bad version
        if (rng.uniform(2)) {
            f[14] = 0x4F;
            f.resize(std::min<std::size_t>(f.size(), 14 + 40));
        } else {
            f[14] = static_cast<std::uint8_t>(0x60 | (f[14] & 0x0F));
        }
    }
    if (rng.uniform01() < mix.p_truncate && f.size() > 15) f.resize(14 + rng.uniform(f.size() - 14));
    if (rng.uniform01() < mix.p_trailer) f.resize(f.size() + 1 + rng.uniform(20), 0);
    return f;
}

struct TimedFrame {
    TimeUs time = 0;
    Bytes bytes;
};

/// `n` frames with non-decreasing timestamps; some share a timestamp.
inline std::vector<TimedFrame> random_capture(Rng& rng, std::size_t n, const FrameMix& mix = {},
                                              TimeUs start = 1'600'000'000'000'000) {
    std::vector<TimedFrame> out;
    out.reserve(n);
    TimeUs t = start;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform(10) != 0) t += static_cast<TimeUs>(rng.uniform(20000));
        out.push_back({t, random_frame(rng, mix)});
    }
    return out;
}

inline void write_capture(const std::filesystem::path& path, const std::vector<TimedFrame>& frames) {
    std::vector<injectkit::PacketRecord> recs;
    recs.reserve(frames.size());
    for (const auto& f : frames) recs.push_back(injectkit::PacketRecord::from_bytes(f.time, f.bytes));
    injectkit::write_pcap(path, injectkit::CaptureMeta{}, recs);
}

// --- raw decoding oracle --------------------------------------------------------

struct RawView {
    bool runt = false;  // the codec must refuse it: no Ethernet header, or IPv4 cut inside its header
    bool ipv4 = false;
    std::uint8_t ttl = 0, tos = 0, proto = 0;
    std::uint32_t src = 0, dst = 0;
    std::uint16_t total_len = 0;
    std::size_t l3_len = 0;
    bool tcp = false, udp = false;
    std::uint16_t sport = 0, dport = 0, window = 0;
    std::uint8_t flags = 0;
    std::uint32_t seq = 0, ack = 0;
    std::optional<std::uint16_t> mss;
    std::size_t payload_len = 0;  // bytes after every decodable header, link padding excluded
    bool tcp_checksum_checkable = false;
    bool tcp_checksum_ok = false;
};

inline RawView raw_decode(const Bytes& f) {
    RawView v;
    v.runt = f.size() < 14 || (get16(f, 12) == 0x0800 && f.size() < 34);
    if (v.runt) return v;
    const std::size_t l3 = 14;
    const std::size_t l3_len = f.size() - l3;
    v.payload_len = l3_len;
    if (get16(f, 12) != 0x0800) return v;
    const std::size_t ihl = std::size_t{f[l3] & 0x0Fu} * 4;
    if ((f[l3] >> 4) != 4 || ihl < 20 || ihl > l3_len) return v;
    v.ipv4 = true;
    v.tos = f[l3 + 1];
    v.total_len = get16(f, l3 + 2);
    v.ttl = f[l3 + 8];
    v.proto = f[l3 + 9];
    v.src = get32(f, l3 + 12);
    v.dst = get32(f, l3 + 16);
    v.l3_len = l3_len;
    const std::size_t end = std::min<std::size_t>(std::max<std::size_t>(v.total_len, ihl), l3_len);
    const std::size_t body = l3 + ihl;
    const std::size_t body_len = l3 + end - body;
    v.payload_len = body_len;
    const bool first_fragment = (get16(f, l3 + 6) & 0x1FFF) == 0;
    if (!first_fragment) return v;
    if (v.proto == 6 && body_len >= 20) {
        const std::size_t off = static_cast<std::size_t>(f[body + 12] >> 4) * 4;
        if (off < 20 || off > body_len) return v;
        v.tcp = true;
        v.sport = get16(f, body);
        v.dport = get16(f, body + 2);
        v.seq = get32(f, body + 4);
        v.ack = get32(f, body + 8);
        v.flags = f[body + 13];
        v.window = get16(f, body + 14);
        for (std::size_t i = body + 20; i < body + off;) {
            const auto kind = f[i];
            if (kind == 0) break;
            if (kind == 1) {
                ++i;
                continue;
            }
            if (i + 1 >= body + off) break;
            const std::size_t len = f[i + 1];
            if (len < 2 || i + len > body + off) break;
            if (kind == 2 && len == 4) {
                v.mss = get16(f, i + 2);
                break;
            }
            i += len;
        }
        v.payload_len = body_len - off;
        if (l3_len >= v.total_len) {
            v.tcp_checksum_checkable = true;
            const Bytes seg(f.begin() + static_cast<std::ptrdiff_t>(body),
                            f.begin() + static_cast<std::ptrdiff_t>(body + body_len));
            Bytes ph;
            put32(ph, v.src);
            put32(ph, v.dst);
            ph.push_back(0);
            ph.push_back(6);
            put16(ph, static_cast<std::uint16_t>(seg.size()));
            ph.insert(ph.end(), seg.begin(), seg.end());
            // a correct segment sums to all ones, so its complement is zero
            v.tcp_checksum_ok = naive_checksum(ph) == 0;
        }
    } else if (v.proto == 17 && body_len >= 8) {
        v.udp = true;
        v.sport = get16(f, body);
        v.dport = get16(f, body + 2);
        v.payload_len = body_len - 8;
    } else if (v.proto == 1 && body_len >= 8) {
        v.payload_len = body_len - 8;
    }
    return v;
}

/// Feature value by name as the oracle sees it.
inline std::optional<std::uint64_t> raw_feature(const RawView& v, const std::string& name) {
    if (!v.ipv4) return std::nullopt;
    if (name == "ttl") return v.ttl;
    if (name == "tos") return v.tos;
    if (name == "protocol") return v.proto;
    if (name == "src_ip") return v.src;
    if (name == "dst_ip") return v.dst;
    if (name == "mss") return v.tcp && v.mss ? std::optional<std::uint64_t>(*v.mss) : std::nullopt;
    if (name == "window_size") return v.tcp ? std::optional<std::uint64_t>(v.window) : std::nullopt;
    if (name == "src_port") return v.tcp || v.udp ? std::optional<std::uint64_t>(v.sport) : std::nullopt;
    if (name == "dst_port") return v.tcp || v.udp ? std::optional<std::uint64_t>(v.dport) : std::nullopt;
    return std::nullopt;
}

/// Shannon entropy in bits, summed in long double from the largest share down.
inline double oracle_entropy(const std::map<std::uint64_t, std::uint64_t>& counts) {
    std::vector<long double> shares;
    long double total = 0;
    for (const auto& [k, c] : counts) total += static_cast<long double>(c);
    if (total == 0) return 0.0;
    for (const auto& [k, c] : counts) {
        if (c > 0) shares.push_back(static_cast<long double>(c) / total);
    }
    std::sort(shares.rbegin(), shares.rend());
    long double h = 0;
    for (long double p : shares) h -= p * std::log(p);
    return static_cast<double>(h / std::log(2.0L));
}

/// Per-window entropy, novelty and prefix entropy by direct recomputation.
struct OracleSeries {
    std::vector<double> entropy, novelty, cumulative;
};

inline OracleSeries oracle_series(const std::vector<std::pair<TimeUs, std::optional<std::uint64_t>>>& obs, TimeUs start,
                                  TimeUs end, std::size_t n) {
    const auto span = end - start;
    std::vector<std::vector<std::uint64_t>> per(n);
    for (const auto& [t, value] : obs) {
        if (!value) continue;
        std::size_t w = 0;
        if (span > 0) {
            // floor((t - start) / (span / n)), last window closed on the right
            w = std::min<std::size_t>(static_cast<std::size_t>(static_cast<unsigned __int128>(t - start) * n / span), n - 1);
        }
        per[w].push_back(*value);
    }
    OracleSeries out;
    for (std::size_t w = 0; w < n; ++w) {
        std::map<std::uint64_t, std::uint64_t> here, prefix;
        for (auto v : per[w]) ++here[v];
        std::set<std::uint64_t> earlier;
        for (std::size_t u = 0; u < w; ++u) earlier.insert(per[u].begin(), per[u].end());
        std::set<std::uint64_t> fresh;
        for (auto v : per[w]) {
            if (!earlier.contains(v)) fresh.insert(v);
        }
        for (std::size_t u = 0; u <= w; ++u) {
            for (auto v : per[u]) ++prefix[v];
        }
        out.entropy.push_back(oracle_entropy(here));
        out.novelty.push_back(static_cast<double>(fresh.size()));
        out.cumulative.push_back(oracle_entropy(prefix));
    }
    return out;
}

/// IANA snapshot read straight from the CSV asset.
inline std::set<std::uint16_t> oracle_iana_ports() {
    std::set<std::uint16_t> out;
    std::ifstream in(std::string(INJECTKIT_DATA_DIR) + "/iana_assigned_ports.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.insert(static_cast<std::uint16_t>(std::stoul(line.substr(0, line.find(',')))));
    }
    return out;
}

} // namespace testkit
