#include <algorithm>
#include <cstring>
#include <unordered_set>

#include "attack_util.hpp"

namespace injectkit {

namespace detail {

const TimeWindowSeries& background_rate(const StatsDb& db) {
    static const TimeWindowSeries kEmpty{};
    auto it = db.interval_tables.find("packet_rate");
    return it == db.interval_tables.end() ? kEmpty : it->second;
}

namespace {
std::optional<FieldSampler> own(const Counts& c) {
    if (c.empty()) return std::nullopt;
    return FieldSampler(c);
}
} // namespace

HostProfile::HostProfile(const StatsDb& db, Ipv4Address ip) : global_(db) {
    if (auto it = db.hosts.find(ip); it != db.hosts.end()) {
        ttl_ = own(it->second.ttl_dist);
        window_ = own(it->second.window_dist);
        mss_ = own(it->second.mss_dist);
    }
}

std::uint8_t HostProfile::ttl(Rng& rng) const {
    return ttl_ ? static_cast<std::uint8_t>((*ttl_)(rng)) : global_.draw_ttl(rng);
}

std::uint16_t HostProfile::window(Rng& rng) const {
    return window_ ? static_cast<std::uint16_t>((*window_)(rng)) : global_.draw_window(rng);
}

std::uint16_t HostProfile::mss(Rng& rng) const {
    return mss_ ? static_cast<std::uint16_t>((*mss_)(rng)) : global_.draw_mss(rng);
}

std::vector<std::uint16_t> distinct_dynamic_ports(Rng& rng, std::size_t n) {
    constexpr std::size_t kRange = 65536 - kDynamicPortLow;
    if (n > kRange) {
        throw Error(Errc::InvalidValue, "at most " + std::to_string(kRange) + " distinct source ports are available");
    }
    std::vector<std::uint16_t> out;
    out.reserve(n);
    std::unordered_set<std::uint16_t> used;
    while (out.size() < n) {
        const auto p = dynamic_port(rng);
        if (used.insert(p).second) out.push_back(p);
    }
    return out;
}

} // namespace detail

GeneratedAttack finish_attack(std::vector<TimedPacket> packets, const AttackParams& params) {
    std::stable_sort(packets.begin(), packets.end(),
                     [](const TimedPacket& a, const TimedPacket& b) { return a.time < b.time; });
    GeneratedAttack g;
    g.label.attack_name = params.attack_name;
    g.label.packet_count = packets.size();
    if (!packets.empty()) {
        g.label.start_ts = packets.front().time;
        g.label.end_ts = packets.back().time;
    }
    g.label.params_digest = params.digest();
    g.packets = std::move(packets);
    g.params_echo = params;
    return g;
}

// --- payloads -----------------------------------------------------------------

namespace {

void put16le(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32le(std::vector<std::uint8_t>& b, std::uint32_t v) {
    put16le(b, static_cast<std::uint16_t>(v));
    put16le(b, static_cast<std::uint16_t>(v >> 16));
}

// 32-byte SMB1 header for SMB_COM_NEGOTIATE.
void smb1_header(std::vector<std::uint8_t>& b, bool reply) {
    const std::uint8_t magic[] = {0xFF, 'S', 'M', 'B'};
    b.insert(b.end(), magic, magic + 4);
    b.push_back(0x72);              // command
    put32le(b, 0);                  // status
    b.push_back(reply ? 0x98 : 0x18);  // flags: case-insensitive, canonical paths (+reply)
    put16le(b, 0xC853);             // flags2: unicode, NT status, long names, ...
    put16le(b, 0);                  // pid high
    for (int i = 0; i < 8; ++i) b.push_back(0);  // security features
    put16le(b, 0);                  // reserved
    put16le(b, 0);                  // tid
    put16le(b, 0xFEFF);             // pid
    put16le(b, 0);                  // uid
    put16le(b, 0);                  // mid
}

// NetBIOS session message header: type 0 and a 17-bit length.
void nbss_wrap(std::vector<std::uint8_t>& smb) {
    const auto len = smb.size();
    const std::uint8_t hdr[] = {0x00, static_cast<std::uint8_t>((len >> 16) & 0x01),
                                static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
    smb.insert(smb.begin(), hdr, hdr + 4);
}

} // namespace

std::vector<std::uint8_t> smb1_negotiate_request() {
    static const char* const kDialects[] = {"PC NETWORK PROGRAM 1.0", "LANMAN1.0", "Windows for Workgroups 3.1a",
                                            "LM1.2X002", "LANMAN2.1", "NT LM 0.12"};
    std::vector<std::uint8_t> body;
    for (const char* d : kDialects) {
        body.push_back(0x02);  // dialect buffer format
        body.insert(body.end(), d, d + std::strlen(d) + 1);
    }
    std::vector<std::uint8_t> b;
    smb1_header(b, false);
    b.push_back(0);  // word count
    put16le(b, static_cast<std::uint16_t>(body.size()));
    b.insert(b.end(), body.begin(), body.end());
    nbss_wrap(b);
    return b;
}

std::vector<std::uint8_t> smb1_negotiate_response(std::uint64_t challenge_seed) {
    std::vector<std::uint8_t> b;
    smb1_header(b, true);
    b.push_back(17);         // word count
    put16le(b, 5);           // dialect index: NT LM 0.12
    b.push_back(0x03);       // security mode: user level, challenge/response
    put16le(b, 50);          // max mpx count
    put16le(b, 1);           // max VCs
    put32le(b, 16644);       // max buffer size
    put32le(b, 65536);       // max raw size
    put32le(b, 0);           // session key
    put32le(b, 0x0000E3FD);  // capabilities
    put32le(b, 0);           // system time (low)
    put32le(b, 0);           // system time (high)
    put16le(b, 0);           // server time zone
    b.push_back(8);          // challenge length
    put16le(b, 8);           // byte count
    Rng rng(challenge_seed);
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(rng.next()));
    nbss_wrap(b);
    return b;
}

std::vector<std::uint8_t> memcached_stats_request(std::uint16_t request_id) {
    std::vector<std::uint8_t> b = {static_cast<std::uint8_t>(request_id >> 8), static_cast<std::uint8_t>(request_id),
                                   0, 0,   // sequence number
                                   0, 1,   // datagram count
                                   0, 0};  // reserved
    const char cmd[] = "stats\r\n";
    b.insert(b.end(), cmd, cmd + sizeof cmd - 1);
    return b;
}

std::vector<std::uint8_t> nbt_max_length_header() { return {0x00, 0x01, 0xFF, 0xFF}; }

} // namespace injectkit
