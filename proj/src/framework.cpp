#include "injectkit/framework.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "injectkit/digest.hpp"
#include "injectkit/error.hpp"

namespace injectkit {

std::string_view param_type_name(ParamType t) noexcept {
    switch (t) {
    case ParamType::Ip: return "ip";
    case ParamType::IpList: return "ip-list";
    case ParamType::Mac: return "mac";
    case ParamType::Port: return "port";
    case ParamType::PortList: return "port-list";
    case ParamType::Integer: return "integer";
    case ParamType::Number: return "number";
    case ParamType::Boolean: return "boolean";
    case ParamType::Text: return "text";
    case ParamType::Path: return "path";
    case ParamType::Hex: return "hex";
    }
    return "?";
}

std::string_view default_source_name(DefaultSource s) noexcept {
    switch (s) {
    case DefaultSource::UserRequired: return "user-required";
    case DefaultSource::StatsDerived: return "stats-derived";
    case DefaultSource::Constant: return "constant";
    }
    return "?";
}

const ParamSpec* AttackSchema::find(std::string_view key) const noexcept {
    for (const auto& p : params) {
        if (p.key == key) return &p;
    }
    return nullptr;
}

std::vector<ParamSpec> common_params() {
    return {
        {"attacker.ip", ParamType::IpList, DefaultSource::StatsDerived, "",
         "attacker address(es); default: a random background host other than the victim"},
        {"attacker.mac", ParamType::Mac, DefaultSource::StatsDerived, "",
         "attacker MAC; default: observed MAC, else a derived locally administered one"},
        {"victim.ip", ParamType::IpList, DefaultSource::StatsDerived, "",
         "victim address(es); default: the most active background host"},
        {"victim.mac", ParamType::Mac, DefaultSource::StatsDerived, "",
         "victim MAC; default: observed MAC, else a derived locally administered one"},
        {"ports", ParamType::PortList, DefaultSource::StatsDerived, "", "target ports, e.g. 22,80,8000-8010"},
        {"start_time", ParamType::Number, DefaultSource::StatsDerived, "",
         "attack start, UNIX seconds; default: middle of the capture"},
        {"start_offset", ParamType::Number, DefaultSource::Constant, "",
         "attack start as seconds after the capture start (ignored when start_time is set)"},
        {"intensity", ParamType::Number, DefaultSource::Constant, "1000", "target packets per second"},
    };
}

UserParams parse_user_params(std::span<const std::string> tokens) {
    UserParams out;
    std::set<std::string> seen;
    for (const auto& tok : tokens) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(Errc::InvalidValue, "expected key=value, got '" + tok + "'");
        std::string key = tok.substr(0, eq);
        if (!seen.insert(key).second) throw Error(Errc::InvalidValue, "parameter '" + key + "' given twice");
        out.emplace_back(std::move(key), tok.substr(eq + 1));
    }
    return out;
}

// --- value parsing ------------------------------------------------------------

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view why) {
    throw Error(Errc::InvalidValue, "parameter '" + key + "': '" + value + "' " + std::string(why));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> to_number(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    return std::nullopt;
}

std::vector<Ipv4Address> parse_ip_list(const std::string& key, const std::string& value) {
    std::vector<Ipv4Address> out;
    for (const auto& part : split(value, ',')) {
        auto ip = Ipv4Address::parse(part);
        if (!ip) bad_value(key, value, "is not an IPv4 address list");
        out.push_back(*ip);
    }
    return out;
}

std::vector<std::uint16_t> parse_port_list(const std::string& key, const std::string& value) {
    std::vector<std::uint16_t> out;
    for (const auto& part : split(value, ',')) {
        const auto dash = part.find('-');
        auto lo = to_int(part.substr(0, dash));
        auto hi = dash == std::string::npos ? lo : to_int(part.substr(dash + 1));
        if (!lo || !hi || *lo < 0 || *hi > 65535 || *lo > *hi) bad_value(key, value, "is not a port list");
        for (auto p = *lo; p <= *hi; ++p) out.push_back(static_cast<std::uint16_t>(p));
    }
    return out;
}

bool is_hex(std::string_view s) {
    if (s.size() % 2 != 0) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

/// Validates `value` against `type` and returns its canonical text.
std::string check_value(const ParamSpec& spec, const std::string& value) {
    const auto& key = spec.key;
    switch (spec.type) {
    case ParamType::Ip:
        if (auto ip = Ipv4Address::parse(value)) return ip->to_string();
        bad_value(key, value, "is not an IPv4 address");
    case ParamType::IpList: {
        std::string out;
        for (auto ip : parse_ip_list(key, value)) out += (out.empty() ? "" : ",") + ip.to_string();
        return out;
    }
    case ParamType::Mac:
        if (auto mac = MacAddress::parse(value)) return mac->to_string();
        bad_value(key, value, "is not a MAC address");
    case ParamType::Port: {
        auto v = to_int(value);
        if (!v || *v < 0 || *v > 65535) bad_value(key, value, "is not a port number");
        return std::to_string(*v);
    }
    case ParamType::PortList: {
        std::string out;
        for (auto p : parse_port_list(key, value)) out += (out.empty() ? "" : ",") + std::to_string(p);
        return out;
    }
    case ParamType::Integer: {
        auto v = to_int(value);
        if (!v) bad_value(key, value, "is not an integer");
        return std::to_string(*v);
    }
    case ParamType::Number: {
        auto v = to_number(value);
        if (!v) bad_value(key, value, "is not a number");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        return buf;
    }
    case ParamType::Boolean: {
        auto v = to_bool(value);
        if (!v) bad_value(key, value, "is not a boolean");
        return *v ? "true" : "false";
    }
    case ParamType::Text:
        return value;
    case ParamType::Path:
        if (value.empty()) bad_value(key, value, "is not a path");
        return value;
    case ParamType::Hex: {
        std::string lower = value;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!is_hex(lower)) bad_value(key, value, "is not an even-length hex string");
        return lower;
    }
    }
    return value;
}

MacAddress mac_for(const StatsDb& db, Ipv4Address ip, std::uint64_t seed) {
    if (auto it = db.hosts.find(ip); it != db.hosts.end() && it->second.mac) return *it->second.mac;
    return MacAddress::local_from(seed ^ (std::uint64_t{ip.value} * 0x9e3779b97f4a7c15ULL));
}

/// A private address absent from the background, deterministic in `seed`.
Ipv4Address unused_private_host(const StatsDb& db, std::uint64_t seed) {
    Rng rng(mix64(seed ^ 0x5eed0f00d));
    for (int attempt = 0; attempt < 1 << 16; ++attempt) {
        const Ipv4Address ip(10, static_cast<std::uint8_t>(rng.uniform(256)), static_cast<std::uint8_t>(rng.uniform(256)),
                             static_cast<std::uint8_t>(1 + rng.uniform(254)));
        if (!db.hosts.contains(ip)) return ip;
    }
    throw Error(Errc::InsufficientHosts, "no unused private address left");
}

} // namespace

std::string AttackParams::text(const std::string& key) const {
    auto it = extra.find(key);
    if (it == extra.end()) throw Error(Errc::InvalidValue, "parameter '" + key + "' is not set");
    return it->second;
}

std::int64_t AttackParams::integer(const std::string& key) const {
    const auto s = text(key);
    if (auto v = to_int(s)) return *v;
    bad_value(key, s, "is not an integer");
}

double AttackParams::number(const std::string& key) const {
    const auto s = text(key);
    if (auto v = to_number(s)) return *v;
    bad_value(key, s, "is not a number");
}

bool AttackParams::boolean(const std::string& key) const {
    const auto s = text(key);
    if (auto v = to_bool(s)) return *v;
    bad_value(key, s, "is not a boolean");
}

std::string AttackParams::canonical() const {
    std::string out = "attack=" + attack_name + "\n";
    auto endpoints = [&](const char* name, const std::vector<Endpoint>& eps) {
        out += name;
        out += '=';
        for (std::size_t i = 0; i < eps.size(); ++i) {
            if (i) out += ',';
            out += eps[i].ip.to_string() + "/" + eps[i].mac.to_string();
        }
        out += '\n';
    };
    endpoints("attackers", attackers);
    endpoints("victims", victims);
    out += "ports=";
    for (std::size_t i = 0; i < ports.size(); ++i) out += (i ? "," : "") + std::to_string(ports[i]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", intensity);
    out += "\nstart_time_us=" + std::to_string(start_time) + "\nintensity=" + buf +
           "\nseed=" + std::to_string(seed) + "\n";
    for (const auto& [k, v] : extra) out += "extra." + k + "=" + v + "\n";
    return out;
}

std::string AttackParams::digest() const {
    const auto d = sha224(canonical());
    return to_hex(d);
}

AttackParams validate_and_default(const UserParams& user, const StatsDb& db, const AttackSchema& schema,
                                  std::uint64_t seed) {
    std::map<std::string, std::string> given;
    for (const auto& [key, value] : user) {
        const ParamSpec* spec = schema.find(key);
        if (!spec) {
            throw Error(Errc::UnknownParameter, "attack '" + schema.attack_name + "' has no parameter '" + key + "'");
        }
        if (given.contains(key)) throw Error(Errc::InvalidValue, "parameter '" + key + "' given twice");
        given[key] = check_value(*spec, value);
    }
    for (const auto& spec : schema.params) {
        if (given.contains(spec.key)) continue;
        if (spec.source == DefaultSource::UserRequired) {
            throw Error(Errc::InvalidValue, "attack '" + schema.attack_name + "' requires parameter '" + spec.key + "'");
        }
    }

    AttackParams p;
    p.attack_name = schema.attack_name;
    p.seed = seed;

    auto needs_hosts = [&](const char* what) {
        if (db.hosts.empty()) {
            throw Error(Errc::EmptyBackground, std::string("background has no hosts to choose the ") + what + " from");
        }
    };

    std::vector<Ipv4Address> victims;
    if (auto it = given.find("victim.ip"); it != given.end()) {
        victims = parse_ip_list(it->first, it->second);
    } else {
        needs_hosts("victim");
        victims.push_back(most_active_host(db));
    }

    std::vector<Ipv4Address> attackers;
    if (auto it = given.find("attacker.ip"); it != given.end()) {
        attackers = parse_ip_list(it->first, it->second);
    } else {
        needs_hosts("attacker");
        std::vector<Ipv4Address> pool;
        for (const auto& [ip, h] : db.hosts) {
            if (std::find(victims.begin(), victims.end(), ip) == victims.end()) pool.push_back(ip);
        }
        if (pool.empty()) {
            attackers.push_back(unused_private_host(db, seed));
        } else {
            Rng rng(mix64(seed ^ 0xa77ac4e2));
            attackers.push_back(pool[rng.uniform(pool.size())]);
        }
    }

    for (std::size_t i = 0; i < attackers.size(); ++i) {
        MacAddress mac = mac_for(db, attackers[i], seed);
        if (i == 0 && given.contains("attacker.mac")) mac = *MacAddress::parse(given["attacker.mac"]);
        p.attackers.push_back({attackers[i], mac});
    }
    for (std::size_t i = 0; i < victims.size(); ++i) {
        MacAddress mac = mac_for(db, victims[i], seed);
        if (i == 0 && given.contains("victim.mac")) mac = *MacAddress::parse(given["victim.mac"]);
        p.victims.push_back({victims[i], mac});
    }

    if (auto it = given.find("ports"); it != given.end()) p.ports = parse_port_list(it->first, it->second);

    if (auto it = given.find("start_time"); it != given.end()) {
        const double secs = *to_number(it->second);
        p.start_time = static_cast<TimeUs>(std::llround(secs * 1e6));
        if (db.file.packet_count > 0 && p.start_time < db.file.capture_start) {
            bad_value(it->first, it->second, "is before the capture start");
        }
    } else if (auto off = given.find("start_offset"); off != given.end()) {
        const double secs = *to_number(off->second);
        if (secs < 0) bad_value(off->first, off->second, "must not be negative");
        p.start_time = db.file.capture_start + static_cast<TimeUs>(std::llround(secs * 1e6));
    } else {
        p.start_time = db.file.capture_start + (db.file.capture_end - db.file.capture_start) / 2;
    }

    if (auto it = given.find("intensity"); it != given.end()) {
        p.intensity = *to_number(it->second);
        if (!(p.intensity > 0)) bad_value(it->first, it->second, "must be positive");
    }

    static const std::set<std::string> kCommon = {"attacker.ip", "attacker.mac", "victim.ip", "victim.mac",
                                                  "ports",       "start_time",   "start_offset", "intensity"};
    for (const auto& spec : schema.params) {
        if (kCommon.contains(spec.key)) continue;
        if (auto it = given.find(spec.key); it != given.end()) {
            p.extra[spec.key] = it->second;
        } else if (spec.source == DefaultSource::Constant && !spec.default_text.empty()) {
            p.extra[spec.key] = check_value(spec, spec.default_text);
        }
    }
    return p;
}

// --- timing -----------------------------------------------------------------

std::vector<double> complementary_rates(const TimeWindowSeries& bg_rate, double R) {
    double peak = 0.0;
    for (double b : bg_rate.values) peak = std::max(peak, b);
    std::vector<double> rates;
    rates.reserve(bg_rate.values.size());
    for (double b : bg_rate.values) {
        if (peak <= 0.0) {
            rates.push_back(R);
        } else {
            rates.push_back(std::max(R * (1.0 - b / peak), kComplementFloor * R));
        }
    }
    return rates;
}

namespace {

constexpr TimeUs kNoEnd = std::numeric_limits<TimeUs>::max();

// Slot k of a segment sits at begin + (k + d_k) * gap with d_k uniform in
// [0, 0.1], so neighbouring gaps stay within [0.9, 1.1] * gap and the error
// never accumulates.
void fill_segment(TimeUs begin, TimeUs end, double rate, Rng& rng, std::size_t budget, std::vector<TimeUs>& out) {
    const double gap = 1e6 / rate;
    const double jitter_span = kJitterHigh - 1.0;
    for (std::uint64_t k = 0; out.size() < budget; ++k) {
        const double offset = (static_cast<double>(k) + rng.uniform_real(0.0, jitter_span)) * gap;
        if (offset >= static_cast<double>(end - begin)) break;
        out.push_back(begin + static_cast<TimeUs>(offset));
    }
}

TimeUs to_us(double secs) { return static_cast<TimeUs>(std::llround(secs * 1e6)); }

} // namespace

TimestampPlan complementary_rate_plan(const TimeWindowSeries& bg_rate, double R, TimeUs start, std::size_t budget,
                                      std::uint64_t seed) {
    if (!(R > 0)) throw Error(Errc::InvalidValue, "injection rate must be positive");
    TimestampPlan plan;
    plan.timestamps.reserve(budget);
    Rng rng(seed);
    const auto rates = complementary_rates(bg_rate, R);
    const std::size_t n = bg_rate.values.size();
    TimeUs cursor = start;
    for (std::size_t i = 0; i < n && plan.timestamps.size() < budget; ++i) {
        const TimeUs ws = to_us(bg_rate.window_start_times[i]);
        const TimeUs we = i + 1 < n ? to_us(bg_rate.window_start_times[i + 1]) : ws + to_us(bg_rate.window_length);
        if (we <= cursor) continue;
        const TimeUs begin = std::max(ws, cursor);
        fill_segment(begin, we, rates[i], rng, budget, plan.timestamps);
        cursor = we;
    }
    if (plan.timestamps.size() < budget) fill_segment(cursor, kNoEnd, R, rng, budget, plan.timestamps);
    return plan;
}

TimestampPlan uniform_rate_plan(double rate, TimeUs start, std::size_t budget, std::uint64_t seed) {
    if (!(rate > 0)) throw Error(Errc::InvalidValue, "injection rate must be positive");
    TimestampPlan plan;
    plan.timestamps.reserve(budget);
    Rng rng(seed);
    fill_segment(start, kNoEnd, rate, rng, budget, plan.timestamps);
    return plan;
}

// --- sampling -----------------------------------------------------------------

FieldSampler::FieldSampler(const Counts& counts) {
    std::uint64_t total = 0;
    for (const auto& [value, count] : counts) {
        if (count == 0) continue;
        total += count;
        values_.push_back(value);
        cumulative_.push_back(total);
    }
    if (values_.empty()) throw Error(Errc::EmptyDistribution, "cannot sample from an empty distribution");
}

std::uint64_t FieldSampler::operator()(Rng& rng) const {
    const std::uint64_t u = rng.uniform(cumulative_.back());
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return values_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<std::uint64_t> sample_field(const FieldDistribution& dist, std::uint64_t seed, std::size_t n) {
    const FieldSampler sampler(dist.counts);
    Rng rng(seed);
    std::vector<std::uint64_t> out(n);
    for (auto& v : out) v = sampler(rng);
    return out;
}

namespace {
std::optional<FieldSampler> sampler_for(const StatsDb& db, Field f) {
    auto it = db.distributions.find(f);
    if (it == db.distributions.end() || it->second.empty()) return std::nullopt;
    return FieldSampler(it->second.counts);
}
} // namespace

HeaderSamplers::HeaderSamplers(const StatsDb& db)
    : ttl(sampler_for(db, Field::ttl)), window(sampler_for(db, Field::window_size)), mss(sampler_for(db, Field::mss)) {}

std::uint8_t HeaderSamplers::draw_ttl(Rng& rng) const {
    return ttl ? static_cast<std::uint8_t>((*ttl)(rng)) : kFallbackTtl;
}

std::uint16_t HeaderSamplers::draw_window(Rng& rng) const {
    return window ? static_cast<std::uint16_t>((*window)(rng)) : kFallbackWindow;
}

std::uint16_t HeaderSamplers::draw_mss(Rng& rng) const {
    return mss ? static_cast<std::uint16_t>((*mss)(rng)) : kFallbackMss;
}

// --- packet building -------------------------------------------------------------

namespace {
ParsedPacket ip_frame(const Endpoint& src, const Endpoint& dst, std::uint8_t ttl, std::uint16_t ip_id,
                      std::uint8_t protocol) {
    ParsedPacket p;
    p.eth.src = src.mac;
    p.eth.dst = dst.mac;
    p.eth.ether_type = ether_type::IPv4;
    Ipv4Header ip;
    ip.ttl = ttl;
    ip.id = ip_id;
    ip.flags_fragment = 0x4000;  // DF
    ip.protocol = protocol;
    ip.src = src.ip;
    ip.dst = dst.ip;
    p.ip = std::move(ip);
    return p;
}
} // namespace

ParsedPacket make_tcp(const Endpoint& src, const Endpoint& dst, std::uint8_t ttl, std::uint16_t ip_id,
                      const TcpSegment& seg, std::vector<std::uint8_t> payload) {
    ParsedPacket p = ip_frame(src, dst, ttl, ip_id, ip_proto::TCP);
    TcpHeader tcp;
    tcp.src_port = seg.src_port;
    tcp.dst_port = seg.dst_port;
    tcp.seq = seg.seq;
    tcp.ack = seg.ack;
    tcp.flags = seg.flags;
    tcp.window_size = seg.window;
    tcp.mss = seg.mss;
    p.tcp = std::move(tcp);
    p.payload = std::move(payload);
    finalize_packet(p);
    return p;
}

ParsedPacket make_udp(const Endpoint& src, const Endpoint& dst, std::uint8_t ttl, std::uint16_t ip_id,
                      std::uint16_t src_port, std::uint16_t dst_port, std::vector<std::uint8_t> payload) {
    ParsedPacket p = ip_frame(src, dst, ttl, ip_id, ip_proto::UDP);
    UdpHeader udp;
    udp.src_port = src_port;
    udp.dst_port = dst_port;
    p.udp = udp;
    p.payload = std::move(payload);
    finalize_packet(p);
    return p;
}

} // namespace injectkit
