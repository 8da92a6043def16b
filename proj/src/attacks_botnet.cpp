#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "attack_util.hpp"

namespace injectkit {

using namespace detail;

namespace {

[[noreturn]] void csv_error(std::size_t row, const std::string& why) {
    throw Error(Errc::CsvParse, "botnet CSV row " + std::to_string(row) + ": " + why);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<BotnetRow> parse_botnet_csv(std::string_view text) {
    std::vector<BotnetRow> rows;
    std::size_t row = 0;
    bool first_line = true;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        if (first_line) {
            first_line = false;
            if (line.starts_with("time_offset")) continue;
        }
        ++row;
        std::vector<std::string_view> cols;
        std::size_t pos = 0;
        while (true) {
            const auto c = line.find(',', pos);
            cols.push_back(trim(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
            if (c == std::string_view::npos) break;
            pos = c + 1;
        }
        if (cols.size() != 5) csv_error(row, "expected 5 columns, found " + std::to_string(cols.size()));

        BotnetRow r;
        auto [p1, e1] = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), r.time_offset);
        if (e1 != std::errc{} || p1 != cols[0].data() + cols[0].size() || !std::isfinite(r.time_offset) ||
            r.time_offset < 0) {
            csv_error(row, "bad time_offset '" + std::string(cols[0]) + "'");
        }
        if (cols[1].empty() || cols[2].empty()) csv_error(row, "empty bot id");
        r.src_bot = cols[1];
        r.dst_bot = cols[2];
        if (r.src_bot == r.dst_bot) csv_error(row, "bot sends to itself");
        r.message_type = cols[3];
        auto [p4, e4] = std::from_chars(cols[4].data(), cols[4].data() + cols[4].size(), r.payload_size);
        if (e4 != std::errc{} || p4 != cols[4].data() + cols[4].size()) {
            csv_error(row, "bad payload_size '" + std::string(cols[4]) + "'");
        }
        if (r.payload_size > kMaxIpv4Payload) csv_error(row, "payload_size too large for one packet");
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const BotnetRow& a, const BotnetRow& b) { return a.time_offset < b.time_offset; });
    return rows;
}

namespace {

struct Bot {
    Endpoint ep;
    std::uint16_t port = 0;
    std::uint8_t ttl = 64;
};

std::map<std::string, Ipv4Address> parse_bindings(const std::string& text) {
    std::map<std::string, Ipv4Address> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto c = text.find(',', pos);
        const std::string item = text.substr(pos, c == std::string::npos ? std::string::npos : c - pos);
        const auto colon = item.rfind(':');
        std::optional<Ipv4Address> ip;
        if (colon != std::string::npos) ip = Ipv4Address::parse(item.substr(colon + 1));
        if (!ip || colon == 0) throw Error(Errc::InvalidValue, "bad bot binding '" + item + "', expected id:ip");
        out[item.substr(0, colon)] = *ip;
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

} // namespace

GeneratedAttack gen_p2p_botnet(AttackParams params, const StatsDb& db) {
    const std::string path = params.text("csv");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open botnet CSV " + path);
    std::ostringstream text;
    text << in.rdbuf();
    const auto rows = parse_botnet_csv(text.str());

    const std::string transport = params.text("transport");
    if (transport != "udp" && transport != "tcp") {
        throw Error(Errc::InvalidValue, "parameter 'transport' must be udp or tcp, got '" + transport + "'");
    }

    // bot ids in order of first appearance
    std::vector<std::string> ids;
    for (const auto& r : rows) {
        for (const auto* id : {&r.src_bot, &r.dst_bot}) {
            if (std::find(ids.begin(), ids.end(), *id) == ids.end()) ids.push_back(*id);
        }
    }

    Rng host_rng = stream(params, kHosts);
    std::map<std::string, Ipv4Address> bound;
    if (params.has("bots")) {
        bound = parse_bindings(params.text("bots"));
        for (const auto& id : ids) {
            if (!bound.contains(id)) throw Error(Errc::UnboundBot, "bot '" + id + "' has no binding in bots=");
        }
    } else if (params.boolean("reuse_hosts")) {
        std::vector<Ipv4Address> pool;
        for (const auto& [ip, h] : db.hosts) pool.push_back(ip);
        if (pool.size() < ids.size()) {
            throw Error(Errc::InsufficientHosts, "script needs " + std::to_string(ids.size()) + " bots but the background has " +
                                                     std::to_string(pool.size()) + " hosts");
        }
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[host_rng.uniform(i)]);
        for (std::size_t i = 0; i < ids.size(); ++i) bound[ids[i]] = pool[i];
    } else {
        std::set<Ipv4Address> taken;
        for (const auto& id : ids) {
            Ipv4Address ip;
            do {
                // 172.16.0.0/12
                ip = Ipv4Address(0xAC100000u | static_cast<std::uint32_t>(host_rng.uniform(1u << 20)));
            } while ((ip.value & 0xFF) == 0 || (ip.value & 0xFF) == 255 || db.hosts.contains(ip) || taken.contains(ip));
            taken.insert(ip);
            bound[id] = ip;
        }
    }

    Rng hdr = stream(params, kHeaders);
    Rng port_rng = stream(params, kPorts);
    const auto ports = distinct_dynamic_ports(port_rng, ids.size());
    std::map<std::string, Bot> bots;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Ipv4Address ip = bound[ids[i]];
        Bot b;
        auto it = db.hosts.find(ip);
        b.ep = {ip, it != db.hosts.end() && it->second.mac ? *it->second.mac : MacAddress::local_from(params.seed ^ ip.value)};
        b.port = ports[i];
        b.ttl = HostProfile(db, ip).ttl(hdr);
        bots[ids[i]] = b;
    }
    std::string binding_echo;
    for (const auto& id : ids) binding_echo += (binding_echo.empty() ? "" : ",") + id + ":" + bound[id].to_string();
    params.extra["bots"] = binding_echo;

    Rng payload_rng = stream(params, kPayload);
    auto make_payload = [&](const BotnetRow& r) {
        std::vector<std::uint8_t> p(r.message_type.begin(), r.message_type.end());
        p.resize(std::min(p.size(), r.payload_size));
        const auto tag = p.size();
        p.resize(r.payload_size);
        payload_rng.fill(std::span<std::uint8_t>(p).subspan(tag));
        return p;
    };
    auto at = [&](const BotnetRow& r) { return params.start_time + static_cast<TimeUs>(std::llround(r.time_offset * 1e6)); };

    std::vector<TimedPacket> out;
    if (transport == "udp") {
        for (const auto& r : rows) {
            const Bot& s = bots[r.src_bot];
            const Bot& d = bots[r.dst_bot];
            out.push_back({at(r), make_udp(s.ep, d.ep, s.ttl, ip_id(hdr), s.port, d.port, make_payload(r))});
        }
    } else {
        // one connection per ordered bot pair, opened before its first message
        struct Conn {
            std::uint32_t a = 0, b = 0;
            bool open = false;
        };
        std::map<std::pair<std::string, std::string>, Conn> conns;
        Rng seqs = stream(params, kSeqs);
        for (const auto& r : rows) {
            const Bot& s = bots[r.src_bot];
            const Bot& d = bots[r.dst_bot];
            Conn& c = conns[{r.src_bot, r.dst_bot}];
            TimeUs t = at(r);
            if (!c.open) {
                c.a = isn(seqs);
                c.b = isn(seqs);
                out.push_back({t, make_tcp(s.ep, d.ep, s.ttl, ip_id(hdr), {s.port, d.port, c.a, 0, tcp_flags::SYN, kFallbackWindow, kFallbackMss})});
                ++c.a;
                t += reply_delay(hdr);
                out.push_back({t, make_tcp(d.ep, s.ep, d.ttl, ip_id(hdr),
                                           {d.port, s.port, c.b, c.a, tcp_flags::SYN | tcp_flags::ACK, kFallbackWindow, kFallbackMss})});
                ++c.b;
                t += reply_delay(hdr);
                out.push_back({t, make_tcp(s.ep, d.ep, s.ttl, ip_id(hdr), {s.port, d.port, c.a, c.b, tcp_flags::ACK, kFallbackWindow, std::nullopt})});
                t += reply_delay(hdr);
                c.open = true;
            }
            auto payload = make_payload(r);
            const auto len = static_cast<std::uint32_t>(payload.size());
            out.push_back({t, make_tcp(s.ep, d.ep, s.ttl, ip_id(hdr),
                                       {s.port, d.port, c.a, c.b, tcp_flags::PSH | tcp_flags::ACK, kFallbackWindow, std::nullopt},
                                       std::move(payload))});
            c.a += len;
            t += reply_delay(hdr);
            out.push_back({t, make_tcp(d.ep, s.ep, d.ttl, ip_id(hdr), {d.port, s.port, c.b, c.a, tcp_flags::ACK, kFallbackWindow, std::nullopt})});
        }
    }
    if (out.empty()) throw Error(Errc::CsvParse, "botnet CSV has no message rows");
    return finish_attack(std::move(out), params);
}

} // namespace injectkit
