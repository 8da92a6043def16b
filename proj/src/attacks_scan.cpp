#include <algorithm>

#include "attack_util.hpp"
#include "injectkit/data_tables.hpp"

namespace injectkit {

using namespace detail;

inline constexpr std::size_t kDefaultScanPorts = 1000;

namespace {

const std::set<std::uint16_t>& ports_open_on(const StatsDb& db, Ipv4Address ip) {
    static const std::set<std::uint16_t> kNone;
    auto it = db.hosts.find(ip);
    return it == db.hosts.end() ? kNone : it->second.ports_open;
}

} // namespace

GeneratedAttack gen_portscan(AttackParams params, const StatsDb& db) {
    Rng port_rng = stream(params, kPorts);
    std::vector<std::uint16_t> ports = params.ports;
    if (ports.empty()) {
        ports = top_tcp_ports(kDefaultScanPorts);
        // probe order is randomized, as real scanners do
        for (std::size_t i = ports.size(); i > 1; --i) std::swap(ports[i - 1], ports[port_rng.uniform(i)]);
        params.ports = ports;
    }

    const Endpoint& attacker = params.attacker();
    const Endpoint& victim = params.victim();
    const auto& open = ports_open_on(db, victim.ip);
    const HeaderSamplers atk(db);
    const HostProfile vic(db, victim.ip);

    const auto plan = complementary_rate_plan(background_rate(db), params.intensity, params.start_time, ports.size(),
                                              split_seed(params.seed, kTiming));
    Rng hdr = stream(params, kHeaders);
    Rng seqs = stream(params, kSeqs);
    const std::uint16_t sport = dynamic_port(port_rng);

    std::vector<TimedPacket> out;
    out.reserve(ports.size() * 3);
    for (std::size_t i = 0; i < ports.size(); ++i) {
        const std::uint16_t port = ports[i];
        TimeUs t = plan.timestamps[i];
        const std::uint32_t seq = isn(seqs);
        out.push_back({t, make_tcp(attacker, victim, atk.draw_ttl(hdr), ip_id(hdr),
                                   {sport, port, seq, 0, tcp_flags::SYN, atk.draw_window(hdr), atk.draw_mss(hdr)})});
        t += reply_delay(hdr);
        if (open.contains(port)) {
            const std::uint32_t vseq = isn(seqs);
            out.push_back({t, make_tcp(victim, attacker, vic.ttl(hdr), ip_id(hdr),
                                       {port, sport, vseq, seq + 1, tcp_flags::SYN | tcp_flags::ACK, vic.window(hdr),
                                        vic.mss(hdr)})});
            t += reply_delay(hdr);
            out.push_back({t, make_tcp(attacker, victim, atk.draw_ttl(hdr), ip_id(hdr),
                                       {sport, port, seq + 1, 0, tcp_flags::RST, 0, std::nullopt})});
        } else {
            out.push_back({t, make_tcp(victim, attacker, vic.ttl(hdr), ip_id(hdr),
                                       {port, sport, 0, seq + 1, tcp_flags::RST | tcp_flags::ACK, 0, std::nullopt})});
        }
    }
    return finish_attack(std::move(out), params);
}

GeneratedAttack gen_smb_scan(AttackParams params, const StatsDb& db) {
    const Endpoint& attacker = params.attacker();
    const HeaderSamplers atk(db);
    const auto plan = complementary_rate_plan(background_rate(db), params.intensity, params.start_time,
                                              params.victims.size(), split_seed(params.seed, kTiming));
    Rng hdr = stream(params, kHeaders);
    Rng seqs = stream(params, kSeqs);
    Rng port_rng = stream(params, kPorts);
    const auto sports = distinct_dynamic_ports(port_rng, params.victims.size());
    const auto request = smb1_negotiate_request();

    std::vector<TimedPacket> out;
    for (std::size_t v = 0; v < params.victims.size(); ++v) {
        const Endpoint& victim = params.victims[v];
        const HostProfile vic(db, victim.ip);
        const std::uint16_t sport = sports[v];
        const std::uint8_t ttl = atk.draw_ttl(hdr);
        const std::uint8_t vttl = vic.ttl(hdr);
        TimeUs t = plan.timestamps[v];
        std::uint32_t a = isn(seqs);  // next attacker sequence number

        out.push_back({t, make_tcp(attacker, victim, ttl, ip_id(hdr),
                                   {sport, kSmbPort, a, 0, tcp_flags::SYN, atk.draw_window(hdr), atk.draw_mss(hdr)})});
        ++a;
        t += reply_delay(hdr);
        if (!ports_open_on(db, victim.ip).contains(kSmbPort)) {
            out.push_back({t, make_tcp(victim, attacker, vttl, ip_id(hdr),
                                       {kSmbPort, sport, 0, a, tcp_flags::RST | tcp_flags::ACK, 0, std::nullopt})});
            continue;
        }

        std::uint32_t b = isn(seqs);  // next victim sequence number
        const std::uint16_t awin = atk.draw_window(hdr);
        const std::uint16_t vwin = vic.window(hdr);
        auto from_attacker = [&](std::uint8_t flags, std::vector<std::uint8_t> payload = {}) {
            const auto len = static_cast<std::uint32_t>(payload.size());
            out.push_back({t, make_tcp(attacker, victim, ttl, ip_id(hdr),
                                       {sport, kSmbPort, a, b, flags, awin, std::nullopt}, std::move(payload))});
            a += len + ((flags & tcp_flags::FIN) ? 1 : 0);
            t += reply_delay(hdr);
        };
        auto from_victim = [&](std::uint8_t flags, std::vector<std::uint8_t> payload = {}) {
            const auto len = static_cast<std::uint32_t>(payload.size());
            out.push_back({t, make_tcp(victim, attacker, vttl, ip_id(hdr),
                                       {kSmbPort, sport, b, a, flags, vwin, std::nullopt}, std::move(payload))});
            b += len + ((flags & tcp_flags::FIN) ? 1 : 0);
            t += reply_delay(hdr);
        };

        out.push_back({t, make_tcp(victim, attacker, vttl, ip_id(hdr),
                                   {kSmbPort, sport, b, a, tcp_flags::SYN | tcp_flags::ACK, vwin, vic.mss(hdr)})});
        ++b;
        t += reply_delay(hdr);
        from_attacker(tcp_flags::ACK);
        from_attacker(tcp_flags::PSH | tcp_flags::ACK, request);
        from_victim(tcp_flags::PSH | tcp_flags::ACK, smb1_negotiate_response(seqs.next()));
        from_attacker(tcp_flags::FIN | tcp_flags::ACK);
        from_victim(tcp_flags::ACK);
        from_victim(tcp_flags::FIN | tcp_flags::ACK);
        from_attacker(tcp_flags::ACK);
    }
    return finish_attack(std::move(out), params);
}

} // namespace injectkit
