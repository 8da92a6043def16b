#include <algorithm>
#include <cmath>
#include <set>

#include "attack_util.hpp"

namespace injectkit {

using namespace detail;

namespace {

std::size_t packet_budget(const AttackParams& params) {
    if (params.has("packets")) {
        const auto n = params.integer("packets");
        if (n < 1) throw Error(Errc::InvalidValue, "parameter 'packets' must be at least 1");
        return static_cast<std::size_t>(n);
    }
    const double duration = params.number("duration");
    if (!(duration > 0)) throw Error(Errc::InvalidValue, "parameter 'duration' must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.intensity * duration)));
}

/// Random unicast address outside the background, for extra flood sources.
Ipv4Address random_outside_host(const StatsDb& db, Rng& rng, const std::set<Ipv4Address>& taken) {
    while (true) {
        const Ipv4Address ip(static_cast<std::uint32_t>(rng.uniform_between(0x01000000u, 0xDFFFFFFFu)));
        const auto a = ip.value >> 24;
        if (a == 10 || a == 127 || (ip.value & 0xFFFF0000u) == 0xC0A80000u || (ip.value & 0xFFF00000u) == 0xAC100000u) {
            continue;
        }
        if ((ip.value & 0xFF) == 0 || (ip.value & 0xFF) == 255) continue;
        if (db.hosts.contains(ip) || taken.contains(ip)) continue;
        return ip;
    }
}

/// The victim's open port that the whole capture targets most often.
std::uint16_t busiest_open_port(const StatsDb& db, Ipv4Address victim) {
    auto it = db.hosts.find(victim);
    if (it == db.hosts.end() || it->second.ports_open.empty()) {
        throw Error(Errc::NoOpenPorts, "victim " + victim.to_string() + " has no observed open port; pass port=");
    }
    const Counts* dst = nullptr;
    if (auto d = db.distributions.find(Field::dst_port); d != db.distributions.end()) dst = &d->second.counts;
    std::uint16_t best = *it->second.ports_open.begin();
    std::uint64_t best_count = 0;
    for (std::uint16_t p : it->second.ports_open) {
        std::uint64_t c = 0;
        if (dst) {
            if (auto f = dst->find(p); f != dst->end()) c = f->second;
        }
        if (c > best_count) {
            best = p;
            best_count = c;
        }
    }
    return best;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto c = s.find(',', pos);
        out.push_back(s.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

} // namespace

GeneratedAttack gen_syn_flood(AttackParams params, const StatsDb& db) {
    const Endpoint& victim = params.victim();
    std::uint16_t port = 0;
    if (params.has("port")) {
        port = static_cast<std::uint16_t>(params.integer("port"));
    } else if (!params.ports.empty()) {
        port = params.ports.front();
    } else {
        port = busiest_open_port(db, victim.ip);
    }
    params.extra["port"] = std::to_string(port);

    const auto want = params.integer("attackers.count");
    if (want < 1) throw Error(Errc::InvalidValue, "parameter 'attackers.count' must be at least 1");
    Rng host_rng = stream(params, kHosts);
    std::set<Ipv4Address> taken;
    for (const auto& a : params.attackers) taken.insert(a.ip);
    while (params.attackers.size() < static_cast<std::size_t>(want)) {
        const auto ip = random_outside_host(db, host_rng, taken);
        taken.insert(ip);
        params.attackers.push_back({ip, MacAddress::local_from(params.seed ^ ip.value)});
    }

    const std::size_t budget = packet_budget(params);
    params.extra["packets"] = std::to_string(budget);
    const double reply_fraction = params.number("reply_fraction");
    const double cutoff = params.number("reply_cutoff");
    if (reply_fraction < 0 || reply_fraction > 1) throw Error(Errc::InvalidValue, "reply_fraction must lie in [0, 1]");
    if (cutoff < 0 || cutoff > 1) throw Error(Errc::InvalidValue, "reply_cutoff must lie in [0, 1]");
    const auto reply_limit = static_cast<std::size_t>(std::floor(cutoff * static_cast<double>(budget) + 1e-9));

    const auto plan = uniform_rate_plan(params.intensity, params.start_time, budget, split_seed(params.seed, kTiming));
    const HeaderSamplers atk(db);
    const HostProfile vic(db, victim.ip);
    Rng hdr = stream(params, kHeaders);
    Rng ports = stream(params, kPorts);
    Rng seqs = stream(params, kSeqs);
    Rng replies = stream(params, kReplies);

    std::vector<TimedPacket> out;
    out.reserve(budget + reply_limit);
    for (std::size_t i = 0; i < budget; ++i) {
        const Endpoint& src = params.attackers[i % params.attackers.size()];
        const std::uint16_t sport = dynamic_port(ports);
        // window size is uniform rather than background-shaped, like common flooding tools
        const auto window = static_cast<std::uint16_t>(ports.uniform_between(1, 65535));
        const std::uint32_t seq = isn(seqs);
        const TimeUs t = plan.timestamps[i];
        out.push_back({t, make_tcp(src, victim, atk.draw_ttl(hdr), ip_id(hdr),
                                   {sport, port, seq, 0, tcp_flags::SYN, window, std::nullopt})});
        const bool reply = i < reply_limit && (reply_fraction >= 1.0 || replies.uniform01() < reply_fraction);
        if (reply) {
            out.push_back({t + reply_delay(hdr),
                           make_tcp(victim, src, vic.ttl(hdr), ip_id(hdr),
                                    {port, sport, isn(seqs), seq + 1, tcp_flags::SYN | tcp_flags::ACK, vic.window(hdr),
                                     vic.mss(hdr)})});
        }
    }
    return finish_attack(std::move(out), params);
}

GeneratedAttack gen_memcrashed(AttackParams params, const StatsDb& db) {
    const Endpoint& victim = params.victim();
    std::vector<Endpoint> servers;
    if (params.has("servers")) {
        for (const auto& part : split_list(params.text("servers"))) {
            const auto ip = *Ipv4Address::parse(part);
            auto it = db.hosts.find(ip);
            const MacAddress mac = it != db.hosts.end() && it->second.mac ? *it->second.mac
                                                                          : MacAddress::local_from(params.seed ^ ip.value);
            servers.push_back({ip, mac});
        }
    } else {
        // busiest background hosts other than the victim and attacker
        std::vector<const HostStats*> pool;
        for (const auto& [ip, h] : db.hosts) {
            if (ip != victim.ip && ip != params.attacker().ip) pool.push_back(&h);
        }
        std::stable_sort(pool.begin(), pool.end(), [](const HostStats* a, const HostStats* b) {
            return a->pkts_sent + a->pkts_received > b->pkts_sent + b->pkts_received;
        });
        const auto want = params.integer("servers.count");
        if (want < 1) throw Error(Errc::InvalidValue, "parameter 'servers.count' must be at least 1");
        for (const HostStats* h : pool) {
            if (servers.size() == static_cast<std::size_t>(want)) break;
            servers.push_back({h->ip, h->mac ? *h->mac : MacAddress::local_from(params.seed ^ h->ip.value)});
        }
        if (servers.empty()) {
            throw Error(Errc::InsufficientHosts, "no background host is available as a memcached server; pass servers=");
        }
        std::string list;
        for (const auto& s : servers) list += (list.empty() ? "" : ",") + s.ip.to_string();
        params.extra["servers"] = list;
    }

    const std::size_t budget = packet_budget(params);
    params.extra["packets"] = std::to_string(budget);
    const auto plan = uniform_rate_plan(params.intensity, params.start_time, budget, split_seed(params.seed, kTiming));
    const HostProfile vic(db, victim.ip);
    Rng hdr = stream(params, kHeaders);
    Rng ports = stream(params, kPorts);

    // spoofed: the frames leave the attacker's interface but carry the victim's address
    const Endpoint spoofed{victim.ip, params.attacker().mac};
    std::vector<TimedPacket> out;
    out.reserve(budget);
    for (std::size_t i = 0; i < budget; ++i) {
        const Endpoint& server = servers[i % servers.size()];
        out.push_back({plan.timestamps[i],
                       make_udp(spoofed, server, vic.ttl(hdr), ip_id(hdr), dynamic_port(ports), kMemcachedPort,
                                memcached_stats_request(static_cast<std::uint16_t>(hdr.next())))});
    }
    return finish_attack(std::move(out), params);
}

} // namespace injectkit
