#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "injectkit/error.hpp"
#include "injectkit/framework.hpp"

namespace injectkit {

namespace {

FiveTuple key_of(const ParsedPacket& p) {
    std::uint16_t sport = 0, dport = 0;
    if (p.tcp) {
        sport = p.tcp->src_port;
        dport = p.tcp->dst_port;
    } else if (p.udp) {
        sport = p.udp->src_port;
        dport = p.udp->dst_port;
    }
    return FiveTuple::canonical(p.ip->src, sport, p.ip->dst, dport, p.ip->protocol);
}

} // namespace

TemplatePcap make_template(std::vector<TimedPacket> packets, std::optional<Ipv4Address> attacker) {
    std::set<Ipv4Address> hosts;
    bool any_tcp = false;
    for (std::size_t i = 0; i < packets.size(); ++i) {
        const auto& p = packets[i].packet;
        if (!p.ip) throw Error(Errc::AmbiguousTemplate, "template packet " + std::to_string(i + 1) + " is not IPv4");
        hosts.insert(p.ip->src);
        hosts.insert(p.ip->dst);
        any_tcp = any_tcp || p.tcp.has_value();
    }
    if (hosts.size() != 2) {
        throw Error(Errc::AmbiguousTemplate,
                    "template must involve exactly two IP endpoints, found " + std::to_string(hosts.size()));
    }
    if (!any_tcp) throw Error(Errc::NoTcp, "template contains no TCP packets");

    TemplatePcap tpl;
    if (attacker) {
        if (!hosts.contains(*attacker)) {
            throw Error(Errc::InvalidValue, "template attacker " + attacker->to_string() + " is not a template endpoint");
        }
        tpl.attacker_ip = *attacker;
    } else {
        std::optional<Ipv4Address> initiator;
        for (const auto& tp : packets) {
            const auto& p = tp.packet;
            if (p.tcp && p.tcp->has(tcp_flags::SYN) && !p.tcp->has(tcp_flags::ACK)) {
                initiator = p.ip->src;
                break;
            }
        }
        if (!initiator) {
            // no handshake captured: whoever sent the first TCP segment
            for (const auto& tp : packets) {
                if (tp.packet.tcp) {
                    initiator = tp.packet.ip->src;
                    break;
                }
            }
        }
        tpl.attacker_ip = *initiator;
    }
    tpl.victim_ip = *hosts.begin() == tpl.attacker_ip ? *hosts.rbegin() : *hosts.begin();

    std::map<FiveTuple, std::size_t> group_of;
    for (std::size_t i = 0; i < packets.size(); ++i) {
        const auto& p = packets[i].packet;
        tpl.roles.push_back(p.ip->src == tpl.attacker_ip ? Role::AttackerToVictim : Role::VictimToAttacker);
        auto [it, fresh] = group_of.emplace(key_of(p), tpl.connections.size());
        if (fresh) tpl.connections.emplace_back();
        tpl.connections[it->second].push_back(i);
    }
    tpl.packets = std::move(packets);
    return tpl;
}

TemplatePcap load_template(const std::filesystem::path& path, std::optional<Ipv4Address> attacker) {
    const Capture cap = read_pcap(path);
    std::vector<TimedPacket> packets;
    packets.reserve(cap.packets.size());
    for (const auto& rec : cap.packets) {
        packets.push_back({rec.time_us(cap.meta.magic_variant), parse_packet(rec, cap.meta)});
    }
    return make_template(std::move(packets), attacker);
}

std::vector<TimedPacket> rewrite_template(const TemplatePcap& tpl, const AttackParams& params,
                                          const TimestampPlan& plan, const StatsDb& db) {
    if (plan.timestamps.size() != tpl.packets.size()) {
        throw Error(Errc::LengthMismatch, "timestamp plan has " + std::to_string(plan.timestamps.size()) +
                                              " entries for " + std::to_string(tpl.packets.size()) +
                                              " template packets");
    }
    const HeaderSamplers samplers(db);
    Rng rng(mix64(params.seed ^ 0x7e3b1a7e));
    const Endpoint& attacker = params.attacker();
    const Endpoint& victim = params.victim();

    std::vector<TimedPacket> out = tpl.packets;
    for (const auto& group : tpl.connections) {
        // direction 0: attacker -> victim, 1: victim -> attacker
        std::array<std::optional<std::uint32_t>, 2> old_isn;
        for (std::size_t idx : group) {
            const auto& p = tpl.packets[idx].packet;
            if (!p.tcp) continue;
            const int dir = tpl.roles[idx] == Role::AttackerToVictim ? 0 : 1;
            if (!old_isn[dir]) old_isn[dir] = p.tcp->seq;
        }
        const std::array<std::uint32_t, 2> new_isn = {static_cast<std::uint32_t>(rng.next()),
                                                      static_cast<std::uint32_t>(rng.next())};
        const std::uint8_t ttl = samplers.draw_ttl(rng);
        const std::uint16_t window = samplers.draw_window(rng);
        const std::uint16_t mss = samplers.draw_mss(rng);

        for (std::size_t idx : group) {
            auto& p = out[idx].packet;
            const bool from_attacker = tpl.roles[idx] == Role::AttackerToVictim;
            const Endpoint& src = from_attacker ? attacker : victim;
            const Endpoint& dst = from_attacker ? victim : attacker;
            p.eth.src = src.mac;
            p.eth.dst = dst.mac;
            p.ip->src = src.ip;
            p.ip->dst = dst.ip;
            if (from_attacker) p.ip->ttl = ttl;
            if (p.tcp) {
                const int dir = from_attacker ? 0 : 1;
                p.tcp->seq = p.tcp->seq - *old_isn[dir] + new_isn[dir];
                if (p.tcp->has(tcp_flags::ACK) && old_isn[1 - dir]) {
                    p.tcp->ack = p.tcp->ack - *old_isn[1 - dir] + new_isn[1 - dir];
                }
                if (from_attacker) {
                    p.tcp->window_size = window;
                    if (p.tcp->mss) p.tcp->mss = mss;
                }
            }
            finalize_packet(p);
            out[idx].time = plan.timestamps[idx];
        }
    }
    return out;
}

} // namespace injectkit
