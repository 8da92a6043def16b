#include <algorithm>

#include "attack_util.hpp"

namespace injectkit {

using namespace detail;

GeneratedAttack gen_smbloris(AttackParams params, const StatsDb& db) {
    const auto n = params.integer("connections");
    if (n < 1) throw Error(Errc::InvalidValue, "parameter 'connections' must be at least 1");
    const auto count = static_cast<std::size_t>(n);
    const Endpoint& attacker = params.attacker();
    const Endpoint& victim = params.victim();
    const HeaderSamplers atk(db);
    const HostProfile vic(db, victim.ip);

    const auto plan = complementary_rate_plan(background_rate(db), params.intensity, params.start_time, count,
                                              split_seed(params.seed, kTiming));
    Rng hdr = stream(params, kHeaders);
    Rng seqs = stream(params, kSeqs);
    Rng port_rng = stream(params, kPorts);
    const auto sports = distinct_dynamic_ports(port_rng, count);

    std::vector<TimedPacket> out;
    out.reserve(count * 4);
    for (std::size_t c = 0; c < count; ++c) {
        const std::uint16_t sport = sports[c];
        const std::uint8_t ttl = atk.draw_ttl(hdr);
        const std::uint16_t awin = atk.draw_window(hdr);
        const std::uint32_t a = isn(seqs);
        const std::uint32_t b = isn(seqs);
        TimeUs t = plan.timestamps[c];
        out.push_back({t, make_tcp(attacker, victim, ttl, ip_id(hdr),
                                   {sport, kSmbPort, a, 0, tcp_flags::SYN, awin, atk.draw_mss(hdr)})});
        t += reply_delay(hdr);
        out.push_back({t, make_tcp(victim, attacker, vic.ttl(hdr), ip_id(hdr),
                                   {kSmbPort, sport, b, a + 1, tcp_flags::SYN | tcp_flags::ACK, vic.window(hdr),
                                    vic.mss(hdr)})});
        t += reply_delay(hdr);
        out.push_back({t, make_tcp(attacker, victim, ttl, ip_id(hdr),
                                   {sport, kSmbPort, a + 1, b + 1, tcp_flags::ACK, awin, std::nullopt})});
        t += reply_delay(hdr);
        out.push_back({t, make_tcp(attacker, victim, ttl, ip_id(hdr),
                                   {sport, kSmbPort, a + 1, b + 1, tcp_flags::PSH | tcp_flags::ACK, awin, std::nullopt},
                                   nbt_max_length_header())});
    }
    return finish_attack(std::move(out), params);
}

namespace {

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        return static_cast<std::uint8_t>(10 + (c | 0x20) - 'a');
    };
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    }
    return out;
}

} // namespace

GeneratedAttack gen_ftp_winaxe(AttackParams params, const StatsDb& db) {
    // the attacker plays the FTP server, the victim is the client
    const Endpoint& server = params.attacker();
    const Endpoint& client = params.victim();

    std::vector<std::uint8_t> overflow;
    if (params.has("payload")) {
        const auto text = params.text("payload");
        overflow.assign(text.begin(), text.end());
    } else if (params.has("payload.hex")) {
        overflow = from_hex(params.text("payload.hex"));
    } else {
        const auto len = params.integer("payload.length");
        if (len < 1) throw Error(Errc::InvalidValue, "parameter 'payload.length' must be at least 1");
        if (static_cast<std::uint64_t>(len) > kMaxIpv4Payload) {
            throw Error(Errc::PayloadTooLarge, "payload of " + std::to_string(len) + " bytes does not fit in one packet");
        }
        overflow.resize(static_cast<std::size_t>(len));
        Rng payload_rng = stream(params, kPayload);
        payload_rng.fill(overflow);
    }
    if (overflow.size() > kMaxIpv4Payload) {
        throw Error(Errc::PayloadTooLarge, "payload of " + std::to_string(overflow.size()) +
                                               " bytes exceeds the " + std::to_string(kMaxIpv4Payload) +
                                               " bytes one unfragmented TCP/IPv4 packet can carry");
    }

    const HeaderSamplers atk(db);
    const HostProfile cli(db, client.ip);
    const auto plan = complementary_rate_plan(background_rate(db), params.intensity, params.start_time, 1,
                                              split_seed(params.seed, kTiming));
    Rng hdr = stream(params, kHeaders);
    Rng seqs = stream(params, kSeqs);
    Rng port_rng = stream(params, kPorts);
    const std::uint16_t cport = dynamic_port(port_rng);
    const std::uint8_t sttl = atk.draw_ttl(hdr);
    const std::uint16_t swin = atk.draw_window(hdr);
    const std::uint8_t cttl = cli.ttl(hdr);
    const std::uint16_t cwin = cli.window(hdr);
    std::uint32_t c = isn(seqs);
    std::uint32_t s = isn(seqs);
    TimeUs t = plan.timestamps.front();

    std::vector<TimedPacket> out;
    out.push_back({t, make_tcp(client, server, cttl, ip_id(hdr), {cport, kFtpPort, c, 0, tcp_flags::SYN, cwin, cli.mss(hdr)})});
    ++c;
    t += reply_delay(hdr);
    out.push_back({t, make_tcp(server, client, sttl, ip_id(hdr),
                               {kFtpPort, cport, s, c, tcp_flags::SYN | tcp_flags::ACK, swin, atk.draw_mss(hdr)})});
    ++s;
    t += reply_delay(hdr);
    out.push_back({t, make_tcp(client, server, cttl, ip_id(hdr), {cport, kFtpPort, c, s, tcp_flags::ACK, cwin, std::nullopt})});
    t += reply_delay(hdr);
    const std::string banner = "220 FTP server ready.\r\n";
    out.push_back({t, make_tcp(server, client, sttl, ip_id(hdr),
                               {kFtpPort, cport, s, c, tcp_flags::PSH | tcp_flags::ACK, swin, std::nullopt},
                               std::vector<std::uint8_t>(banner.begin(), banner.end()))});
    s += static_cast<std::uint32_t>(banner.size());
    t += reply_delay(hdr);
    out.push_back({t, make_tcp(server, client, sttl, ip_id(hdr),
                               {kFtpPort, cport, s, c, tcp_flags::PSH | tcp_flags::ACK, swin, std::nullopt},
                               std::move(overflow))});
    return finish_attack(std::move(out), params);
}

GeneratedAttack gen_template_exploit(AttackParams params, const StatsDb& db) {
    std::optional<Ipv4Address> role;
    if (params.has("template.attacker")) role = Ipv4Address::parse(params.text("template.attacker"));
    const TemplatePcap tpl = load_template(params.text("template"), role);
    const auto plan = complementary_rate_plan(background_rate(db), params.intensity, params.start_time,
                                              tpl.packets.size(), split_seed(params.seed, kTiming));
    return finish_attack(rewrite_template(tpl, params, plan, db), params);
}

} // namespace injectkit
