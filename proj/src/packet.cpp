#include "injectkit/packet.hpp"

#include <algorithm>

#include "injectkit/error.hpp"

namespace injectkit {

namespace {

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }

std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void push16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void push32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    push16(out, static_cast<std::uint16_t>(v >> 16));
    push16(out, static_cast<std::uint16_t>(v));
}

void store16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

std::optional<std::uint16_t> find_mss(std::span<const std::uint8_t> opts) {
    std::size_t i = 0;
    while (i < opts.size()) {
        const std::uint8_t kind = opts[i];
        if (kind == 0) break;  // end of option list
        if (kind == 1) {       // no-op
            ++i;
            continue;
        }
        if (i + 1 >= opts.size()) break;
        const std::uint8_t len = opts[i + 1];
        if (len < 2 || i + len > opts.size()) break;
        if (kind == 2 && len == 4) return be16(&opts[i + 2]);
        i += len;
    }
    return std::nullopt;
}

/// Options as they go on the wire, with `mss` applied.
std::vector<std::uint8_t> effective_tcp_options(const TcpHeader& tcp) {
    std::vector<std::uint8_t> opts = tcp.options;
    if (!tcp.mss) return opts;
    std::size_t i = 0;
    while (i < opts.size()) {
        const std::uint8_t kind = opts[i];
        if (kind == 0) break;
        if (kind == 1) {
            ++i;
            continue;
        }
        if (i + 1 >= opts.size()) break;
        const std::uint8_t len = opts[i + 1];
        if (len < 2 || i + len > opts.size()) break;
        if (kind == 2 && len == 4) {
            store16(&opts[i + 2], *tcp.mss);
            return opts;
        }
        i += len;
    }
    const std::uint8_t mss_opt[4] = {2, 4, static_cast<std::uint8_t>(*tcp.mss >> 8),
                                     static_cast<std::uint8_t>(*tcp.mss)};
    opts.insert(opts.begin(), mss_opt, mss_opt + 4);
    return opts;
}

void check_options(std::size_t size, const char* what) {
    if (size % 4 != 0 || size > 40) {
        throw Error(Errc::FieldOverflow, std::string(what) + " options must be a multiple of 4 and at most 40 bytes");
    }
}

void append_ipv4_header(std::vector<std::uint8_t>& out, const Ipv4Header& ip, std::uint16_t checksum) {
    if (ip.version > 15) throw Error(Errc::FieldOverflow, "IP version exceeds 4 bits");
    check_options(ip.options.size(), "IPv4");
    const auto ihl = static_cast<std::uint8_t>(ip.header_len() / 4);
    out.push_back(static_cast<std::uint8_t>((ip.version << 4) | ihl));
    out.push_back(ip.tos);
    push16(out, ip.total_len);
    push16(out, ip.id);
    push16(out, ip.flags_fragment);
    out.push_back(ip.ttl);
    out.push_back(ip.protocol);
    push16(out, checksum);
    push32(out, ip.src.value);
    push32(out, ip.dst.value);
    out.insert(out.end(), ip.options.begin(), ip.options.end());
}

void append_tcp_header(std::vector<std::uint8_t>& out, const TcpHeader& tcp,
                       const std::vector<std::uint8_t>& opts, std::uint16_t checksum) {
    if (tcp.reserved > 15) throw Error(Errc::FieldOverflow, "TCP reserved bits exceed 4 bits");
    check_options(opts.size(), "TCP");
    const auto offset = static_cast<std::uint8_t>((kTcpMinHeaderSize + opts.size()) / 4);
    push16(out, tcp.src_port);
    push16(out, tcp.dst_port);
    push32(out, tcp.seq);
    push32(out, tcp.ack);
    out.push_back(static_cast<std::uint8_t>((offset << 4) | tcp.reserved));
    out.push_back(tcp.flags);
    push16(out, tcp.window_size);
    push16(out, checksum);
    push16(out, tcp.urgent);
    out.insert(out.end(), opts.begin(), opts.end());
}

void append_udp_header(std::vector<std::uint8_t>& out, const UdpHeader& udp, std::uint16_t checksum) {
    push16(out, udp.src_port);
    push16(out, udp.dst_port);
    push16(out, udp.length);
    push16(out, checksum);
}

void append_icmp_header(std::vector<std::uint8_t>& out, const IcmpHeader& icmp, std::uint16_t checksum) {
    out.push_back(icmp.type);
    out.push_back(icmp.code);
    push16(out, checksum);
    push32(out, icmp.rest);
}

void add_pseudo_header(ChecksumAccumulator& acc, const Ipv4Header& ip, std::uint8_t proto, std::size_t length) {
    acc.add16(static_cast<std::uint16_t>(ip.src.value >> 16));
    acc.add16(static_cast<std::uint16_t>(ip.src.value));
    acc.add16(static_cast<std::uint16_t>(ip.dst.value >> 16));
    acc.add16(static_cast<std::uint16_t>(ip.dst.value));
    acc.add16(proto);
    acc.add16(static_cast<std::uint16_t>(length));
}

std::uint16_t tcp_checksum_with(const ParsedPacket& pkt, const std::vector<std::uint8_t>& opts) {
    std::vector<std::uint8_t> header;
    header.reserve(kTcpMinHeaderSize + opts.size());
    append_tcp_header(header, *pkt.tcp, opts, 0);
    ChecksumAccumulator acc;
    add_pseudo_header(acc, *pkt.ip, ip_proto::TCP, header.size() + pkt.payload.size());
    acc.add(header);
    acc.add(pkt.payload);
    return acc.finish();
}

} // namespace

// ---------------------------------------------------------------------------
// Checksums

void ChecksumAccumulator::add(std::span<const std::uint8_t> data) noexcept {
    std::size_t i = 0;
    if (odd_ && !data.empty()) {
        sum_ += data[0];
        odd_ = false;
        i = 1;
    }
    for (; i + 1 < data.size(); i += 2) sum_ += static_cast<std::uint32_t>((data[i] << 8) | data[i + 1]);
    if (i < data.size()) {
        sum_ += static_cast<std::uint32_t>(data[i]) << 8;
        odd_ = true;
    }
}

void ChecksumAccumulator::add16(std::uint16_t word) noexcept {
    if (odd_) {
        // keep byte alignment: the high byte completes the pending word
        sum_ += word >> 8;
        sum_ += static_cast<std::uint32_t>(word & 0xFF) << 8;
    } else {
        sum_ += word;
    }
}

std::uint16_t ChecksumAccumulator::finish() const noexcept {
    std::uint64_t s = sum_;
    while (s >> 16) s = (s & 0xFFFF) + (s >> 16);
    return static_cast<std::uint16_t>(~s & 0xFFFF);
}

std::uint16_t internet_checksum(std::span<const std::uint8_t> data) noexcept {
    ChecksumAccumulator acc;
    acc.add(data);
    return acc.finish();
}

std::uint16_t compute_ipv4_checksum(const Ipv4Header& ip) {
    std::vector<std::uint8_t> header;
    header.reserve(ip.header_len());
    append_ipv4_header(header, ip, 0);
    return internet_checksum(header);
}

std::uint16_t compute_tcp_checksum(const ParsedPacket& pkt) {
    return tcp_checksum_with(pkt, effective_tcp_options(*pkt.tcp));
}

std::uint16_t compute_udp_checksum(const ParsedPacket& pkt) {
    std::vector<std::uint8_t> header;
    append_udp_header(header, *pkt.udp, 0);
    ChecksumAccumulator acc;
    add_pseudo_header(acc, *pkt.ip, ip_proto::UDP, kUdpHeaderSize + pkt.payload.size());
    acc.add(header);
    acc.add(pkt.payload);
    const std::uint16_t c = acc.finish();
    return c == 0 ? 0xFFFF : c;  // zero means "no checksum" for UDP
}

namespace {
std::uint16_t compute_icmp_checksum(const ParsedPacket& pkt) {
    std::vector<std::uint8_t> header;
    append_icmp_header(header, *pkt.icmp, 0);
    ChecksumAccumulator acc;
    acc.add(header);
    acc.add(pkt.payload);
    return acc.finish();
}
} // namespace

bool verify_tcp_checksum(const ParsedPacket& pkt) {
    if (!pkt.ip || !pkt.tcp) return false;
    return compute_tcp_checksum(pkt) == pkt.tcp->checksum;
}

// ---------------------------------------------------------------------------
// Decoding

bool ParsedPacket::truncated() const noexcept {
    if (!ip) return false;
    std::size_t have = ip->header_len() + payload.size();
    if (tcp) have += tcp->header_len();
    if (udp) have += kUdpHeaderSize;
    if (icmp) have += kIcmpHeaderSize;
    return have < ip->total_len;
}

ParsedPacket parse_packet(std::span<const std::uint8_t> frame) {
    if (frame.size() < kEthernetHeaderSize) {
        throw Error(Errc::TruncatedHeader, "frame of " + std::to_string(frame.size()) + " bytes is shorter than an Ethernet header");
    }
    ParsedPacket pkt;
    std::copy_n(frame.begin(), 6, pkt.eth.dst.bytes.begin());
    std::copy_n(frame.begin() + 6, 6, pkt.eth.src.bytes.begin());
    pkt.eth.ether_type = be16(&frame[12]);

    const auto l3 = frame.subspan(kEthernetHeaderSize);
    auto opaque = [&](std::span<const std::uint8_t> rest) {
        pkt.payload.assign(rest.begin(), rest.end());
        return pkt;
    };
    if (pkt.eth.ether_type != ether_type::IPv4) return opaque(l3);
    if (l3.size() < kIpv4MinHeaderSize) {
        throw Error(Errc::TruncatedHeader, "frame too short for an IPv4 header");
    }
    const std::uint8_t version = l3[0] >> 4;
    const std::size_t ihl = static_cast<std::size_t>(l3[0] & 0x0F) * 4;
    if (version != 4 || ihl < kIpv4MinHeaderSize || ihl > l3.size()) return opaque(l3);

    Ipv4Header ip;
    ip.version = version;
    ip.tos = l3[1];
    ip.total_len = be16(&l3[2]);
    ip.id = be16(&l3[4]);
    ip.flags_fragment = be16(&l3[6]);
    ip.ttl = l3[8];
    ip.protocol = l3[9];
    ip.header_checksum = be16(&l3[10]);
    ip.src = Ipv4Address{be32(&l3[12])};
    ip.dst = Ipv4Address{be32(&l3[16])};
    ip.options.assign(l3.begin() + kIpv4MinHeaderSize, l3.begin() + static_cast<std::ptrdiff_t>(ihl));

    const std::size_t datagram_end = std::clamp<std::size_t>(ip.total_len, ihl, l3.size());
    const auto body = l3.subspan(ihl, datagram_end - ihl);
    pkt.trailer.assign(l3.begin() + static_cast<std::ptrdiff_t>(datagram_end), l3.end());

    if (ip.fragment_offset() == 0) {
        if (ip.protocol == ip_proto::TCP && body.size() >= kTcpMinHeaderSize) {
            const std::size_t off = static_cast<std::size_t>(body[12] >> 4) * 4;
            if (off >= kTcpMinHeaderSize && off <= body.size()) {
                TcpHeader tcp;
                tcp.src_port = be16(&body[0]);
                tcp.dst_port = be16(&body[2]);
                tcp.seq = be32(&body[4]);
                tcp.ack = be32(&body[8]);
                tcp.reserved = body[12] & 0x0F;
                tcp.flags = body[13];
                tcp.window_size = be16(&body[14]);
                tcp.checksum = be16(&body[16]);
                tcp.urgent = be16(&body[18]);
                tcp.options.assign(body.begin() + kTcpMinHeaderSize, body.begin() + static_cast<std::ptrdiff_t>(off));
                tcp.mss = find_mss(tcp.options);
                pkt.tcp = std::move(tcp);
                pkt.payload.assign(body.begin() + static_cast<std::ptrdiff_t>(off), body.end());
            }
        } else if (ip.protocol == ip_proto::UDP && body.size() >= kUdpHeaderSize) {
            pkt.udp = UdpHeader{be16(&body[0]), be16(&body[2]), be16(&body[4]), be16(&body[6])};
            pkt.payload.assign(body.begin() + kUdpHeaderSize, body.end());
        } else if (ip.protocol == ip_proto::ICMP && body.size() >= kIcmpHeaderSize) {
            pkt.icmp = IcmpHeader{body[0], body[1], be16(&body[2]), be32(&body[4])};
            pkt.payload.assign(body.begin() + kIcmpHeaderSize, body.end());
        }
    }
    if (!pkt.tcp && !pkt.udp && !pkt.icmp) pkt.payload.assign(body.begin(), body.end());
    pkt.ip = std::move(ip);
    return pkt;
}

ParsedPacket parse_packet(const PacketRecord& record, const CaptureMeta& meta) {
    if (meta.link_type != kLinkTypeEthernet) {
        throw Error(Errc::UnsupportedLinkType, "only Ethernet frames can be parsed");
    }
    return parse_packet(record.data);
}

// ---------------------------------------------------------------------------
// Encoding

void serialize_packet_into(const ParsedPacket& pkt, bool recompute_checksums, std::vector<std::uint8_t>& out) {
    out.clear();
    out.insert(out.end(), pkt.eth.dst.bytes.begin(), pkt.eth.dst.bytes.end());
    out.insert(out.end(), pkt.eth.src.bytes.begin(), pkt.eth.src.bytes.end());
    push16(out, pkt.eth.ether_type);

    if (pkt.ip) {
        const auto& ip = *pkt.ip;
        append_ipv4_header(out, ip, recompute_checksums ? compute_ipv4_checksum(ip) : ip.header_checksum);
        if (pkt.tcp) {
            const auto opts = effective_tcp_options(*pkt.tcp);
            const auto sum = recompute_checksums ? tcp_checksum_with(pkt, opts) : pkt.tcp->checksum;
            append_tcp_header(out, *pkt.tcp, opts, sum);
        } else if (pkt.udp) {
            append_udp_header(out, *pkt.udp, recompute_checksums ? compute_udp_checksum(pkt) : pkt.udp->checksum);
        } else if (pkt.icmp) {
            append_icmp_header(out, *pkt.icmp, recompute_checksums ? compute_icmp_checksum(pkt) : pkt.icmp->checksum);
        }
    }
    out.insert(out.end(), pkt.payload.begin(), pkt.payload.end());
    out.insert(out.end(), pkt.trailer.begin(), pkt.trailer.end());
}

std::vector<std::uint8_t> serialize_packet(const ParsedPacket& pkt, bool recompute_checksums) {
    std::vector<std::uint8_t> out;
    out.reserve(kEthernetHeaderSize + 60 + pkt.payload.size() + pkt.trailer.size());
    serialize_packet_into(pkt, recompute_checksums, out);
    return out;
}

void finalize_packet(ParsedPacket& pkt) {
    if (!pkt.ip) return;
    auto& ip = *pkt.ip;
    std::size_t l4 = pkt.payload.size();
    if (pkt.tcp) {
        pkt.tcp->options = effective_tcp_options(*pkt.tcp);
        check_options(pkt.tcp->options.size(), "TCP");
        l4 += pkt.tcp->header_len();
        ip.protocol = ip_proto::TCP;
    } else if (pkt.udp) {
        l4 += kUdpHeaderSize;
        if (l4 > 0xFFFF) throw Error(Errc::FieldOverflow, "UDP datagram exceeds 65535 bytes");
        pkt.udp->length = static_cast<std::uint16_t>(l4);
        ip.protocol = ip_proto::UDP;
    } else if (pkt.icmp) {
        l4 += kIcmpHeaderSize;
        ip.protocol = ip_proto::ICMP;
    }
    check_options(ip.options.size(), "IPv4");
    const std::size_t total = ip.header_len() + l4;
    if (total > 0xFFFF) throw Error(Errc::FieldOverflow, "IPv4 datagram exceeds 65535 bytes");
    ip.total_len = static_cast<std::uint16_t>(total);
    ip.header_checksum = compute_ipv4_checksum(ip);
    if (pkt.tcp) pkt.tcp->checksum = compute_tcp_checksum(pkt);
    if (pkt.udp) pkt.udp->checksum = compute_udp_checksum(pkt);
    if (pkt.icmp) pkt.icmp->checksum = compute_icmp_checksum(pkt);
}

} // namespace injectkit
