#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "injectkit/net.hpp"
#include "injectkit/pcap_io.hpp"

namespace injectkit {

namespace tcp_flags {
inline constexpr std::uint8_t FIN = 0x01;
inline constexpr std::uint8_t SYN = 0x02;
inline constexpr std::uint8_t RST = 0x04;
inline constexpr std::uint8_t PSH = 0x08;
inline constexpr std::uint8_t ACK = 0x10;
inline constexpr std::uint8_t URG = 0x20;
} // namespace tcp_flags

namespace ether_type {
inline constexpr std::uint16_t IPv4 = 0x0800;
} // namespace ether_type

namespace ip_proto {
inline constexpr std::uint8_t ICMP = 1;
inline constexpr std::uint8_t TCP = 6;
inline constexpr std::uint8_t UDP = 17;
} // namespace ip_proto

inline constexpr std::size_t kEthernetHeaderSize = 14;
inline constexpr std::size_t kIpv4MinHeaderSize = 20;
inline constexpr std::size_t kTcpMinHeaderSize = 20;
inline constexpr std::size_t kUdpHeaderSize = 8;
inline constexpr std::size_t kIcmpHeaderSize = 8;

struct EthernetHeader {
    MacAddress dst;
    MacAddress src;
    std::uint16_t ether_type = ether_type::IPv4;

    bool operator==(const EthernetHeader&) const = default;
};

/// IPv4 header. The header length is not stored; it follows from the size of
/// `options`, which must be a multiple of four and at most 40 bytes.
struct Ipv4Header {
    std::uint8_t version = 4;
    std::uint8_t tos = 0;
    std::uint16_t total_len = 0;
    std::uint16_t id = 0;
    std::uint16_t flags_fragment = 0;
    std::uint8_t ttl = 64;
    std::uint8_t protocol = 0;
    std::uint16_t header_checksum = 0;
    Ipv4Address src;
    Ipv4Address dst;
    std::vector<std::uint8_t> options;

    std::size_t header_len() const noexcept { return kIpv4MinHeaderSize + options.size(); }
    std::uint16_t fragment_offset() const noexcept { return flags_fragment & 0x1FFF; }

    bool operator==(const Ipv4Header&) const = default;
};

/// TCP header. Like Ipv4Header, the data offset is derived from `options`.
/// `mss` mirrors the MSS option (kind 2); when set on serialization it
/// overwrites an existing MSS option or is inserted in front of the others.
struct TcpHeader {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t reserved = 0;  // low nibble of byte 12 (reserved bits + NS)
    std::uint8_t flags = 0;
    std::uint16_t window_size = 0;
    std::uint16_t checksum = 0;
    std::uint16_t urgent = 0;
    std::vector<std::uint8_t> options;
    std::optional<std::uint16_t> mss;

    bool has(std::uint8_t flag) const noexcept { return (flags & flag) == flag; }
    std::size_t header_len() const noexcept { return kTcpMinHeaderSize + options.size(); }

    bool operator==(const TcpHeader&) const = default;
};

struct UdpHeader {
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint16_t length = 0;
    std::uint16_t checksum = 0;

    bool operator==(const UdpHeader&) const = default;
};

struct IcmpHeader {
    std::uint8_t type = 0;
    std::uint8_t code = 0;
    std::uint16_t checksum = 0;
    std::uint32_t rest = 0;

    bool operator==(const IcmpHeader&) const = default;
};

/// Decoded Ethernet frame. At most one of tcp/udp/icmp is populated and only
/// when `ip` is. Anything that could not be decoded stays in `payload`;
/// bytes past the end of the IP datagram (link padding) live in `trailer`.
struct ParsedPacket {
    EthernetHeader eth;
    std::optional<Ipv4Header> ip;
    std::optional<TcpHeader> tcp;
    std::optional<UdpHeader> udp;
    std::optional<IcmpHeader> icmp;
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> trailer;

    /// True when fewer IP bytes were captured than the header declares.
    bool truncated() const noexcept;

    bool operator==(const ParsedPacket&) const = default;
};

/// A decoded packet with its capture time.
struct TimedPacket {
    TimeUs time = 0;
    ParsedPacket packet;

    bool operator==(const TimedPacket&) const = default;
};

std::uint16_t internet_checksum(std::span<const std::uint8_t> data) noexcept;

/// Ones'-complement sum over several discontiguous pieces, as if they were
/// concatenated.
class ChecksumAccumulator {
public:
    void add(std::span<const std::uint8_t> data) noexcept;
    void add16(std::uint16_t word) noexcept;
    std::uint16_t finish() const noexcept;

private:
    std::uint64_t sum_ = 0;
    bool odd_ = false;
};

ParsedPacket parse_packet(std::span<const std::uint8_t> frame);
ParsedPacket parse_packet(const PacketRecord& record, const CaptureMeta& meta);

std::vector<std::uint8_t> serialize_packet(const ParsedPacket& pkt, bool recompute_checksums);
void serialize_packet_into(const ParsedPacket& pkt, bool recompute_checksums,
                           std::vector<std::uint8_t>& out);

/// Fixes up lengths (IP total length, UDP length), applies `mss` to the TCP
/// options and stores freshly computed checksums in the packet.
void finalize_packet(ParsedPacket& pkt);

std::uint16_t compute_tcp_checksum(const ParsedPacket& pkt);
std::uint16_t compute_udp_checksum(const ParsedPacket& pkt);
std::uint16_t compute_ipv4_checksum(const Ipv4Header& ip);

bool verify_tcp_checksum(const ParsedPacket& pkt);

} // namespace injectkit
