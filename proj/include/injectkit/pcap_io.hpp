#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

namespace injectkit {

/// Microseconds since the UNIX epoch. Every timestamp the toolkit produces
/// (generated packets, labels, window boundaries) uses this resolution.
using TimeUs = std::int64_t;

inline constexpr std::uint32_t kLinkTypeEthernet = 1;
inline constexpr std::size_t kGlobalHeaderSize = 24;
inline constexpr std::size_t kRecordHeaderSize = 16;
inline constexpr std::uint32_t kDefaultSnaplen = 65535;

/// The four classic PCAP magic layouts. "LE"/"BE" is the byte order of the
/// file; "Micro"/"Nano" the resolution of the fractional timestamp.
enum class MagicVariant { MicroLE, MicroBE, NanoLE, NanoBE };

constexpr bool is_nanosecond(MagicVariant v) noexcept {
    return v == MagicVariant::NanoLE || v == MagicVariant::NanoBE;
}

struct CaptureMeta {
    MagicVariant magic_variant = MagicVariant::MicroLE;
    std::uint32_t link_type = kLinkTypeEthernet;
    std::uint32_t snaplen = kDefaultSnaplen;
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;

    bool operator==(const CaptureMeta&) const = default;
};

struct PacketRecord {
    std::uint32_t ts_secs = 0;
    std::uint32_t ts_frac = 0;  // micro- or nanoseconds, per CaptureMeta
    std::uint32_t original_len = 0;
    std::vector<std::uint8_t> data;

    std::uint32_t captured_len() const noexcept { return static_cast<std::uint32_t>(data.size()); }

    /// Timestamp truncated to microseconds.
    TimeUs time_us(MagicVariant v) const noexcept {
        const std::int64_t frac = is_nanosecond(v) ? ts_frac / 1000 : ts_frac;
        return std::int64_t{ts_secs} * 1'000'000 + frac;
    }

    static PacketRecord from_bytes(TimeUs ts, std::vector<std::uint8_t> bytes);

    bool operator==(const PacketRecord&) const = default;
};

/// Streaming reader: holds one record at a time, so memory use does not grow
/// with the capture size.
class PcapReader {
public:
    explicit PcapReader(const std::filesystem::path& path);

    const CaptureMeta& meta() const noexcept { return meta_; }

    /// Next record in file order, or nullopt at a clean end of file.
    std::optional<PacketRecord> next();

    /// Like next() but reuses the caller's buffer.
    bool next(PacketRecord& out);

    /// Reads only the next record header and skips the body. Returns the
    /// record timestamp truncated to microseconds.
    bool skip_next(TimeUs& ts);

    std::uint64_t records_read() const noexcept { return records_read_; }

    /// Number of readers ever constructed in this process. Lets callers check
    /// whether a code path reopened a packet stream.
    static std::uint64_t instances_opened() noexcept { return opened_.load(); }

private:
    std::uint32_t load32(const std::uint8_t* p) const noexcept;

    std::ifstream in_;
    std::vector<char> buffer_;
    CaptureMeta meta_;
    bool swapped_ = false;
    std::uint64_t records_read_ = 0;
    std::uint64_t offset_ = 0;

    static inline std::atomic<std::uint64_t> opened_{0};
};

/// Streaming writer. Output is always microsecond little-endian; nanosecond
/// input records are truncated toward zero.
class PcapWriter {
public:
    PcapWriter(const std::filesystem::path& path, std::uint32_t snaplen = kDefaultSnaplen,
               std::uint32_t link_type = kLinkTypeEthernet);

    void write(const PacketRecord& record, MagicVariant source = MagicVariant::MicroLE);
    void close();

    std::uint64_t records_written() const noexcept { return written_; }

private:
    std::ofstream out_;
    std::vector<char> buffer_;
    std::filesystem::path path_;
    std::uint64_t written_ = 0;
};

struct Capture {
    CaptureMeta meta;
    std::vector<PacketRecord> packets;
};

Capture read_pcap(const std::filesystem::path& path);
void write_pcap(const std::filesystem::path& path, const CaptureMeta& meta,
                std::span<const PacketRecord> packets);

/// Encodes a capture exactly as write_pcap would, without touching disk.
std::vector<std::uint8_t> encode_pcap(const CaptureMeta& meta, std::span<const PacketRecord> packets);

} // namespace injectkit
