#include "injectkit/pcap_io.hpp"

#include <array>
#include <cstring>

#include "injectkit/error.hpp"

namespace injectkit {

namespace {

constexpr std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }
constexpr std::uint16_t bswap16(std::uint16_t v) { return __builtin_bswap16(v); }

constexpr std::uint32_t kMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kMagicNano = 0xa1b23c4d;
constexpr std::size_t kIoBufferSize = 1 << 20;

// Hard sanity bound on a single record body. Anything larger means the
// record header is garbage.
constexpr std::uint32_t kMaxRecordLen = 256u << 20;

std::uint32_t read_le32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void put_le32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
    p[2] = static_cast<std::uint8_t>(v >> 16);
    p[3] = static_cast<std::uint8_t>(v >> 24);
}

void put_le16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

std::array<std::uint8_t, kGlobalHeaderSize> global_header(std::uint32_t snaplen, std::uint32_t link_type) {
    std::array<std::uint8_t, kGlobalHeaderSize> h{};
    put_le32(h.data(), kMagicMicro);
    put_le16(h.data() + 4, 2);
    put_le16(h.data() + 6, 4);
    // thiszone and sigfigs stay zero
    put_le32(h.data() + 16, snaplen);
    put_le32(h.data() + 20, link_type);
    return h;
}

std::array<std::uint8_t, kRecordHeaderSize> record_header(const PacketRecord& r, MagicVariant source) {
    std::array<std::uint8_t, kRecordHeaderSize> h{};
    const std::uint32_t frac = is_nanosecond(source) ? r.ts_frac / 1000 : r.ts_frac;
    put_le32(h.data(), r.ts_secs);
    put_le32(h.data() + 4, frac);
    put_le32(h.data() + 8, r.captured_len());
    put_le32(h.data() + 12, r.original_len);
    return h;
}

} // namespace

PacketRecord PacketRecord::from_bytes(TimeUs ts, std::vector<std::uint8_t> bytes) {
    PacketRecord r;
    r.ts_secs = static_cast<std::uint32_t>(ts / 1'000'000);
    r.ts_frac = static_cast<std::uint32_t>(ts % 1'000'000);
    r.original_len = static_cast<std::uint32_t>(bytes.size());
    r.data = std::move(bytes);
    return r;
}

PcapReader::PcapReader(const std::filesystem::path& path) : buffer_(kIoBufferSize) {
    ++opened_;
    in_.rdbuf()->pubsetbuf(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    in_.open(path, std::ios::binary);
    if (!in_) throw Error(Errc::IoError, "cannot open " + path.string());

    std::uint8_t header[kGlobalHeaderSize];
    in_.read(reinterpret_cast<char*>(header), sizeof header);
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got < 4) throw Error(Errc::BadMagic, path.string() + ": not a PCAP file");

    const std::uint32_t magic = read_le32(header);
    if (magic == kMagicMicro) {
        meta_.magic_variant = MagicVariant::MicroLE;
    } else if (magic == kMagicNano) {
        meta_.magic_variant = MagicVariant::NanoLE;
    } else if (magic == bswap32(kMagicMicro)) {
        meta_.magic_variant = MagicVariant::MicroBE;
        swapped_ = true;
    } else if (magic == bswap32(kMagicNano)) {
        meta_.magic_variant = MagicVariant::NanoBE;
        swapped_ = true;
    } else {
        throw Error(Errc::BadMagic, path.string() + ": not a PCAP file");
    }
    if (got < kGlobalHeaderSize) throw Error(Errc::TruncatedRecord, path.string() + ": truncated global header");

    auto load16 = [&](const std::uint8_t* p) {
        const auto v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        return swapped_ ? bswap16(v) : v;
    };
    meta_.version_major = load16(header + 4);
    meta_.version_minor = load16(header + 6);
    meta_.snaplen = load32(header + 16);
    meta_.link_type = load32(header + 20);
    if (meta_.link_type != kLinkTypeEthernet) {
        throw Error(Errc::UnsupportedLinkType,
                    path.string() + ": link type " + std::to_string(meta_.link_type) + " is not Ethernet");
    }
    offset_ = kGlobalHeaderSize;
}

std::uint32_t PcapReader::load32(const std::uint8_t* p) const noexcept {
    const std::uint32_t v = read_le32(p);
    return swapped_ ? bswap32(v) : v;
}

std::optional<PacketRecord> PcapReader::next() {
    PacketRecord r;
    if (!next(r)) return std::nullopt;
    return r;
}

bool PcapReader::next(PacketRecord& out) {
    std::uint8_t header[kRecordHeaderSize];
    in_.read(reinterpret_cast<char*>(header), sizeof header);
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) return false;
    if (got < kRecordHeaderSize) {
        throw Error(Errc::TruncatedRecord, "record header truncated at offset " + std::to_string(offset_));
    }
    out.ts_secs = load32(header);
    out.ts_frac = load32(header + 4);
    const std::uint32_t incl_len = load32(header + 8);
    out.original_len = load32(header + 12);
    if (incl_len > kMaxRecordLen) {
        throw Error(Errc::TruncatedRecord, "implausible record length at offset " + std::to_string(offset_));
    }
    out.data.resize(incl_len);
    if (incl_len > 0) {
        in_.read(reinterpret_cast<char*>(out.data.data()), incl_len);
        if (static_cast<std::uint32_t>(in_.gcount()) != incl_len) {
            throw Error(Errc::TruncatedRecord, "record body truncated at offset " + std::to_string(offset_));
        }
    }
    offset_ += kRecordHeaderSize + incl_len;
    ++records_read_;
    return true;
}

bool PcapReader::skip_next(TimeUs& ts) {
    std::uint8_t header[kRecordHeaderSize];
    in_.read(reinterpret_cast<char*>(header), sizeof header);
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) return false;
    if (got < kRecordHeaderSize) {
        throw Error(Errc::TruncatedRecord, "record header truncated at offset " + std::to_string(offset_));
    }
    PacketRecord r;
    r.ts_secs = load32(header);
    r.ts_frac = load32(header + 4);
    ts = r.time_us(meta_.magic_variant);
    const std::uint32_t incl_len = load32(header + 8);
    if (incl_len > kMaxRecordLen) {
        throw Error(Errc::TruncatedRecord, "implausible record length at offset " + std::to_string(offset_));
    }
    in_.ignore(incl_len);
    if (static_cast<std::uint32_t>(in_.gcount()) != incl_len) {
        throw Error(Errc::TruncatedRecord, "record body truncated at offset " + std::to_string(offset_));
    }
    offset_ += kRecordHeaderSize + incl_len;
    ++records_read_;
    return true;
}

PcapWriter::PcapWriter(const std::filesystem::path& path, std::uint32_t snaplen, std::uint32_t link_type)
    : buffer_(kIoBufferSize), path_(path) {
    out_.rdbuf()->pubsetbuf(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(Errc::IoError, "cannot create " + path.string());
    const auto h = global_header(snaplen, link_type);
    out_.write(reinterpret_cast<const char*>(h.data()), h.size());
}

void PcapWriter::write(const PacketRecord& record, MagicVariant source) {
    const auto h = record_header(record, source);
    out_.write(reinterpret_cast<const char*>(h.data()), h.size());
    out_.write(reinterpret_cast<const char*>(record.data.data()),
               static_cast<std::streamsize>(record.data.size()));
    if (!out_) throw Error(Errc::IoError, "write failed: " + path_.string());
    ++written_;
}

void PcapWriter::close() {
    if (!out_.is_open()) return;
    out_.flush();
    if (!out_) throw Error(Errc::IoError, "write failed: " + path_.string());
    out_.close();
}

Capture read_pcap(const std::filesystem::path& path) {
    PcapReader reader(path);
    Capture cap;
    cap.meta = reader.meta();
    PacketRecord r;
    while (reader.next(r)) cap.packets.push_back(r);
    return cap;
}

void write_pcap(const std::filesystem::path& path, const CaptureMeta& meta,
                std::span<const PacketRecord> packets) {
    PcapWriter writer(path, meta.snaplen, meta.link_type);
    for (const auto& p : packets) writer.write(p, meta.magic_variant);
    writer.close();
}

std::vector<std::uint8_t> encode_pcap(const CaptureMeta& meta, std::span<const PacketRecord> packets) {
    std::vector<std::uint8_t> out;
    const auto h = global_header(meta.snaplen, meta.link_type);
    out.insert(out.end(), h.begin(), h.end());
    for (const auto& p : packets) {
        const auto rh = record_header(p, meta.magic_variant);
        out.insert(out.end(), rh.begin(), rh.end());
        out.insert(out.end(), p.data.begin(), p.data.end());
    }
    return out;
}

} // namespace injectkit
