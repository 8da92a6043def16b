#include "injectkit/inject.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "injectkit/error.hpp"

namespace injectkit {

void append_frames(GeneratedAttack& attack, std::size_t index, std::vector<AttackFrame>& frames) {
    frames.reserve(frames.size() + attack.packets.size());
    for (auto& tp : attack.packets) {
        AttackFrame f;
        f.time = tp.time;
        f.attack = index;
        serialize_packet_into(tp.packet, false, f.bytes);
        frames.push_back(std::move(f));
        tp.packet = ParsedPacket{};
    }
    attack.packets.clear();
    attack.packets.shrink_to_fit();
}

void sort_frames(std::vector<AttackFrame>& frames) {
    std::stable_sort(frames.begin(), frames.end(), [](const AttackFrame& a, const AttackFrame& b) {
        return a.time != b.time ? a.time < b.time : a.attack < b.attack;
    });
}

namespace {

template <typename NextBg, typename EmitBg, typename EmitFrame>
std::uint64_t merge_core(NextBg next_bg, EmitBg emit_bg, std::span<const AttackFrame> frames, EmitFrame emit_frame) {
    std::uint64_t written = 0;
    std::size_t f = 0;
    TimeUs t = 0;
    while (next_bg(t)) {
        while (f < frames.size() && frames[f].time < t) {
            emit_frame(frames[f++]);
            ++written;
        }
        emit_bg();
        ++written;
    }
    for (; f < frames.size(); ++f, ++written) emit_frame(frames[f]);
    return written;
}

} // namespace

std::uint64_t merge_into(PcapReader& background, std::span<const AttackFrame> frames, PcapWriter& out) {
    PacketRecord rec;
    const MagicVariant variant = background.meta().magic_variant;
    PacketRecord frame_rec;
    return merge_core(
        [&](TimeUs& t) {
            if (!background.next(rec)) return false;
            t = rec.time_us(variant);
            return true;
        },
        [&] { out.write(rec, variant); },
        frames,
        [&](const AttackFrame& f) {
            frame_rec.ts_secs = static_cast<std::uint32_t>(f.time / 1'000'000);
            frame_rec.ts_frac = static_cast<std::uint32_t>(f.time % 1'000'000);
            frame_rec.original_len = static_cast<std::uint32_t>(f.bytes.size());
            frame_rec.data = f.bytes;
            out.write(frame_rec);
        });
}

std::vector<PacketRecord> merge_records(std::span<const PacketRecord> background, MagicVariant variant,
                                        std::span<const AttackFrame> frames) {
    std::vector<PacketRecord> out;
    out.reserve(background.size() + frames.size());
    std::size_t i = 0;
    merge_core(
        [&](TimeUs& t) {
            if (i >= background.size()) return false;
            t = background[i].time_us(variant);
            return true;
        },
        [&] {
            PacketRecord r = background[i++];
            if (is_nanosecond(variant)) r.ts_frac /= 1000;
            out.push_back(std::move(r));
        },
        frames, [&](const AttackFrame& f) { out.push_back(PacketRecord::from_bytes(f.time, f.bytes)); });
    return out;
}

std::string iso8601_utc(TimeUs t) {
    using namespace std::chrono;
    const sys_time<microseconds> tp{microseconds{t}};
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<long long>(hms.subseconds().count()));
    return buf;
}

namespace {
std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}
} // namespace

std::string labels_xml(std::span<const LabelEntry> entries) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    const std::string root = "<labels version=\"" + std::to_string(kLabelsVersion) + "\"";
    if (entries.empty()) return out + root + "/>\n";
    out += root + ">\n";
    for (const auto& e : entries) {
        out += "  <attack>\n";
        out += "    <name>" + xml_escape(e.attack_name) + "</name>\n";
        out += "    <start>" + iso8601_utc(e.start_ts) + "</start>\n";
        out += "    <end>" + iso8601_utc(e.end_ts) + "</end>\n";
        out += "    <packet_count>" + std::to_string(e.packet_count) + "</packet_count>\n";
        out += "    <params_digest>" + xml_escape(e.params_digest) + "</params_digest>\n";
        out += "  </attack>\n";
    }
    return out + "</labels>\n";
}

void write_labels(std::span<const LabelEntry> entries, const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << labels_xml(entries);
    out.close();
    if (!out) throw Error(Errc::IoError, "cannot write " + out_path.string());
}

} // namespace injectkit
