#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "injectkit/attacks.hpp"
#include "injectkit/label.hpp"
#include "injectkit/pcap_io.hpp"

namespace injectkit {

/// One serialized attack packet waiting to be merged.
struct AttackFrame {
    TimeUs time = 0;
    std::size_t attack = 0;  // position in the attack list
    std::vector<std::uint8_t> bytes;
};

/// Serializes an attack's packets and releases them. Frames are appended.
void append_frames(GeneratedAttack& attack, std::size_t index, std::vector<AttackFrame>& frames);

/// Orders frames by (time, attack index), keeping each attack's own order.
void sort_frames(std::vector<AttackFrame>& frames);

/// Streams the background through `out`, slotting the sorted frames in by
/// timestamp. At equal timestamps background packets go first. Background
/// records are written unchanged. Returns the number of records written.
std::uint64_t merge_into(PcapReader& background, std::span<const AttackFrame> frames, PcapWriter& out);

/// In-memory variant used by tests; timestamps of `background` are in the
/// resolution of `variant`, the result is in microseconds.
std::vector<PacketRecord> merge_records(std::span<const PacketRecord> background, MagicVariant variant,
                                        std::span<const AttackFrame> frames);

inline constexpr int kLabelsVersion = 1;

/// "2021-03-04T05:06:07.000008Z"
std::string iso8601_utc(TimeUs t);

std::string labels_xml(std::span<const LabelEntry> entries);
void write_labels(std::span<const LabelEntry> entries, const std::filesystem::path& out_path);

} // namespace injectkit
