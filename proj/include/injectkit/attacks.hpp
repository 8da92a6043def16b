#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "injectkit/framework.hpp"
#include "injectkit/label.hpp"
#include "injectkit/stats.hpp"

namespace injectkit {

struct GeneratedAttack {
    std::vector<TimedPacket> packets;  // non-decreasing timestamps
    LabelEntry label;
    AttackParams params_echo;
};

/// Sorts nothing; checks order and fills in the label from the packets.
GeneratedAttack finish_attack(std::vector<TimedPacket> packets, const AttackParams& params);

GeneratedAttack gen_portscan(AttackParams params, const StatsDb& db);
GeneratedAttack gen_smb_scan(AttackParams params, const StatsDb& db);
GeneratedAttack gen_syn_flood(AttackParams params, const StatsDb& db);
GeneratedAttack gen_memcrashed(AttackParams params, const StatsDb& db);
GeneratedAttack gen_smbloris(AttackParams params, const StatsDb& db);
GeneratedAttack gen_ftp_winaxe(AttackParams params, const StatsDb& db);
GeneratedAttack gen_template_exploit(AttackParams params, const StatsDb& db);
GeneratedAttack gen_p2p_botnet(AttackParams params, const StatsDb& db);

// --- protocol payloads used by the generators ------------------------------

inline constexpr std::uint16_t kSmbPort = 445;
inline constexpr std::uint16_t kMemcachedPort = 11211;
inline constexpr std::uint16_t kFtpPort = 21;

std::vector<std::uint8_t> smb1_negotiate_request();
std::vector<std::uint8_t> smb1_negotiate_response(std::uint64_t challenge_seed);
std::vector<std::uint8_t> memcached_stats_request(std::uint16_t request_id);
/// NetBIOS session message header with every length bit set.
std::vector<std::uint8_t> nbt_max_length_header();

inline constexpr std::size_t kMaxIpv4Payload = 65535 - 20 - 20;

// --- botnet scripts -----------------------------------------------------------

struct BotnetRow {
    double time_offset = 0.0;
    std::string src_bot;
    std::string dst_bot;
    std::string message_type;
    std::size_t payload_size = 0;
};

/// Parses the botnet CSV. Rows are returned sorted by time offset (stable).
/// Errors name the 1-based data row.
std::vector<BotnetRow> parse_botnet_csv(std::string_view text);

// --- registry ---------------------------------------------------------------

struct AttackDefinition {
    AttackSchema schema;
    std::function<GeneratedAttack(AttackParams, const StatsDb&)> generate;
};

/// Registered attacks in alphabetical order.
const std::vector<AttackDefinition>& attack_registry();
const AttackDefinition& find_attack(std::string_view name);

/// Validates, defaults and generates in one step.
GeneratedAttack generate_attack(std::string_view name, const UserParams& user, const StatsDb& db, std::uint64_t seed);

} // namespace injectkit
