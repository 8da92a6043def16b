#include <algorithm>

#include "injectkit/attacks.hpp"
#include "injectkit/error.hpp"

namespace injectkit {

namespace {

AttackSchema schema(std::string name, std::string description, std::vector<ParamSpec> own) {
    AttackSchema s{std::move(name), std::move(description), std::move(own)};
    for (auto& common : common_params()) {
        if (!s.find(common.key)) s.params.push_back(std::move(common));
    }
    return s;
}

std::vector<ParamSpec> template_params(std::string expected_shape) {
    return {
        {"template", ParamType::Path, DefaultSource::UserRequired, "", "template PCAP: " + std::move(expected_shape)},
        {"template.attacker", ParamType::Ip, DefaultSource::StatsDerived, "",
         "template address playing the attacker; default: the first host to send a bare SYN"},
    };
}

std::vector<AttackDefinition> build_registry() {
    std::vector<AttackDefinition> r;
    r.push_back({schema("eternalblue", "SMBv1 remote code execution replayed from a template capture",
                        template_params("one attacker and one victim, several TCP/445 connections carrying the exploit")),
                 gen_template_exploit});
    r.push_back({schema("ftp_winaxe", "malicious FTP server answers a client with an overlong reply",
                        {{"payload", ParamType::Text, DefaultSource::Constant, "", "overflow payload as text"},
                         {"payload.hex", ParamType::Hex, DefaultSource::Constant, "", "overflow payload as hex bytes"},
                         {"payload.length", ParamType::Integer, DefaultSource::Constant, "2048",
                          "length of the random payload used when none is given"}}),
                 gen_ftp_winaxe});
    r.push_back({schema("joomla_privesc", "Joomla account-creation privilege escalation replayed from a template",
                        template_params("one client and one web server, HTTP over TCP")),
                 gen_template_exploit});
    r.push_back({schema("memcrashed", "spoofed memcached 'stats' requests toward amplification servers",
                        {{"servers", ParamType::IpList, DefaultSource::StatsDerived, "",
                          "memcached servers; default: the busiest background hosts"},
                         {"servers.count", ParamType::Integer, DefaultSource::Constant, "1",
                          "number of servers picked when servers is unset"},
                         {"packets", ParamType::Integer, DefaultSource::StatsDerived, "",
                          "request count; default: intensity x duration"},
                         {"duration", ParamType::Number, DefaultSource::Constant, "10", "attack length in seconds"}}),
                 gen_memcrashed});
    r.push_back({schema("ms17_scan", "MS17-010 vulnerability probe replayed from a template capture",
                        template_params("one scanner and one SMB host, TCP/445 negotiate and transaction probe")),
                 gen_template_exploit});
    r.push_back({schema("p2p_botnet", "peer-to-peer bot messages scripted by a CSV file",
                        {{"csv", ParamType::Path, DefaultSource::UserRequired, "",
                          "script with columns time_offset,src_bot,dst_bot,message_type,payload_size"},
                         {"reuse_hosts", ParamType::Boolean, DefaultSource::Constant, "true",
                          "bind bots to background hosts instead of fresh addresses"},
                         {"transport", ParamType::Text, DefaultSource::Constant, "udp", "udp or tcp"},
                         {"bots", ParamType::Text, DefaultSource::StatsDerived, "",
                          "explicit bindings id:ip,id:ip; every scripted bot must be bound"}}),
                 gen_p2p_botnet});
    r.push_back({schema("portscan", "vertical TCP SYN scan of one victim", {
                         {"ports", ParamType::PortList, DefaultSource::StatsDerived, "",
                          "ports to probe; default: the 1000 most common TCP ports in random order"}}),
                 gen_portscan});
    r.push_back({schema("sality", "Sality peer traffic replayed from a template capture",
                        template_params("one infected host and one peer")),
                 gen_template_exploit});
    r.push_back({schema("smb_scan", "TCP/445 sweep with SMB1 negotiation on open hosts", {}), gen_smb_scan});
    r.push_back({schema("smbloris", "NetBIOS sessions announcing maximum-length messages",
                        {{"connections", ParamType::Integer, DefaultSource::Constant, "100", "number of connections"}}),
                 gen_smbloris});
    r.push_back({schema("sql_injection", "SQL injection against a web application replayed from a template",
                        template_params("one client and one web server, HTTP over TCP")),
                 gen_template_exploit});
    r.push_back({schema("syn_flood", "TCP SYN flood, distributed when several attackers are given",
                        {{"port", ParamType::Port, DefaultSource::StatsDerived, "",
                          "target port; default: the victim's most targeted open port"},
                         {"attackers.count", ParamType::Integer, DefaultSource::Constant, "1",
                          "number of sources; extra ones get random public addresses"},
                         {"packets", ParamType::Integer, DefaultSource::StatsDerived, "",
                          "SYN count; default: intensity x duration"},
                         {"duration", ParamType::Number, DefaultSource::Constant, "10", "attack length in seconds"},
                         {"reply_fraction", ParamType::Number, DefaultSource::Constant, "1.0",
                          "share of SYNs the victim answers before the cutoff"},
                         {"reply_cutoff", ParamType::Number, DefaultSource::Constant, "0.7",
                          "fraction of the flood after which the victim stops answering"}}),
                 gen_syn_flood});
    r.push_back({schema("template", "generic template rewrite; the label uses this name",
                        template_params("any two-endpoint capture with at least one TCP packet")),
                 gen_template_exploit});
    std::sort(r.begin(), r.end(),
              [](const AttackDefinition& a, const AttackDefinition& b) { return a.schema.attack_name < b.schema.attack_name; });
    return r;
}

} // namespace

const std::vector<AttackDefinition>& attack_registry() {
    static const std::vector<AttackDefinition> registry = build_registry();
    return registry;
}

const AttackDefinition& find_attack(std::string_view name) {
    for (const auto& def : attack_registry()) {
        if (def.schema.attack_name == name) return def;
    }
    throw Error(Errc::UnknownAttack, "unknown attack '" + std::string(name) + "'; see list-attacks");
}

GeneratedAttack generate_attack(std::string_view name, const UserParams& user, const StatsDb& db, std::uint64_t seed) {
    const auto& def = find_attack(name);
    return def.generate(validate_and_default(user, db, def.schema, seed), db);
}

} // namespace injectkit
