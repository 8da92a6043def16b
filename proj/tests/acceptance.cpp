// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <functional>
#include <iostream>
#include <regex>

#include "background.hpp"
#include "injectkit/attacks.hpp"
#include "injectkit/entropy.hpp"
#include "injectkit/inject.hpp"
#include "injectkit/packet.hpp"
#include "injectkit/pipeline.hpp"
#include "injectkit/tided.hpp"
#include "metric_oracle.hpp"

using namespace injectkit;
using namespace testkit;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail.clear();
        pass = false;
        if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + why;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double peak_rss_mib() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<double>(ru.ru_maxrss) / 1024.0;  // ru_maxrss is in KiB on Linux
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome entropy_correctness() {
    Outcome o;
    for (std::size_t n : {2u, 4u, 8u, 16u, 1024u}) {
        for (std::uint64_t c : {1u, 3u, 1000u}) {
            const std::vector<std::uint64_t> counts(n, c);
            const double h = entropy_of_counts(counts);
            if (std::fabs(h - std::log2(static_cast<double>(n))) > 1e-9) {
                o.fail("H(uniform " + std::to_string(n) + ") = " + fmt("%.12f", h));
            }
        }
    }
    const auto t0 = Clock::now();
    Rng rng(101);
    for (int i = 0; i < 10000; ++i) {
        std::map<std::uint64_t, std::uint64_t> m;
        const auto k = 1 + rng.uniform(rng.uniform(2) ? 8 : 300);
        for (std::uint64_t j = 0; j < k; ++j) {
            // skewed counts, including zeros and a heavy hitter now and then
            std::uint64_t c = rng.uniform(4) == 0 ? 0 : 1 + rng.uniform(1 + rng.uniform(1000));
            if (rng.uniform(50) == 0) c = 1'000'000'000;
            m[rng.next()] = c;
        }
        bool any = false;
        for (const auto& [v, c] : m) any = any || c > 0;
        if (!any) m.begin()->second = 1;
        const double ne = normalized_entropy(m);
        if (!(ne >= 0.0 && ne <= 1.0)) o.fail("normalized entropy " + fmt("%.17g", ne) + " outside [0,1]");
    }
    const double secs = seconds_since(t0);
    if (secs >= 5.0) o.fail("property run took " + fmt("%.2f", secs) + " s");
    if (o.pass) o.detail = "log2 n exact for 5 sizes; 10^4 maps in " + fmt("%.3f", secs) + " s";
    return o;
}

Outcome metric_oracle_equivalence() {
    Outcome o;
    const auto iana = oracle_iana_ports();
    Rng rng(202);
    const std::size_t windows[] = {1, 7, 10, 64, 100};
    std::size_t total = 0;
    for (int c = 0; c < 50; ++c) {
        TempDir dir;
        FrameMix mix;
        mix.p_runt = c % 5 == 0 ? 0.02 : 0.0;
        mix.p_port_zero = c % 3 == 0 ? 0.05 : 0.0;
        mix.hosts = 2 + rng.uniform(30);
        const std::size_t n = 1 + rng.uniform(1000);
        auto frames = random_capture(rng, n, mix);
        while (raw_decode(frames.front().bytes).runt) frames.front().bytes = random_frame(rng);
        write_capture(dir / "c.pcap", frames);
        const auto w = windows[rng.uniform(std::size(windows))];
        const auto diff = compare_metrics(frames, dir / "c.pcap", w, iana);
        if (!diff.empty()) o.fail("capture " + std::to_string(c) + " (" + std::to_string(n) + " pkts): " + diff);
        total += n;
    }
    if (o.pass) o.detail = "50 captures, " + std::to_string(total) + " packets, 6 metrics x 6 features";
    return o;
}

Outcome checksum_oracle() {
    Outcome o;
    const Bytes rfc{0x00, 0x01, 0xf2, 0x03, 0xf4, 0xf5, 0xf6, 0xf7};
    if (internet_checksum(rfc) != 0x220D) o.fail("RFC example gives " + std::to_string(internet_checksum(rfc)));
    Rng rng(303);
    FrameMix mix;
    mix.p_bad_checksum = 0.3;
    std::size_t tcp = 0, bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const Bytes f = random_frame(rng, mix);
        if (internet_checksum(f) != naive_checksum(f)) o.fail("internet_checksum differs on frame " + std::to_string(i));
        const auto v = raw_decode(f);
        if (!v.tcp_checksum_checkable) continue;
        const auto p = parse_packet(f);
        ++tcp;
        bad += v.tcp_checksum_ok ? 0 : 1;
        if (verify_tcp_checksum(p) != v.tcp_checksum_ok) o.fail("verify_tcp_checksum differs on frame " + std::to_string(i));
        // the value a correct sender would have written
        Bytes seg(f.begin() + 14 + static_cast<std::ptrdiff_t>(p.ip->header_len()), f.begin() + 14 + v.total_len);
        seg[16] = seg[17] = 0;
        if (compute_tcp_checksum(p) != pseudo_checksum(p.ip->src, p.ip->dst, 6, seg)) {
            o.fail("compute_tcp_checksum differs on frame " + std::to_string(i));
        }
    }
    if (o.pass) {
        o.detail = "RFC example 0x220D; 10^4 frames, " + std::to_string(tcp) + " TCP (" + std::to_string(bad) + " corrupted)";
    }
    return o;
}

Outcome round_trip() {
    Outcome o;
    TempDir dir;
    Rng rng(404);
    FrameMix mix;
    mix.p_odd = 0.1;
    mix.p_truncate = 0.05;
    mix.p_trailer = 0.05;
    const auto frames = random_capture(rng, 100000, mix);

    // hand-encoded expected file: LE microsecond header, then records
    Bytes expect;
    auto le32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) expect.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    le32(0xa1b2c3d4);
    expect.insert(expect.end(), {2, 0, 4, 0});
    le32(0);
    le32(0);
    le32(65535);
    le32(1);
    for (const auto& f : frames) {
        le32(static_cast<std::uint32_t>(f.time / 1'000'000));
        le32(static_cast<std::uint32_t>(f.time % 1'000'000));
        le32(static_cast<std::uint32_t>(f.bytes.size()));
        le32(static_cast<std::uint32_t>(f.bytes.size()));
        expect.insert(expect.end(), f.bytes.begin(), f.bytes.end());
    }

    write_capture(dir / "a.pcap", frames);
    if (read_bytes(dir / "a.pcap") != expect) o.fail("writer output differs from the hand encoding");
    {
        PcapReader r(dir / "a.pcap");
        PcapWriter w(dir / "b.pcap", r.meta().snaplen, r.meta().link_type);
        PacketRecord rec;
        while (r.next(rec)) w.write(rec, r.meta().magic_variant);
        w.close();
    }
    if (read_bytes(dir / "b.pcap") != expect) o.fail("read->write is not byte-identical");

    std::size_t mismatched = 0, runts = 0;
    for (const auto& f : frames) {
        if (raw_decode(f.bytes).runt) {
            ++runts;
            continue;
        }
        if (serialize_packet(parse_packet(f.bytes), false) != f.bytes) ++mismatched;
    }
    if (mismatched) o.fail(std::to_string(mismatched) + " packets changed under parse->serialize");
    if (o.pass) o.detail = "10^5 packets (" + std::to_string(runts) + " runts, file level only), " + std::to_string(expect.size()) +
                           " bytes, file and packet level identical";
    return o;
}

// Scenario shared by the reproducibility and merge criteria.
struct Scenario {
    TempDir dir;
    std::filesystem::path bg, tpl, csv;

    Scenario() {
        bg = dir / "bg.pcap";
        tpl = dir / "tpl.pcap";
        csv = dir / "bots.csv";
        BackgroundSpec spec;
        spec.connections = 800;
        spec.closed_targets = {8080};
        write_capture(bg, make_background(spec));
        write_capture(tpl, make_template_frames(5, 3));
        write_text(csv, "time_offset,src_bot,dst_bot,message_type,payload_size\n"
                        "0,b1,b2,hello,30\n0.25,b2,b3,relay,64\n0.5,b3,b1,cmd,200\n0.75,b1,b3,ping,8\n");
    }

    std::vector<AttackSpec> attacks() const {
        const std::string server = server_host().ip.to_string();
        return {
            {"portscan", {{"victim.ip", server}, {"ports", "1-300"}}},
            {"smb_scan", {{"victim.ip", server + "," + make_host(2).ip.to_string()}, {"start_offset", "1"}}},
            {"syn_flood", {{"victim.ip", server}, {"packets", "500"}, {"attackers.count", "3"}}},
            {"memcrashed", {{"packets", "60"}, {"servers.count", "2"}}},
            {"smbloris", {{"victim.ip", server}, {"connections", "20"}}},
            {"ftp_winaxe", {{"start_offset", "3"}}},
            {"eternalblue", {{"template", tpl.string()}, {"victim.ip", server}}},
            {"p2p_botnet", {{"csv", csv.string()}, {"transport", "tcp"}, {"start_offset", "0.5"}}},
        };
    }

    RunConfig config(const std::string& out, const std::string& cache, std::uint64_t seed) const {
        RunConfig c;
        c.input_path = bg;
        c.output_path = dir / out;
        c.cache_dir = dir / cache;
        c.seed = seed;
        c.attack_specs = attacks();
        return c;
    }
};

Outcome reproducibility() {
    Outcome o;
    Scenario s;
    std::ostringstream m1, m2, m3;
    // the second run reads statistics back from the cache the first one wrote
    run_inject(s.config("one.pcap", "cache", 77), m1);
    run_inject(s.config("two.pcap", "cache", 77), m2);
    run_inject(s.config("three.pcap", "cache", 78), m3);
    const auto a = read_bytes(s.dir / "one.pcap"), b = read_bytes(s.dir / "two.pcap");
    if (a != b) o.fail("output PCAPs differ");
    if (read_bytes(s.dir / "one.pcap.labels.xml") != read_bytes(s.dir / "two.pcap.labels.xml")) o.fail("labels differ");
    if (read_bytes(s.dir / "three.pcap") == a) o.fail("a different seed gave the same output");
    if (o.pass) o.detail = "8 attacks, " + std::to_string(a.size()) + "-byte PCAP and labels identical across runs";
    return o;
}

Outcome portscan_contract() {
    Outcome o;
    TempDir dir;
    BackgroundSpec spec;
    spec.open_ports = {21, 22, 80, 443, 3306, 8080};
    spec.closed_targets = {23, 25};
    const auto frames = make_background(spec);
    write_capture(dir / "bg.pcap", frames);
    const auto db = compute_statistics(dir / "bg.pcap");
    const Ipv4Address victim = server_host().ip;

    // open ports as seen on the wire: SYN+ACK sent by the victim
    std::set<std::uint16_t> open;
    for (const auto& f : frames) {
        const auto v = raw_decode(f.bytes);
        if (v.tcp && v.src == victim.value && (v.flags & 0x12) == 0x12) open.insert(v.sport);
    }

    const auto g = generate_attack("portscan", {{"victim.ip", victim.to_string()}}, db, 606);
    const Ipv4Address attacker = g.params_echo.attacker().ip;

    struct Pkt {
        bool outbound;
        std::uint8_t flags;
        std::uint32_t seq, ack;
        std::uint16_t sport, dport;
    };
    std::map<std::uint16_t, std::vector<Pkt>> by_port;
    for (const auto& tp : g.packets) {
        const auto v = raw_decode(serialize_packet(tp.packet, false));
        const bool out = v.src == attacker.value;
        if (!out && v.src != victim.value) o.fail("packet between unexpected hosts");
        by_port[out ? v.dport : v.sport].push_back({out, v.flags, v.seq, v.ack, v.sport, v.dport});
    }
    std::set<std::uint16_t> probed;
    for (const auto& [port, pkts] : by_port) {
        if (!pkts.empty() && pkts.front().outbound && pkts.front().flags == 0x02) probed.insert(port);
    }
    if (probed.size() != 1000) o.fail(std::to_string(probed.size()) + " distinct probed ports");
    if (by_port.size() != 1000) o.fail(std::to_string(by_port.size()) + " ports touched");

    // every probe must reproduce the enumerated exchange exactly
    std::size_t opened = 0;
    for (const auto& [port, pkts] : by_port) {
        const auto& syn = pkts.front();
        std::vector<std::pair<bool, std::uint8_t>> want;
        if (open.contains(port)) {
            ++opened;
            want = {{true, 0x02}, {false, 0x12}, {true, 0x04}};
        } else {
            want = {{true, 0x02}, {false, 0x14}};
        }
        std::vector<std::pair<bool, std::uint8_t>> got;
        for (const auto& p : pkts) got.emplace_back(p.outbound, p.flags);
        if (got != want) {
            o.fail("port " + std::to_string(port) + " sequence mismatch");
            continue;
        }
        if (pkts[1].ack != syn.seq + 1) o.fail("port " + std::to_string(port) + " reply does not ack SYN+1");
        if (open.contains(port) && pkts[2].seq != syn.seq + 1) o.fail("port " + std::to_string(port) + " RST seq");
        for (const auto& p : pkts) {
            if ((p.outbound ? p.sport : p.dport) != syn.sport) o.fail("source port changes mid-probe");
        }
    }
    // the probed set must be the 1000 most frequent ports of the bundled table
    std::vector<std::pair<double, int>> ranked;
    {
        std::istringstream in(read_text(std::filesystem::path(INJECTKIT_DATA_DIR) / "port_frequency.csv"));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            ranked.emplace_back(-std::stod(line.substr(comma + 1)), std::stoi(line.substr(0, comma)));
        }
    }
    std::sort(ranked.begin(), ranked.end());
    std::set<std::uint16_t> top;
    for (std::size_t i = 0; i < 1000 && i < ranked.size(); ++i) top.insert(static_cast<std::uint16_t>(ranked[i].second));
    if (probed != top) o.fail("probed ports are not the 1000 most frequent");
    std::size_t open_in_top = 0;
    for (auto p : open) open_in_top += top.count(p);
    if (opened != open_in_top) o.fail("answered " + std::to_string(opened) + " open ports, expected " + std::to_string(open_in_top));
    if (o.pass) {
        o.detail = "1000 distinct ports, " + std::to_string(opened) + " open / " + std::to_string(1000 - opened) +
                   " closed sequences match";
    }
    return o;
}

Outcome complementary_rate() {
    Outcome o;
    TempDir dir;
    // two-level background over 10 windows of 1 s: 200 pps in windows 0-4,
    // silence in 5-8, and the single closing packet in window 9
    const TimeUs t0 = 1'700'000'000'000'000;
    std::vector<TimedFrame> frames;
    Rng rng(707);
    for (int k = 0; k < 1000; ++k) frames.push_back({t0 + k * 5000, random_frame(rng)});
    frames.push_back({t0 + 10'000'000, random_frame(rng)});
    write_capture(dir / "bg.pcap", frames);
    const auto db = compute_statistics(dir / "bg.pcap", WindowSpec::count(10));
    const auto& bg_rate = db.interval_tables.at("packet_rate");

    const double R = 1000.0;
    const std::vector<double> b{200, 200, 200, 200, 200, 0, 0, 0, 0, 1};
    std::vector<double> expect;
    for (double bi : b) expect.push_back(std::max(R * (1.0 - bi / 200.0), 0.05 * R));

    double peak = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto plan = complementary_rate_plan(bg_rate, R, t0, 20000, seed);
        if (plan.timestamps.size() != 20000) o.fail("budget not honoured");
        if (!std::is_sorted(plan.timestamps.begin(), plan.timestamps.end())) o.fail("plan not ordered");
        std::vector<double> per(10, 0);
        for (TimeUs t : plan.timestamps) {
            if (t < t0 + 10'000'000) per[static_cast<std::size_t>((t - t0) / 1'000'000)] += 1;
        }
        for (std::size_t w = 0; w < 10; ++w) {
            if (std::fabs(per[w] - expect[w] * 1.0) > 1.0) {
                o.fail("seed " + std::to_string(seed) + " window " + std::to_string(w) + ": " + fmt("%.0f", per[w]) +
                       " planned vs " + fmt("%.1f", expect[w]));
            }
            peak = std::max(peak, per[w]);
        }
        // the plan keeps going at R once the background ends
        std::size_t after = 0;
        for (TimeUs t : plan.timestamps) after += t >= t0 + 10'000'000 && t < t0 + 11'000'000;
        if (std::fabs(static_cast<double>(after) - R) > 1.0) o.fail("rate after the background " + std::to_string(after));
    }
    if (peak < R * kJitterLow || peak > R * kJitterHigh) o.fail("peak planned rate " + fmt("%.0f", peak));
    if (o.pass) o.detail = "10 windows x 10 seeds within 1 packet of R(1-b/max b); peak " + fmt("%.0f", peak) + " pps";
    return o;
}

Outcome replication() {
    Outcome o;
    TempDir dir;
    BackgroundSpec spec;
    spec.connections = 2000;
    spec.clients = 60;
    const auto frames = make_background(spec);
    write_capture(dir / "bg.pcap", frames);
    write_capture(dir / "tpl.pcap", make_template_frames(8, 5));
    const auto db = compute_statistics(dir / "bg.pcap");

    std::map<std::uint64_t, std::uint64_t> bg_ttl, bg_mss;
    for (const auto& f : frames) {
        const auto v = raw_decode(f.bytes);
        if (!v.ipv4) continue;
        ++bg_ttl[v.ttl];
        if (v.tcp && v.mss) ++bg_mss[*v.mss];
    }
    const Ipv4Address victim = server_host().ip;
    const Ipv4Address attacker(203, 0, 113, 9);  // outside the background, no profile of its own

    auto attacker_values = [&](const GeneratedAttack& g, std::map<std::uint64_t, std::uint64_t>& ttl,
                               std::map<std::uint64_t, std::uint64_t>& mss) {
        for (const auto& tp : g.packets) {
            const auto v = raw_decode(serialize_packet(tp.packet, false));
            if (v.src != attacker.value) continue;
            ++ttl[v.ttl];
            if (v.mss) ++mss[*v.mss];
        }
    };
    auto support = [&](const std::string& what, const std::map<std::uint64_t, std::uint64_t>& seen,
                       const std::map<std::uint64_t, std::uint64_t>& bgd) {
        for (const auto& [v, c] : seen) {
            if (!bgd.contains(v)) o.fail(what + " value " + std::to_string(v) + " not in the background");
        }
    };
    auto binomial = [&](const std::string& what, const std::map<std::uint64_t, std::uint64_t>& seen,
                        const std::map<std::uint64_t, std::uint64_t>& bgd) {
        std::uint64_t n = 0, total = 0;
        for (const auto& [v, c] : seen) n += c;
        for (const auto& [v, c] : bgd) total += c;
        for (const auto& [v, c] : bgd) {
            const double p = static_cast<double>(c) / static_cast<double>(total);
            const double mean = static_cast<double>(n) * p;
            const double sigma = std::sqrt(static_cast<double>(n) * p * (1 - p));
            const double got = seen.contains(v) ? static_cast<double>(seen.at(v)) : 0.0;
            if (std::fabs(got - mean) > 4 * sigma) {
                o.fail(what + " " + std::to_string(v) + ": " + fmt("%.0f", got) + " vs " + fmt("%.1f", mean) + " +- 4x" +
                       fmt("%.1f", sigma));
            }
        }
        return n;
    };

    const std::string atk = attacker.to_string(), vic = victim.to_string();
    // port scan: 10^4 probes, each drawing TTL and MSS
    std::map<std::uint64_t, std::uint64_t> ttl, mss;
    const auto scan = generate_attack("portscan", {{"attacker.ip", atk}, {"victim.ip", vic}, {"ports", "1-10000"}}, db, 808);
    for (const auto& tp : scan.packets) {
        const auto v = raw_decode(serialize_packet(tp.packet, false));
        if (v.src != attacker.value || v.flags != 0x02) continue;
        ++ttl[v.ttl];
        if (v.mss) ++mss[*v.mss];
    }
    support("portscan TTL", ttl, bg_ttl);
    support("portscan MSS", mss, bg_mss);
    const auto n_ttl = binomial("portscan TTL", ttl, bg_ttl);
    const auto n_mss = binomial("portscan MSS", mss, bg_mss);
    if (n_ttl != 10000 || n_mss != 10000) o.fail("expected 10^4 draws, got " + std::to_string(n_ttl) + "/" + std::to_string(n_mss));

    // SMB scan and template exploits: support only
    std::string victims;
    for (std::uint32_t i = 1; i <= 60; ++i) victims += (victims.empty() ? "" : ",") + make_host(i).ip.to_string();
    std::map<std::uint64_t, std::uint64_t> sttl, smss;
    attacker_values(generate_attack("smb_scan", {{"attacker.ip", atk}, {"victim.ip", vic + "," + victims}}, db, 809), sttl, smss);
    for (const char* name : {"eternalblue", "ms17_scan", "sality", "sql_injection", "joomla_privesc", "template"}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            attacker_values(generate_attack(name, {{"attacker.ip", atk}, {"victim.ip", vic}, {"template", (dir / "tpl.pcap").string()}},
                                            db, 810 + seed),
                            sttl, smss);
        }
    }
    support("smb/template TTL", sttl, bg_ttl);
    support("smb/template MSS", smss, bg_mss);
    if (sttl.empty() || smss.empty()) o.fail("no attacker packets from smb_scan/templates");
    if (o.pass) {
        std::uint64_t other = 0;
        for (const auto& [v, c] : sttl) other += c;
        o.detail = "portscan 10^4 TTL/MSS draws within 4 sigma; " + std::to_string(other) +
                   " smb/template attacker packets all in background support";
    }
    return o;
}

// "2021-03-04T05:06:07.000008Z" back to microseconds, via timegm
TimeUs parse_iso(const std::string& s) {
    std::tm tm{};
    unsigned frac = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d.%6uZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                    &tm.tm_sec, &frac) != 7) {
        return -1;
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<TimeUs>(timegm(&tm)) * 1'000'000 + frac;
}

Outcome merge_and_labels() {
    Outcome o;
    Scenario s;
    auto cfg = s.config("out.pcap", "cache", 99);
    std::ostringstream manifest;
    run_inject(cfg, manifest);

    const auto bg = read_pcap(s.bg);
    const auto out = read_pcap(cfg.output_path);

    // regenerate each attack independently of the pipeline
    const auto db = compute_statistics(s.bg, cfg.windows);
    std::vector<GeneratedAttack> attacks;
    std::size_t injected = 0;
    for (std::size_t i = 0; i < cfg.attack_specs.size(); ++i) {
        attacks.push_back(generate_attack(cfg.attack_specs[i].name, cfg.attack_specs[i].params, db, split_seed(cfg.seed, i)));
        injected += attacks.back().packets.size();
    }
    if (out.packets.size() != bg.packets.size() + injected) {
        o.fail("|merged| " + std::to_string(out.packets.size()) + " != " + std::to_string(bg.packets.size()) + " + " +
               std::to_string(injected));
    }
    for (std::size_t i = 1; i < out.packets.size(); ++i) {
        if (out.packets[i].time_us(out.meta.magic_variant) < out.packets[i - 1].time_us(out.meta.magic_variant)) {
            o.fail("timestamps decrease at record " + std::to_string(i));
            break;
        }
    }

    // multiset of (time, bytes): output == background + every injected packet
    std::multiset<std::pair<TimeUs, Bytes>> want, got;
    for (const auto& r : bg.packets) want.emplace(r.time_us(bg.meta.magic_variant), r.data);
    for (const auto& g : attacks) {
        for (const auto& tp : g.packets) want.emplace(tp.time, serialize_packet(tp.packet, false));
    }
    for (const auto& r : out.packets) got.emplace(r.time_us(out.meta.magic_variant), r.data);
    if (want != got) o.fail("merged multiset differs from background + injected");

    // labels
    const std::string xml = read_text(labels_path_for(cfg.output_path));
    const std::regex entry(
        "<attack>\\s*<name>([^<]*)</name>\\s*<start>([^<]*)</start>\\s*<end>([^<]*)</end>\\s*"
        "<packet_count>(\\d+)</packet_count>\\s*<params_digest>([0-9a-f]{56})</params_digest>\\s*</attack>");
    std::size_t idx = 0;
    for (auto it = std::sregex_iterator(xml.begin(), xml.end(), entry); it != std::sregex_iterator(); ++it, ++idx) {
        if (idx >= attacks.size()) break;
        const auto& g = attacks[idx];
        const auto& m = *it;
        TimeUs lo = g.packets.front().time, hi = lo;
        for (const auto& tp : g.packets) {
            lo = std::min(lo, tp.time);
            hi = std::max(hi, tp.time);
        }
        const TimeUs start = parse_iso(m[2]), end = parse_iso(m[3]);
        const std::string tag = "label " + std::to_string(idx) + " (" + m[1].str() + ")";
        if (m[1] != cfg.attack_specs[idx].name) o.fail(tag + " name");
        if (start != lo || end != hi) o.fail(tag + " extremes");
        if (std::stoull(m[4]) != g.packets.size()) o.fail(tag + " packet_count");
        if (m[5] != g.params_echo.digest()) o.fail(tag + " digest");
        for (const auto& tp : g.packets) {
            if (tp.time < start || tp.time > end) {
                o.fail(tag + " packet outside [start, end]");
                break;
            }
        }
    }
    if (idx != attacks.size()) o.fail(std::to_string(idx) + " label entries for " + std::to_string(attacks.size()) + " attacks");
    if (o.pass) {
        o.detail = std::to_string(bg.packets.size()) + " background + " + std::to_string(injected) +
                   " injected; order, multiset and 8 labels exact";
    }
    return o;
}

Outcome performance() {
    Outcome o;
    TempDir dir;
    const auto path = dir / "big.pcap";
    {
        Rng rng(1010);
        FrameMix mix;
        mix.hosts = 5000;
        mix.max_payload = 120;
        PcapWriter w(path);
        TimeUs t = 1'650'000'000'000'000;
        for (int i = 0; i < 1'000'000; ++i) {
            t += static_cast<TimeUs>(rng.uniform(2000));
            w.write(PacketRecord::from_bytes(t, random_frame(rng, mix)));
        }
        w.close();
    }
    auto t0 = Clock::now();
    const auto db = compute_statistics(path);
    const double stats_secs = seconds_since(t0);
    const double rss_stats = peak_rss_mib();
    if (db.file.packet_count != 1'000'000) o.fail("stats saw " + std::to_string(db.file.packet_count) + " packets");
    if (stats_secs >= 60) o.fail("compute_statistics took " + fmt("%.1f", stats_secs) + " s");

    t0 = Clock::now();
    std::size_t frames_n = 0;
    {
        auto g = generate_attack("syn_flood", {{"packets", "1000000"}, {"port", "80"}}, db, 1011);
        std::vector<AttackFrame> frames;
        append_frames(g, 0, frames);
        sort_frames(frames);
        frames_n = frames.size();
    }
    const double flood_secs = seconds_since(t0);
    const double rss = peak_rss_mib();
    if (frames_n < 1'000'000) o.fail("flood produced " + std::to_string(frames_n) + " frames");
    if (flood_secs >= 120) o.fail("syn flood took " + fmt("%.1f", flood_secs) + " s");
    if (rss >= 1024) o.fail("peak RSS " + fmt("%.0f", rss) + " MiB");
    if (o.pass) {
        o.detail = "stats 10^6 pkts " + fmt("%.1f", stats_secs) + " s (peak " + fmt("%.0f", rss_stats) +
                   " MiB); syn_flood 10^6 SYNs -> " + std::to_string(frames_n) + " frames " + fmt("%.1f", flood_secs) +
                   " s; peak RSS " + fmt("%.0f", rss) + " MiB";
    }
    return o;
}

Outcome template_rewriting() {
    Outcome o;
    TempDir dir;
    write_capture(dir / "bg.pcap", make_background({}));
    const auto db = compute_statistics(dir / "bg.pcap");
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto frames = make_template_frames(100 + seed, 2 + seed % 4);
        write_capture(dir / "t.pcap", frames);
        const auto tpl = load_template(dir / "t.pcap");
        const auto params = validate_and_default({{"template", (dir / "t.pcap").string()}}, db,
                                                 find_attack("template").schema, 900 + seed);
        const auto plan = complementary_rate_plan(db.interval_tables.at("packet_rate"), 1000, params.start_time,
                                                  frames.size(), seed);
        const auto out = rewrite_template(tpl, params, plan, db);
        if (out.size() != frames.size()) {
            o.fail("seed " + std::to_string(seed) + ": packet count changed");
            continue;
        }

        std::set<std::uint32_t> old_ips;
        std::set<Bytes> old_macs;
        for (const auto& f : frames) {
            old_ips.insert(get32(f.bytes, 26));
            old_ips.insert(get32(f.bytes, 30));
            old_macs.emplace(f.bytes.begin(), f.bytes.begin() + 6);
            old_macs.emplace(f.bytes.begin() + 6, f.bytes.begin() + 12);
        }

        // per flow and direction: first seq seen, to measure relative offsets
        std::map<std::tuple<std::uint16_t, std::uint16_t, bool>, std::uint32_t> isn_old, isn_new;
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const auto a = raw_decode(frames[i].bytes);
            const auto bytes = serialize_packet(out[i].packet, false);
            const auto b = raw_decode(bytes);
            ++checked;
            if (out[i].time != plan.timestamps[i]) o.fail("packet " + std::to_string(i) + " off its planned time");
            if (i > 0 && out[i].time < out[i - 1].time) o.fail("order broken at " + std::to_string(i));
            const Bytes pa(frames[i].bytes.end() - static_cast<std::ptrdiff_t>(a.payload_len), frames[i].bytes.end());
            const Bytes pb(bytes.end() - static_cast<std::ptrdiff_t>(b.payload_len), bytes.end());
            if (pa != pb) o.fail("payload changed at packet " + std::to_string(i));
            if (old_ips.contains(b.src) || old_ips.contains(b.dst)) o.fail("template IP survived at " + std::to_string(i));
            if (old_macs.contains(Bytes(bytes.begin(), bytes.begin() + 6)) ||
                old_macs.contains(Bytes(bytes.begin() + 6, bytes.begin() + 12))) {
                o.fail("template MAC survived at " + std::to_string(i));
            }
            if (a.udp != b.udp || a.tcp != b.tcp) o.fail("protocol changed at " + std::to_string(i));
            if (!a.tcp) continue;
            if (a.sport != b.sport || a.dport != b.dport || a.flags != b.flags) o.fail("ports/flags changed at " + std::to_string(i));
            const bool fwd = a.src == tpl.attacker_ip.value;
            const auto key_fwd = std::make_tuple(std::min(a.sport, a.dport), std::max(a.sport, a.dport), fwd);
            const auto key_rev = std::make_tuple(std::min(a.sport, a.dport), std::max(a.sport, a.dport), !fwd);
            isn_old.try_emplace(key_fwd, a.seq);
            isn_new.try_emplace(key_fwd, b.seq);
            if (a.seq - isn_old[key_fwd] != b.seq - isn_new[key_fwd]) o.fail("seq offset changed at " + std::to_string(i));
            if ((a.flags & 0x10) && isn_old.contains(key_rev)) {
                if (a.ack - isn_old[key_rev] != b.ack - isn_new[key_rev]) o.fail("ack offset changed at " + std::to_string(i));
            }
            if (!b.tcp_checksum_ok) o.fail("bad checksum after rewrite at " + std::to_string(i));
        }
    }
    if (o.pass) o.detail = "8 templates, " + std::to_string(checked) + " packets: payload, offsets, order kept; no template addresses";
    return o;
}

Outcome tided_defects() {
    Outcome o;
    auto has = [](const tided::TidedReport& r, const std::string& needle) {
        return std::any_of(r.warnings.begin(), r.warnings.end(),
                           [&](const std::string& w) { return w.find(needle) != std::string::npos; });
    };
    TempDir dir;
    Rng rng(1212);

    // too clean: 10^4 TCP packets, every checksum right
    {
        FrameMix mix;
        mix.p_bad_checksum = 0;
        mix.p_truncate = 0;
        mix.p_odd = 0;
        mix.p_port_zero = 0;
        std::vector<TimedFrame> frames;
        TimeUs t = 1'600'000'000'000'000;
        while (frames.size() < 10000) {
            auto f = random_frame(rng, mix);
            if (raw_decode(f).tcp) frames.push_back({t += 1000, std::move(f)});
        }
        write_capture(dir / "clean.pcap", frames);
        const auto r = tided::build_report(dir / "clean.pcap", compute_statistics(dir / "clean.pcap"));
        if (!has(r, "unrealistic cleanness")) o.fail("no cleanness warning on a spotless capture");
        if (has(r, "port zero")) o.fail("port-zero warning without port-0 traffic");

        // control: a single bad checksum silences it
        auto dirty = frames;
        dirty[5000].bytes[14 + 20 + 16] ^= 0x5A;
        write_capture(dir / "dirty.pcap", dirty);
        const auto rd = tided::build_report(dir / "dirty.pcap", compute_statistics(dir / "dirty.pcap"));
        if (has(rd, "unrealistic cleanness")) o.fail("cleanness warning despite a bad checksum");
    }

    // port 0
    {
        FrameMix mix;
        mix.p_port_zero = 0.02;
        const auto frames = random_capture(rng, 2000, mix);
        write_capture(dir / "zero.pcap", frames);
        const auto r = tided::build_report(dir / "zero.pcap", compute_statistics(dir / "zero.pcap"));
        if (!has(r, "port zero")) o.fail("no port-zero warning");
    }

    // frozen features: windows 0..k-1 each bring 2 new values, later windows
    // replay the whole set once, so the prefix distribution stays uniform
    {
        const std::size_t n = 100, k = 40, per = 2;
        const TimeUs t0 = 1'600'000'000'000'000;
        std::vector<TimedFrame> frames;
        auto frame_for = [&](std::uint32_t v) {
            RawIp ip;
            ip.src = make_host(1000 + v);
            ip.dst = make_host(2000 + v);
            ip.ttl = static_cast<std::uint8_t>(1 + v);
            ip.tos = static_cast<std::uint8_t>(v);
            RawTcp t;
            t.sport = 40000;
            t.dport = 80;
            t.window = static_cast<std::uint16_t>(1000 + v);
            t.mss = static_cast<std::uint16_t>(500 + v);
            return tcp_frame(ip, t, {});
        };
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<std::uint32_t> values;
            if (w < k) {
                for (std::size_t j = 0; j < per; ++j) values.push_back(static_cast<std::uint32_t>(w * per + j));
            } else {
                for (std::uint32_t v = 0; v < k * per; ++v) values.push_back(v);
            }
            for (std::size_t j = 0; j < values.size(); ++j) {
                frames.push_back({t0 + static_cast<TimeUs>(w) * 1'000'000 + static_cast<TimeUs>(j) * 1000, frame_for(values[j])});
            }
        }
        write_capture(dir / "frozen.pcap", frames);
        const auto db = compute_statistics(dir / "frozen.pcap", WindowSpec::seconds(1.0));
        const auto r = tided::build_report(dir / "frozen.pcap", db);
        if (r.diversity.size() != kDiversityFields.size()) o.fail("missing diversity results");
        for (const auto& d : r.diversity) {
            const auto& nv = d.novelty_series.values;
            const auto& cu = d.cumulative_entropy_series.values;
            if (nv.size() != n) {
                o.fail(d.feature_name + " has " + std::to_string(nv.size()) + " windows");
                continue;
            }
            for (std::size_t w = 0; w < k; ++w) {
                if (nv[w] != static_cast<double>(per)) o.fail(d.feature_name + " novelty before freeze");
            }
            for (std::size_t w = k; w < n; ++w) {
                if (nv[w] != 0.0) o.fail(d.feature_name + " novelty tail nonzero at " + std::to_string(w));
                if (std::fabs(cu[w] - cu[k - 1]) > 1e-9) o.fail(d.feature_name + " cumulative not flat at " + std::to_string(w));
            }
            if (!(cu[k - 1] > cu[k / 2])) o.fail(d.feature_name + " cumulative does not rise before the freeze");
            if (std::fabs(cu[k - 1] - std::log2(static_cast<double>(k * per))) > 1e-9) o.fail(d.feature_name + " plateau level");
        }
    }
    if (o.pass) o.detail = "cleanness and port-zero warnings fire (control quiet); novelty tail 0 and cumulative plateau from window 40";
    return o;
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"entropy correctness", entropy_correctness},
        {"metric oracle equivalence", metric_oracle_equivalence},
        {"checksum oracle", checksum_oracle},
        {"round-trip", round_trip},
        {"reproducibility", reproducibility},
        {"port scan contract", portscan_contract},
        {"complementary rate", complementary_rate},
        {"replication / artifact avoidance", replication},
        {"merge and labels", merge_and_labels},
        {"desk-scale performance", performance},
        {"template rewriting", template_rewriting},
        {"TIDED defect surfacing", tided_defects},
    };
    int failed = 0;
    int id = 0;
    for (const auto& [name, fn] : criteria) {
        ++id;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s  %2d  %-34s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", id - failed, id);
    return failed == 0 ? 0 : 1;
}
