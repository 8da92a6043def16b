#include "injectkit/pipeline.hpp"

#include <ostream>
#include <system_error>

#include <json.hpp>

#include "injectkit/attacks.hpp"
#include "injectkit/error.hpp"
#include "injectkit/inject.hpp"
#include "injectkit/tided.hpp"

namespace injectkit {

namespace fs = std::filesystem;

std::filesystem::path labels_path_for(const fs::path& output) { return fs::path(output.string() + ".labels.xml"); }
std::filesystem::path tided_dir_for(const fs::path& output) { return fs::path(output.string() + ".tided"); }

namespace {

/// Temporary paths that are removed unless committed.
class Staging {
public:
    fs::path stage(const fs::path& final_path) {
        fs::path tmp = final_path.string() + ".tmp-injectkit";
        items_.push_back({tmp, final_path});
        return tmp;
    }

    void commit() {
        for (auto& [tmp, dest] : items_) {
            std::error_code ec;
            if (fs::is_directory(dest, ec)) fs::remove_all(dest, ec);
            fs::rename(tmp, dest, ec);
            if (ec) throw Error(Errc::IoError, "cannot move " + tmp.string() + " to " + dest.string() + ": " + ec.message());
        }
        items_.clear();
    }

    ~Staging() {
        for (auto& [tmp, dest] : items_) {
            std::error_code ec;
            fs::remove_all(tmp, ec);
        }
    }

private:
    std::vector<std::pair<fs::path, fs::path>> items_;
};

CacheOptions cache_options(const RunConfig& c) { return CacheOptions{c.cache_dir, !c.no_cache && !c.cache_dir.empty()}; }

bool same_file(const fs::path& a, const fs::path& b) {
    std::error_code ec;
    if (fs::exists(b, ec) && fs::equivalent(a, b, ec)) return true;
    return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

nlohmann::ordered_json params_json(const AttackParams& p) {
    using nlohmann::ordered_json;
    auto endpoints = [](const std::vector<Endpoint>& eps) {
        ordered_json arr = ordered_json::array();
        for (const auto& e : eps) arr.push_back({{"ip", e.ip.to_string()}, {"mac", e.mac.to_string()}});
        return arr;
    };
    ordered_json j;
    j["attack"] = p.attack_name;
    j["seed"] = p.seed;
    j["attackers"] = endpoints(p.attackers);
    j["victims"] = endpoints(p.victims);
    if (p.ports.size() <= 64) {
        j["ports"] = p.ports;
    } else {
        j["port_count"] = p.ports.size();
    }
    j["start_time_us"] = p.start_time;
    j["intensity"] = p.intensity;
    ordered_json extra = ordered_json::object();
    for (const auto& [k, v] : p.extra) extra[k] = v;
    j["extra"] = std::move(extra);
    j["params_digest"] = p.digest();
    return j;
}

} // namespace

void run_inject(const RunConfig& config, std::ostream& manifest) {
    if (config.output_path.empty()) throw Error(Errc::Usage, "an output path is required");
    if (same_file(config.input_path, config.output_path)) {
        throw Error(Errc::Usage, "output path must differ from the input path");
    }
    // unknown attack names fail before any work is done
    for (const auto& spec : config.attack_specs) find_attack(spec.name);

    const StatsDb db = load_or_compute(config.input_path, config.windows, cache_options(config));

    std::vector<AttackFrame> frames;
    std::vector<LabelEntry> labels;
    nlohmann::ordered_json attacks_json = nlohmann::ordered_json::array();
    std::size_t max_frame = 0;
    for (std::size_t i = 0; i < config.attack_specs.size(); ++i) {
        const auto& spec = config.attack_specs[i];
        GeneratedAttack g = generate_attack(spec.name, spec.params, db, split_seed(config.seed, i));
        if (g.packets.empty()) throw Error(Errc::InvalidValue, "attack '" + spec.name + "' produced no packets");
        labels.push_back(g.label);
        attacks_json.push_back(params_json(g.params_echo));
        const std::size_t first = frames.size();
        append_frames(g, i, frames);
        for (std::size_t f = first; f < frames.size(); ++f) max_frame = std::max(max_frame, frames[f].bytes.size());
    }
    sort_frames(frames);

    Staging staging;
    PcapReader background(config.input_path);
    const auto snaplen = std::max<std::uint32_t>(background.meta().snaplen, static_cast<std::uint32_t>(max_frame));
    const fs::path pcap_tmp = staging.stage(config.output_path);
    std::uint64_t written = 0;
    {
        PcapWriter writer(pcap_tmp, snaplen, background.meta().link_type);
        written = merge_into(background, frames, writer);
        writer.close();
    }
    write_labels(labels, staging.stage(labels_path_for(config.output_path)));

    if (config.tided_enabled) {
        const StatsDb out_db = compute_statistics(pcap_tmp, config.windows);
        auto report = tided::build_report(pcap_tmp, out_db);
        report.input_name = config.output_path.filename().string();
        tided::emit_report(report, staging.stage(tided_dir_for(config.output_path)));
    }
    staging.commit();

    nlohmann::ordered_json m;
    m["input"] = config.input_path.string();
    m["output"] = config.output_path.string();
    m["labels"] = labels_path_for(config.output_path).string();
    if (config.tided_enabled) m["tided_report"] = tided_dir_for(config.output_path).string();
    m["seed"] = config.seed;
    m["background_packets"] = db.file.packet_count;
    m["output_packets"] = written;
    m["attacks"] = std::move(attacks_json);
    manifest << m.dump(2) << "\n";
}

void run_analyze(const RunConfig& config) {
    const fs::path out_dir = config.output_path.empty() ? tided_dir_for(config.input_path) : config.output_path;
    const StatsDb db = load_or_compute(config.input_path, config.windows, cache_options(config));
    const auto report = tided::build_report(config.input_path, db);
    Staging staging;
    tided::emit_report(report, staging.stage(out_dir));
    staging.commit();
}

std::string list_attacks_text() {
    std::string out;
    for (const auto& def : attack_registry()) {
        const auto& s = def.schema;
        out += s.attack_name + "  " + s.description + "\n";
        for (const auto& p : s.params) {
            out += "    " + p.key + "  " + std::string(param_type_name(p.type)) + "  " +
                   std::string(default_source_name(p.source));
            if (p.source == DefaultSource::Constant && !p.default_text.empty()) out += " (" + p.default_text + ")";
            out += "  " + p.help + "\n";
        }
        out += "\n";
    }
    return out;
}

} // namespace injectkit
