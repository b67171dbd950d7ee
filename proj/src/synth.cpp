#include "logembed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <json.hpp>

#include "logembed/pattern.hpp"

namespace logembed {

namespace {

using nlohmann::json;

constexpr uint64_t kLogStream = 0xa10c0000;

const std::vector<std::string>& event_name_pool() {
    static const std::vector<std::string> names = {
        "CreateFile",       "ReadFile",        "WriteFile",        "DeleteFile",
        "MoveFile",         "CopyFile",        "SetFileAttributes","CreateProcess",
        "OpenProcess",      "TerminateProcess","CreateThread",     "CreateRemoteThread",
        "AllocateMemory",   "ProtectMemory",   "LoadLibrary",      "GetProcAddress",
        "OpenRegistryKey",  "SetRegistryValue","QueryRegistryValue","DeleteRegistryValue",
        "ConnectTcp",       "SendTcp",         "RecvTcp",          "DnsQuery",
        "HttpGet",          "HttpPost",        "CreateMutex",      "OpenMutex",
        "Sleep",            "GetSystemTime",   "EnumProcesses",    "CreateService",
    };
    return names;
}

std::string random_hex(Rng& rng, size_t n) {
    static const char digits[] = "0123456789abcdef";
    std::string out(n, '0');
    for (auto& ch : out) ch = digits[rng.below(16)];
    return out;
}

struct ArgGrammars {
    const std::vector<std::string> folders = {
        "Windows",          "Windows\\System32", "Windows\\Temp",
        "Users\\admin",     "Users\\admin\\Documents",
        "Program Files\\Common Files", "ProgramData", "Temp",
    };
    const std::vector<std::string> file_names = {
        "svchost", "update", "readme", "config", "setup",
        "report",  "cache",  "index",  "data",   "notes",
    };
    const std::vector<std::string> extensions = {
        "dll", "exe", "ini", "txt", "log", "tmp", "dat", "sys", "jpg", "png", "htm", "js",
    };
    const std::vector<std::string> hosts = {
        "updates", "cdn", "mail", "search", "static", "api", "files", "img",
    };
    const std::vector<std::string> tlds = {"com", "net", "org", "io"};
    const std::vector<std::string> reg_roots = {
        "Microsoft\\Windows\\CurrentVersion", "Classes", "Policies\\Explorer",
    };
    const std::vector<std::string> reg_keys = {"Run", "Settings", "Shell", "Services"};

    std::string path(Rng& rng) const {
        std::string name =
            rng.bernoulli(0.35) ? random_hex(rng, 6) : rng.pick(file_names);
        return "C:\\" + rng.pick(folders) + "\\" + name + "." + rng.pick(extensions);
    }

    std::string url(Rng& rng) const {
        std::string out = rng.bernoulli(0.4) ? "https://" : "http://";
        if (rng.bernoulli(0.5)) out += "www.";
        out += rng.pick(hosts) + "." + rng.pick(tlds) + "/" + rng.pick(file_names);
        if (rng.bernoulli(0.4))
            out += "?id=" + std::to_string(rng.below(100000));
        else
            out += rng.bernoulli(0.5) ? ".php" : ".html";
        return out;
    }

    std::string registry(Rng& rng) const {
        return "HKLM\\Software\\" + rng.pick(reg_roots) + "\\" + rng.pick(reg_keys) + "\\" +
               std::to_string(rng.below(32));
    }

    std::string numeric(Rng& rng) const {
        switch (rng.below(3)) {
            case 0: return "0x" + random_hex(rng, 8);
            case 1: return std::to_string(1024 + rng.below(64512)); // port-like
            // decimal constants clustered on multiples of 4, like allocation sizes
            default: return std::to_string(3904 + 4 * rng.below(64));
        }
    }

    std::string fresh(Rng& rng) const {
        const double u = rng.next_double();
        if (u < 0.45) return path(rng);
        if (u < 0.65) return url(rng);
        if (u < 0.80) return registry(rng);
        return numeric(rng);
    }
};

struct Generator {
    const GeneratorSpec& spec;
    ArgGrammars grammars;
    std::vector<std::string> event_types;
    std::vector<double> zipf_cumulative;

    explicit Generator(const GeneratorSpec& s) : spec(s) {
        const auto& pool = event_name_pool();
        for (uint32_t i = 0; i < spec.event_alphabet; ++i) {
            if (i < pool.size())
                event_types.push_back(pool[i]);
            else
                event_types.push_back("SysCall" + std::to_string(i + 1));
        }
        double total = 0;
        zipf_cumulative.reserve(event_types.size());
        for (size_t r = 0; r < event_types.size(); ++r) {
            total += 1.0 / (static_cast<double>(r) + 1.5);
            zipf_cumulative.push_back(total);
        }
    }

    const std::string& sample_event_type(Rng& rng) const {
        const double u = rng.next_double() * zipf_cumulative.back();
        const auto it =
            std::lower_bound(zipf_cumulative.begin(), zipf_cumulative.end(), u);
        const size_t idx = std::min<size_t>(it - zipf_cumulative.begin(),
                                            event_types.size() - 1);
        return event_types[idx];
    }

    Log make_log(uint64_t index) const {
        const bool malicious = index < spec.malicious_count;
        Log log;
        log.label = malicious ? Label::Malicious : Label::Benign;
        log.id = (spec.id_prefix.empty() ? std::string() : spec.id_prefix + "-") +
                 (malicious ? "mal-" : "ben-") + std::to_string(index);

        Rng rng(Rng::derive(spec.seed, kLogStream + index));
        const uint32_t span = spec.max_events - spec.min_events + 1;
        const auto n_events = spec.min_events + static_cast<uint32_t>(rng.below(span));

        std::vector<std::string> pool;
        pool.reserve(64);
        for (uint32_t e = 0; e < n_events; ++e) {
            SystemEvent ev;
            ev.event_type = sample_event_type(rng);
            const uint32_t n_args = rng.bernoulli(0.15) ? 2 : 1;
            for (uint32_t a = 0; a < n_args; ++a) {
                if (!pool.empty() && rng.bernoulli(spec.reuse_probability)) {
                    ev.args.push_back(rng.pick(pool));
                } else {
                    std::string arg = grammars.fresh(rng);
                    if (pool.size() < 64) pool.push_back(arg);
                    ev.args.push_back(std::move(arg));
                }
            }
            log.events.push_back(std::move(ev));
        }

        for (const auto& motif : spec.motifs) {
            const double p = malicious ? motif.p_malicious : motif.p_benign;
            if (!rng.bernoulli(p)) continue;
            std::string arg = motif.arg_template;
            const std::string fill = random_hex(rng, 8);
            for (size_t at = arg.find("{R}"); at != std::string::npos; at = arg.find("{R}"))
                arg.replace(at, 3, fill);
            for (const auto& ev_type : motif.event_types)
                log.events.push_back(SystemEvent{ev_type, {arg}});
        }
        return log;
    }
};

}  // namespace

std::vector<MotifSpec> GeneratorSpec::default_motifs() {
    return {
        {"dropper_registry",
         {"WriteFile", "SetRegistryValue"},
         "C:\\Users\\admin\\AppData\\Roaming\\{R}\\payload.exe",
         "payload",
         0.6,
         0.02},
        {"temp_loader",
         {"CreateProcess", "DeleteFile"},
         "C:\\Windows\\Temp\\{R}\\loader.exe",
         "loader",
         0.6,
         0.02},
        {"c2_beacon",
         {"ConnectTcp", "DnsQuery"},
         "http://{R}.darkzone.biz/gate.php",
         "darkzone",
         0.6,
         0.02},
        {"remote_inject",
         {"OpenProcess", "AllocateMemory", "CreateRemoteThread"},
         "proc://{R}/inject.bin",
         "inject",
         0.6,
         0.02},
        {"driver_drop",
         {"MoveFile", "SetFileAttributes"},
         "C:\\Windows\\System32\\drivers\\{R}\\rootkit.sys",
         "rootkit",
         0.6,
         0.02},
    };
}

void GeneratorSpec::validate() const {
    if (event_alphabet < 1)
        throw Error(ErrorClass::InvalidConfig, "InvalidSpec: event_alphabet must be >= 1");
    if (max_events < min_events)
        throw Error(ErrorClass::InvalidConfig, "InvalidSpec: max_events < min_events");
    if (!(reuse_probability >= 0 && reuse_probability <= 1))
        throw Error(ErrorClass::InvalidConfig, "InvalidSpec: reuse_probability outside [0,1]");
    if (shard_size < 1)
        throw Error(ErrorClass::InvalidConfig, "InvalidSpec: shard_size must be >= 1");
    for (const auto& motif : motifs) {
        if (motif.event_types.empty())
            throw Error(ErrorClass::InvalidConfig, "InvalidSpec: motif without event types");
        if (motif.arg_template.empty())
            throw Error(ErrorClass::InvalidConfig, "InvalidSpec: motif without arg template");
        if (!(motif.p_malicious >= 0 && motif.p_malicious <= 1) ||
            !(motif.p_benign >= 0 && motif.p_benign <= 1))
            throw Error(ErrorClass::InvalidConfig,
                        "InvalidSpec: motif probability outside [0,1]");
    }
}

std::string GeneratorSpec::to_json() const {
    json j;
    j["seed"] = seed;
    j["malicious"] = malicious_count;
    j["benign"] = benign_count;
    j["event_alphabet"] = event_alphabet;
    j["min_events"] = min_events;
    j["max_events"] = max_events;
    j["reuse_probability"] = reuse_probability;
    j["id_prefix"] = id_prefix;
    j["shard_size"] = shard_size;
    j["motifs"] = json::array();
    for (const auto& motif : motifs) {
        json m;
        m["name"] = motif.name;
        m["events"] = motif.event_types;
        m["arg_template"] = motif.arg_template;
        m["marker"] = motif.marker_token;
        m["p_malicious"] = motif.p_malicious;
        m["p_benign"] = motif.p_benign;
        j["motifs"].push_back(std::move(m));
    }
    return j.dump(2) + "\n";
}

GeneratorSpec GeneratorSpec::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorClass::InvalidConfig, "InvalidSpec: generator config is not JSON");
    GeneratorSpec spec;
    try {
        spec.seed = j.value("seed", spec.seed);
        spec.malicious_count = j.value("malicious", spec.malicious_count);
        spec.benign_count = j.value("benign", spec.benign_count);
        spec.event_alphabet = j.value("event_alphabet", spec.event_alphabet);
        spec.min_events = j.value("min_events", spec.min_events);
        spec.max_events = j.value("max_events", spec.max_events);
        spec.reuse_probability = j.value("reuse_probability", spec.reuse_probability);
        spec.id_prefix = j.value("id_prefix", spec.id_prefix);
        spec.shard_size = j.value("shard_size", spec.shard_size);
        if (j.contains("motifs")) {
            spec.motifs.clear();
            for (const auto& m : j.at("motifs")) {
                MotifSpec motif;
                motif.name = m.value("name", std::string("motif"));
                motif.event_types = m.at("events").get<std::vector<std::string>>();
                motif.arg_template = m.at("arg_template").get<std::string>();
                motif.marker_token = m.value("marker", std::string());
                motif.p_malicious = m.value("p_malicious", 0.0);
                motif.p_benign = m.value("p_benign", 0.0);
                spec.motifs.push_back(std::move(motif));
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorClass::InvalidConfig,
                    std::string("InvalidSpec: bad generator config: ") + e.what());
    }
    spec.validate();
    return spec;
}

GeneratorSpec GeneratorSpec::from_json_file(const std::string& path) {
    require_artifact(path, "generator config");
    return from_json(read_text_file(path));
}

std::vector<Log> generate_logs(const GeneratorSpec& spec) {
    spec.validate();
    Generator gen(spec);
    const uint64_t total = spec.malicious_count + spec.benign_count;
    std::vector<Log> logs;
    logs.reserve(total);
    for (uint64_t i = 0; i < total; ++i) logs.push_back(gen.make_log(i));
    return logs;
}

void generate_corpus_file(const GeneratorSpec& spec, const std::string& out_path,
                          uint32_t workers) {
    spec.validate();
    Generator gen(spec);
    const uint64_t total = spec.malicious_count + spec.benign_count;
    const uint64_t n_shards = (total + spec.shard_size - 1) / spec.shard_size;
    std::vector<std::string> shards(n_shards);

    auto run_shard = [&](uint64_t shard) {
        const uint64_t lo = shard * spec.shard_size;
        const uint64_t hi = std::min(total, lo + spec.shard_size);
        std::string& buf = shards[shard];
        for (uint64_t i = lo; i < hi; ++i) {
            buf += serialize_log(gen.make_log(i));
            buf += '\n';
        }
    };

    workers = std::max<uint32_t>(1, workers);
    if (workers == 1 || n_shards <= 1) {
        for (uint64_t s = 0; s < n_shards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> threads;
        for (uint32_t w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                for (uint64_t s = w; s < n_shards; s += workers) run_shard(s);
            });
        for (auto& t : threads) t.join();
    }

    std::string out;
    for (const auto& shard : shards) out += shard;
    write_text_file(out_path, out);
}

bool motif_present(const Log& log, const MotifSpec& motif, const TokenizerConfig& tok) {
    std::vector<std::string> target(motif.event_types.begin(), motif.event_types.end());
    std::sort(target.begin(), target.end());
    Tokenizer tokenizer(tok);
    for (const auto& pattern : extract_patterns(build_graph(log))) {
        if (pattern.event_types != target) continue;
        if (motif.marker_token.empty()) return true;
        for (const auto& arg : pattern.arguments) {
            for (const auto& token : tokenizer.tokenize(arg))
                if (token == motif.marker_token) return true;
        }
    }
    return false;
}

}  // namespace logembed
