#include "logembed/log.hpp"

#include <json.hpp>

namespace logembed {

namespace {

using nlohmann::json;

bool has_control_chars(const std::string& s) {
    for (unsigned char c : s)
        if (c < 0x20 || c == 0x7f) return true;
    return false;
}

void append_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

}  // namespace

const char* label_name(Label l) {
    switch (l) {
        case Label::Malicious: return "malicious";
        case Label::Benign: return "benign";
        case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label label_from_name(const std::string& name) {
    if (name == "malicious") return Label::Malicious;
    if (name == "benign") return Label::Benign;
    if (name == "unlabeled" || name == "null" || name.empty()) return Label::Unlabeled;
    throw Error(ErrorClass::Parse, "unknown label: " + name);
}

Log parse_log_line(const std::string& line, long line_no) {
    if (!valid_utf8(line))
        throw Error(ErrorClass::Parse, "InvalidUtf8: line is not valid UTF-8", line_no);

    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorClass::Parse, "MalformedLine: not a JSON object", line_no);

    Log log;
    auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string() || id_it->get<std::string>().empty())
        throw Error(ErrorClass::Parse, "MalformedLine: missing or invalid \"id\"", line_no);
    log.id = id_it->get<std::string>();

    auto label_it = j.find("label");
    if (label_it == j.end() || label_it->is_null()) {
        log.label = Label::Unlabeled;
    } else if (label_it->is_string()) {
        const std::string name = label_it->get<std::string>();
        if (name == "malicious")
            log.label = Label::Malicious;
        else if (name == "benign")
            log.label = Label::Benign;
        else
            throw Error(ErrorClass::Parse, "MalformedLine: unknown label \"" + name + "\"",
                        line_no);
    } else {
        throw Error(ErrorClass::Parse, "MalformedLine: \"label\" must be a string or null",
                    line_no);
    }

    auto events_it = j.find("events");
    if (events_it == j.end() || !events_it->is_array())
        throw Error(ErrorClass::Parse, "MalformedLine: missing or invalid \"events\"", line_no);

    log.events.reserve(events_it->size());
    for (const auto& ev : *events_it) {
        if (!ev.is_object())
            throw Error(ErrorClass::Parse, "MalformedLine: event is not an object", line_no);
        auto e_it = ev.find("e");
        if (e_it == ev.end() || !e_it->is_string())
            throw Error(ErrorClass::Parse, "MalformedLine: event missing \"e\"", line_no);
        SystemEvent event;
        event.event_type = e_it->get<std::string>();
        if (event.event_type.empty() || has_control_chars(event.event_type))
            throw Error(ErrorClass::Parse, "EmptyEventType: event type empty or has control chars",
                        line_no);
        auto args_it = ev.find("args");
        if (args_it == ev.end() || !args_it->is_array())
            throw Error(ErrorClass::Parse, "MalformedLine: event missing \"args\"", line_no);
        if (args_it->empty())
            throw Error(ErrorClass::Parse, "NoArguments: event has an empty args list", line_no);
        event.args.reserve(args_it->size());
        for (const auto& a : *args_it) {
            if (!a.is_string() || a.get<std::string>().empty())
                throw Error(ErrorClass::Parse, "NoArguments: argument missing or empty", line_no);
            event.args.push_back(a.get<std::string>());
        }
        log.events.push_back(std::move(event));
    }
    return log;
}

std::string serialize_log(const Log& log) {
    std::string out;
    out.reserve(64 + log.events.size() * 48);
    out += "{\"id\":";
    append_json_string(out, log.id);
    out += ",\"label\":";
    if (log.label == Label::Unlabeled) {
        out += "null";
    } else {
        out += '"';
        out += label_name(log.label);
        out += '"';
    }
    out += ",\"events\":[";
    bool first_event = true;
    for (const auto& ev : log.events) {
        if (!first_event) out += ',';
        first_event = false;
        out += "{\"e\":";
        append_json_string(out, ev.event_type);
        out += ",\"args\":[";
        bool first_arg = true;
        for (const auto& a : ev.args) {
            if (!first_arg) out += ',';
            first_arg = false;
            append_json_string(out, a);
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

CorpusReader::CorpusReader(const std::string& path, ParseOptions options)
    : in_(path, std::ios::binary), path_(path), options_(options) {
    if (!in_) throw Error(ErrorClass::Io, "cannot open corpus: " + path);
}

std::optional<Log> CorpusReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        ++stats_.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            Log log = parse_log_line(line, line_no_);
            if (!seen_ids_.insert(log.id).second) {
                if (!options_.permissive)
                    throw Error(ErrorClass::Parse, "duplicate log id \"" + log.id + "\"",
                                line_no_);
                ++stats_.duplicate_ids;
                continue;
            }
            ++stats_.logs;
            return log;
        } catch (const Error& e) {
            if (!options_.permissive || e.cls() != ErrorClass::Parse) throw;
            const std::string what = e.what();
            if (what.find("InvalidUtf8") != std::string::npos)
                ++stats_.invalid_utf8_lines;
            else if (what.find("EmptyEventType") != std::string::npos)
                ++stats_.empty_event_types;
            else if (what.find("NoArguments") != std::string::npos)
                ++stats_.no_argument_events;
            else if (what.find("duplicate log id") != std::string::npos)
                ++stats_.duplicate_ids;
            else
                ++stats_.malformed_lines;
        }
    }
    if (in_.bad()) throw Error(ErrorClass::Io, "read failure: " + path_);
    return std::nullopt;
}

std::vector<Log> read_corpus(const std::string& path, ParseOptions options,
                             ParseStats* stats_out) {
    CorpusReader reader(path, options);
    std::vector<Log> logs;
    while (auto log = reader.next()) logs.push_back(std::move(*log));
    if (stats_out) *stats_out = reader.stats();
    return logs;
}

void write_corpus(const std::string& path, const std::vector<Log>& logs) {
    std::string out;
    for (const auto& log : logs) {
        out += serialize_log(log);
        out += '\n';
    }
    write_text_file(path, out);
}

EventTypeRegistry::EventTypeRegistry(std::vector<std::string> sorted_types)
    : types_(std::move(sorted_types)) {
    for (uint32_t i = 0; i < types_.size(); ++i) {
        if (i > 0 && !(types_[i - 1] < types_[i]))
            throw Error(ErrorClass::Parse, "registry types must be sorted and distinct");
        index_.emplace(types_[i], i);
    }
}

std::optional<uint32_t> EventTypeRegistry::index_of(const std::string& type) const {
    auto it = index_.find(type);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string EventTypeRegistry::serialize() const {
    std::string out;
    for (const auto& t : types_) {
        out += t;
        out += '\n';
    }
    return out;
}

EventTypeRegistry EventTypeRegistry::parse(const std::string& text) {
    std::vector<std::string> types;
    for (auto& line : split_lines(text))
        if (!line.empty()) types.push_back(std::move(line));
    return EventTypeRegistry(std::move(types));
}

void EventTypeRegistry::save(const std::string& path) const {
    write_text_file(path, serialize());
}

EventTypeRegistry EventTypeRegistry::load(const std::string& path) {
    require_artifact(path, "event-type registry");
    return parse(read_text_file(path));
}

void RegistryBuilder::add(const Log& log) {
    saw_log_ = true;
    for (const auto& ev : log.events) types_.insert(ev.event_type);
}

void RegistryBuilder::merge(const RegistryBuilder& other) {
    saw_log_ = saw_log_ || other.saw_log_;
    types_.insert(other.types_.begin(), other.types_.end());
}

EventTypeRegistry RegistryBuilder::build() const {
    if (!saw_log_) throw Error(ErrorClass::EmptyCorpus, "EmptyCorpus: no logs seen");
    return EventTypeRegistry(std::vector<std::string>(types_.begin(), types_.end()));
}

EventTypeRegistry build_registry(const std::vector<Log>& corpus) {
    RegistryBuilder builder;
    for (const auto& log : corpus) builder.add(log);
    return builder.build();
}

}  // namespace logembed
