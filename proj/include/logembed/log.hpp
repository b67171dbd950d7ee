#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "logembed/common.hpp"

namespace logembed {

enum class Label { Malicious, Benign, Unlabeled };

const char* label_name(Label l);
Label label_from_name(const std::string& name);

struct SystemEvent {
    std::string event_type;        // non-empty, no control characters
    std::vector<std::string> args; // at least one, each non-empty

    bool operator==(const SystemEvent&) const = default;
};

struct Log {
    std::string id;
    Label label = Label::Unlabeled;
    std::vector<SystemEvent> events; // may be empty; order preserved from input

    bool operator==(const Log&) const = default;
};

struct ParseOptions {
    // With permissive set, malformed lines are counted and skipped instead
    // of raising an error.
    bool permissive = false;
};

struct ParseStats {
    size_t lines = 0;
    size_t logs = 0;
    size_t malformed_lines = 0;
    size_t empty_event_types = 0;
    size_t no_argument_events = 0;
    size_t invalid_utf8_lines = 0;
    size_t duplicate_ids = 0;

    size_t warnings() const {
        return malformed_lines + empty_event_types + no_argument_events +
               invalid_utf8_lines + duplicate_ids;
    }
};

// One log per line. line_no is 1-based and only used for error reporting.
Log parse_log_line(const std::string& line, long line_no = -1);

// Canonical one-line JSON form; parse_log_line(serialize_log(log)) == log.
std::string serialize_log(const Log& log);

// Streams a corpus file log by log. Enforces id uniqueness within the file.
class CorpusReader {
public:
    CorpusReader(const std::string& path, ParseOptions options = {});

    std::optional<Log> next();
    const ParseStats& stats() const { return stats_; }

private:
    std::ifstream in_;
    std::string path_;
    ParseOptions options_;
    ParseStats stats_;
    std::unordered_set<std::string> seen_ids_;
    long line_no_ = 0;
};

std::vector<Log> read_corpus(const std::string& path, ParseOptions options = {},
                             ParseStats* stats_out = nullptr);

void write_corpus(const std::string& path, const std::vector<Log>& logs);

// Dense, deterministic index over the M event-type strings.
class EventTypeRegistry {
public:
    EventTypeRegistry() = default;
    explicit EventTypeRegistry(std::vector<std::string> sorted_types);

    size_t size() const { return types_.size(); } // M
    const std::string& type_at(size_t i) const { return types_.at(i); }
    const std::vector<std::string>& types() const { return types_; }
    std::optional<uint32_t> index_of(const std::string& type) const;

    std::string serialize() const; // one event type per line, line number = index
    static EventTypeRegistry parse(const std::string& text);

    void save(const std::string& path) const;
    static EventTypeRegistry load(const std::string& path);

    uint64_t content_hash() const { return fnv1a64(serialize()); }

    bool operator==(const EventTypeRegistry& other) const { return types_ == other.types_; }

private:
    std::vector<std::string> types_;
    std::unordered_map<std::string, uint32_t> index_;
};

// Deterministic mergeable reduction over corpus shards.
class RegistryBuilder {
public:
    void add(const Log& log);
    void merge(const RegistryBuilder& other);
    EventTypeRegistry build() const; // sorted lexicographically, indexed 0..M-1
    bool saw_any_log() const { return saw_log_; }

private:
    std::set<std::string> types_;
    bool saw_log_ = false;
};

EventTypeRegistry build_registry(const std::vector<Log>& corpus);

}  // namespace logembed
