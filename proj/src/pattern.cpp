#include "logembed/pattern.hpp"

#include <map>

namespace logembed {

std::vector<Pattern> extract_patterns(const BehaviorGraph& graph) {
    // Group arguments by their full adjacency set. The map key is the sorted
    // event-type tuple, so patterns come out in canonical order; arguments
    // arrive sorted because arg_adjacency is ordered by argument.
    std::map<std::vector<std::string>, std::vector<std::string>> groups;
    for (const auto& [arg, adj] : graph.arg_adjacency()) {
        std::vector<std::string> key(adj.begin(), adj.end());
        groups[std::move(key)].push_back(arg);
    }

    std::vector<Pattern> patterns;
    patterns.reserve(groups.size());
    for (auto& [events, args] : groups)
        patterns.push_back(Pattern{events, std::move(args)});
    return patterns;
}

std::string pattern_signature(const Pattern& pattern) {
    std::string sig;
    for (size_t i = 0; i < pattern.event_types.size(); ++i) {
        if (i > 0) sig += '|';
        sig += pattern.event_types[i];
    }
    return sig;
}

std::string export_patterns(const std::vector<Pattern>& patterns) {
    std::string out;
    for (const auto& p : patterns) {
        for (size_t i = 0; i < p.event_types.size(); ++i) {
            if (i > 0) out += ',';
            out += p.event_types[i];
        }
        out += '\t';
        for (size_t i = 0; i < p.arguments.size(); ++i) {
            if (i > 0) out += ',';
            out += p.arguments[i];
        }
        out += '\n';
    }
    return out;
}

}  // namespace logembed
