#pragma once

#include <string>
#include <vector>

#include "logembed/behavior_graph.hpp"

namespace logembed {

// A maximal group of event types and arguments where every argument's
// adjacency set equals exactly the group's event-type set. Both lists are
// kept sorted; the argument sets of a graph's patterns partition its
// argument nodes.
struct Pattern {
    std::vector<std::string> event_types; // sorted, non-empty
    std::vector<std::string> arguments;   // sorted, non-empty

    bool operator==(const Pattern&) const = default;
};

// One pattern per distinct argument-adjacency set, ordered by event-type
// tuple (then smallest argument, which never ties in practice).
std::vector<Pattern> extract_patterns(const BehaviorGraph& graph);

// Canonical key for the pattern's event-type set: sorted types joined by
// '|' (reserved; event types are expected not to contain it).
std::string pattern_signature(const Pattern& pattern);

// `eventA,eventB<TAB>arg1,arg2,...` per line, canonically sorted
std::string export_patterns(const std::vector<Pattern>& patterns);

}  // namespace logembed
