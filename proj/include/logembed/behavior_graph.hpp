#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "logembed/log.hpp"

namespace logembed {

// Bipartite co-occurrence graph over event types and arguments. Edges are a
// set: repeated co-occurrences collapse, and event order is discarded.
class BehaviorGraph {
public:
    void add_edge(const std::string& event_type, const std::string& argument);

    // arg -> set of adjacent event types; ordered for deterministic iteration
    const std::map<std::string, std::set<std::string>>& arg_adjacency() const {
        return adjacency_;
    }

    std::set<std::string> event_nodes() const;
    std::vector<std::string> arg_nodes() const;
    size_t edge_count() const;
    bool has_edge(const std::string& event_type, const std::string& argument) const;
    bool empty() const { return adjacency_.empty(); }

    // `event<TAB>argument` per line, sorted; for golden tests
    std::string export_edges() const;

    bool operator==(const BehaviorGraph& other) const { return adjacency_ == other.adjacency_; }

private:
    std::map<std::string, std::set<std::string>> adjacency_;
};

BehaviorGraph build_graph(const Log& log);

}  // namespace logembed
