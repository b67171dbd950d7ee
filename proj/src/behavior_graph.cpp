#include "logembed/behavior_graph.hpp"

#include <algorithm>

namespace logembed {

void BehaviorGraph::add_edge(const std::string& event_type, const std::string& argument) {
    adjacency_[argument].insert(event_type);
}

std::set<std::string> BehaviorGraph::event_nodes() const {
    std::set<std::string> events;
    for (const auto& [arg, adj] : adjacency_) events.insert(adj.begin(), adj.end());
    return events;
}

std::vector<std::string> BehaviorGraph::arg_nodes() const {
    std::vector<std::string> args;
    args.reserve(adjacency_.size());
    for (const auto& [arg, adj] : adjacency_) args.push_back(arg);
    return args;
}

size_t BehaviorGraph::edge_count() const {
    size_t n = 0;
    for (const auto& [arg, adj] : adjacency_) n += adj.size();
    return n;
}

bool BehaviorGraph::has_edge(const std::string& event_type, const std::string& argument) const {
    auto it = adjacency_.find(argument);
    return it != adjacency_.end() && it->second.count(event_type) > 0;
}

std::string BehaviorGraph::export_edges() const {
    std::vector<std::pair<std::string, std::string>> edges;
    edges.reserve(edge_count());
    for (const auto& [arg, adj] : adjacency_)
        for (const auto& ev : adj) edges.emplace_back(ev, arg);
    std::sort(edges.begin(), edges.end());
    std::string out;
    for (const auto& [ev, arg] : edges) {
        out += ev;
        out += '\t';
        out += arg;
        out += '\n';
    }
    return out;
}

BehaviorGraph build_graph(const Log& log) {
    BehaviorGraph graph;
    for (const auto& ev : log.events)
        for (const auto& arg : ev.args) graph.add_edge(ev.event_type, arg);
    return graph;
}

}  // namespace logembed
