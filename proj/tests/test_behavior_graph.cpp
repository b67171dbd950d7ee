#include <doctest.h>

#include "helpers.hpp"
#include "logembed/behavior_graph.hpp"

using namespace logembed;

namespace {

Log make_log(std::vector<SystemEvent> events) {
    Log log;
    log.id = "t";
    log.events = std::move(events);
    return log;
}

}  // namespace

TEST_CASE("shared argument links both event types") {
    const BehaviorGraph g = build_graph(make_log({{"X", {"p"}}, {"Y", {"p"}}}));
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge("X", "p"));
    CHECK(g.has_edge("Y", "p"));
    CHECK(g.event_nodes() == std::set<std::string>{"X", "Y"});
}

TEST_CASE("repeated co-occurrence collapses to one edge") {
    const BehaviorGraph g = build_graph(make_log({{"X", {"p"}}, {"X", {"p"}}}));
    CHECK(g.edge_count() == 1);
    CHECK(g.has_edge("X", "p"));
}

TEST_CASE("empty log gives empty graph") {
    const BehaviorGraph g = build_graph(make_log({}));
    CHECK(g.empty());
    CHECK(g.edge_count() == 0);
    CHECK(g.export_edges().empty());
}

TEST_CASE("graph is invariant under event-order permutation") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        Log log = testutil::random_log(rng);
        const BehaviorGraph before = build_graph(log);
        rng.shuffle(log.events);
        CHECK(build_graph(log) == before);
    }
}

TEST_CASE("edge count is bounded by total argument occurrences") {
    Rng rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        const Log log = testutil::random_log(rng);
        size_t total_args = 0;
        for (const auto& ev : log.events) total_args += ev.args.size();
        CHECK(build_graph(log).edge_count() <= total_args);
    }
}

TEST_CASE("no isolated nodes: every node sits on an edge") {
    Rng rng(79);
    for (int trial = 0; trial < 50; ++trial) {
        const BehaviorGraph g = build_graph(testutil::random_log(rng));
        for (const auto& [arg, adj] : g.arg_adjacency()) CHECK(!adj.empty());
        for (const auto& ev : g.event_nodes()) {
            bool found = false;
            for (const auto& [arg, adj] : g.arg_adjacency()) found |= adj.count(ev) > 0;
            CHECK(found);
        }
    }
}

TEST_CASE("edge export is sorted event<TAB>argument lines") {
    const BehaviorGraph g =
        build_graph(make_log({{"Y", {"b"}}, {"X", {"b", "a"}}, {"X", {"a"}}}));
    CHECK(g.export_edges() == "X\ta\nX\tb\nY\tb\n");
}
