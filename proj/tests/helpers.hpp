#pragma once

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "logembed/autoencoder.hpp"
#include "logembed/behavior_graph.hpp"
#include "logembed/log.hpp"
#include "logembed/pattern.hpp"

namespace testutil {

using namespace logembed;

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0;; ++attempt) {
            auto candidate =
                base / ("logembed-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter()++) + "-" + std::to_string(attempt));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline std::string random_word(Rng& rng, size_t min_len, size_t max_len,
                               const std::string& alphabet = "abcdefghijklmnopqrstuvwxyz") {
    const size_t len = min_len + rng.below(max_len - min_len + 1);
    std::string out;
    for (size_t i = 0; i < len; ++i) out += alphabet[rng.below(alphabet.size())];
    return out;
}

inline Log random_log(Rng& rng, size_t max_events = 12, size_t type_pool = 5,
                      size_t arg_pool = 8) {
    Log log;
    log.id = "log-" + std::to_string(rng.next_u64());
    const size_t n = rng.below(max_events + 1);
    for (size_t i = 0; i < n; ++i) {
        SystemEvent ev;
        ev.event_type = "E" + std::to_string(rng.below(type_pool));
        const size_t n_args = 1 + rng.below(3);
        for (size_t a = 0; a < n_args; ++a)
            ev.args.push_back("arg" + std::to_string(rng.below(arg_pool)));
        log.events.push_back(std::move(ev));
    }
    return log;
}

// Random bipartite graph with every node on at least one edge.
inline BehaviorGraph random_graph(Rng& rng, size_t max_events = 8, size_t max_args = 12) {
    BehaviorGraph g;
    const size_t n_events = 1 + rng.below(max_events);
    const size_t n_args = 1 + rng.below(max_args);
    for (size_t a = 0; a < n_args; ++a) {
        const std::string arg = "a" + std::to_string(a);
        const size_t degree = 1 + rng.below(n_events);
        for (size_t k = 0; k < degree; ++k)
            g.add_edge("E" + std::to_string(rng.below(n_events)), arg);
    }
    return g;
}

// Independent quadratic-time pattern oracle: scan every argument's
// adjacency from the raw edge list, group by set equality.
inline std::vector<Pattern> oracle_extract_patterns(const BehaviorGraph& g) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [arg, adj] : g.arg_adjacency())
        for (const auto& ev : adj) edges.emplace_back(ev, arg);

    std::set<std::string> args;
    for (const auto& [ev, arg] : edges) args.insert(arg);

    std::vector<std::pair<std::set<std::string>, std::string>> per_arg;
    for (const auto& arg : args) {
        std::set<std::string> adjacency;
        for (const auto& [ev, a] : edges)
            if (a == arg) adjacency.insert(ev);
        per_arg.emplace_back(std::move(adjacency), arg);
    }

    std::vector<Pattern> out;
    std::vector<bool> taken(per_arg.size(), false);
    for (size_t i = 0; i < per_arg.size(); ++i) {
        if (taken[i]) continue;
        Pattern p;
        p.event_types.assign(per_arg[i].first.begin(), per_arg[i].first.end());
        for (size_t j = i; j < per_arg.size(); ++j) {
            if (!taken[j] && per_arg[j].first == per_arg[i].first) {
                p.arguments.push_back(per_arg[j].second);
                taken[j] = true;
            }
        }
        std::sort(p.arguments.begin(), p.arguments.end());
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const Pattern& x, const Pattern& y) {
        if (x.event_types != y.event_types) return x.event_types < y.event_types;
        return x.arguments < y.arguments;
    });
    return out;
}

inline AutoencoderModel random_model(Rng& rng, uint32_t input_dim, uint32_t hidden_dim,
                                     double scale = 0.5) {
    AutoencoderModel m;
    m.input_dim = input_dim;
    m.hidden_dim = hidden_dim;
    m.event_count = input_dim; // tests treat every slot as an event slot
    m.vocab_size = 0;
    m.W.resize(static_cast<size_t>(input_dim) * hidden_dim);
    m.V.resize(static_cast<size_t>(input_dim) * hidden_dim);
    m.b.resize(hidden_dim);
    m.c.resize(input_dim);
    for (auto& x : m.W) x = rng.uniform(-scale, scale);
    for (auto& x : m.V) x = rng.uniform(-scale, scale);
    for (auto& x : m.b) x = rng.uniform(-scale, scale);
    for (auto& x : m.c) x = rng.uniform(-scale, scale);
    return m;
}

inline SparseBinaryVector random_sparse(Rng& rng, uint32_t dim, uint32_t max_on) {
    SparseBinaryVector v;
    v.dim = dim;
    const uint32_t n = 1 + static_cast<uint32_t>(rng.below(std::min(max_on, dim)));
    std::set<uint32_t> chosen;
    while (chosen.size() < n) chosen.insert(static_cast<uint32_t>(rng.below(dim)));
    v.on_indices.assign(chosen.begin(), chosen.end());
    return v;
}

// Straight-line reimplementation of the reconstruction loss on dense
// matrices; no sparsity tricks, no stable-log shortcuts.
inline double oracle_loss(const AutoencoderModel& m, const std::vector<uint32_t>& P,
                          const std::vector<uint32_t>& N) {
    std::vector<double> dense(m.input_dim, 0.0);
    for (uint32_t i : P) dense[i] = 1.0;

    std::vector<double> a(m.hidden_dim, 0.0);
    for (uint32_t d = 0; d < m.hidden_dim; ++d) {
        a[d] = m.b[d];
        for (uint32_t i = 0; i < m.input_dim; ++i) a[d] += m.W[i * m.hidden_dim + d] * dense[i];
    }
    std::vector<double> phi(m.hidden_dim);
    for (uint32_t d = 0; d < m.hidden_dim; ++d) phi[d] = std::max(0.0, a[d]);

    auto vhat = [&](uint32_t i) {
        double z = m.c[i];
        for (uint32_t d = 0; d < m.hidden_dim; ++d) z += m.V[i * m.hidden_dim + d] * phi[d];
        return 1.0 / (1.0 + std::exp(-z));
    };

    double loss = 0;
    if (!P.empty()) {
        double s = 0;
        for (uint32_t i : P) s += std::log(vhat(i));
        loss -= s / static_cast<double>(P.size());
    }
    if (!N.empty()) {
        double s = 0;
        for (uint32_t i : N) s += std::log(1.0 - vhat(i));
        loss -= s / static_cast<double>(N.size());
    }
    return loss;
}

// O(n^2) Mann-Whitney AUC with 0.5 credit for ties.
inline double oracle_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0;
    size_t n_pos = 0, n_neg = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        ++n_pos;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    for (int y : labels) n_neg += (y == 0);
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace testutil
