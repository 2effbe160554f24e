#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "copra/assignment.hpp"
#include "copra/error.hpp"
#include "copra/graph.hpp"
#include "copra/rng.hpp"

namespace copra {

// Weighted modularity at resolution gamma. labels[i] is the community of node
// i; any integer labeling is accepted.
inline double modularity(const WeightedGraph& net, const std::vector<int>& labels,
                         double gamma = 1.0) {
    if (labels.size() != net.node_count()) throw Error("label count mismatch");
    const double m = net.total_weight();
    if (m <= 0.0) return 0.0;

    std::map<int, double> internal;
    std::map<int, double> strength;
    for (std::size_t i = 0; i < net.node_count(); ++i)
        strength[labels[i]] += net.strength(i);
    for (const auto& e : net.edges())
        if (labels[e.a] == labels[e.b]) internal[labels[e.a]] += e.weight;

    double q = 0.0;
    for (const auto& [label, s] : strength) {
        double w_in = 0.0;
        if (auto it = internal.find(label); it != internal.end()) w_in = it->second;
        const double frac = s / (2.0 * m);
        q += w_in / m - gamma * frac * frac;
    }
    return q;
}

namespace detail {

// Working graph for the coarsening levels: plain adjacency plus self-loop
// weight per node. A self-loop of weight l adds 2l to the node's strength.
struct LevelGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::vector<double> self_loop;
    std::vector<double> strength;
    double m = 0.0;  // total edge weight, self-loops included once

    std::size_t size() const { return adj.size(); }

    void compute_strengths() {
        strength.assign(size(), 0.0);
        m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 2.0 * self_loop[i];
            for (const auto& [j, w] : adj[i]) s += w;
            strength[i] = s;
            m += self_loop[i];
            for (const auto& [j, w] : adj[i])
                if (j > i) m += w;
        }
    }
};

inline LevelGraph level_from(const WeightedGraph& net) {
    LevelGraph g;
    g.adj.assign(net.node_count(), {});
    g.self_loop.assign(net.node_count(), 0.0);
    for (const auto& e : net.edges()) {
        g.adj[e.a].emplace_back(e.b, e.weight);
        g.adj[e.b].emplace_back(e.a, e.weight);
    }
    g.compute_strengths();
    return g;
}

// One pass of repeated single-node moves until no move improves modularity by
// more than min_gain. Moves consider every neighboring community plus a fresh
// empty one; candidate communities are scanned in sorted order so the result
// does not depend on hash iteration. Returns true if anything moved.
inline bool local_moves(const LevelGraph& g, std::vector<int>& labels, double gamma, Rng& rng,
                        double min_gain = 1e-12) {
    const double m = g.m;
    if (m <= 0.0) return false;

    int max_label = 0;
    for (int l : labels) max_label = std::max(max_label, l);
    std::vector<double> comm_strength(static_cast<std::size_t>(max_label) + g.size() + 2, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        comm_strength[static_cast<std::size_t>(labels[i])] += g.strength[i];
    int next_free = max_label + 1;

    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> weight_to(comm_strength.size(), 0.0);
    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t v : order) {
            const int home = labels[v];
            const double k_v = g.strength[v];

            std::vector<int> touched;
            for (const auto& [u, w] : g.adj[v]) {
                const int c = labels[u];
                if (weight_to[static_cast<std::size_t>(c)] == 0.0 &&
                    std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                weight_to[static_cast<std::size_t>(c)] += w;
            }
            std::sort(touched.begin(), touched.end());

            const double w_home = weight_to[static_cast<std::size_t>(home)];
            const double s_home = comm_strength[static_cast<std::size_t>(home)] - k_v;

            auto gain_of = [&](double w_to, double s_other) {
                return (w_to - w_home) / m -
                       gamma * k_v * (s_other - s_home) / (2.0 * m * m);
            };

            int best = home;
            double best_gain = min_gain;  // a move must strictly beat this
            for (int c : touched) {
                if (c == home) continue;
                const double gain =
                    gain_of(weight_to[static_cast<std::size_t>(c)], comm_strength[static_cast<std::size_t>(c)]);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            const double fresh_gain = gain_of(0.0, 0.0);  // split into a singleton
            if (fresh_gain > best_gain) {
                best_gain = fresh_gain;
                best = next_free;
            }

            for (const auto& [u, w] : g.adj[v]) weight_to[static_cast<std::size_t>(labels[u])] = 0.0;

            if (best != home) {
                if (best == next_free) {
                    ++next_free;
                    if (static_cast<std::size_t>(next_free) >= comm_strength.size()) {
                        comm_strength.resize(static_cast<std::size_t>(next_free) + 1, 0.0);
                        weight_to.resize(comm_strength.size(), 0.0);
                    }
                }
                comm_strength[static_cast<std::size_t>(home)] -= k_v;
                comm_strength[static_cast<std::size_t>(best)] += k_v;
                labels[v] = best;
                improved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

inline std::vector<int> compress_labels(std::vector<int>& labels) {
    std::map<int, int> remap;
    for (int l : labels) remap.emplace(l, 0);
    int next = 0;
    for (auto& [old_label, new_label] : remap) new_label = next++;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
    labels = out;
    return out;
}

inline LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& labels, int count) {
    LevelGraph out;
    out.adj.assign(static_cast<std::size_t>(count), {});
    out.self_loop.assign(static_cast<std::size_t>(count), 0.0);
    std::map<std::pair<int, int>, double> between;
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.self_loop[static_cast<std::size_t>(labels[i])] += g.self_loop[i];
        for (const auto& [j, w] : g.adj[i]) {
            if (j < i) continue;  // handle each undirected pair once
            const int a = labels[i];
            const int b = labels[static_cast<std::size_t>(j)];
            if (a == b) out.self_loop[static_cast<std::size_t>(a)] += w;
            else between[{std::min(a, b), std::max(a, b)}] += w;
        }
    }
    for (const auto& [key, w] : between) {
        out.adj[static_cast<std::size_t>(key.first)].emplace_back(static_cast<std::size_t>(key.second), w);
        out.adj[static_cast<std::size_t>(key.second)].emplace_back(static_cast<std::size_t>(key.first), w);
    }
    out.compute_strengths();
    return out;
}

}  // namespace detail

// Louvain community detection. The node visitation order is derived from the
// seed; the result is single-move locally optimal on the input graph. Labels
// are contiguous, ordered by descending community size, ties by the smallest
// member id.
inline CommunityAssignment louvain(const WeightedGraph& net, double resolution = 1.0,
                                   std::uint64_t seed = 0) {
    if (net.node_count() == 0) throw Error("empty network");

    std::vector<int> labels(net.node_count());
    std::iota(labels.begin(), labels.end(), 0);
    Rng rng(seed);

    detail::LevelGraph level = detail::level_from(net);
    std::vector<int> level_labels = labels;
    while (true) {
        const bool moved = detail::local_moves(level, level_labels, resolution, rng);
        detail::compress_labels(level_labels);
        int count = level_labels.empty()
                        ? 0
                        : *std::max_element(level_labels.begin(), level_labels.end()) + 1;

        // fold this level's labels into the node labeling
        for (std::size_t i = 0; i < labels.size(); ++i)
            labels[i] = level_labels[static_cast<std::size_t>(labels[i])];

        if (!moved || static_cast<std::size_t>(count) == level.size()) break;
        level = detail::aggregate(level, level_labels, count);
        level_labels.assign(level.size(), 0);
        std::iota(level_labels.begin(), level_labels.end(), 0);
    }

    // Final refinement on the original graph guarantees that no single node
    // can move (to any neighboring or fresh community) and improve modularity.
    detail::LevelGraph base = detail::level_from(net);
    detail::local_moves(base, labels, resolution, rng);
    detail::compress_labels(labels);

    // order labels by community size descending, ties by smallest member id
    int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(static_cast<std::size_t>(count), 0);
    std::vector<std::string> smallest(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto c = static_cast<std::size_t>(labels[i]);
        ++sizes[c];
        if (smallest[c].empty() || net.id_of(i) < smallest[c]) smallest[c] = net.id_of(i);
    }
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        auto sa = sizes[static_cast<std::size_t>(a)], sb = sizes[static_cast<std::size_t>(b)];
        return sa != sb ? sa > sb : smallest[static_cast<std::size_t>(a)] < smallest[static_cast<std::size_t>(b)];
    });
    std::vector<int> rank(count);
    for (int pos = 0; pos < count; ++pos) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    CommunityAssignment assignment;
    assignment.community_count = count;
    for (std::size_t i = 0; i < labels.size(); ++i)
        assignment.labels[net.id_of(i)] = rank[static_cast<std::size_t>(labels[i])];
    return assignment;
}

// Iterative threshold dismantling. Thresholds sweep the distinct edge weights
// ascending; at each step edges strictly below the threshold are deleted and
// every node outside the largest connected component is removed with that
// threshold as its raw score. Survivors of the last step take the maximum
// threshold. Raw scores are min-max normalized; a degenerate range maps
// everyone to 1.0.
inline CoordinationScores dismantle(const WeightedGraph& net) {
    if (net.node_count() == 0) throw Error("empty network");

    std::vector<double> thresholds;
    for (const auto& e : net.edges()) thresholds.push_back(e.weight);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const std::size_t n = net.node_count();
    std::vector<bool> alive(n, true);
    std::vector<double> raw(n, 0.0);

    if (thresholds.empty()) {
        // no edges: every node is trivially outside any larger component
        CoordinationScores scores;
        for (std::size_t i = 0; i < n; ++i) scores[net.id_of(i)] = 1.0;
        return scores;
    }

    for (double t : thresholds) {
        // components over alive nodes and edges with weight >= t
        std::vector<int> comp(n, -1);
        int comp_count = 0;
        std::vector<std::size_t> stack;
        for (std::size_t start = 0; start < n; ++start) {
            if (!alive[start] || comp[start] != -1) continue;
            comp[start] = comp_count;
            stack.push_back(start);
            while (!stack.empty()) {
                std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t e : net.incident_edges(v)) {
                    if (net.edges()[e].weight < t) continue;
                    std::size_t u = net.edges()[e].a == v ? net.edges()[e].b : net.edges()[e].a;
                    if (alive[u] && comp[u] == -1) {
                        comp[u] = comp_count;
                        stack.push_back(u);
                    }
                }
            }
            ++comp_count;
        }
        std::vector<std::size_t> sizes(static_cast<std::size_t>(comp_count), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (alive[i]) ++sizes[static_cast<std::size_t>(comp[i])];
        // largest component; ties resolve to the one holding the smallest node
        // id, which is the lowest-numbered component (ids are sorted)
        int best = 0;
        for (int c = 1; c < comp_count; ++c)
            if (sizes[static_cast<std::size_t>(c)] > sizes[static_cast<std::size_t>(best)]) best = c;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i] && comp[i] != best) {
                raw[i] = t;
                alive[i] = false;
            }
        }
    }
    const double t_max = thresholds.back();
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) raw[i] = t_max;

    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it, hi = *hi_it;
    CoordinationScores scores;
    for (std::size_t i = 0; i < n; ++i)
        scores[net.id_of(i)] = hi > lo ? (raw[i] - lo) / (hi - lo) : 1.0;
    return scores;
}

}  // namespace copra
