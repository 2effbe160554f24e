#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "copra/corpus.hpp"
#include "copra/error.hpp"
#include "copra/graph.hpp"
#include "copra/parallel.hpp"

namespace copra {

// Top retweeters ranked by retweet count descending, ties by user id. Returns
// ceil(fraction * R) users where R counts users with at least one retweet.
inline std::vector<std::string> select_superspreaders(const Corpus& corpus, double fraction = 0.01) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("fraction must be in (0,1]");
    std::map<std::string, std::size_t> counts;
    for (const Tweet& t : corpus.tweets)
        if (t.is_retweet()) ++counts[t.author_id];
    if (counts.empty()) throw Error("no retweeting users");

    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });

    const double r = static_cast<double>(ranked.size());
    auto take = static_cast<std::size_t>(std::ceil(fraction * r));
    take = std::min(take, ranked.size());
    std::vector<std::string> selected;
    selected.reserve(take);
    for (std::size_t i = 0; i < take; ++i) selected.push_back(ranked[i].first);
    return selected;
}

struct RetweetVector {
    std::string user_id;
    std::vector<std::pair<std::string, double>> entries;  // tweet id -> weight, sorted by id
};

// TF(u,t) = times u retweeted t; IDF(t) = ln(N / df(t)) over the selected
// users. Tweets retweeted by every selected user get zero weight and are
// dropped from the sparse entries.
inline std::vector<RetweetVector> build_retweet_vectors(const Corpus& corpus,
                                                        const std::vector<std::string>& users) {
    for (const auto& u : users)
        if (!corpus.has_user(u)) throw Error("unknown user in selection: " + u);

    std::unordered_map<std::string, std::size_t> user_pos;
    for (std::size_t i = 0; i < users.size(); ++i) user_pos[users[i]] = i;

    // tf[user][tweet] and df over users
    std::vector<std::map<std::string, std::size_t>> tf(users.size());
    for (const Tweet& t : corpus.tweets) {
        if (!t.is_retweet()) continue;
        auto it = user_pos.find(t.author_id);
        if (it == user_pos.end()) continue;
        ++tf[it->second][*t.retweeted_id];
    }
    std::map<std::string, std::size_t> df;
    for (const auto& m : tf)
        for (const auto& [tweet, count] : m) ++df[tweet];

    const double n = static_cast<double>(users.size());
    std::vector<RetweetVector> vectors(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
        vectors[i].user_id = users[i];
        for (const auto& [tweet, count] : tf[i]) {
            const double idf = std::log(n / static_cast<double>(df[tweet]));
            const double w = static_cast<double>(count) * idf;
            if (w > 0.0) vectors[i].entries.emplace_back(tweet, w);
        }
    }
    return vectors;
}

namespace detail {

inline double sparse_cosine(const RetweetVector& u, const RetweetVector& v) {
    double dot = 0.0;
    auto a = u.entries.begin();
    auto b = v.entries.begin();
    while (a != u.entries.end() && b != v.entries.end()) {
        int cmp = a->first.compare(b->first);
        if (cmp < 0) ++a;
        else if (cmp > 0) ++b;
        else {
            dot += a->second * b->second;
            ++a;
            ++b;
        }
    }
    if (dot <= 0.0) return 0.0;
    double nu = 0.0, nv = 0.0;
    for (const auto& [id, w] : u.entries) nu += w * w;
    for (const auto& [id, w] : v.entries) nv += w * w;
    return std::min(dot / std::sqrt(nu * nv), 1.0);
}

}  // namespace detail

// Cosine similarity network over the non-empty vectors. Only pairs sharing at
// least one tweet are evaluated (inverted index over tweet ids); every such
// pair has a positive dot product, so the candidate set is exactly the edge
// set.
inline WeightedGraph similarity_network(const std::vector<RetweetVector>& vectors,
                                        std::size_t threads = 1) {
    std::vector<const RetweetVector*> active;
    for (const auto& v : vectors)
        if (!v.entries.empty()) active.push_back(&v);
    if (active.size() < 2) throw Error("degenerate network");

    std::unordered_map<std::string, std::vector<std::size_t>> posting;
    for (std::size_t i = 0; i < active.size(); ++i)
        for (const auto& [tweet, w] : active[i]->entries) posting[tweet].push_back(i);

    std::set<std::pair<std::size_t, std::size_t>> candidate_set;
    for (const auto& [tweet, holders] : posting)
        for (std::size_t x = 0; x < holders.size(); ++x)
            for (std::size_t y = x + 1; y < holders.size(); ++y) {
                std::size_t i = holders[x], j = holders[y];
                if (i > j) std::swap(i, j);
                candidate_set.insert({i, j});
            }

    std::vector<std::pair<std::size_t, std::size_t>> candidates(candidate_set.begin(),
                                                                candidate_set.end());
    std::vector<double> weights(candidates.size(), 0.0);
    parallel_for(candidates.size(), threads, [&](std::size_t p) {
        weights[p] = detail::sparse_cosine(*active[candidates[p].first], *active[candidates[p].second]);
    });

    WeightedGraph net;
    for (const auto& v : active) net.add_node(v->user_id);
    for (std::size_t p = 0; p < candidates.size(); ++p)
        if (weights[p] > 0.0)
            net.add_edge(active[candidates[p].first]->user_id,
                         active[candidates[p].second]->user_id, weights[p]);
    net.finalize();
    return net;
}

struct BackboneParams {
    double alpha = 0.05;
};

struct EdgeDisparity {
    std::size_t a;
    std::size_t b;
    double p_a;  // weight fraction at endpoint a
    double p_b;
    std::size_t k_a;  // degree of endpoint a
    std::size_t k_b;
};

inline std::vector<EdgeDisparity> edge_disparity(const WeightedGraph& net) {
    std::vector<double> strengths(net.node_count());
    for (std::size_t i = 0; i < net.node_count(); ++i) strengths[i] = net.strength(i);
    std::vector<EdgeDisparity> stats;
    stats.reserve(net.edge_count());
    for (const auto& e : net.edges()) {
        EdgeDisparity d;
        d.a = e.a;
        d.b = e.b;
        d.p_a = e.weight / strengths[e.a];
        d.p_b = e.weight / strengths[e.b];
        d.k_a = net.degree(e.a);
        d.k_b = net.degree(e.b);
        stats.push_back(d);
    }
    return stats;
}

// Closed-form survival of the disparity null: P(X >= p) for a uniform split
// into k parts is (1 - p)^(k - 1).
inline double disparity_significance(double p, std::size_t k) {
    return std::pow(1.0 - p, static_cast<double>(k - 1));
}

// Multiscale backbone: an edge survives when it is significant at either
// endpoint. Degree-1 endpoints cannot be tested against the null and always
// keep their edge. Isolated nodes are dropped.
inline WeightedGraph backbone(const WeightedGraph& net, const BackboneParams& params) {
    if (net.node_count() == 0) throw Error("empty network");
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw Error("alpha must be in (0,1)");

    auto keeps = [&](double p, std::size_t k) {
        return k == 1 || disparity_significance(p, k) < params.alpha;
    };

    const std::vector<EdgeDisparity> stats = edge_disparity(net);
    WeightedGraph result;
    for (std::size_t e = 0; e < stats.size(); ++e) {
        const EdgeDisparity& d = stats[e];
        if (keeps(d.p_a, d.k_a) || keeps(d.p_b, d.k_b))
            result.add_edge(net.id_of(d.a), net.id_of(d.b), net.edges()[e].weight);
    }
    result.finalize();
    return result;
}

}  // namespace copra
