#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "copra/csv.hpp"
#include "copra/error.hpp"

namespace copra {

// Undirected weighted graph over string node ids. Nodes are kept sorted and
// edges stored once in canonical (a < b) orientation, so iteration order is
// stable regardless of insertion order.
class WeightedGraph {
public:
    struct Edge {
        std::size_t a;  // node indices with a < b
        std::size_t b;
        double weight;
    };

    void add_node(const std::string& id) { pending_nodes_.push_back(id); }

    void add_edge(const std::string& u, const std::string& v, double weight) {
        if (u == v) throw Error("self-loop rejected: " + u);
        pending_nodes_.push_back(u);
        pending_nodes_.push_back(v);
        pending_edges_.push_back({u, v, weight});
    }

    // Sorts nodes, resolves indices and merges duplicate edges (last wins).
    void finalize() {
        std::sort(pending_nodes_.begin(), pending_nodes_.end());
        pending_nodes_.erase(std::unique(pending_nodes_.begin(), pending_nodes_.end()),
                             pending_nodes_.end());
        ids_ = std::move(pending_nodes_);
        pending_nodes_.clear();

        std::map<std::pair<std::size_t, std::size_t>, double> canon;
        for (const auto& [u, v, w] : pending_edges_) {
            std::size_t i = index_of(u);
            std::size_t j = index_of(v);
            if (i > j) std::swap(i, j);
            canon[{i, j}] = w;
        }
        pending_edges_.clear();

        edges_.clear();
        edges_.reserve(canon.size());
        for (const auto& [key, w] : canon) edges_.push_back({key.first, key.second, w});

        adjacency_.assign(ids_.size(), {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            adjacency_[edges_[e].a].push_back(e);
            adjacency_[edges_[e].b].push_back(e);
        }
    }

    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::string& id_of(std::size_t index) const { return ids_[index]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::size_t>& incident_edges(std::size_t node) const {
        return adjacency_[node];
    }

    std::size_t index_of(const std::string& id) const {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) throw Error("unknown node id: " + id);
        return static_cast<std::size_t>(it - ids_.begin());
    }

    bool has_node(const std::string& id) const {
        return std::binary_search(ids_.begin(), ids_.end(), id);
    }

    double strength(std::size_t node) const {
        double s = 0.0;
        for (std::size_t e : adjacency_[node]) s += edges_[e].weight;
        return s;
    }

    std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }

    // Connected component label per node, labels assigned in discovery order
    // from the smallest node index.
    std::vector<int> components() const {
        std::vector<int> comp(ids_.size(), -1);
        int next = 0;
        std::vector<std::size_t> stack;
        for (std::size_t start = 0; start < ids_.size(); ++start) {
            if (comp[start] != -1) continue;
            comp[start] = next;
            stack.push_back(start);
            while (!stack.empty()) {
                std::size_t n = stack.back();
                stack.pop_back();
                for (std::size_t e : adjacency_[n]) {
                    std::size_t other = edges_[e].a == n ? edges_[e].b : edges_[e].a;
                    if (comp[other] == -1) {
                        comp[other] = next;
                        stack.push_back(other);
                    }
                }
            }
            ++next;
        }
        return comp;
    }

    // Nodes of the largest connected component. Ties break toward the
    // component containing the lexicographically smallest node id, which is
    // the component discovered first.
    std::vector<std::size_t> largest_component() const {
        std::vector<int> comp = components();
        int label_count = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
        std::vector<std::size_t> sizes(static_cast<std::size_t>(label_count), 0);
        for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
        int best = -1;
        std::size_t best_size = 0;
        for (int c = 0; c < label_count; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > best_size) {
                best_size = sizes[static_cast<std::size_t>(c)];
                best = c;
            }
        }
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < comp.size(); ++i)
            if (comp[i] == best) nodes.push_back(i);
        return nodes;
    }

    double total_weight() const {
        double m = 0.0;
        for (const auto& e : edges_) m += e.weight;
        return m;
    }

    // user_a,user_b,weight with canonical orientation and row order; weights
    // carry 10 significant digits.
    void write_edges_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path);
        out << "user_a,user_b,weight\n";
        for (const auto& e : edges_)
            out << csv::escape(ids_[e.a]) << ',' << csv::escape(ids_[e.b]) << ','
                << csv::sig10(e.weight) << '\n';
    }

    static WeightedGraph read_edges_csv(const std::string& path) {
        csv::Reader reader(path);
        std::vector<std::string> fields;
        if (!reader.next(fields) || fields.size() != 3 || fields[0] != "user_a" ||
            fields[1] != "user_b" || fields[2] != "weight")
            throw ParseError("edge file must start with header user_a,user_b,weight", 1);
        WeightedGraph g;
        while (reader.next(fields)) {
            if (fields.size() == 1 && fields[0].empty()) continue;
            if (fields.size() != 3) throw ParseError("expected 3 fields", reader.line());
            double w;
            try {
                std::size_t used = 0;
                w = std::stod(fields[2], &used);
                if (used != fields[2].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("weight must be a number", reader.line());
            }
            if (!(w > 0.0)) throw ParseError("weight must be positive", reader.line());
            g.add_edge(fields[0], fields[1], w);
        }
        g.finalize();
        return g;
    }

private:
    struct PendingEdge {
        std::string u;
        std::string v;
        double weight;
    };

    std::vector<std::string> pending_nodes_;
    std::vector<PendingEdge> pending_edges_;
    std::vector<std::string> ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace copra
