#include "phishgraph/lbp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>

#include "phishgraph/common.hpp"
#include "phishgraph/csv.hpp"

namespace phishgraph {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

const std::vector<float>* usable_vector(const EmbeddingTable& embeddings, const std::string& id) {
    const auto* vec = embeddings.get(id);
    if (!vec) return nullptr;
    if (embeddings.zero_flagged.count(id)) return nullptr;
    for (float w : *vec) {
        if (w != 0.0f) return vec;
    }
    return nullptr;  // all-zero vector
}

// union-find over node indices
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[static_cast<size_t>(ra)] = rb;
        return true;
    }
};

}  // namespace

double edge_potential(const Node& x, const Node& y, int l, int l_prime,
                      const EdgePotentialSpec& spec, const EmbeddingTable& embeddings) {
    bool same = (l == l_prime);
    if (spec.mode == PotentialMode::similarity) {
        const auto* vx = usable_vector(embeddings, x.id);
        const auto* vy = usable_vector(embeddings, y.id);
        if (vx && vy) {
            double sim = clamp01(similarity(*vx, *vy, spec.similarity));
            return same ? std::min(spec.ths_plus, 1.0 - sim) : std::max(spec.ths_minus, sim);
        }
        // zero-vector endpoint: epsilon fallback for this edge
    }
    return same ? 0.5 - spec.epsilon : 0.5 + spec.epsilon;
}

Message compute_message(const HetGraph& graph, int x, int y,
                        const std::array<double, 2>& same_diff_cost, bool x_receives,
                        const std::vector<uint8_t>& edge_active, bool normalize) {
    // sum of messages into x excluding the one from y
    std::array<double, 2> excl{0.0, 0.0};
    if (x_receives) {
        const auto& adj = graph.adjacency[static_cast<size_t>(x)];
        for (size_t k = 0; k < adj.size(); ++k) {
            if (adj[k] == y) continue;
            if (!edge_active[static_cast<size_t>(graph.adj_edge[static_cast<size_t>(x)][k])]) continue;
            excl[0] += graph.msg_in[static_cast<size_t>(x)][k][0];
            excl[1] += graph.msg_in[static_cast<size_t>(x)][k][1];
        }
    }
    const auto& prior = graph.nodes[static_cast<size_t>(x)].prior;
    Message msg;
    for (int l = 0; l < 2; ++l) {
        double best = std::numeric_limits<double>::infinity();
        for (int lp = 0; lp < 2; ++lp) {
            double v = (1.0 - prior[static_cast<size_t>(lp)]) +
                       same_diff_cost[l == lp ? 0 : 1] + excl[static_cast<size_t>(lp)];
            best = std::min(best, v);
        }
        msg[static_cast<size_t>(l)] = best;
    }
    if (normalize) {
        double m = std::min(msg[0], msg[1]);
        msg[0] -= m;
        msg[1] -= m;
    }
    return msg;
}

std::array<double, 2> node_cost(const HetGraph& graph, int x) {
    const Node& n = graph.nodes[static_cast<size_t>(x)];
    if (!n.is_hidden()) throw ContractError("cost queried on observed node " + n.id);
    return {(1.0 - n.prior[0]) + n.msg_sum[0], (1.0 - n.prior[1]) + n.msg_sum[1]};
}

Classification classify(const std::array<double, 2>& costs, double threshold) {
    Classification c;
    double total = costs[0] + costs[1];
    c.phish_score = (total == 0.0) ? 0.5 : costs[0] / total;
    c.label = (c.phish_score >= threshold) ? 1 : 0;
    return c;
}

// ============================================================================
// Engine
// ============================================================================

LbpEngine::LbpEngine(HetGraph& graph, const EdgePotentialSpec& spec,
                     const EmbeddingTable& embeddings, const InferenceConfig& config)
    : graph_(graph), spec_(spec), embeddings_(embeddings), config_(config) {
    if (config_.k < 1) throw ContractError("inference config requires k >= 1");
    if (config_.tolerance <= 0.0) throw ContractError("inference config requires tolerance > 0");
    if (config_.max_sweeps < 1) throw ContractError("inference config requires max_sweeps >= 1");
    edge_active_.assign(graph_.edges.size(), 1);
    build_potential_cache();
    rebuild_message_slots();
}

void LbpEngine::build_potential_cache() {
    potential_.resize(graph_.edges.size());
    for (size_t e = 0; e < graph_.edges.size(); ++e) {
        const Node& a = graph_.nodes[static_cast<size_t>(graph_.edges[e].a)];
        const Node& b = graph_.nodes[static_cast<size_t>(graph_.edges[e].b)];
        if (spec_.mode == PotentialMode::similarity &&
            (!usable_vector(embeddings_, a.id) || !usable_vector(embeddings_, b.id))) {
            ++epsilon_fallback_edges_;
        }
        potential_[e][0] = edge_potential(a, b, 0, 0, spec_, embeddings_);
        potential_[e][1] = edge_potential(a, b, 0, 1, spec_, embeddings_);
    }
}

void LbpEngine::rebuild_message_slots() {
    schedule_.clear();
    for (size_t y = 0; y < graph_.nodes.size(); ++y) {
        if (!graph_.nodes[y].is_hidden()) continue;
        const auto& adj = graph_.adjacency[y];
        for (size_t k = 0; k < adj.size(); ++k) {
            int edge = graph_.adj_edge[y][k];
            if (!edge_active_[static_cast<size_t>(edge)]) continue;
            schedule_.push_back(DirectedMessage{adj[k], static_cast<int>(y),
                                                static_cast<int>(k), edge});
        }
    }
    last_changes_.assign(schedule_.size(), 0.0);
}

double LbpEngine::sweep() {
    // compute phase reads only the previous sweep's committed messages
    std::vector<Message> fresh(schedule_.size());
    for (size_t i = 0; i < schedule_.size(); ++i) {
        const auto& dm = schedule_[i];
        bool sender_receives = graph_.nodes[static_cast<size_t>(dm.from)].is_hidden();
        fresh[i] = compute_message(graph_, dm.from, dm.to, potential_[static_cast<size_t>(dm.edge)],
                                   sender_receives, edge_active_, config_.normalize_messages);
    }
    // commit phase
    double max_change = 0.0;
    for (size_t i = 0; i < schedule_.size(); ++i) {
        const auto& dm = schedule_[i];
        Message& slot = graph_.msg_in[static_cast<size_t>(dm.to)][static_cast<size_t>(dm.slot)];
        double change = std::max(std::abs(fresh[i][0] - slot[0]), std::abs(fresh[i][1] - slot[1]));
        last_changes_[i] = change;
        max_change = std::max(max_change, change);
        slot = fresh[i];
    }
    for (size_t y = 0; y < graph_.nodes.size(); ++y) {
        if (graph_.nodes[y].is_hidden()) {
            graph_.recompute_msg_sum(static_cast<int>(y), edge_active_);
        }
    }
    return max_change;
}

void LbpEngine::label_node(int idx, std::vector<NodeResult>& rows) {
    Node& n = graph_.nodes[static_cast<size_t>(idx)];
    auto costs = node_cost(graph_, idx);
    auto cls = classify(costs, config_.threshold);
    n.predict_label = cls.label;
    n.prior = cls.label == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
    // newly observed nodes no longer receive messages
    for (auto& m : graph_.msg_in[static_cast<size_t>(idx)]) m = Message{0.0, 0.0};
    n.msg_sum = {0.0, 0.0};
    rows.push_back(NodeResult{n.id, costs[0], costs[1], cls.phish_score, cls.label});
}

InferenceResult LbpEngine::run_fixed_k() {
    InferenceResult result;
    for (int i = 0; i < config_.k; ++i) {
        sweep();
        ++result.sweeps_total;
    }
    result.rounds = config_.k;
    size_t converged = 0;
    for (double c : last_changes_) converged += (c < config_.tolerance) ? 1 : 0;
    result.cvg = last_changes_.empty()
                     ? 1.0
                     : static_cast<double>(converged) / static_cast<double>(last_changes_.size());

    std::vector<NodeResult> rows;
    for (size_t i = 0; i < graph_.nodes.size(); ++i) {
        if (!graph_.nodes[i].is_hidden()) continue;
        auto costs = node_cost(graph_, static_cast<int>(i));
        auto cls = classify(costs, config_.threshold);
        graph_.nodes[i].predict_label = cls.label;
        rows.push_back(NodeResult{graph_.nodes[i].id, costs[0], costs[1], cls.phish_score,
                                  cls.label});
    }
    std::sort(rows.begin(), rows.end(),
              [](const NodeResult& a, const NodeResult& b) { return a.node_id < b.node_id; });
    result.nodes = std::move(rows);
    result.epsilon_fallback_edges = epsilon_fallback_edges_;
    return result;
}

bool LbpEngine::hidden_subgraph_acyclic() const {
    DisjointSet ds(graph_.nodes.size());
    for (size_t e = 0; e < graph_.edges.size(); ++e) {
        if (!edge_active_[e]) continue;
        const Edge& edge = graph_.edges[e];
        if (!graph_.nodes[static_cast<size_t>(edge.a)].is_hidden() ||
            !graph_.nodes[static_cast<size_t>(edge.b)].is_hidden()) {
            continue;
        }
        if (!ds.unite(edge.a, edge.b)) return false;
    }
    return true;
}

void LbpEngine::delete_hidden_cycle_edges(std::vector<int>& deleted_order,
                                          InferenceResult& result) {
    // BFS spanning forest of the hidden-induced subgraph; roots and
    // neighbors visited in lexicographic node-id order
    std::vector<int> hidden = hidden_nodes(graph_);
    std::vector<int> order = hidden;
    std::sort(order.begin(), order.end(), [this](int a, int b) {
        return graph_.nodes[static_cast<size_t>(a)].id < graph_.nodes[static_cast<size_t>(b)].id;
    });

    std::vector<uint8_t> visited(graph_.nodes.size(), 0);
    std::vector<uint8_t> edge_in_forest(graph_.edges.size(), 0);
    for (int root : order) {
        if (visited[static_cast<size_t>(root)]) continue;
        visited[static_cast<size_t>(root)] = 1;
        std::queue<int> frontier;
        frontier.push(root);
        while (!frontier.empty()) {
            int cur = frontier.front();
            frontier.pop();
            // neighbors explored in lexicographic id order
            std::vector<std::pair<std::string, std::pair<int, int>>> nbrs;
            const auto& adj = graph_.adjacency[static_cast<size_t>(cur)];
            for (size_t k = 0; k < adj.size(); ++k) {
                int edge = graph_.adj_edge[static_cast<size_t>(cur)][k];
                if (!edge_active_[static_cast<size_t>(edge)]) continue;
                if (!graph_.nodes[static_cast<size_t>(adj[k])].is_hidden()) continue;
                nbrs.push_back({graph_.nodes[static_cast<size_t>(adj[k])].id, {adj[k], edge}});
            }
            std::sort(nbrs.begin(), nbrs.end());
            for (const auto& [_, pair] : nbrs) {
                auto [nbr, edge] = pair;
                if (visited[static_cast<size_t>(nbr)]) continue;
                visited[static_cast<size_t>(nbr)] = 1;
                edge_in_forest[static_cast<size_t>(edge)] = 1;
                frontier.push(nbr);
            }
        }
    }

    for (size_t e = 0; e < graph_.edges.size(); ++e) {
        if (!edge_active_[e] || edge_in_forest[e]) continue;
        const Edge& edge = graph_.edges[e];
        if (!graph_.nodes[static_cast<size_t>(edge.a)].is_hidden() ||
            !graph_.nodes[static_cast<size_t>(edge.b)].is_hidden()) {
            continue;
        }
        edge_active_[e] = 0;
        deleted_order.push_back(static_cast<int>(e));
        ++result.edges_deleted;
        // drop the stale messages stored across this edge
        for (int endpoint : {edge.a, edge.b}) {
            const auto& adj_e = graph_.adj_edge[static_cast<size_t>(endpoint)];
            for (size_t k = 0; k < adj_e.size(); ++k) {
                if (adj_e[k] == static_cast<int>(e)) {
                    graph_.msg_in[static_cast<size_t>(endpoint)][k] = Message{0.0, 0.0};
                }
            }
        }
    }
}

InferenceResult LbpEngine::run_delete_cycles() {
    InferenceResult result;
    std::vector<NodeResult> rows;
    std::vector<int> deleted_order;
    size_t prev_hidden_count = hidden_nodes(graph_).size();

    for (;;) {
        ++result.rounds;

        // (a) break every hidden-only cycle
        delete_hidden_cycle_edges(deleted_order, result);
        if (!hidden_subgraph_acyclic()) ++result.invariant_violations;

        // (b) message passing to convergence
        rebuild_message_slots();
        if (!schedule_.empty()) {
            for (int s = 0; s < config_.max_sweeps; ++s) {
                double change = sweep();
                ++result.sweeps_total;
                if (change < config_.tolerance) break;
            }
        }

        // (c) label hidden nodes that have an observed neighbor (snapshot
        // of the hidden set taken before any labels are applied)
        std::vector<int> to_label;
        for (size_t i = 0; i < graph_.nodes.size(); ++i) {
            if (!graph_.nodes[i].is_hidden()) continue;
            const auto& adj = graph_.adjacency[i];
            bool has_observed = false;
            for (size_t k = 0; k < adj.size(); ++k) {
                if (!edge_active_[static_cast<size_t>(graph_.adj_edge[i][k])]) continue;
                if (!graph_.nodes[static_cast<size_t>(adj[k])].is_hidden()) {
                    has_observed = true;
                    break;
                }
            }
            if (has_observed) to_label.push_back(static_cast<int>(i));
        }
        for (int idx : to_label) label_node(idx, rows);

        // (d) re-add deleted edges that no longer close a hidden-only cycle
        size_t readded = 0;
        {
            DisjointSet ds(graph_.nodes.size());
            for (size_t e = 0; e < graph_.edges.size(); ++e) {
                if (!edge_active_[e]) continue;
                const Edge& edge = graph_.edges[e];
                if (graph_.nodes[static_cast<size_t>(edge.a)].is_hidden() &&
                    graph_.nodes[static_cast<size_t>(edge.b)].is_hidden()) {
                    ds.unite(edge.a, edge.b);
                }
            }
            std::vector<int> still_deleted;
            for (int e : deleted_order) {
                const Edge& edge = graph_.edges[static_cast<size_t>(e)];
                bool a_hidden = graph_.nodes[static_cast<size_t>(edge.a)].is_hidden();
                bool b_hidden = graph_.nodes[static_cast<size_t>(edge.b)].is_hidden();
                bool safe;
                if (!a_hidden || !b_hidden) {
                    safe = true;
                } else {
                    safe = ds.unite(edge.a, edge.b);
                }
                if (safe) {
                    edge_active_[static_cast<size_t>(e)] = 1;
                    ++readded;
                    ++result.edges_restored;
                } else {
                    still_deleted.push_back(e);
                }
            }
            deleted_order = std::move(still_deleted);
        }

        // invariant: active + deleted = total
        size_t active = 0;
        for (uint8_t a : edge_active_) active += a;
        if (active + deleted_order.size() != graph_.edges.size()) ++result.invariant_violations;
        size_t hidden_count = hidden_nodes(graph_).size();
        if (hidden_count > prev_hidden_count) ++result.invariant_violations;
        prev_hidden_count = hidden_count;

        if (to_label.empty() && readded == 0) {
            if (!deleted_order.empty()) {
                // no progress possible; re-add everything before final labeling
                for (int e : deleted_order) {
                    edge_active_[static_cast<size_t>(e)] = 1;
                    ++result.edges_restored;
                }
                deleted_order.clear();
                result.forced_readd = true;
            }
            break;
        }
    }

    // label whatever is still hidden from current costs
    for (size_t i = 0; i < graph_.nodes.size(); ++i) {
        if (graph_.nodes[i].is_hidden()) label_node(static_cast<int>(i), rows);
    }

    size_t converged = 0;
    for (double c : last_changes_) converged += (c < config_.tolerance) ? 1 : 0;
    result.cvg = last_changes_.empty()
                     ? 1.0
                     : static_cast<double>(converged) / static_cast<double>(last_changes_.size());

    std::sort(rows.begin(), rows.end(),
              [](const NodeResult& a, const NodeResult& b) { return a.node_id < b.node_id; });
    result.nodes = std::move(rows);
    result.epsilon_fallback_edges = epsilon_fallback_edges_;
    return result;
}

InferenceResult LbpEngine::run() {
    return config_.strategy == ConvergenceStrategy::fixed_k ? run_fixed_k() : run_delete_cycles();
}

InferenceResult run_fixed_k(HetGraph& graph, const EdgePotentialSpec& spec,
                            const EmbeddingTable& embeddings, const InferenceConfig& config) {
    LbpEngine engine(graph, spec, embeddings, config);
    return engine.run_fixed_k();
}

InferenceResult run_delete_cycles(HetGraph& graph, const EdgePotentialSpec& spec,
                                  const EmbeddingTable& embeddings, const InferenceConfig& config) {
    LbpEngine engine(graph, spec, embeddings, config);
    return engine.run_delete_cycles();
}

void save_inference_csv(const InferenceResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write inference file: " + path);
    out << "node_id,cost_benign,cost_phish,phish_score,predict_label\n";
    char buf[128];
    for (const auto& row : result.nodes) {
        out << csv::quote_field(row.node_id);
        snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%d\n", row.cost_benign, row.cost_phish,
                 row.phish_score, row.predict_label);
        out << buf;
    }
}

}  // namespace phishgraph
