#pragma once

// Shared inference fixtures and the exhaustive enumeration oracle used by
// the unit tests and the acceptance suite.

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "phishgraph/lbp.hpp"
#include "phishgraph/rng.hpp"

namespace lbp_oracle {

inline std::string padded_id(int i) {
    std::string n = std::to_string(i);
    return "url:n" + std::string(2 - std::min<size_t>(2, n.size()), '0') + n;
}

// random tree: node i attaches to a random earlier node; ~35% observed
inline phishgraph::HetGraph random_tree(phishgraph::SplitMix64& rng, int n) {
    phishgraph::HetGraph g;
    for (int i = 0; i < n; ++i) {
        int idx = g.add_node(padded_id(i), phishgraph::NodeKind::url);
        phishgraph::Node& node = g.nodes[static_cast<size_t>(idx)];
        if (rng.next_below(100) < 35) {
            int label = static_cast<int>(rng.next_below(2));
            node.label = static_cast<double>(label);
            node.prior = label == 0 ? std::array<double, 2>{1.0, 0.0}
                                    : std::array<double, 2>{0.0, 1.0};
        } else {
            double p = 0.05 + 0.9 * rng.next_double();
            node.prior = {p, 1.0 - p};
        }
    }
    for (int i = 1; i < n; ++i) {
        g.add_edge(i, static_cast<int>(rng.next_below(static_cast<uint64_t>(i))),
                   phishgraph::EdgeFamily::url_domain);
    }
    return g;
}

inline phishgraph::HetGraph random_loopy_graph(phishgraph::SplitMix64& rng, int n,
                                               int extra_edges) {
    auto g = random_tree(rng, n);
    for (int e = 0; e < extra_edges; ++e) {
        int a = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        int b = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        if (a != b) g.add_edge(a, b, phishgraph::EdgeFamily::url_domain);
    }
    return g;
}

// potentials for the fixture: epsilon mode, or similarity mode over random
// unit vectors
inline std::pair<phishgraph::EdgePotentialSpec, phishgraph::EmbeddingTable> random_spec(
    phishgraph::SplitMix64& rng, const phishgraph::HetGraph& g, bool use_similarity) {
    phishgraph::EdgePotentialSpec spec;
    phishgraph::EmbeddingTable table;
    spec.epsilon = 0.02 + 0.43 * rng.next_double();
    if (use_similarity) {
        spec.mode = phishgraph::PotentialMode::similarity;
        spec.ths_plus = rng.next_double();
        spec.ths_minus = rng.next_double();
        spec.similarity.kernel = rng.next_below(2) == 0 ? phishgraph::SimilarityKernel::cosine
                                                        : phishgraph::SimilarityKernel::rbf;
        spec.similarity.sigma = 0.5 + rng.next_double();
        table.dimension = 4;
        for (const auto& node : g.nodes) {
            std::vector<float> v(4);
            float norm = 0.0f;
            for (auto& x : v) {
                x = rng.next_float() * 2.0f - 1.0f;
                norm += x * x;
            }
            norm = std::sqrt(norm);
            if (norm > 0) {
                for (auto& x : v) x /= norm;
            } else {
                v = {1.0f, 0.0f, 0.0f, 0.0f};
            }
            table.vectors[node.id] = v;
        }
        table.normalized = true;
    }
    return {spec, table};
}

// Exhaustive min-marginals of the model the message equations solve:
// hidden labels are enumerated; an edge from a hidden node to an observed
// one contributes min over the observed label of (unary + pairwise), since
// observed entities do not aggregate incoming messages.
inline std::map<std::string, std::array<double, 2>> exhaustive_min_marginals(
    const phishgraph::HetGraph& g, const phishgraph::EdgePotentialSpec& spec,
    const phishgraph::EmbeddingTable& table) {
    std::vector<int> hidden = phishgraph::hidden_nodes(g);
    size_t h = hidden.size();
    std::map<int, size_t> hidden_slot;
    for (size_t i = 0; i < h; ++i) hidden_slot[hidden[i]] = i;

    auto psi = [&](int a, int b, int la, int lb) {
        return phishgraph::edge_potential(g.nodes[static_cast<size_t>(a)],
                                          g.nodes[static_cast<size_t>(b)], la, lb, spec, table);
    };

    std::map<std::string, std::array<double, 2>> result;
    for (int idx : hidden) {
        result[g.nodes[static_cast<size_t>(idx)].id] = {1e300, 1e300};
    }
    for (uint64_t mask = 0; mask < (1ULL << h); ++mask) {
        auto label_of = [&](int node) {
            return static_cast<int>((mask >> hidden_slot.at(node)) & 1ULL);
        };
        double energy = 0.0;
        for (int idx : hidden) {
            energy += 1.0 - g.nodes[static_cast<size_t>(idx)]
                                .prior[static_cast<size_t>(label_of(idx))];
        }
        for (const auto& edge : g.edges) {
            bool a_hidden = g.nodes[static_cast<size_t>(edge.a)].is_hidden();
            bool b_hidden = g.nodes[static_cast<size_t>(edge.b)].is_hidden();
            if (a_hidden && b_hidden) {
                energy += psi(edge.a, edge.b, label_of(edge.a), label_of(edge.b));
            } else if (a_hidden || b_hidden) {
                int hidden_end = a_hidden ? edge.a : edge.b;
                int observed_end = a_hidden ? edge.b : edge.a;
                int lh = label_of(hidden_end);
                const auto& prior = g.nodes[static_cast<size_t>(observed_end)].prior;
                double best = 1e300;
                for (int lo = 0; lo < 2; ++lo) {
                    best = std::min(best, (1.0 - prior[static_cast<size_t>(lo)]) +
                                              psi(observed_end, hidden_end, lo, lh));
                }
                energy += best;
            }
            // observed-observed edges shift every labeling equally
        }
        for (int idx : hidden) {
            auto& mm = result[g.nodes[static_cast<size_t>(idx)].id];
            size_t l = static_cast<size_t>(label_of(idx));
            mm[l] = std::min(mm[l], energy);
        }
    }
    return result;
}

}  // namespace lbp_oracle
