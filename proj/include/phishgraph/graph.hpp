#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "phishgraph/baselines.hpp"
#include "phishgraph/dataset.hpp"
#include "phishgraph/enrichment.hpp"
#include "phishgraph/url_parser.hpp"

namespace phishgraph {

enum class NodeKind { url, substring, domain, ip, nameserver };

const char* node_kind_name(NodeKind k);
NodeKind node_kind_from_name(const std::string& name);

// Cost message over the {benign, phishing} label axis.
using Message = std::array<double, 2>;

struct Node {
    std::string id;  // kind-prefixed canonical string, e.g. "dom:example.com"
    NodeKind kind = NodeKind::url;
    double label = 0.5;      // 0 benign, 1 phishing, 0.5 unknown
    int predict_label = -1;  // -1 unknown
    std::array<double, 2> prior{0.5, 0.5};
    std::array<double, 2> msg_sum{0.0, 0.0};

    // hidden = unknown label and no inferred one yet
    bool is_hidden() const { return label == 0.5 && predict_label == -1; }
};

enum class EdgeFamily { url_domain, domain_ip, domain_ns, url_substring };

const char* edge_family_name(EdgeFamily f);
EdgeFamily edge_family_from_name(const std::string& name);

struct Edge {
    int a = -1, b = -1;  // node indices, unordered pair
    EdgeFamily family = EdgeFamily::url_domain;
};

// Undirected heterogeneous graph. Adjacency lists are parallel across
// `adjacency` (neighbor index), `adj_edge` (edge index) and `msg_in`
// (message most recently received from that neighbor). Insertion order is
// deterministic, so two builds of the same inputs are identical.
struct HetGraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adjacency;
    std::vector<std::vector<int>> adj_edge;
    std::vector<std::vector<Message>> msg_in;
    std::unordered_map<std::string, int> id_to_index;
    size_t skipped_urls = 0;       // URLs that failed to parse
    size_t train_test_dupes = 0;   // duplicate URLs assigned to train

    int find(const std::string& id) const;
    int add_node(const std::string& id, NodeKind kind);
    // false when the edge already exists or would be a self-loop
    bool add_edge(int a, int b, EdgeFamily family);
    void clear_messages();
    // recompute msg_sum of node n from stored messages (active edges only)
    void recompute_msg_sum(int n, const std::vector<uint8_t>& edge_active);
};

enum class FoldRole { train, test };

// Assembles the heterogeneous graph: one node per distinct URL, kept
// substring, registered domain, IP and nameserver; edges in the four
// families only. Training URLs carry hard priors, test URLs carry their
// PriorTable row (or [0.5, 0.5]), feature nodes carry [0.5, 0.5]. A URL
// present in both folds is assigned to train. Unparseable URLs are skipped
// and counted.
HetGraph build_graph(const std::vector<UrlRecord>& records, const std::vector<FoldRole>& roles,
                     const PublicSuffixList& psl, const TokenVocabulary& vocabulary,
                     const EnrichmentStore& store, const PriorTable* priors);

// node indices with label 0.5 and predict_label -1, ascending
std::vector<int> hidden_nodes(const HetGraph& graph);

// JSONL round-trip of nodes (all metadata fields, messages included) and
// edges. The first line carries the format version and node/edge counts, so
// truncation is detected on load.
void save_graph(const HetGraph& graph, const std::string& path);
HetGraph load_graph(const std::string& path);

// true when every edge connects the node kinds its family requires
bool edge_families_valid(const HetGraph& graph);

}  // namespace phishgraph
