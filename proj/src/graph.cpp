#include "phishgraph/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "phishgraph/common.hpp"

namespace phishgraph {

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::url: return "url";
        case NodeKind::substring: return "substring";
        case NodeKind::domain: return "domain";
        case NodeKind::ip: return "ip";
        case NodeKind::nameserver: return "nameserver";
    }
    return "unknown";
}

NodeKind node_kind_from_name(const std::string& name) {
    if (name == "url") return NodeKind::url;
    if (name == "substring") return NodeKind::substring;
    if (name == "domain") return NodeKind::domain;
    if (name == "ip") return NodeKind::ip;
    if (name == "nameserver") return NodeKind::nameserver;
    throw DataError("unknown node kind: " + name);
}

const char* edge_family_name(EdgeFamily f) {
    switch (f) {
        case EdgeFamily::url_domain: return "url-domain";
        case EdgeFamily::domain_ip: return "domain-ip";
        case EdgeFamily::domain_ns: return "domain-ns";
        case EdgeFamily::url_substring: return "url-substring";
    }
    return "unknown";
}

EdgeFamily edge_family_from_name(const std::string& name) {
    if (name == "url-domain") return EdgeFamily::url_domain;
    if (name == "domain-ip") return EdgeFamily::domain_ip;
    if (name == "domain-ns") return EdgeFamily::domain_ns;
    if (name == "url-substring") return EdgeFamily::url_substring;
    throw DataError("unknown edge family: " + name);
}

int HetGraph::find(const std::string& id) const {
    auto it = id_to_index.find(id);
    return it == id_to_index.end() ? -1 : it->second;
}

int HetGraph::add_node(const std::string& id, NodeKind kind) {
    if (int existing = find(id); existing >= 0) return existing;
    int idx = static_cast<int>(nodes.size());
    Node n;
    n.id = id;
    n.kind = kind;
    nodes.push_back(std::move(n));
    adjacency.emplace_back();
    adj_edge.emplace_back();
    msg_in.emplace_back();
    id_to_index[id] = idx;
    return idx;
}

bool HetGraph::add_edge(int a, int b, EdgeFamily family) {
    if (a == b) return false;
    for (int nbr : adjacency[a]) {
        if (nbr == b) return false;  // parallel edge
    }
    int edge_idx = static_cast<int>(edges.size());
    edges.push_back(Edge{a, b, family});
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
    adj_edge[a].push_back(edge_idx);
    adj_edge[b].push_back(edge_idx);
    msg_in[a].push_back(Message{0.0, 0.0});
    msg_in[b].push_back(Message{0.0, 0.0});
    return true;
}

void HetGraph::clear_messages() {
    for (auto& msgs : msg_in) {
        for (auto& m : msgs) m = Message{0.0, 0.0};
    }
    for (auto& n : nodes) n.msg_sum = {0.0, 0.0};
}

void HetGraph::recompute_msg_sum(int n, const std::vector<uint8_t>& edge_active) {
    Message sum{0.0, 0.0};
    for (size_t i = 0; i < adjacency[static_cast<size_t>(n)].size(); ++i) {
        if (!edge_active[static_cast<size_t>(adj_edge[static_cast<size_t>(n)][i])]) continue;
        sum[0] += msg_in[static_cast<size_t>(n)][i][0];
        sum[1] += msg_in[static_cast<size_t>(n)][i][1];
    }
    nodes[static_cast<size_t>(n)].msg_sum = sum;
}

HetGraph build_graph(const std::vector<UrlRecord>& records, const std::vector<FoldRole>& roles,
                     const PublicSuffixList& psl, const TokenVocabulary& vocabulary,
                     const EnrichmentStore& store, const PriorTable* priors) {
    if (records.size() != roles.size()) throw ContractError("records/roles size mismatch");

    HetGraph g;
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        UrlAnatomy anatomy;
        try {
            anatomy = parse_url(rec.url, psl);
        } catch (const DataError&) {
            ++g.skipped_urls;
            continue;
        }

        std::string url_id = "url:" + rec.url;
        bool is_train = roles[i] == FoldRole::train;
        int url_idx = g.find(url_id);
        if (url_idx < 0) {
            url_idx = g.add_node(url_id, NodeKind::url);
            Node& n = g.nodes[static_cast<size_t>(url_idx)];
            if (is_train) {
                n.label = static_cast<double>(rec.label);
                n.prior = rec.label == 0 ? std::array<double, 2>{1.0, 0.0}
                                         : std::array<double, 2>{0.0, 1.0};
            } else {
                n.label = 0.5;
                n.prior = {0.5, 0.5};
                if (priors) {
                    if (auto it = priors->find(rec.url); it != priors->end()) n.prior = it->second;
                }
            }
        } else {
            // duplicate URL; if it spans both folds, observed wins
            Node& n = g.nodes[static_cast<size_t>(url_idx)];
            if (is_train && n.label == 0.5) {
                n.label = static_cast<double>(rec.label);
                n.prior = rec.label == 0 ? std::array<double, 2>{1.0, 0.0}
                                         : std::array<double, 2>{0.0, 1.0};
                ++g.train_test_dupes;
            } else if (!is_train && n.label != 0.5) {
                ++g.train_test_dupes;
            }
        }

        std::string domain = anatomy.registered_domain();
        int dom_idx = g.add_node("dom:" + domain, NodeKind::domain);
        g.add_edge(url_idx, dom_idx, EdgeFamily::url_domain);

        if (auto rec_opt = store.get(domain)) {
            for (const auto& ip : rec_opt->ips) {
                int ip_idx = g.add_node("ip:" + ip, NodeKind::ip);
                g.add_edge(dom_idx, ip_idx, EdgeFamily::domain_ip);
            }
            for (const auto& ns : rec_opt->nameservers) {
                int ns_idx = g.add_node("ns:" + ns, NodeKind::nameserver);
                g.add_edge(dom_idx, ns_idx, EdgeFamily::domain_ns);
            }
        }

        for (const auto& token : tokenize(anatomy)) {
            if (!vocabulary.contains(token)) continue;
            int sub_idx = g.add_node("sub:" + token, NodeKind::substring);
            g.add_edge(url_idx, sub_idx, EdgeFamily::url_substring);
        }
    }
    return g;
}

std::vector<int> hidden_nodes(const HetGraph& graph) {
    std::vector<int> hidden;
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        if (graph.nodes[i].is_hidden()) hidden.push_back(static_cast<int>(i));
    }
    return hidden;
}

bool edge_families_valid(const HetGraph& graph) {
    for (const auto& e : graph.edges) {
        NodeKind ka = graph.nodes[static_cast<size_t>(e.a)].kind;
        NodeKind kb = graph.nodes[static_cast<size_t>(e.b)].kind;
        auto matches = [&](NodeKind x, NodeKind y) {
            return (ka == x && kb == y) || (ka == y && kb == x);
        };
        bool ok = false;
        switch (e.family) {
            case EdgeFamily::url_domain: ok = matches(NodeKind::url, NodeKind::domain); break;
            case EdgeFamily::domain_ip: ok = matches(NodeKind::domain, NodeKind::ip); break;
            case EdgeFamily::domain_ns: ok = matches(NodeKind::domain, NodeKind::nameserver); break;
            case EdgeFamily::url_substring: ok = matches(NodeKind::url, NodeKind::substring); break;
        }
        if (!ok) return false;
    }
    return true;
}

// ============================================================================
// Serialization
// ============================================================================

void save_graph(const HetGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write graph file: " + path);

    nlohmann::ordered_json header;
    header["version"] = 1;
    header["nodes"] = graph.nodes.size();
    header["edges"] = graph.edges.size();
    out << header.dump() << "\n";

    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const Node& n = graph.nodes[i];
        nlohmann::ordered_json msg_nbr = nlohmann::ordered_json::object();
        for (size_t k = 0; k < graph.adjacency[i].size(); ++k) {
            const auto& m = graph.msg_in[i][k];
            if (m[0] == 0.0 && m[1] == 0.0) continue;
            msg_nbr[graph.nodes[static_cast<size_t>(graph.adjacency[i][k])].id] = m;
        }
        nlohmann::ordered_json j;
        j["node"] = {
            {"id", n.id},
            {"kind", node_kind_name(n.kind)},
            {"label", n.label},
            {"predict_label", n.predict_label},
            {"prior", n.prior},
            {"msg_sum", n.msg_sum},
            {"msg_nbr", std::move(msg_nbr)},
        };
        out << j.dump() << "\n";
    }
    for (const auto& e : graph.edges) {
        nlohmann::ordered_json j;
        j["edge"] = {graph.nodes[static_cast<size_t>(e.a)].id,
                     graph.nodes[static_cast<size_t>(e.b)].id, edge_family_name(e.family)};
        out << j.dump() << "\n";
    }
}

HetGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty graph file: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed graph header: " + std::string(e.what()));
    }
    if (!header.contains("version") || header["version"].get<int>() != 1) {
        throw DataError("unsupported graph file version in " + path);
    }
    size_t n_nodes = header["nodes"].get<size_t>();
    size_t n_edges = header["edges"].get<size_t>();

    HetGraph g;
    size_t line_no = 1;
    std::vector<nlohmann::json> pending_msgs;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("malformed graph record at line " + std::to_string(line_no) + ": " +
                            e.what());
        }
        try {
            if (j.contains("node")) {
                const auto& nj = j["node"];
                int idx = g.add_node(nj["id"].get<std::string>(),
                                     node_kind_from_name(nj["kind"].get<std::string>()));
                Node& n = g.nodes[static_cast<size_t>(idx)];
                n.label = nj["label"].get<double>();
                n.predict_label = nj["predict_label"].get<int>();
                n.prior = nj["prior"].get<std::array<double, 2>>();
                n.msg_sum = nj["msg_sum"].get<std::array<double, 2>>();
                pending_msgs.push_back(nj["msg_nbr"]);
            } else if (j.contains("edge")) {
                const auto& ej = j["edge"];
                int a = g.find(ej[0].get<std::string>());
                int b = g.find(ej[1].get<std::string>());
                if (a < 0 || b < 0) {
                    throw DataError("edge references unknown node at line " +
                                    std::to_string(line_no));
                }
                g.add_edge(a, b, edge_family_from_name(ej[2].get<std::string>()));
            } else {
                throw DataError("unknown graph record at line " + std::to_string(line_no));
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad graph record at line " + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    if (g.nodes.size() != n_nodes || g.edges.size() != n_edges) {
        throw DataError("truncated graph file: expected " + std::to_string(n_nodes) + " nodes/" +
                        std::to_string(n_edges) + " edges, found " +
                        std::to_string(g.nodes.size()) + "/" + std::to_string(g.edges.size()));
    }
    // messages can only be wired once edges exist
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& msgs = pending_msgs[i];
        for (auto it = msgs.begin(); it != msgs.end(); ++it) {
            int nbr = g.find(it.key());
            if (nbr < 0) throw DataError("msg_nbr references unknown node: " + it.key());
            for (size_t k = 0; k < g.adjacency[i].size(); ++k) {
                if (g.adjacency[i][k] == nbr) {
                    g.msg_in[i][k] = it.value().get<Message>();
                    break;
                }
            }
        }
    }
    return g;
}

}  // namespace phishgraph
