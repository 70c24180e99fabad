#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "phishgraph/embeddings.hpp"
#include "phishgraph/graph.hpp"

namespace phishgraph {

enum class PotentialMode { epsilon, similarity };
enum class ConvergenceStrategy { fixed_k, delete_cycles };

// Pairwise potential choice. epsilon mode: 0.5-e on equal labels, 0.5+e
// otherwise. similarity mode: min(ths_plus, 1-sim) on equal labels,
// max(ths_minus, sim) otherwise, with sim clamped to [0,1]; edges with a
// missing or zero embedding on either endpoint fall back to epsilon mode
// (counted in the result).
struct EdgePotentialSpec {
    PotentialMode mode = PotentialMode::epsilon;
    double epsilon = 0.1;
    double ths_plus = 0.6;
    double ths_minus = 1.0;
    SimilaritySpec similarity;
};

struct InferenceConfig {
    ConvergenceStrategy strategy = ConvergenceStrategy::delete_cycles;
    int k = 6;                    // fixed_k sweep count
    double tolerance = 1e-6;      // message convergence threshold
    int max_sweeps = 100;         // per round
    double threshold = 0.5;       // classification threshold on phish_score
    bool normalize_messages = true;
};

struct NodeResult {
    std::string node_id;
    double cost_benign = 0.0;
    double cost_phish = 0.0;
    double phish_score = 0.5;
    int predict_label = -1;
};

struct InferenceResult {
    std::vector<NodeResult> nodes;  // one row per originally hidden node
    double cvg = 1.0;               // converged-message fraction at the last sweep
    int rounds = 0;
    size_t sweeps_total = 0;
    size_t edges_deleted = 0;
    size_t edges_restored = 0;
    size_t epsilon_fallback_edges = 0;
    size_t invariant_violations = 0;
    bool forced_readd = false;  // non-termination guard fired
};

struct Classification {
    int label = 1;
    double phish_score = 0.5;
};

// Table-driven pairwise cost for labels l, l_prime in {0 benign, 1 phish}.
double edge_potential(const Node& x, const Node& y, int l, int l_prime,
                      const EdgePotentialSpec& spec, const EmbeddingTable& embeddings);

// One message per Eq.-style min-sum update:
//   msg(l) = min over l' of (1 - prior_x(l')) + psi(l, l') + sum of
//   messages into x excluding the one from y,
// optionally normalized so the smaller component is 0.
Message compute_message(const HetGraph& graph, int x, int y,
                        const std::array<double, 2>& same_diff_cost, bool x_receives,
                        const std::vector<uint8_t>& edge_active, bool normalize);

// Total cost of each label at hidden node x from its prior and stored
// messages. Throws ContractError when x is observed.
std::array<double, 2> node_cost(const HetGraph& graph, int x);

// phish_score = cost_benign / (cost_benign + cost_phish); labels phishing
// when the score is >= t (ties break to phishing). Both costs zero scores
// 0.5.
Classification classify(const std::array<double, 2>& costs, double threshold);

// Min-sum loopy belief propagation engine. Mutates the graph's message
// stores and predict_labels; topology stays intact (edge deactivation is
// engine-internal bookkeeping).
class LbpEngine {
public:
    LbpEngine(HetGraph& graph, const EdgePotentialSpec& spec, const EmbeddingTable& embeddings,
              const InferenceConfig& config);

    // synchronous sweep: every message recomputed from the previous sweep's
    // state, then committed atomically; returns the max componentwise change
    double sweep();

    InferenceResult run_fixed_k();
    InferenceResult run_delete_cycles();
    InferenceResult run();  // dispatches on config.strategy

    const std::vector<uint8_t>& edge_active() const { return edge_active_; }
    size_t epsilon_fallbacks() const { return epsilon_fallback_edges_; }

private:
    struct DirectedMessage {
        int from, to;
        int slot;  // index into msg_in[to]
        int edge;
    };

    void build_potential_cache();
    void rebuild_message_slots();
    void delete_hidden_cycle_edges(std::vector<int>& deleted_order, InferenceResult& result);
    bool hidden_subgraph_acyclic() const;
    void label_node(int idx, std::vector<NodeResult>& rows);

    HetGraph& graph_;
    EdgePotentialSpec spec_;
    const EmbeddingTable& embeddings_;
    InferenceConfig config_;
    // per-edge [same-label cost, different-label cost]
    std::vector<std::array<double, 2>> potential_;
    std::vector<uint8_t> edge_active_;
    std::vector<DirectedMessage> schedule_;
    std::vector<double> last_changes_;
    size_t epsilon_fallback_edges_ = 0;
};

// convenience wrappers matching the two strategies
InferenceResult run_fixed_k(HetGraph& graph, const EdgePotentialSpec& spec,
                            const EmbeddingTable& embeddings, const InferenceConfig& config);
InferenceResult run_delete_cycles(HetGraph& graph, const EdgePotentialSpec& spec,
                                  const EmbeddingTable& embeddings, const InferenceConfig& config);

// CSV `node_id,cost_benign,cost_phish,phish_score,predict_label`
void save_inference_csv(const InferenceResult& result, const std::string& path);

}  // namespace phishgraph
