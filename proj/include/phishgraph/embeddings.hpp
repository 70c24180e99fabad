#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phishgraph/graph.hpp"

namespace phishgraph {

// Dense vectors keyed by entity id (plain tokens for the token table,
// kind-prefixed node ids for the entity table). Entities that ended up with
// a zero vector (out-of-vocabulary URLs, isolated feature nodes) are
// flagged.
struct EmbeddingTable {
    int dimension = 0;
    std::map<std::string, std::vector<float>> vectors;
    bool normalized = false;
    std::set<std::string> zero_flagged;
    std::vector<double> epoch_losses;  // mean SGNS loss per training epoch

    const std::vector<float>* get(const std::string& id) const {
        auto it = vectors.find(id);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

struct EmbeddingParams {
    int dimension = 32;
    int window = 5;
    int epochs = 5;
    int negatives = 5;
    double learning_rate = 0.025;
    uint64_t seed = 1;
};

enum class SimilarityKernel { cosine, rbf };

struct SimilaritySpec {
    SimilarityKernel kernel = SimilarityKernel::cosine;
    double sigma = 1.0;  // rbf only
    // exp(+d^2/(2s^2)) instead of the bounded exp(-d^2/(2s^2)); off by default
    bool rbf_unbounded = false;
};

// Skip-gram with negative sampling over the pruned-vocabulary corpus.
// Single-threaded deterministic update order; same seed, same table.
// Throws DataError on an empty effective vocabulary or dimension < 1.
EmbeddingTable train_token_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                      const TokenVocabulary& vocabulary,
                                      const EmbeddingParams& params);

// Mean of the in-vocabulary token vectors; all-out-of-vocabulary yields a
// zero vector (flag reported through the bool).
std::vector<float> url_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                              bool* all_oov = nullptr);

// Three deterministic passes over the graph: domain vectors from neighbor
// URLs, then IP and nameserver vectors from neighbor domains (uniform
// means). URL and substring vectors must already be present in `table`
// under their node ids. Entities with no vectored neighbors get a zero
// vector and a flag.
EmbeddingTable propagate_entity_vectors(const HetGraph& graph, const EmbeddingTable& table);

// Eq.-style pairwise similarity. cosine: dot/(|x||y|), 0 when either norm
// is 0. rbf: exp(-|x'-y'|^2 / (2 sigma^2)) on L2-normalized copies. Throws
// ContractError on dimension mismatch.
double similarity(const std::vector<float>& x, const std::vector<float>& y,
                  const SimilaritySpec& spec);

// in-place L2 normalization of every vector; zero vectors stay zero and get
// flagged
void normalize_table(EmbeddingTable& table);

// CSV `entity_id,dim,v0..v{d-1}`
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace phishgraph
