#include "phishgraph/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "phishgraph/common.hpp"
#include "phishgraph/csv.hpp"
#include "phishgraph/rng.hpp"
#include "phishgraph/simd/kernels.hpp"

namespace phishgraph {

namespace {

float sigmoidf(float v) { return 1.0f / (1.0f + std::exp(-v)); }

}  // namespace

EmbeddingTable train_token_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                      const TokenVocabulary& vocabulary,
                                      const EmbeddingParams& params) {
    if (params.dimension < 1) throw DataError("embedding dimension must be >= 1");
    if (corpus.empty()) throw DataError("empty embedding corpus");

    // index the kept vocabulary in sorted order; count in-corpus occurrences
    std::vector<std::string> tokens(vocabulary.kept.begin(), vocabulary.kept.end());
    std::map<std::string, int> token_index;
    for (size_t i = 0; i < tokens.size(); ++i) token_index[tokens[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> sequences;
    std::vector<uint64_t> occurrence(tokens.size(), 0);
    uint64_t total_positions = 0;
    for (const auto& seq : corpus) {
        std::vector<int> ids;
        for (const auto& t : seq) {
            auto it = token_index.find(t);
            if (it == token_index.end()) continue;
            ids.push_back(it->second);
            ++occurrence[static_cast<size_t>(it->second)];
        }
        total_positions += ids.size();
        if (ids.size() >= 2) sequences.push_back(std::move(ids));
    }
    if (tokens.empty() || total_positions == 0) {
        throw DataError("empty vocabulary after pruning; cannot train embeddings");
    }

    size_t v = tokens.size();
    size_t dim = static_cast<size_t>(params.dimension);

    // unigram^(3/4) cumulative table for negative sampling
    std::vector<double> neg_cdf(v);
    double cum = 0.0;
    for (size_t i = 0; i < v; ++i) {
        cum += std::pow(static_cast<double>(occurrence[i]) + 1.0, 0.75);
        neg_cdf[i] = cum;
    }
    for (auto& c : neg_cdf) c /= cum;

    SplitMix64 rng(derive_seed(params.seed, "sgns"));
    std::vector<float> syn0(v * dim);
    std::vector<float> syn1(v * dim, 0.0f);
    for (auto& w : syn0) {
        w = (rng.next_float() - 0.5f) / static_cast<float>(dim);
    }

    auto sample_negative = [&]() -> int {
        double r = rng.next_double();
        auto it = std::lower_bound(neg_cdf.begin(), neg_cdf.end(), r);
        return static_cast<int>(std::min<size_t>(
            static_cast<size_t>(it - neg_cdf.begin()), v - 1));
    };

    uint64_t total_words = total_positions * static_cast<uint64_t>(params.epochs);
    uint64_t processed = 0;
    float alpha = static_cast<float>(params.learning_rate);
    std::vector<float> neu1e(dim);
    std::vector<double> epoch_losses;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        double loss_sum = 0.0;
        uint64_t loss_terms = 0;
        for (const auto& seq : sequences) {
            int len = static_cast<int>(seq.size());
            for (int pos = 0; pos < len; ++pos) {
                ++processed;
                if (processed % 1024 == 0) {
                    double progress = static_cast<double>(processed) /
                                      static_cast<double>(std::max<uint64_t>(total_words, 1));
                    alpha = static_cast<float>(
                        std::max(params.learning_rate * (1.0 - progress),
                                 params.learning_rate * 1e-4));
                }
                int center = seq[static_cast<size_t>(pos)];
                int lo = std::max(0, pos - params.window);
                int hi = std::min(len - 1, pos + params.window);
                for (int c = lo; c <= hi; ++c) {
                    if (c == pos) continue;
                    int context = seq[static_cast<size_t>(c)];
                    float* input = syn0.data() + static_cast<size_t>(context) * dim;
                    std::fill(neu1e.begin(), neu1e.end(), 0.0f);
                    for (int neg = 0; neg <= params.negatives; ++neg) {
                        int target;
                        float truth;
                        if (neg == 0) {
                            target = center;
                            truth = 1.0f;
                        } else {
                            target = sample_negative();
                            if (target == center) continue;
                            truth = 0.0f;
                        }
                        float* output = syn1.data() + static_cast<size_t>(target) * dim;
                        float f = simd::dot(input, output, dim);
                        float p = sigmoidf(f);
                        float g = (truth - p) * alpha;
                        // -log sigmoid(f) for positives, -log sigmoid(-f) for negatives
                        loss_sum -= std::log(std::max(truth > 0.5f ? p : 1.0f - p, 1e-10f));
                        ++loss_terms;
                        simd::axpy(g, output, neu1e.data(), dim);
                        simd::axpy(g, input, output, dim);
                    }
                    simd::add_into(input, neu1e.data(), dim);
                }
            }
        }
        double epoch_loss = loss_terms ? loss_sum / static_cast<double>(loss_terms) : 0.0;
        if (!std::isfinite(epoch_loss)) {
            throw DataError("embedding training diverged at epoch " + std::to_string(epoch));
        }
        epoch_losses.push_back(epoch_loss);
    }

    EmbeddingTable table;
    table.dimension = params.dimension;
    table.epoch_losses = std::move(epoch_losses);
    for (size_t i = 0; i < v; ++i) {
        std::vector<float> vec(syn0.begin() + static_cast<long>(i * dim),
                               syn0.begin() + static_cast<long>((i + 1) * dim));
        for (float w : vec) {
            if (!std::isfinite(w)) throw DataError("non-finite embedding weight for " + tokens[i]);
        }
        table.vectors[tokens[i]] = std::move(vec);
    }
    return table;
}

std::vector<float> url_vector(const std::vector<std::string>& tokens, const EmbeddingTable& table,
                              bool* all_oov) {
    std::vector<float> acc(static_cast<size_t>(table.dimension), 0.0f);
    size_t found = 0;
    for (const auto& t : tokens) {
        if (const auto* vec = table.get(t)) {
            simd::add_into(acc.data(), vec->data(), acc.size());
            ++found;
        }
    }
    if (found > 0) {
        simd::scale(acc.data(), 1.0f / static_cast<float>(found), acc.size());
    }
    if (all_oov) *all_oov = (found == 0);
    return acc;
}

EmbeddingTable propagate_entity_vectors(const HetGraph& graph, const EmbeddingTable& table) {
    EmbeddingTable out = table;
    size_t dim = static_cast<size_t>(out.dimension);

    auto mean_of_neighbors = [&](int node, NodeKind neighbor_kind) {
        std::vector<float> acc(dim, 0.0f);
        size_t found = 0;
        for (int nbr : graph.adjacency[static_cast<size_t>(node)]) {
            const Node& nn = graph.nodes[static_cast<size_t>(nbr)];
            if (nn.kind != neighbor_kind) continue;
            if (const auto* vec = out.get(nn.id)) {
                simd::add_into(acc.data(), vec->data(), dim);
                ++found;
            }
        }
        if (found > 0) simd::scale(acc.data(), 1.0f / static_cast<float>(found), dim);
        return std::make_pair(std::move(acc), found);
    };

    // stated pass order: domains, then IPs, then nameservers
    const std::pair<NodeKind, NodeKind> passes[] = {
        {NodeKind::domain, NodeKind::url},
        {NodeKind::ip, NodeKind::domain},
        {NodeKind::nameserver, NodeKind::domain},
    };
    for (const auto& [target_kind, source_kind] : passes) {
        for (size_t i = 0; i < graph.nodes.size(); ++i) {
            const Node& n = graph.nodes[i];
            if (n.kind != target_kind) continue;
            auto [vec, found] = mean_of_neighbors(static_cast<int>(i), source_kind);
            if (found == 0) out.zero_flagged.insert(n.id);
            out.vectors[n.id] = std::move(vec);
        }
    }
    return out;
}

double similarity(const std::vector<float>& x, const std::vector<float>& y,
                  const SimilaritySpec& spec) {
    if (x.size() != y.size()) throw ContractError("similarity: dimension mismatch");
    size_t n = x.size();
    if (spec.kernel == SimilarityKernel::cosine) {
        double nx = std::sqrt(static_cast<double>(simd::squared_l2(x.data(), n)));
        double ny = std::sqrt(static_cast<double>(simd::squared_l2(y.data(), n)));
        if (nx == 0.0 || ny == 0.0) return 0.0;
        return static_cast<double>(simd::dot(x.data(), y.data(), n)) / (nx * ny);
    }
    // rbf on L2-normalized copies
    std::vector<float> xn = x, yn = y;
    float nx = std::sqrt(simd::squared_l2(xn.data(), n));
    float ny = std::sqrt(simd::squared_l2(yn.data(), n));
    if (nx > 0.0f) simd::scale(xn.data(), 1.0f / nx, n);
    if (ny > 0.0f) simd::scale(yn.data(), 1.0f / ny, n);
    double d2 = static_cast<double>(simd::squared_distance(xn.data(), yn.data(), n));
    double exponent = d2 / (2.0 * spec.sigma * spec.sigma);
    return spec.rbf_unbounded ? std::exp(exponent) : std::exp(-exponent);
}

void normalize_table(EmbeddingTable& table) {
    for (auto& [id, vec] : table.vectors) {
        float norm = std::sqrt(simd::squared_l2(vec.data(), vec.size()));
        if (norm > 0.0f) {
            simd::scale(vec.data(), 1.0f / norm, vec.size());
        } else {
            table.zero_flagged.insert(id);
        }
    }
    table.normalized = true;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embeddings file: " + path);
    out << "entity_id,dim";
    for (int i = 0; i < table.dimension; ++i) out << ",v" << i;
    out << "\n";
    char buf[48];
    for (const auto& [id, vec] : table.vectors) {
        out << csv::quote_field(id) << "," << table.dimension;
        for (float w : vec) {
            snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(w));
            out << buf;
        }
        out << "\n";
    }
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty embeddings file: " + path);
    EmbeddingTable table;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() < 3) {
            throw DataError("bad embeddings row at line " + std::to_string(line_no));
        }
        try {
            int dim = std::stoi(fields[1]);
            if (table.dimension == 0) table.dimension = dim;
            if (dim != table.dimension || fields.size() != static_cast<size_t>(dim) + 2) {
                throw DataError("dimension mismatch at line " + std::to_string(line_no));
            }
            std::vector<float> vec(static_cast<size_t>(dim));
            for (int i = 0; i < dim; ++i) {
                vec[static_cast<size_t>(i)] = std::stof(fields[static_cast<size_t>(i) + 2]);
            }
            table.vectors[fields[0]] = std::move(vec);
        } catch (const DataError&) {
            throw;
        } catch (const std::exception&) {
            throw DataError("bad embeddings value at line " + std::to_string(line_no));
        }
    }
    return table;
}

}  // namespace phishgraph
