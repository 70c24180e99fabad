#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "phishgraph/common.hpp"
#include "phishgraph/embeddings.hpp"
#include "phishgraph/rng.hpp"

using namespace phishgraph;

namespace {

TokenVocabulary keep_all(const std::vector<std::vector<std::string>>& corpus) {
    TokenVocabulary vocab;
    for (const auto& seq : corpus) {
        for (const auto& t : seq) ++vocab.counts[t];
    }
    vocab.cutoff_frequency = 0;
    for (const auto& [t, f] : vocab.counts) {
        vocab.cutoff_frequency = std::max(vocab.cutoff_frequency, f);
        vocab.kept.insert(t);
    }
    return vocab;
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    SimilaritySpec spec;
    spec.kernel = SimilarityKernel::cosine;
    return similarity(a, b, spec);
}

}  // namespace

TEST_SUITE("embeddings") {

TEST_CASE("planted clusters: co-occurring tokens end up more similar") {
    // three clusters of tokens that only co-occur within their cluster
    std::vector<std::vector<std::string>> corpus;
    const std::vector<std::vector<std::string>> clusters = {
        {"apple", "banana", "cherry"}, {"login", "verify", "secure"}, {"one", "two", "three"}};
    SplitMix64 rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        const auto& cluster = clusters[rng.next_below(3)];
        std::vector<std::string> seq;
        for (int i = 0; i < 6; ++i) seq.push_back(cluster[rng.next_below(3)]);
        corpus.push_back(seq);
    }
    EmbeddingParams params;
    params.dimension = 16;
    params.epochs = 8;
    params.seed = 4;
    auto table = train_token_embeddings(corpus, keep_all(corpus), params);

    double within = cosine(*table.get("apple"), *table.get("banana"));
    double across1 = cosine(*table.get("apple"), *table.get("login"));
    double across2 = cosine(*table.get("apple"), *table.get("two"));
    CHECK(within > across1);
    CHECK(within > across2);
}

TEST_CASE("dimension 0 is rejected") {
    EmbeddingParams params;
    params.dimension = 0;
    CHECK_THROWS_AS(train_token_embeddings({{"a", "b"}}, keep_all({{"a", "b"}}), params),
                    DataError);
}

TEST_CASE("empty effective vocabulary is rejected") {
    TokenVocabulary empty_vocab;
    EmbeddingParams params;
    CHECK_THROWS_AS(train_token_embeddings({{"a", "b"}}, empty_vocab, params), DataError);
}

TEST_CASE("same seed trains identical tables") {
    std::vector<std::vector<std::string>> corpus = {
        {"a", "b", "c", "a"}, {"b", "c", "d"}, {"a", "d", "c", "b"}};
    EmbeddingParams params;
    params.dimension = 8;
    params.seed = 77;
    auto t1 = train_token_embeddings(corpus, keep_all(corpus), params);
    auto t2 = train_token_embeddings(corpus, keep_all(corpus), params);
    REQUIRE(t1.vectors.size() == t2.vectors.size());
    for (const auto& [token, vec] : t1.vectors) {
        REQUIRE(t2.vectors.count(token) == 1);
        CHECK(vec == t2.vectors.at(token));
    }
}

TEST_CASE("training loss is finite every epoch and weights contain no NaN") {
    std::vector<std::vector<std::string>> corpus;
    SplitMix64 rng(8);
    std::vector<std::string> vocab_tokens = {"aa", "bb", "cc", "dd", "ee", "ff"};
    for (int i = 0; i < 60; ++i) {
        std::vector<std::string> seq;
        for (int k = 0; k < 5; ++k) seq.push_back(vocab_tokens[rng.next_below(6)]);
        corpus.push_back(seq);
    }
    EmbeddingParams params;
    params.dimension = 12;
    params.epochs = 4;
    auto table = train_token_embeddings(corpus, keep_all(corpus), params);
    REQUIRE(table.epoch_losses.size() == 4);
    for (double loss : table.epoch_losses) {
        CHECK(std::isfinite(loss));
        CHECK(loss >= 0.0);
    }
    for (const auto& [token, vec] : table.vectors) {
        for (float w : vec) CHECK(std::isfinite(w));
    }
}

TEST_CASE("url_vector is the mean of in-vocabulary token vectors") {
    EmbeddingTable table;
    table.dimension = 2;
    table.vectors["a"] = {2.0f, 4.0f};
    table.vectors["b"] = {0.0f, 2.0f};

    SUBCASE("single token is that token's vector") {
        auto v = url_vector({"a"}, table);
        CHECK(v == std::vector<float>{2.0f, 4.0f});
    }
    SUBCASE("two tokens average") {
        auto v = url_vector({"a", "b"}, table);
        CHECK(v == std::vector<float>{1.0f, 3.0f});
    }
    SUBCASE("out-of-vocabulary tokens are skipped") {
        auto v = url_vector({"a", "zzz"}, table);
        CHECK(v == std::vector<float>{2.0f, 4.0f});
    }
    SUBCASE("all out-of-vocabulary flags a zero vector") {
        bool all_oov = false;
        auto v = url_vector({"zzz"}, table, &all_oov);
        CHECK(all_oov);
        CHECK(v == std::vector<float>{0.0f, 0.0f});
    }
}

TEST_CASE("entity propagation pulls vectors through the graph") {
    HetGraph g;
    int u1 = g.add_node("url:http://a.com/x", NodeKind::url);
    int u2 = g.add_node("url:http://b.com/y", NodeKind::url);
    int d1 = g.add_node("dom:a.com", NodeKind::domain);
    int d2 = g.add_node("dom:b.com", NodeKind::domain);
    int ip = g.add_node("ip:1.2.3.4", NodeKind::ip);
    int ns = g.add_node("ns:ns1.h.net", NodeKind::nameserver);
    int lonely = g.add_node("ns:isolated.net", NodeKind::nameserver);
    g.add_edge(u1, d1, EdgeFamily::url_domain);
    g.add_edge(u2, d2, EdgeFamily::url_domain);
    g.add_edge(d1, ip, EdgeFamily::domain_ip);
    g.add_edge(d2, ip, EdgeFamily::domain_ip);
    g.add_edge(d1, ns, EdgeFamily::domain_ns);
    (void)lonely;

    EmbeddingTable table;
    table.dimension = 2;
    table.vectors["url:http://a.com/x"] = {1.0f, 0.0f};
    table.vectors["url:http://b.com/y"] = {0.0f, 1.0f};

    auto out = propagate_entity_vectors(g, table);

    // domain of one URL equals that URL's vector
    CHECK(*out.get("dom:a.com") == std::vector<float>{1.0f, 0.0f});
    // IP shared by two domains is their mean
    CHECK(*out.get("ip:1.2.3.4") == std::vector<float>{0.5f, 0.5f});
    // nameserver of a single domain copies it
    CHECK(*out.get("ns:ns1.h.net") == std::vector<float>{1.0f, 0.0f});
    // isolated entity: zero vector, flagged
    CHECK(*out.get("ns:isolated.net") == std::vector<float>{0.0f, 0.0f});
    CHECK(out.zero_flagged.count("ns:isolated.net") == 1);
}

TEST_CASE("propagation is idempotent per pass") {
    HetGraph g;
    int u = g.add_node("url:http://a.com", NodeKind::url);
    int d = g.add_node("dom:a.com", NodeKind::domain);
    g.add_edge(u, d, EdgeFamily::url_domain);
    EmbeddingTable table;
    table.dimension = 2;
    table.vectors["url:http://a.com"] = {0.5f, -1.5f};
    auto once = propagate_entity_vectors(g, table);
    auto twice = propagate_entity_vectors(g, once);
    CHECK(*once.get("dom:a.com") == *twice.get("dom:a.com"));
}

TEST_CASE("similarity: identities and cases") {
    SimilaritySpec cos;
    cos.kernel = SimilarityKernel::cosine;
    SimilaritySpec rbf;
    rbf.kernel = SimilarityKernel::rbf;
    rbf.sigma = 1.0;

    std::vector<float> x = {3.0f, 4.0f};
    CHECK(similarity(x, x, cos) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(similarity(x, x, rbf) == doctest::Approx(1.0));

    std::vector<float> e1 = {1.0f, 0.0f}, e2 = {0.0f, 1.0f};
    CHECK(similarity(e1, e2, cos) == doctest::Approx(0.0));

    std::vector<float> zero = {0.0f, 0.0f};
    CHECK(similarity(zero, x, cos) == 0.0);

    CHECK_THROWS_AS(similarity({1.0f}, {1.0f, 2.0f}, cos), ContractError);
}

TEST_CASE("rbf literal mode is the unbounded printed form") {
    SimilaritySpec literal;
    literal.kernel = SimilarityKernel::rbf;
    literal.sigma = 1.0;
    literal.rbf_unbounded = true;
    std::vector<float> e1 = {1.0f, 0.0f}, e2 = {0.0f, 1.0f};
    // normalized distance^2 = 2 -> exp(+1) > 1 in literal mode
    CHECK(similarity(e1, e2, literal) == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
    literal.rbf_unbounded = false;
    CHECK(similarity(e1, e2, literal) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("similarity bounds and symmetry on random vectors") {
    SplitMix64 rng(1234);
    SimilaritySpec cos;
    cos.kernel = SimilarityKernel::cosine;
    SimilaritySpec rbf;
    rbf.kernel = SimilarityKernel::rbf;
    for (int trial = 0; trial < 500; ++trial) {
        size_t n = 1 + rng.next_below(24);
        std::vector<float> x(n), y(n);
        for (auto& v : x) v = rng.next_float() * 6.0f - 3.0f;
        for (auto& v : y) v = rng.next_float() * 6.0f - 3.0f;
        double c = similarity(x, y, cos);
        CHECK(c >= -1.0 - 1e-6);
        CHECK(c <= 1.0 + 1e-6);
        CHECK(c == doctest::Approx(similarity(y, x, cos)).epsilon(1e-12));
        double r = similarity(x, y, rbf);
        CHECK(r > 0.0);
        CHECK(r <= 1.0);
        CHECK(r == doctest::Approx(similarity(y, x, rbf)).epsilon(1e-12));
    }
}

TEST_CASE("normalize_table produces unit vectors and flags zeros") {
    EmbeddingTable table;
    table.dimension = 3;
    table.vectors["a"] = {3.0f, 0.0f, 4.0f};
    table.vectors["z"] = {0.0f, 0.0f, 0.0f};
    normalize_table(table);
    CHECK(table.normalized);
    float norm = 0.0f;
    for (float v : *table.get("a")) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0f).epsilon(1e-6));
    CHECK(table.zero_flagged.count("z") == 1);
}

TEST_CASE("embedding table round-trips through CSV") {
    EmbeddingTable table;
    table.dimension = 3;
    table.vectors["sub:login"] = {0.25f, -1.5f, 0.625f};
    table.vectors["url:http://a.com/x,y"] = {1.0f, 2.0f, 3.0f};
    auto path = (std::filesystem::temp_directory_path() / "pg_embed.csv").string();
    save_embeddings(table, path);
    auto loaded = load_embeddings(path);
    CHECK(loaded.dimension == 3);
    REQUIRE(loaded.vectors.size() == 2);
    for (const auto& [id, vec] : table.vectors) {
        REQUIRE(loaded.vectors.count(id) == 1);
        for (size_t i = 0; i < vec.size(); ++i) {
            CHECK(loaded.vectors.at(id)[i] == doctest::Approx(vec[i]).epsilon(1e-6));
        }
    }
}

}  // TEST_SUITE
