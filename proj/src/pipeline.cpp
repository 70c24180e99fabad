#include "phishgraph/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <json.hpp>

#include "phishgraph/common.hpp"
#include "phishgraph/embeddings.hpp"
#include "phishgraph/graph.hpp"
#include "phishgraph/rng.hpp"

namespace phishgraph {

namespace fs = std::filesystem;

namespace {

struct SharedInputs {
    Dataset dataset;
    FoldPlan plan;
    PublicSuffixList psl;
    EnrichmentStore store;
    std::vector<std::optional<UrlAnatomy>> anatomies;
    std::vector<std::vector<std::string>> tokens;  // empty for unparseable rows
    std::vector<std::vector<double>> features;     // empty for unparseable rows
    std::vector<std::string> feature_names;
    uint64_t manifest = 0;
};

SharedInputs prepare_inputs(const RunConfig& config) {
    SharedInputs in;
    if (config.dataset_path.empty()) throw DataError("config key 'dataset' is required");
    if (config.public_suffix_path.empty()) throw DataError("config key 'public_suffix' is required");
    in.dataset = load_dataset(config.dataset_path);
    in.psl = PublicSuffixList::load(config.public_suffix_path);
    if (!config.enrichment_path.empty()) in.store = load_enrichment(config.enrichment_path);
    in.plan = make_folds(in.dataset.records, config.n_folds, config.seed);

    in.feature_names = lexical_feature_names(config.include_domain_contains_address);
    in.manifest = manifest_hash(in.feature_names);
    in.anatomies.resize(in.dataset.records.size());
    in.tokens.resize(in.dataset.records.size());
    in.features.resize(in.dataset.records.size());
    for (size_t i = 0; i < in.dataset.records.size(); ++i) {
        try {
            UrlAnatomy anatomy = parse_url(in.dataset.records[i].url, in.psl);
            in.tokens[i] = tokenize(anatomy);
            in.features[i] = lexical_features(in.dataset.records[i].url, anatomy,
                                              config.include_domain_contains_address)
                                 .values;
            in.anatomies[i] = std::move(anatomy);
        } catch (const DataError&) {
            in.anatomies[i] = std::nullopt;
        }
    }
    return in;
}

ModelKind kind_from_priors_mode(const std::string& mode) {
    if (mode == "rf") return ModelKind::random_forest;
    if (mode == "lr") return ModelKind::logistic_regression;
    return ModelKind::naive_bayes;
}

FoldOutcome run_fold(int fold, const SharedInputs& in, const RunConfig& config,
                     const std::string& fold_dir) {
    FoldOutcome out;
    out.fold = fold;

    const auto& records = in.dataset.records;
    std::vector<FoldRole> roles(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        roles[i] = (in.plan.assignments[i] == fold) ? FoldRole::test : FoldRole::train;
    }

    // vocabulary and corpus from the training fold only
    std::vector<std::vector<std::string>> corpus;
    FeatureMatrix train_x;
    std::vector<int> train_y;
    std::vector<std::string> test_urls;
    FeatureMatrix test_x;
    for (size_t i = 0; i < records.size(); ++i) {
        if (!in.anatomies[i]) {
            ++out.skipped_urls;
            continue;
        }
        if (roles[i] == FoldRole::train) {
            corpus.push_back(in.tokens[i]);
            train_x.push_row(in.features[i]);
            train_y.push_back(records[i].label);
        } else {
            test_urls.push_back(records[i].url);
            test_x.push_row(in.features[i]);
        }
    }
    TokenVocabulary vocab = build_vocabulary(corpus, config.vocab_elbow_normalize);
    out.vocab_kept = vocab.kept.size();
    out.vocab_cutoff = vocab.cutoff_frequency;

    // baselines: all three kinds are evaluated; the configured one feeds
    // the graph priors
    std::map<std::string, TrainedModel> models;
    for (ModelKind kind : {ModelKind::logistic_regression, ModelKind::naive_bayes,
                           ModelKind::random_forest}) {
        BaselineParams params = config.baseline;
        params.kind = kind;
        params.seed = derive_seed(config.seed, model_kind_name(kind), static_cast<uint64_t>(fold));
        models[model_kind_name(kind)] = train(params, train_x, train_y, in.feature_names);
    }

    PriorTable priors;
    const PriorTable* priors_ptr = nullptr;
    if (config.priors_mode != "uniform") {
        const TrainedModel& prior_model =
            models.at(model_kind_name(kind_from_priors_mode(config.priors_mode)));
        priors = export_priors(prior_model, test_urls, test_x, in.manifest);
        priors_ptr = &priors;
    }

    // skip-gram token embeddings on the training corpus
    EmbeddingParams embed_params = config.embed;
    embed_params.seed = derive_seed(config.seed, "embeddings", static_cast<uint64_t>(fold));
    EmbeddingTable token_table = train_token_embeddings(corpus, vocab, embed_params);

    HetGraph graph = build_graph(records, roles, in.psl, vocab, in.store, priors_ptr);
    out.graph_nodes = graph.nodes.size();
    out.graph_edges = graph.edges.size();

    // entity vectors: substrings from the token table, URLs as token means,
    // then neighbor propagation for domains, IPs, nameservers
    EmbeddingTable entity_table;
    entity_table.dimension = token_table.dimension;
    for (const auto& [token, vec] : token_table.vectors) {
        entity_table.vectors["sub:" + token] = vec;
    }
    for (size_t i = 0; i < records.size(); ++i) {
        if (!in.anatomies[i]) continue;
        std::string id = "url:" + records[i].url;
        if (entity_table.vectors.count(id)) continue;
        bool all_oov = false;
        entity_table.vectors[id] = url_vector(in.tokens[i], token_table, &all_oov);
        if (all_oov) entity_table.zero_flagged.insert(id);
    }
    entity_table = propagate_entity_vectors(graph, entity_table);
    normalize_table(entity_table);

    EdgePotentialSpec edge_spec = config.edge;
    edge_spec.similarity = config.sim;
    LbpEngine engine(graph, edge_spec, entity_table, config.lbp);
    InferenceResult inference = engine.run();
    out.cvg = inference.cvg;
    out.rounds = inference.rounds;
    out.sweeps_total = inference.sweeps_total;
    out.edges_deleted = inference.edges_deleted;
    out.edges_restored = inference.edges_restored;
    out.epsilon_fallback_edges = inference.epsilon_fallback_edges;
    out.invariant_violations = inference.invariant_violations;
    out.forced_readd = inference.forced_readd;

    // evaluation over test URLs that became hidden graph nodes (skips
    // unparseable rows and duplicates claimed by the training fold)
    for (size_t i = 0; i < records.size(); ++i) {
        if (roles[i] != FoldRole::test || !in.anatomies[i]) continue;
        int idx = graph.find("url:" + records[i].url);
        if (idx < 0 || graph.nodes[static_cast<size_t>(idx)].label != 0.5) {
            ++out.excluded_test_urls;
            continue;
        }
        out.truth[records[i].url] = records[i].label;
    }
    std::map<std::string, int> predictions;
    for (const auto& row : inference.nodes) {
        if (row.node_id.rfind("url:", 0) != 0) continue;
        std::string url = row.node_id.substr(4);
        if (!out.truth.count(url)) continue;
        predictions[url] = row.predict_label;
        out.scores[url] = row.phish_score;
    }
    out.graph_counts = confusion(predictions, out.truth, config.eval_phishing_positive);
    out.graph_metrics = metrics(out.graph_counts);

    for (const auto& [name, model] : models) {
        std::map<std::string, int> base_pred;
        for (size_t i = 0; i < test_urls.size(); ++i) {
            if (!out.truth.count(test_urls[i])) continue;
            std::vector<double> row(test_x.row(i), test_x.row(i) + test_x.cols);
            auto p = predict_proba(model, row, in.manifest);
            base_pred[test_urls[i]] = p[1] >= 0.5 ? 1 : 0;
        }
        out.baseline_counts[name] = confusion(base_pred, out.truth, config.eval_phishing_positive);
        out.baseline_metrics[name] = metrics(out.baseline_counts[name]);
    }

    if (!fold_dir.empty()) {
        fs::create_directories(fold_dir);
        save_vocabulary(vocab, fold_dir + "/vocabulary.csv");
        save_embeddings(entity_table, fold_dir + "/embeddings.csv");
        if (priors_ptr) save_priors(priors, fold_dir + "/priors.csv");
        save_inference_csv(inference, fold_dir + "/inference.csv");
        nlohmann::ordered_json summary = {
            {"rounds", inference.rounds},
            {"sweeps", inference.sweeps_total},
            {"edges_deleted", inference.edges_deleted},
            {"edges_restored", inference.edges_restored},
            {"cvg", inference.cvg},
            {"epsilon_fallback_edges", inference.epsilon_fallback_edges},
            {"invariant_violations", inference.invariant_violations},
            {"forced_readd", inference.forced_readd},
        };
        std::ofstream summary_out(fold_dir + "/inference_summary.json");
        summary_out << summary.dump(2) << "\n";
        if (config.write_graphs) save_graph(graph, fold_dir + "/graph.jsonl");
    }
    return out;
}

nlohmann::ordered_json metrics_json(const MetricSet& m) {
    return {{"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1},
            {"degenerate", m.degenerate}};
}

nlohmann::ordered_json counts_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

nlohmann::ordered_json aggregate_json(const CvAggregate& agg) {
    return {{"mean_of_folds", metrics_json(agg.mean_of_folds)},
            {"pooled", metrics_json(agg.pooled)},
            {"pooled_counts", counts_json(agg.pooled_counts)}};
}

}  // namespace

std::string resolve_output_dir(const RunConfig& config) {
    if (const char* env = std::getenv("PHISHGRAPH_OUTPUT_DIR")) {
        if (*env) return env;
    }
    return config.output_dir;
}

RunOutcome run_pipeline(const RunConfig& config, const std::string& output_dir) {
    SharedInputs inputs = prepare_inputs(config);

    RunOutcome outcome;
    outcome.dataset_summary = inputs.dataset.summary;
    outcome.folds.resize(static_cast<size_t>(config.n_folds));

    auto fold_dir = [&](int fold) {
        return output_dir.empty() ? std::string()
                                  : output_dir + "/fold" + std::to_string(fold);
    };

    int parallelism = std::max(1, config.parallel_folds);
    if (parallelism == 1) {
        for (int f = 0; f < config.n_folds; ++f) {
            outcome.folds[static_cast<size_t>(f)] = run_fold(f, inputs, config, fold_dir(f));
        }
    } else {
        // fold workers share nothing mutable; outcomes land in fixed slots
        std::vector<std::exception_ptr> errors(static_cast<size_t>(config.n_folds));
        for (int base = 0; base < config.n_folds; base += parallelism) {
            std::vector<std::thread> workers;
            int upper = std::min(config.n_folds, base + parallelism);
            for (int f = base; f < upper; ++f) {
                workers.emplace_back([&, f]() {
                    try {
                        outcome.folds[static_cast<size_t>(f)] =
                            run_fold(f, inputs, config, fold_dir(f));
                    } catch (...) {
                        errors[static_cast<size_t>(f)] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) w.join();
        }
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    std::vector<MetricSet> graph_metrics;
    std::vector<ConfusionCounts> graph_counts;
    std::map<std::string, std::vector<MetricSet>> base_metrics;
    std::map<std::string, std::vector<ConfusionCounts>> base_counts;
    for (const auto& fold : outcome.folds) {
        graph_metrics.push_back(fold.graph_metrics);
        graph_counts.push_back(fold.graph_counts);
        for (const auto& [name, m] : fold.baseline_metrics) base_metrics[name].push_back(m);
        for (const auto& [name, c] : fold.baseline_counts) base_counts[name].push_back(c);
        for (const auto& [url, score] : fold.scores) outcome.pooled_scores[url] = score;
        for (const auto& [url, label] : fold.truth) outcome.pooled_truth[url] = label;
    }
    outcome.graph_agg = aggregate_cv(graph_metrics, graph_counts);
    for (const auto& [name, ms] : base_metrics) {
        outcome.baseline_aggs[name] = aggregate_cv(ms, base_counts[name]);
    }
    outcome.sweep = threshold_sweep(outcome.pooled_scores, outcome.pooled_truth,
                                    sweep_grid(config), config.eval_phishing_positive);
    return outcome;
}

void write_reports(const RunOutcome& outcome, const RunConfig& config,
                   const std::string& output_dir) {
    fs::create_directories(output_dir);

    nlohmann::ordered_json report;
    report["dataset"] = {{"path", config.dataset_path},
                         {"benign", outcome.dataset_summary.benign_count},
                         {"phishing", outcome.dataset_summary.phishing_count},
                         {"duplicate_urls", outcome.dataset_summary.duplicate_urls}};
    // execution-only keys stay out of the report so the same seed yields
    // byte-identical reports regardless of parallelism or output location
    nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.to_map()) {
        if (key == "parallel_folds" || key == "output_dir") continue;
        config_echo[key] = value;
    }
    report["config"] = std::move(config_echo);

    nlohmann::ordered_json folds = nlohmann::json::array();
    for (const auto& fold : outcome.folds) {
        nlohmann::ordered_json baselines = nlohmann::ordered_json::object();
        for (const auto& [name, m] : fold.baseline_metrics) {
            baselines[name] = {{"metrics", metrics_json(m)},
                               {"counts", counts_json(fold.baseline_counts.at(name))}};
        }
        folds.push_back({
            {"fold", fold.fold},
            {"graph", {{"metrics", metrics_json(fold.graph_metrics)},
                       {"counts", counts_json(fold.graph_counts)}}},
            {"baselines", std::move(baselines)},
            {"inference",
             {{"cvg", fold.cvg},
              {"rounds", fold.rounds},
              {"sweeps", fold.sweeps_total},
              {"edges_deleted", fold.edges_deleted},
              {"edges_restored", fold.edges_restored},
              {"epsilon_fallback_edges", fold.epsilon_fallback_edges},
              {"invariant_violations", fold.invariant_violations},
              {"forced_readd", fold.forced_readd}}},
            {"graph_size", {{"nodes", fold.graph_nodes}, {"edges", fold.graph_edges}}},
            {"vocabulary", {{"kept", fold.vocab_kept}, {"cutoff_frequency", fold.vocab_cutoff}}},
            {"skipped_urls", fold.skipped_urls},
            {"excluded_test_urls", fold.excluded_test_urls},
        });
    }
    report["folds"] = std::move(folds);

    nlohmann::ordered_json base_aggs = nlohmann::ordered_json::object();
    for (const auto& [name, agg] : outcome.baseline_aggs) base_aggs[name] = aggregate_json(agg);
    report["aggregate"] = {{"graph", aggregate_json(outcome.graph_agg)},
                           {"baselines", std::move(base_aggs)}};
    report["sweep"] = {{"best_f1_threshold", outcome.sweep.best_f1_threshold},
                       {"best_f1", outcome.sweep.best_f1}};

    std::ofstream report_out(output_dir + "/report.json");
    if (!report_out) throw DataError("cannot write report: " + output_dir + "/report.json");
    report_out << report.dump(2) << "\n";

    save_sweep_csv(outcome.sweep, output_dir + "/sweep.csv");

    std::ofstream config_out(output_dir + "/config_effective.ini");
    if (!config_out) throw DataError("cannot write config echo");
    for (const auto& [key, value] : config.to_map()) config_out << key << " = " << value << "\n";
}

void export_graph(const RunConfig& config, int fold, const std::string& path) {
    if (fold < 0 || fold >= config.n_folds) throw DataError("fold out of range");
    SharedInputs inputs = prepare_inputs(config);
    const auto& records = inputs.dataset.records;
    std::vector<FoldRole> roles(records.size());
    std::vector<std::vector<std::string>> corpus;
    for (size_t i = 0; i < records.size(); ++i) {
        roles[i] = (inputs.plan.assignments[i] == fold) ? FoldRole::test : FoldRole::train;
        if (roles[i] == FoldRole::train && inputs.anatomies[i]) corpus.push_back(inputs.tokens[i]);
    }
    TokenVocabulary vocab = build_vocabulary(corpus, config.vocab_elbow_normalize);
    HetGraph graph = build_graph(records, roles, inputs.psl, vocab, inputs.store, nullptr);
    save_graph(graph, path);
}

}  // namespace phishgraph
