#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phishgraph/common.hpp"
#include "phishgraph/config.hpp"
#include "phishgraph/dataset.hpp"
#include "phishgraph/enrichment.hpp"
#include "phishgraph/pipeline.hpp"
#include "phishgraph/url_parser.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDataError = 2;
constexpr int kExitPipelineError = 3;

phishgraph::RunConfig load_config_with_overrides(const std::string& config_path,
                                                 const std::vector<std::string>& overrides) {
    auto config = phishgraph::RunConfig::load(config_path);
    for (const auto& kv : overrides) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw phishgraph::DataError("--set expects key=value, got '" + kv + "'");
        }
        config.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
}

int cmd_ingest(const std::string& dataset_path) {
    auto dataset = phishgraph::load_dataset(dataset_path);
    std::cout << "records: " << dataset.records.size() << "\n"
              << "benign: " << dataset.summary.benign_count << "\n"
              << "phishing: " << dataset.summary.phishing_count << "\n";
    if (dataset.summary.duplicate_urls > 0) {
        std::cout << "warning: " << dataset.summary.duplicate_urls << " duplicate URL(s)\n";
    }
    return kExitOk;
}

int cmd_enrich(const std::string& config_path, const std::vector<std::string>& overrides,
               const std::string& missing_out) {
    auto config = load_config_with_overrides(config_path, overrides);
    auto dataset = phishgraph::load_dataset(config.dataset_path);
    auto psl = phishgraph::PublicSuffixList::load(config.public_suffix_path);
    auto store = phishgraph::load_enrichment(config.enrichment_path);

    std::set<std::string> domains;
    size_t unparseable = 0;
    for (const auto& rec : dataset.records) {
        try {
            domains.insert(phishgraph::parse_url(rec.url, psl).registered_domain());
        } catch (const phishgraph::DataError&) {
            ++unparseable;
        }
    }
    size_t hits = 0;
    std::vector<std::string> missing;
    for (const auto& d : domains) {
        if (store.get(d)) ++hits;
        else missing.push_back(d);
    }
    std::cout << "domains: " << domains.size() << "\n"
              << "enriched: " << hits << "\n"
              << "missing: " << missing.size() << "\n"
              << "unparseable_urls: " << unparseable << "\n";
    if (store.duplicate_count() > 0) {
        std::cout << "warning: " << store.duplicate_count()
                  << " duplicate enrichment record(s), last wins\n";
    }
    if (store.rejected_count() > 0) {
        std::cout << "warning: " << store.rejected_count()
                  << " enrichment record(s) rejected (invalid IP)\n";
    }
    if (!missing_out.empty()) {
        std::ofstream out(missing_out);
        for (const auto& d : missing) out << d << "\n";
    }
    return kExitOk;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
    auto config = load_config_with_overrides(config_path, overrides);
    std::string out_dir = phishgraph::resolve_output_dir(config);

    auto started = std::chrono::steady_clock::now();
    auto outcome = phishgraph::run_pipeline(config, out_dir);
    phishgraph::write_reports(outcome, config, out_dir);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();

    // timings stay out of the deterministic reports
    std::ofstream log(out_dir + "/run.log", std::ios::app);
    log << "run completed in " << elapsed << " ms\n";

    std::cout << "graph pooled F1: " << outcome.graph_agg.pooled.f1 << "\n";
    for (const auto& [name, agg] : outcome.baseline_aggs) {
        std::cout << name << " pooled F1: " << agg.pooled.f1 << "\n";
    }
    std::cout << "argmax-F1 threshold: " << outcome.sweep.best_f1_threshold << "\n"
              << "reports: " << out_dir << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& overrides,
              const std::string& grid_spec) {
    auto config = load_config_with_overrides(config_path, overrides);
    if (!grid_spec.empty()) {
        size_t c1 = grid_spec.find(':');
        size_t c2 = grid_spec.rfind(':');
        if (c1 == std::string::npos || c2 == c1) {
            throw phishgraph::DataError("--grid expects start:stop:step");
        }
        config.apply("eval.sweep_start", grid_spec.substr(0, c1));
        config.apply("eval.sweep_stop", grid_spec.substr(c1 + 1, c2 - c1 - 1));
        config.apply("eval.sweep_step", grid_spec.substr(c2 + 1));
    }
    if (phishgraph::sweep_grid(config).empty()) {
        throw phishgraph::DataError("empty threshold grid");
    }
    std::string out_dir = phishgraph::resolve_output_dir(config);
    auto outcome = phishgraph::run_pipeline(config);
    std::filesystem::create_directories(out_dir);
    phishgraph::save_sweep_csv(outcome.sweep, out_dir + "/sweep.csv");
    std::cout << "rows: " << outcome.sweep.rows.size() << "\n"
              << "argmax-F1 threshold: " << outcome.sweep.best_f1_threshold << "\n"
              << "sweep: " << out_dir << "/sweep.csv\n";
    return kExitOk;
}

int cmd_graph_export(const std::string& config_path, const std::vector<std::string>& overrides,
                     int fold, const std::string& out_path) {
    auto config = load_config_with_overrides(config_path, overrides);
    phishgraph::export_graph(config, fold, out_path);
    std::cout << "graph written: " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phishgraph: graph-based phishing URL detection"};
    app.require_subcommand(1);

    std::string dataset_path, config_path, missing_out, grid_spec, graph_out;
    std::vector<std::string> overrides;
    int fold = 0;

    auto* ingest = app.add_subcommand("ingest", "validate a dataset CSV and print a summary");
    ingest->add_option("dataset", dataset_path, "dataset CSV (url,label)")->required();

    auto* enrich = app.add_subcommand("enrich", "check enrichment coverage for a dataset");
    enrich->add_option("--config", config_path, "run config file")->required();
    enrich->add_option("--set", overrides, "override a config key (key=value)");
    enrich->add_option("--missing-out", missing_out, "write unmatched domains to this file");

    auto* run = app.add_subcommand("run", "run the full cross-validation pipeline");
    run->add_option("--config", config_path, "run config file")->required();
    run->add_option("--set", overrides, "override a config key (key=value)");

    auto* sweep = app.add_subcommand("sweep", "run once and sweep classification thresholds");
    sweep->add_option("--config", config_path, "run config file")->required();
    sweep->add_option("--set", overrides, "override a config key (key=value)");
    sweep->add_option("--grid", grid_spec, "threshold grid start:stop:step");

    auto* graph = app.add_subcommand("graph", "graph utilities");
    graph->require_subcommand(1);
    auto* graph_export = graph->add_subcommand("export", "build one fold's graph and save JSONL");
    graph_export->add_option("--config", config_path, "run config file")->required();
    graph_export->add_option("--set", overrides, "override a config key (key=value)");
    graph_export->add_option("--fold", fold, "fold index (default 0)");
    graph_export->add_option("--out", graph_out, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(dataset_path);
        if (*enrich) return cmd_enrich(config_path, overrides, missing_out);
        if (*run) return cmd_run(config_path, overrides);
        if (*sweep) return cmd_sweep(config_path, overrides, grid_spec);
        if (*graph_export) return cmd_graph_export(config_path, overrides, fold, graph_out);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const phishgraph::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "pipeline failure: " << e.what() << "\n";
        return kExitPipelineError;
    }
}
