#include "phishgraph/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "phishgraph/common.hpp"

namespace phishgraph {

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw DataError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

std::string fmt_double(double v) {
    char buf[48];
    snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path);
    RunConfig config;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config line " + std::to_string(line_no) + " is not key=value: " + line);
        }
        config.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "dataset") dataset_path = value;
    else if (key == "enrichment") enrichment_path = value;
    else if (key == "public_suffix") public_suffix_path = value;
    else if (key == "output_dir") output_dir = value;
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "n_folds") n_folds = parse_int(key, value);
    else if (key == "parallel_folds") parallel_folds = parse_int(key, value);
    else if (key == "output.write_graphs") write_graphs = parse_bool(key, value);
    else if (key == "vocab.elbow_normalize") vocab_elbow_normalize = parse_bool(key, value);
    else if (key == "features.include_domain_contains_address")
        include_domain_contains_address = parse_bool(key, value);
    else if (key == "priors.mode") {
        if (value != "rf" && value != "lr" && value != "nb" && value != "uniform") {
            throw DataError("priors.mode must be rf|lr|nb|uniform, got '" + value + "'");
        }
        priors_mode = value;
    } else if (key == "baseline.rf_trees") baseline.rf_trees = parse_int(key, value);
    else if (key == "baseline.rf_max_depth") baseline.rf_max_depth = parse_int(key, value);
    else if (key == "baseline.lr_epochs") baseline.lr_epochs = parse_int(key, value);
    else if (key == "baseline.lr_rate") baseline.lr_rate = parse_double(key, value);
    else if (key == "baseline.lr_l2") baseline.lr_l2 = parse_double(key, value);
    else if (key == "baseline.nb_variance_floor")
        baseline.nb_variance_floor = parse_double(key, value);
    else if (key == "embed.dim") embed.dimension = parse_int(key, value);
    else if (key == "embed.window") embed.window = parse_int(key, value);
    else if (key == "embed.epochs") embed.epochs = parse_int(key, value);
    else if (key == "embed.negatives") embed.negatives = parse_int(key, value);
    else if (key == "embed.learning_rate") embed.learning_rate = parse_double(key, value);
    else if (key == "sim.kernel") {
        if (value == "cosine") sim.kernel = SimilarityKernel::cosine;
        else if (value == "rbf") sim.kernel = SimilarityKernel::rbf;
        else throw DataError("sim.kernel must be cosine|rbf, got '" + value + "'");
    } else if (key == "sim.sigma") {
        double v = parse_double(key, value);
        if (v <= 0.0) throw DataError("sim.sigma must be positive");
        sim.sigma = v;
    } else if (key == "sim.rbf_unbounded") sim.rbf_unbounded = parse_bool(key, value);
    else if (key == "edge.mode") {
        if (value == "epsilon") edge.mode = PotentialMode::epsilon;
        else if (value == "similarity") edge.mode = PotentialMode::similarity;
        else throw DataError("edge.mode must be epsilon|similarity, got '" + value + "'");
    } else if (key == "edge.epsilon") {
        double v = parse_double(key, value);
        if (v <= 0.0 || v >= 0.5) throw DataError("edge.epsilon must lie in (0, 0.5)");
        edge.epsilon = v;
    } else if (key == "edge.ths_plus") {
        double v = parse_double(key, value);
        if (v < 0.0 || v > 1.0) throw DataError("edge.ths_plus must lie in [0, 1]");
        edge.ths_plus = v;
    } else if (key == "edge.ths_minus") {
        double v = parse_double(key, value);
        if (v < 0.0 || v > 1.0) throw DataError("edge.ths_minus must lie in [0, 1]");
        edge.ths_minus = v;
    } else if (key == "lbp.strategy") {
        if (value == "fixed_k") lbp.strategy = ConvergenceStrategy::fixed_k;
        else if (value == "delete_cycles") lbp.strategy = ConvergenceStrategy::delete_cycles;
        else throw DataError("lbp.strategy must be fixed_k|delete_cycles, got '" + value + "'");
    } else if (key == "lbp.k") {
        int v = parse_int(key, value);
        if (v < 1) throw DataError("lbp.k must be >= 1");
        lbp.k = v;
    } else if (key == "lbp.tolerance") {
        double v = parse_double(key, value);
        if (v <= 0.0) throw DataError("lbp.tolerance must be positive");
        lbp.tolerance = v;
    } else if (key == "lbp.max_sweeps") {
        int v = parse_int(key, value);
        if (v < 1) throw DataError("lbp.max_sweeps must be >= 1");
        lbp.max_sweeps = v;
    } else if (key == "lbp.threshold") {
        double v = parse_double(key, value);
        if (v < 0.0 || v > 1.0) throw DataError("lbp.threshold must lie in [0, 1]");
        lbp.threshold = v;
    } else if (key == "lbp.normalize_messages") lbp.normalize_messages = parse_bool(key, value);
    else if (key == "eval.positive_class") {
        if (value == "benign") eval_phishing_positive = false;
        else if (value == "phishing") eval_phishing_positive = true;
        else throw DataError("eval.positive_class must be benign|phishing, got '" + value + "'");
    } else if (key == "eval.sweep_start") sweep_start = parse_double(key, value);
    else if (key == "eval.sweep_stop") sweep_stop = parse_double(key, value);
    else if (key == "eval.sweep_step") {
        double v = parse_double(key, value);
        if (v <= 0.0) throw DataError("eval.sweep_step must be positive");
        sweep_step = v;
    } else {
        throw DataError("unknown config key: " + key);
    }
}

std::map<std::string, std::string> RunConfig::to_map() const {
    std::map<std::string, std::string> m;
    m["dataset"] = dataset_path;
    m["enrichment"] = enrichment_path;
    m["public_suffix"] = public_suffix_path;
    m["output_dir"] = output_dir;
    m["seed"] = std::to_string(seed);
    m["n_folds"] = std::to_string(n_folds);
    m["parallel_folds"] = std::to_string(parallel_folds);
    m["output.write_graphs"] = write_graphs ? "true" : "false";
    m["vocab.elbow_normalize"] = vocab_elbow_normalize ? "true" : "false";
    m["features.include_domain_contains_address"] =
        include_domain_contains_address ? "true" : "false";
    m["priors.mode"] = priors_mode;
    m["baseline.rf_trees"] = std::to_string(baseline.rf_trees);
    m["baseline.rf_max_depth"] = std::to_string(baseline.rf_max_depth);
    m["baseline.lr_epochs"] = std::to_string(baseline.lr_epochs);
    m["baseline.lr_rate"] = fmt_double(baseline.lr_rate);
    m["baseline.lr_l2"] = fmt_double(baseline.lr_l2);
    m["baseline.nb_variance_floor"] = fmt_double(baseline.nb_variance_floor);
    m["embed.dim"] = std::to_string(embed.dimension);
    m["embed.window"] = std::to_string(embed.window);
    m["embed.epochs"] = std::to_string(embed.epochs);
    m["embed.negatives"] = std::to_string(embed.negatives);
    m["embed.learning_rate"] = fmt_double(embed.learning_rate);
    m["sim.kernel"] = sim.kernel == SimilarityKernel::cosine ? "cosine" : "rbf";
    m["sim.sigma"] = fmt_double(sim.sigma);
    m["sim.rbf_unbounded"] = sim.rbf_unbounded ? "true" : "false";
    m["edge.mode"] = edge.mode == PotentialMode::epsilon ? "epsilon" : "similarity";
    m["edge.epsilon"] = fmt_double(edge.epsilon);
    m["edge.ths_plus"] = fmt_double(edge.ths_plus);
    m["edge.ths_minus"] = fmt_double(edge.ths_minus);
    m["lbp.strategy"] =
        lbp.strategy == ConvergenceStrategy::fixed_k ? "fixed_k" : "delete_cycles";
    m["lbp.k"] = std::to_string(lbp.k);
    m["lbp.tolerance"] = fmt_double(lbp.tolerance);
    m["lbp.max_sweeps"] = std::to_string(lbp.max_sweeps);
    m["lbp.threshold"] = fmt_double(lbp.threshold);
    m["lbp.normalize_messages"] = lbp.normalize_messages ? "true" : "false";
    m["eval.positive_class"] = eval_phishing_positive ? "phishing" : "benign";
    m["eval.sweep_start"] = fmt_double(sweep_start);
    m["eval.sweep_stop"] = fmt_double(sweep_stop);
    m["eval.sweep_step"] = fmt_double(sweep_step);
    return m;
}

std::vector<double> sweep_grid(const RunConfig& config) {
    std::vector<double> grid;
    // integer stepping avoids drift from repeated float addition
    long steps = std::lround((config.sweep_stop - config.sweep_start) / config.sweep_step);
    for (long i = 0; i <= steps; ++i) {
        double t = config.sweep_start + static_cast<double>(i) * config.sweep_step;
        if (t > config.sweep_stop + 1e-12) break;
        grid.push_back(t);
    }
    return grid;
}

}  // namespace phishgraph
