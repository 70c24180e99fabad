#include "phishgraph/enrichment.hpp"

#include <fstream>

#include <json.hpp>

#include "phishgraph/common.hpp"
#include "phishgraph/net.hpp"

namespace phishgraph {

namespace {

std::string canonical_ns(std::string ns) {
    ns = to_lower(std::move(ns));
    while (!ns.empty() && ns.back() == '.') ns.pop_back();
    return ns;
}

nlohmann::ordered_json record_to_json(const EnrichmentRecord& rec) {
    nlohmann::ordered_json j;
    j["domain"] = rec.domain;
    j["ips"] = rec.ips;
    j["nameservers"] = rec.nameservers;
    return j;
}

}  // namespace

void EnrichmentStore::put(EnrichmentRecord rec) {
    rec.domain = to_lower(rec.domain);
    for (auto& ns : rec.nameservers) ns = canonical_ns(ns);
    auto [it, inserted] = records_.insert_or_assign(rec.domain, std::move(rec));
    if (!inserted) ++duplicates_;
}

std::optional<EnrichmentRecord> EnrichmentStore::get(const std::string& domain) const {
    auto it = records_.find(to_lower(domain));
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::optional<EnrichmentRecord> EnrichmentStore::enrich(const std::string& domain) {
    if (auto hit = get(domain)) return hit;
    if (policy == MissPolicy::skip || !resolver_) return std::nullopt;

    std::lock_guard<std::mutex> lock(*write_lock_);
    if (auto raced = get(domain)) return raced;  // resolved meanwhile

    std::optional<EnrichmentRecord> resolved;
    try {
        resolved = resolver_->resolve(to_lower(domain));
    } catch (const std::exception&) {
        resolved = std::nullopt;  // resolver failures never abort the pipeline
    }
    if (!resolved) {
        ++resolve_failures_;
        return std::nullopt;
    }

    resolved->domain = to_lower(domain);
    for (auto& ns : resolved->nameservers) ns = canonical_ns(ns);
    records_[resolved->domain] = *resolved;
    if (!write_back_path_.empty()) append_enrichment_line(write_back_path_, *resolved);
    return resolved;
}

EnrichmentStore load_enrichment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open enrichment file: " + path);

    EnrichmentStore store;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError("malformed JSON at line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("domain") || !j["domain"].is_string()) {
            throw DataError("enrichment record missing 'domain' at line " + std::to_string(line_no));
        }
        EnrichmentRecord rec;
        bool valid = true;
        try {
            rec.domain = j["domain"].get<std::string>();
            if (rec.domain.empty()) {
                throw DataError("empty domain at line " + std::to_string(line_no));
            }
            if (j.contains("ips")) {
                for (const auto& ip : j["ips"]) {
                    std::string s = ip.get<std::string>();
                    if (!net::is_ip_literal(s)) {
                        valid = false;
                        break;
                    }
                    rec.ips.push_back(s);
                }
            }
            if (j.contains("nameservers")) {
                for (const auto& ns : j["nameservers"]) {
                    rec.nameservers.push_back(ns.get<std::string>());
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad enrichment record at line " + std::to_string(line_no) + ": " +
                            e.what());
        }
        if (!valid) {
            store.note_rejected();
            continue;
        }
        store.put(std::move(rec));
    }
    return store;
}

void append_enrichment_line(const std::string& path, const EnrichmentRecord& rec) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("cannot open write-back file: " + path);
    out << record_to_json(rec).dump() << "\n";
}

}  // namespace phishgraph
