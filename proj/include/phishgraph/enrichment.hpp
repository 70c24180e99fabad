#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace phishgraph {

struct EnrichmentRecord {
    std::string domain;  // registered domain, lowercased
    std::vector<std::string> ips;
    std::vector<std::string> nameservers;  // lowercased, trailing dot stripped
};

// Contract for live NS/IP lookup: given a registered domain, return its
// nameserver hostnames and addresses, or nullopt on failure. Tests plug in
// scripted fakes; a production adapter may shell out to a DNS tool.
class Resolver {
public:
    virtual ~Resolver() = default;
    virtual std::optional<EnrichmentRecord> resolve(const std::string& domain) = 0;
};

enum class MissPolicy { skip, resolve };

// Offline-first domain → (IPs, nameservers) store backed by a JSONL file.
// Lookups are case-insensitive. With MissPolicy::resolve and a resolver
// attached, misses are resolved, cached, and appended to a write-back file.
class EnrichmentStore {
public:
    EnrichmentStore() = default;

    MissPolicy policy = MissPolicy::skip;

    void put(EnrichmentRecord rec);
    size_t size() const { return records_.size(); }
    size_t duplicate_count() const { return duplicates_; }
    size_t rejected_count() const { return rejected_; }
    size_t resolve_failures() const { return resolve_failures_; }

    void set_resolver(std::shared_ptr<Resolver> resolver) { resolver_ = std::move(resolver); }
    void set_write_back(const std::string& path) { write_back_path_ = path; }

    // Store hit returns the record untouched. On a miss: policy skip →
    // nullopt; policy resolve with a resolver → query, cache, append to the
    // write-back file (insertion serialized through a single writer lock).
    // Resolver failure → nullopt, counted; never throws.
    std::optional<EnrichmentRecord> enrich(const std::string& domain);

    // lookup without resolution side effects
    std::optional<EnrichmentRecord> get(const std::string& domain) const;

    void note_rejected() { ++rejected_; }

private:
    std::map<std::string, EnrichmentRecord> records_;
    std::shared_ptr<Resolver> resolver_;
    std::string write_back_path_;
    std::unique_ptr<std::mutex> write_lock_ = std::make_unique<std::mutex>();
    size_t duplicates_ = 0;
    size_t rejected_ = 0;
    size_t resolve_failures_ = 0;
};

// Parses a JSONL enrichment file (one record per line):
//   {"domain": "...", "ips": [...], "nameservers": [...]}
// Malformed JSON → DataError with the line number. Records with an invalid
// IP are rejected and counted. Duplicate domains: last record wins.
EnrichmentStore load_enrichment(const std::string& path);

void append_enrichment_line(const std::string& path, const EnrichmentRecord& rec);

}  // namespace phishgraph
