#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace phishgraph {

// Public-suffix snapshot loaded from a bundled file (one suffix per line,
// `//` comments ignored). Supports exact rules, `*.` wildcard rules and
// `!` exception rules; longest match wins; unknown TLDs fall back to the
// rightmost label.
class PublicSuffixList {
public:
    static PublicSuffixList load(const std::string& path);
    static PublicSuffixList from_lines(const std::vector<std::string>& lines);

    // number of labels in the public suffix of `host` (host lowercased, no
    // trailing dot). Returns 1 for unknown TLDs.
    size_t suffix_labels(const std::vector<std::string>& host_labels) const;

    bool empty() const { return rules_.empty(); }

private:
    std::set<std::string> rules_;       // exact suffixes, e.g. "co.uk"
    std::set<std::string> wildcards_;   // parents of "*." rules, e.g. "ck" for "*.ck"
    std::set<std::string> exceptions_;  // "!" rules without the bang, e.g. "www.ck"
};

// URL decomposition. scheme and host are lowercased; everything needed to
// reassemble the original string (up to that normalization) is retained.
struct UrlAnatomy {
    std::string scheme;
    std::string userinfo;   // without the trailing '@', possibly empty
    std::string host;       // lowercased; IP literal allowed
    std::string port;       // digits only, possibly empty
    std::string subdomain;  // possibly empty
    std::string sld;        // for IP hosts, the IP string itself
    std::string tld;        // empty for IP hosts
    std::string path_raw;   // includes leading '/', possibly empty
    std::string query_raw;  // without '?', possibly empty
    std::string fragment;   // without '#', possibly empty
    std::vector<std::string> path_segments;  // alnum runs of path_raw
    std::vector<std::string> query_tokens;   // alnum runs of query_raw
    bool host_is_ip = false;

    // registered domain ("sld.tld", or the IP for IP hosts)
    std::string registered_domain() const;
    // scheme://[userinfo@]host[:port]path[?query][#fragment]
    std::string reassemble() const;
};

// Splits a URL into its anatomy using the given public-suffix snapshot.
// Throws DataError when no host can be extracted; the message carries the
// raw input string.
UrlAnatomy parse_url(const std::string& url, const PublicSuffixList& psl);

// Ordered, lowercased token list: subdomain labels, SLD, TLD, path
// segments, query tokens, fragment tokens. Tokens are maximal alphanumeric
// runs; all punctuation and special characters delimit. Empty tokens are
// dropped.
std::vector<std::string> tokenize(const UrlAnatomy& anatomy);

// maximal [A-Za-z0-9] runs of `s`, lowercased
std::vector<std::string> alnum_runs(const std::string& s);

// Elbow cutoff on a nonincreasing frequency curve: the index maximizing the
// perpendicular distance from (i, f_i) to the chord through the first and
// last points. Both axes are min-max normalized to [0,1] first (pass
// normalize=false for raw axes). Distances within 1e-12 (relative) count as
// tied and ties break to the smallest index, so a flat or collinear curve
// returns 0. Throws DataError when the list has fewer than 2 entries or is
// not nonincreasing.
size_t elbow_cutoff(const std::vector<uint64_t>& sorted_frequencies, bool normalize = true);

struct TokenVocabulary {
    std::map<std::string, uint64_t> counts;
    uint64_t cutoff_frequency = 0;
    std::set<std::string> kept;  // tokens with counts[t] <= cutoff_frequency

    bool contains(const std::string& token) const { return kept.count(token) > 0; }
};

// Counts tokens across the corpus and prunes everything strictly above the
// elbow frequency (ties at the cutoff are kept).
TokenVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                                 bool normalize_elbow = true);

// CSV `token,frequency,kept`, frequency descending (ties by token).
void save_vocabulary(const TokenVocabulary& vocab, const std::string& path);
TokenVocabulary load_vocabulary(const std::string& path);

struct LexicalFeatures {
    std::vector<double> values;
    std::vector<std::string> names;  // manifest, same order as values
};

// Fixed lexical feature set for the baseline classifiers. The manifest
// records names and order; `include_domain_contains_address` appends the
// host-is-IP-literal flag as a final feature.
LexicalFeatures lexical_features(const std::string& url, const UrlAnatomy& anatomy,
                                 bool include_domain_contains_address);

// the manifest for the current feature definition, without computing values
std::vector<std::string> lexical_feature_names(bool include_domain_contains_address);

}  // namespace phishgraph
