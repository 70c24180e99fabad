#include "phishgraph/url_parser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "phishgraph/common.hpp"
#include "phishgraph/csv.hpp"
#include "phishgraph/net.hpp"

namespace phishgraph {

namespace {

std::vector<std::string> split_labels(const std::string& host) {
    std::vector<std::string> labels;
    std::string cur;
    for (char c : host) {
        if (c == '.') {
            labels.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    labels.push_back(cur);
    return labels;
}

std::string join_labels(const std::vector<std::string>& labels, size_t from, size_t to) {
    std::string out;
    for (size_t i = from; i < to; ++i) {
        if (i > from) out.push_back('.');
        out += labels[i];
    }
    return out;
}

bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

// ============================================================================
// PublicSuffixList
// ============================================================================

PublicSuffixList PublicSuffixList::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open public suffix file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

PublicSuffixList PublicSuffixList::from_lines(const std::vector<std::string>& lines) {
    PublicSuffixList psl;
    for (std::string line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t comment = line.find("//");
        if (comment != std::string::npos) line = line.substr(0, comment);
        // trim
        size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        size_t end = line.find_last_not_of(" \t");
        line = to_lower(line.substr(begin, end - begin + 1));
        if (line.empty()) continue;
        if (line[0] == '!') {
            psl.exceptions_.insert(line.substr(1));
        } else if (line.rfind("*.", 0) == 0) {
            psl.wildcards_.insert(line.substr(2));
        } else {
            psl.rules_.insert(line);
        }
    }
    return psl;
}

size_t PublicSuffixList::suffix_labels(const std::vector<std::string>& host_labels) const {
    size_t n = host_labels.size();
    // longest match wins; exception rules strip their leftmost label
    for (size_t m = n; m >= 1; --m) {
        std::string candidate = join_labels(host_labels, n - m, n);
        if (exceptions_.count(candidate)) return m - 1;
        if (rules_.count(candidate)) return m;
        if (m >= 2 && wildcards_.count(join_labels(host_labels, n - m + 1, n))) return m;
    }
    return 1;
}

// ============================================================================
// parse_url / tokenize
// ============================================================================

std::string UrlAnatomy::registered_domain() const {
    if (host_is_ip) return host;
    if (sld.empty()) return host;  // bare public suffix, degenerate
    if (tld.empty()) return sld;
    return sld + "." + tld;
}

std::string UrlAnatomy::reassemble() const {
    std::string out = scheme + "://";
    if (!userinfo.empty()) out += userinfo + "@";
    bool bracket = host.find(':') != std::string::npos;  // IPv6 literal
    if (bracket) out += "[" + host + "]";
    else out += host;
    if (!port.empty()) out += ":" + port;
    out += path_raw;
    if (!query_raw.empty()) out += "?" + query_raw;
    if (!fragment.empty()) out += "#" + fragment;
    return out;
}

namespace {

bool is_hex_ascii(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace

std::vector<std::string> alnum_runs(const std::string& s) {
    std::vector<std::string> runs;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            runs.push_back(to_lower(cur));
            cur.clear();
        }
    };
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        // a %HH escape is a bounded unit: its hex pair becomes its own token
        if (c == '%' && i + 2 < s.size() && is_hex_ascii(s[i + 1]) && is_hex_ascii(s[i + 2])) {
            flush();
            runs.push_back(to_lower(s.substr(i + 1, 2)));
            i += 3;
            continue;
        }
        if (is_alnum_ascii(c)) {
            cur.push_back(c);
        } else {
            flush();
        }
        ++i;
    }
    flush();
    return runs;
}

UrlAnatomy parse_url(const std::string& url, const PublicSuffixList& psl) {
    if (url.empty()) throw DataError("cannot parse URL (empty)");

    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) {
        throw DataError("cannot parse URL (no host): " + url);
    }
    UrlAnatomy a;
    a.scheme = to_lower(url.substr(0, scheme_end));
    for (char c : a.scheme) {
        if (!is_alnum_ascii(c) && c != '+' && c != '-' && c != '.') {
            throw DataError("cannot parse URL (no host): " + url);
        }
    }

    size_t rest_begin = scheme_end + 3;
    size_t authority_end = url.find_first_of("/?#", rest_begin);
    std::string authority = url.substr(
        rest_begin, authority_end == std::string::npos ? std::string::npos
                                                       : authority_end - rest_begin);
    if (authority.empty()) throw DataError("cannot parse URL (no host): " + url);

    size_t at = authority.rfind('@');
    std::string hostport = authority;
    if (at != std::string::npos) {
        a.userinfo = authority.substr(0, at);
        hostport = authority.substr(at + 1);
    }

    std::string host;
    if (!hostport.empty() && hostport[0] == '[') {
        size_t close = hostport.find(']');
        if (close == std::string::npos) throw DataError("cannot parse URL (no host): " + url);
        host = hostport.substr(1, close - 1);
        if (close + 1 < hostport.size()) {
            if (hostport[close + 1] != ':') throw DataError("cannot parse URL (no host): " + url);
            a.port = hostport.substr(close + 2);
        }
        if (!net::is_ipv6(host)) throw DataError("cannot parse URL (no host): " + url);
        a.host_is_ip = true;
    } else {
        size_t colon = hostport.rfind(':');
        if (colon != std::string::npos) {
            std::string maybe_port = hostport.substr(colon + 1);
            bool all_digits = true;
            for (char c : maybe_port) all_digits = all_digits && (c >= '0' && c <= '9');
            if (all_digits) {  // empty port ("host:") is dropped
                a.port = maybe_port;
                hostport = hostport.substr(0, colon);
            }
        }
        host = hostport;
    }
    host = to_lower(host);
    if (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) throw DataError("cannot parse URL (no host): " + url);
    a.host = host;

    // remainder: path, query, fragment
    if (authority_end != std::string::npos) {
        std::string rest = url.substr(authority_end);
        size_t frag = rest.find('#');
        if (frag != std::string::npos) {
            a.fragment = rest.substr(frag + 1);
            rest = rest.substr(0, frag);
        }
        size_t q = rest.find('?');
        if (q != std::string::npos) {
            a.query_raw = rest.substr(q + 1);
            rest = rest.substr(0, q);
        }
        a.path_raw = rest;
    }

    if (!a.host_is_ip && net::is_ipv4(a.host)) a.host_is_ip = true;

    if (a.host_is_ip) {
        a.sld = a.host;
    } else {
        auto labels = split_labels(a.host);
        for (const auto& l : labels) {
            if (l.empty()) throw DataError("cannot parse URL (no host): " + url);
        }
        size_t suffix = psl.suffix_labels(labels);
        if (suffix >= labels.size()) {
            a.tld = a.host;  // bare public suffix, no SLD
        } else {
            a.tld = join_labels(labels, labels.size() - suffix, labels.size());
            a.sld = labels[labels.size() - suffix - 1];
            if (labels.size() > suffix + 1) {
                a.subdomain = join_labels(labels, 0, labels.size() - suffix - 1);
            }
        }
    }

    a.path_segments = alnum_runs(a.path_raw);
    a.query_tokens = alnum_runs(a.query_raw);
    return a;
}

std::vector<std::string> tokenize(const UrlAnatomy& anatomy) {
    std::vector<std::string> tokens;
    auto append = [&tokens](const std::vector<std::string>& more) {
        tokens.insert(tokens.end(), more.begin(), more.end());
    };
    append(alnum_runs(anatomy.subdomain));
    append(alnum_runs(anatomy.sld));
    append(alnum_runs(anatomy.tld));
    append(anatomy.path_segments);
    append(anatomy.query_tokens);
    append(alnum_runs(anatomy.fragment));
    return tokens;
}

// ============================================================================
// Elbow cutoff and vocabulary
// ============================================================================

size_t elbow_cutoff(const std::vector<uint64_t>& freqs, bool normalize) {
    size_t n = freqs.size();
    if (n < 2) throw DataError("elbow_cutoff requires at least 2 frequencies");
    for (size_t i = 1; i < n; ++i) {
        if (freqs[i] > freqs[i - 1]) throw DataError("elbow_cutoff input must be nonincreasing");
    }

    double f0 = static_cast<double>(freqs[0]);
    double fl = static_cast<double>(freqs[n - 1]);
    double fspan = f0 - fl;
    if (normalize && fspan == 0.0) return 0;  // flat curve, zero distance everywhere

    auto point = [&](size_t i) -> std::pair<double, double> {
        double x = static_cast<double>(i);
        double y = static_cast<double>(freqs[i]);
        if (normalize) {
            x /= static_cast<double>(n - 1);
            y = (y - fl) / fspan;
        }
        return {x, y};
    };

    auto [x0, y0] = point(0);
    auto [x1, y1] = point(n - 1);
    double dx = x1 - x0, dy = y1 - y0;
    double len = std::sqrt(dx * dx + dy * dy);
    if (len == 0.0) return 0;

    size_t best = 0;
    double best_d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        auto [x, y] = point(i);
        double d = std::abs(dy * x - dx * y + x1 * y0 - y1 * x0) / len;
        // near-ties (1e-12 relative) resolve to the smallest index
        if (d > best_d + 1e-12 * std::max(1.0, best_d)) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

TokenVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                                 bool normalize_elbow) {
    TokenVocabulary vocab;
    for (const auto& seq : corpus) {
        for (const auto& token : seq) ++vocab.counts[token];
    }
    if (vocab.counts.empty()) return vocab;

    std::vector<std::pair<std::string, uint64_t>> sorted(vocab.counts.begin(), vocab.counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    if (sorted.size() < 2) {
        vocab.cutoff_frequency = sorted[0].second;
    } else {
        std::vector<uint64_t> freqs;
        freqs.reserve(sorted.size());
        for (const auto& [_, f] : sorted) freqs.push_back(f);
        vocab.cutoff_frequency = freqs[elbow_cutoff(freqs, normalize_elbow)];
    }
    for (const auto& [token, f] : vocab.counts) {
        if (f <= vocab.cutoff_frequency) vocab.kept.insert(token);
    }
    return vocab;
}

void save_vocabulary(const TokenVocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary file: " + path);
    std::vector<std::pair<std::string, uint64_t>> sorted(vocab.counts.begin(), vocab.counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    out << "token,frequency,kept\n";
    for (const auto& [token, f] : sorted) {
        out << csv::quote_field(token) << "," << f << ","
            << (vocab.kept.count(token) ? 1 : 0) << "\n";
    }
}

TokenVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "token,frequency,kept") {
        throw DataError("bad vocabulary header in " + path);
    }
    TokenVocabulary vocab;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (fields.size() != 3) {
            throw DataError("bad vocabulary row at line " + std::to_string(line_no));
        }
        uint64_t f;
        try {
            f = std::stoull(fields[1]);
        } catch (const std::exception&) {
            throw DataError("bad frequency at line " + std::to_string(line_no));
        }
        vocab.counts[fields[0]] = f;
        if (fields[2] == "1") {
            vocab.kept.insert(fields[0]);
            vocab.cutoff_frequency = std::max(vocab.cutoff_frequency, f);
        }
    }
    return vocab;
}

// ============================================================================
// Lexical features
// ============================================================================

std::vector<std::string> lexical_feature_names(bool include_domain_contains_address) {
    std::vector<std::string> names = {
        "url_length",
        "host_length",
        "path_length",
        "count_dot",
        "count_hyphen",
        "count_underscore",
        "count_slash",
        "count_question",
        "count_equals",
        "count_at",
        "count_ampersand",
        "count_digits",
        "digit_ratio",
        "subdomain_label_count",
        "token_count",
        "host_is_ip",
        "https_scheme",
        "tld_length",
        "longest_token_length",
    };
    if (include_domain_contains_address) names.push_back("domain_contains_address");
    return names;
}

LexicalFeatures lexical_features(const std::string& url, const UrlAnatomy& anatomy,
                                 bool include_domain_contains_address) {
    auto count_char = [&url](char target) {
        double n = 0;
        for (char c : url) {
            if (c == target) ++n;
        }
        return n;
    };
    double digits = 0;
    for (char c : url) {
        if (c >= '0' && c <= '9') ++digits;
    }
    auto tokens = tokenize(anatomy);
    double longest = 0;
    for (const auto& t : tokens) longest = std::max(longest, static_cast<double>(t.size()));
    double sub_labels = 0;
    if (!anatomy.subdomain.empty()) {
        sub_labels = 1;
        for (char c : anatomy.subdomain) {
            if (c == '.') ++sub_labels;
        }
    }

    LexicalFeatures f;
    f.names = lexical_feature_names(include_domain_contains_address);
    f.values = {
        static_cast<double>(url.size()),
        static_cast<double>(anatomy.host.size()),
        static_cast<double>(anatomy.path_raw.size()),
        count_char('.'),
        count_char('-'),
        count_char('_'),
        count_char('/'),
        count_char('?'),
        count_char('='),
        count_char('@'),
        count_char('&'),
        digits,
        url.empty() ? 0.0 : digits / static_cast<double>(url.size()),
        sub_labels,
        static_cast<double>(tokens.size()),
        anatomy.host_is_ip ? 1.0 : 0.0,
        anatomy.scheme == "https" ? 1.0 : 0.0,
        static_cast<double>(anatomy.tld.size()),
        longest,
    };
    if (include_domain_contains_address) {
        f.values.push_back(anatomy.host_is_ip ? 1.0 : 0.0);
    }
    return f;
}

}  // namespace phishgraph
