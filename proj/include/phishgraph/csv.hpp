#pragma once

// Minimal CSV support: RFC-4180 style quoting, enough for the formats this
// project reads and writes (dataset rows, vocabularies, priors, results).

#include <string>
#include <vector>

namespace phishgraph::csv {

// Splits one CSV line into fields. Double-quoted fields may contain commas
// and doubled quotes. Throws phishgraph::DataError on unbalanced quotes.
std::vector<std::string> split_line(const std::string& line);

// Quotes a field if it contains a comma, quote, or newline.
std::string quote_field(const std::string& field);

std::string join_fields(const std::vector<std::string>& fields);

}  // namespace phishgraph::csv
