#pragma once

#include <stdexcept>
#include <string>

namespace phishgraph {

// Error raised for malformed or inconsistent input data (CSV rows, JSONL
// records, config keys). Carries a human-readable message that names the
// offending file/line where applicable.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Error raised when an operation is called outside its contract
// (dimension mismatch, cost query on an observed node, ...).
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::string to_lower(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

}  // namespace phishgraph
