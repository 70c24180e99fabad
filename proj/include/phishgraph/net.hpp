#pragma once

#include <string>

namespace phishgraph::net {

// strict dotted-quad, each octet 0..255, no leading '+'/whitespace
bool is_ipv4(const std::string& s);

// delegated to inet_pton
bool is_ipv6(const std::string& s);

inline bool is_ip_literal(const std::string& s) { return is_ipv4(s) || is_ipv6(s); }

}  // namespace phishgraph::net
