#include "phishgraph/net.hpp"

#include <arpa/inet.h>

namespace phishgraph::net {

bool is_ipv4(const std::string& s) {
    int octets = 0;
    size_t i = 0;
    while (i < s.size()) {
        if (octets == 4) return false;
        size_t start = i;
        int value = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            value = value * 10 + (s[i] - '0');
            if (value > 255 || i - start >= 3) return false;
            ++i;
        }
        if (i == start) return false;  // empty octet
        ++octets;
        if (i < s.size()) {
            if (s[i] != '.') return false;
            ++i;
            if (i == s.size()) return false;  // trailing dot
        }
    }
    return octets == 4;
}

bool is_ipv6(const std::string& s) {
    unsigned char buf[16];
    return inet_pton(AF_INET6, s.c_str(), buf) == 1;
}

}  // namespace phishgraph::net
