#include "cbver/route.hpp"

#include <sstream>

namespace cbver {

int compare_index_sets(const std::set<uint32_t>& a, const std::set<uint32_t>& b) {
    // Compare mask values: the highest index where membership differs decides.
    auto ia = a.rbegin(), ib = b.rbegin();
    while (ia != a.rend() && ib != b.rend()) {
        if (*ia != *ib) return *ia < *ib ? -1 : 1;
        ++ia;
        ++ib;
    }
    if (ia != a.rend()) return 1;
    if (ib != b.rend()) return -1;
    return 0;
}

int compare_preference(const RouteFields& a, const RouteFields& b) {
    if (a.lp != b.lp) return a.lp > b.lp ? -1 : 1;
    if (a.path_len != b.path_len) return a.path_len < b.path_len ? -1 : 1;
    if (a.prefix != b.prefix) return a.prefix < b.prefix ? -1 : 1;
    if (int c = compare_index_sets(a.visited, b.visited); c != 0) return c;
    return compare_index_sets(a.comms, b.comms);
}

Route merge(const Route& a, const Route& b) {
    if (a.is_no_route()) return b;
    if (b.is_no_route()) return a;
    return compare_preference(a.rec(), b.rec()) <= 0 ? a : b;
}

std::string route_to_string(const Route& r) {
    if (r.is_no_route()) return "<no-route>";
    std::ostringstream os;
    os << "{prefix=0x" << std::hex << r.prefix() << std::dec << ", lp=" << r.lp()
       << ", len=" << r.path_len() << ", visited={";
    bool first = true;
    for (auto v : r.visited()) {
        if (!first) os << ",";
        os << v;
        first = false;
    }
    os << "}, comms={";
    first = true;
    for (auto t : r.comms()) {
        if (!first) os << ",";
        os << t;
        first = false;
    }
    os << "}}";
    return os.str();
}

}  // namespace cbver
