#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace cbver {

// Indices into the owning network's node / community-tag universes.
using NodeIdx = uint32_t;
using TagIdx = uint32_t;

struct RouteFields {
    uint32_t prefix = 0;
    uint64_t lp = 100;
    uint64_t path_len = 0;
    std::set<NodeIdx> visited;
    std::set<TagIdx> comms;

    bool operator==(const RouteFields&) const = default;
};

// A BGP-style route, or NoRoute (the "no route selected" value).
// Field accessors on NoRoute throw; callers must test is_no_route() first.
class Route {
public:
    Route() = default;  // NoRoute
    explicit Route(RouteFields f) : fields_(std::move(f)) {}

    static Route no_route() { return Route{}; }

    bool is_no_route() const { return !fields_.has_value(); }

    const RouteFields& rec() const {
        if (!fields_) throw std::logic_error("field access on NoRoute");
        return *fields_;
    }
    RouteFields& rec() {
        if (!fields_) throw std::logic_error("field access on NoRoute");
        return *fields_;
    }

    uint32_t prefix() const { return rec().prefix; }
    uint64_t lp() const { return rec().lp; }
    uint64_t path_len() const { return rec().path_len; }
    const std::set<NodeIdx>& visited() const { return rec().visited; }
    const std::set<TagIdx>& comms() const { return rec().comms; }

    bool operator==(const Route&) const = default;

private:
    std::optional<RouteFields> fields_;
};

// Canonical mask value of an index set (bit i set iff i in the set).
// Matches the bitvector encoding used by the SMT backend; comparison of
// masks as unsigned integers is the tiebreak order on sets.
// Widths beyond 64 are handled by lexicographic word comparison.
int compare_index_sets(const std::set<uint32_t>& a, const std::set<uint32_t>& b);

// Strict "is a preferred over b" on concrete (non-NoRoute) routes:
// higher lp, then shorter path, then smaller prefix, then smaller visited
// mask, then smaller comms mask. Returns 0 when routes are fully equal.
int compare_preference(const RouteFields& a, const RouteFields& b);

// BGP merge: selective best-of-two. NoRoute is the identity.
Route merge(const Route& a, const Route& b);

std::string route_to_string(const Route& r);

}  // namespace cbver
