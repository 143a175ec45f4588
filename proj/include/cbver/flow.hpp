#pragma once

#include <map>
#include <optional>

#include "cbver/verifier.hpp"

namespace cbver {

// Max edge-failure budget a node tolerates while staying root-reachable.
// Roots are unbounded; value -1 means unreachable even with zero failures.
struct NodeTolerance {
    bool unbounded = false;
    int64_t value = -1;
};

// Min-cut from a super-source over all roots to v, unit capacities on graph
// edges, minus one. Roots report Unbounded.
NodeTolerance max_tolerance(const CBGraph& g, size_t node_count, NodeIdx v);

struct ToleranceReport {
    std::map<NodeIdx, NodeTolerance> per_node;
    NodeTolerance network;  // min over all nodes
    std::optional<bool> for_k_query;
};

ToleranceReport tolerance_report(const CBGraph& g, size_t node_count,
                                 std::optional<int64_t> k = std::nullopt, int jobs = 0);

}  // namespace cbver
