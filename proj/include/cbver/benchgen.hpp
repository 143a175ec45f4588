#pragma once

#include <set>
#include <string>
#include <vector>

#include "cbver/network.hpp"
#include "cbver/verifier.hpp"

namespace cbver {

// Four-node example (A, B, C, E; local preference 300 on B->E, 100 elsewhere)
// with two interface packages: package 1 proves plain reachability of E,
// package 2 proves E converges to the B-path avoiding C.
NetworkDocument running_example(int package);

enum class FattreeVariant { Reachability, PathLength, ValleyFree, Hijack };

const char* fattree_variant_name(FattreeVariant v);
FattreeVariant fattree_variant_from_name(const std::string& s);

struct BadPods : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Standard fat-tree at parameter k (pods): 1.25k^2 nodes, k^3 directed edges.
// Destination is edge0_0; Hijack adds one extra node wired to every core.
NetworkDocument gen_fattree(unsigned pods, FattreeVariant variant);

// BFS hop distances from src; UINT32_MAX when unreachable.
std::vector<uint32_t> bfs_distances(const Network& net, NodeIdx src);

// Shortest-path-forward skeleton: roots plus every edge (u,v) with
// dist(v) = dist(u) + 1 from the nearest root.
CBGraph bfs_cbgraph(const Network& net, const std::set<NodeIdx>& roots);

// Nodes reachable from src using only "up" edges (edge->agg, agg->core);
// meaningful on fat-trees generated above.
std::set<NodeIdx> uphill_nodes(const Network& net, NodeIdx src);

}  // namespace cbver
