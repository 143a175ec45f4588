#pragma once

#include <set>
#include <string>
#include <vector>

#include "cbver/network.hpp"
#include "cbver/vcgen.hpp"

namespace cbver {

// Result of one discharged obligation, in generation order.
struct VcResult {
    VcQuery vc;
    SolverVerdict verdict;
};

// Stability skeleton extracted from the proven obligations: nodes whose
// initial route is already stable (roots) and edges that propagate stability.
struct CBGraph {
    std::set<NodeIdx> roots;
    std::set<Edge> edges;
};

// Nodes reachable from the roots along graph edges.
std::set<NodeIdx> reachable_nodes(const CBGraph& g, size_t node_count);

bool is_connected(const CBGraph& g, size_t node_count);

struct TriageEntry {
    std::string name;     // obligation id
    std::string verdict;  // invalid / unknown / unconnected
    std::string hint;
    std::string model;    // pretty-printed counterexample, may be empty
};

struct TriageReport {
    std::vector<TriageEntry> entries;
};

struct VerifyOptions {
    SolverConfig solver;
    int jobs = 0;  // 0 = library default; 1 = serial reference path
    EncodingProfile profile = EncodingProfile::Full;
};

struct VerifyResult {
    bool correct = false;
    CBGraph graph;
    std::vector<VcResult> results;        // generation order, deterministic
    std::vector<NodeIdx> unconnected;     // empty when correct
    TriageReport triage;                  // populated on failure
};

// Discharges the given obligations; result order matches input order.
// jobs == 1 runs the serial reference loop, otherwise a parallel fan-out.
std::vector<VcResult> discharge_all(const std::vector<VcQuery>& vcs, const SolverConfig& cfg,
                                    int jobs);

// Phase 1 (parallel obligation discharge) + phase 2 (connectedness of the
// stability skeleton). correct iff every init/inv/prop obligation is proven
// and every node is reachable from a root.
VerifyResult verify(const Network& net, const Interfaces& ifs, const VerifyOptions& opts);

// Builds the skeleton from discharged root/edge obligations; unproven ones
// (invalid or unknown) are simply excluded.
CBGraph synthesize_cbgraph(const std::vector<VcResult>& results);

TriageReport diagnose(const Network& net, const Interfaces& ifs, const VerifyResult& res);

}  // namespace cbver
