#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbver/verifier.hpp"

namespace cbver {

struct DisconnectedCBGraph : std::runtime_error {
    std::vector<NodeIdx> unreachable;
    explicit DisconnectedCBGraph(std::vector<NodeIdx> u)
        : std::runtime_error("declared graph does not reach every node"),
          unreachable(std::move(u)) {}
};

// Horn-clause system solving for unknown per-node predicates If<v> (invariant)
// and Qf<v> (converged set) over a flattened route tuple
// (noRoute: Bool, prefix: BV, lp: Int, len: Int, visited: BV, comms: BV)
// with all-zero fields as the canonical NoRoute.
struct ChcSystem {
    std::string script;  // complete script, HORN logic
    size_t rule_count = 0;
    EncodingProfile profile = EncodingProfile::Simple;
};

// Rules: one invariant fact per node (initial route), one property query per
// node, one invariant-step rule per network edge, per declared root one
// converged fact plus one stability rule per incoming edge, and one
// propagation rule per declared graph edge. Throws DisconnectedCBGraph.
ChcSystem emit_chc(const Network& net, const std::vector<PredPtr>& Y, const CBGraph& g,
                   EncodingProfile profile = EncodingProfile::Simple);

struct ChcSolution {
    enum class Kind { Solution, Infeasible, Unknown };
    Kind kind = Kind::Unknown;
    std::map<std::string, std::string> defs;  // If<v>/Qf<v> -> define-fun text
    std::string reason;
};

ChcSolution solve_chc(const ChcSystem& sys, const SolverConfig& cfg);

struct RoundTrip {
    bool correct = false;
    std::string failed;  // first violated obligation when not correct
};

// Re-checks a solution through the verification path: the solved flat
// predicates are bridged onto the route datatype and every init/inv/prop
// obligation plus every declared root/edge obligation must come back valid.
RoundTrip validate_solution(const Network& net, const std::vector<PredPtr>& Y, const CBGraph& g,
                            const ChcSolution& sol, EncodingProfile profile,
                            const SolverConfig& cfg);

}  // namespace cbver
