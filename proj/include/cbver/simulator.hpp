#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "cbver/network.hpp"

namespace cbver {

using Time = uint32_t;

// Asynchronous schedule: activation sets alpha(t) and per-edge data flow
// beta_e(t) = send time of the message received at t. Causality: beta_e(t) < t
// for t > 0.
struct Schedule {
    Time horizon = 0;
    std::vector<std::set<NodeIdx>> alpha;          // index t in [0, horizon]
    std::map<Edge, std::vector<Time>> beta;        // beta[e][t], t in [0, horizon]

    bool active(NodeIdx v, Time t) const { return alpha.at(t).count(v) != 0; }
};

struct ScheduleViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleProfile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Trace {
    Time horizon = 0;
    std::vector<std::vector<Route>> states;  // states[v][t]

    const Route& at(NodeIdx v, Time t) const { return states.at(v).at(t); }
};

struct FairnessProfile {
    std::set<Edge> failed_edges;
    Time fail_cutoff = 0;   // beta frozen after this time on failed edges
    Time ea_period = 1;     // every node activates at least once per window
    Time ef_lag = 1;        // beta_e(t) >= t - ef_lag on non-failed edges
};

Trace run(const Network& net, const Schedule& sched);

Schedule random_fair_schedule(const Network& net, uint64_t seed, Time horizon,
                              const FairnessProfile& profile);

// Per-node verdict: Q(v) holds over the final `tail` steps of the trace.
std::vector<bool> check_abstract_convergence(const Trace& trace, const std::vector<PredPtr>& Q,
                                             Time tail);

// True when the last `tail` steps show no state change anywhere (the bounded
// surrogate's quiescence precondition).
bool trace_quiescent(const Trace& trace, Time tail);

// Bounded fairness classification of each edge at lag L, plus the
// implication-lattice check (EF => ED, ED & DO => EF).
struct EdgeFairness {
    bool ed = false, ef = false, ord = false;
};

struct FairnessReport {
    std::map<Edge, EdgeFairness> edges;
    bool lattice_holds = true;  // implications verified on this classification
};

FairnessReport fairness_lemma_check(const Schedule& sched, Time lag);

}  // namespace cbver
