#include "cbver/simulator.hpp"

#include <random>

namespace cbver {

static void check_schedule(const Network& net, const Schedule& sched) {
    if (sched.alpha.size() != sched.horizon + 1)
        throw ScheduleViolation("alpha does not cover the horizon");
    for (const auto& e : net.edges) {
        auto it = sched.beta.find(e);
        if (it == sched.beta.end() || it->second.size() != sched.horizon + 1)
            throw ScheduleViolation("beta does not cover the horizon");
        for (Time t = 1; t <= sched.horizon; ++t)
            if (it->second[t] >= t) throw ScheduleViolation("causality: beta_e(t) must be < t");
    }
}

Trace run(const Network& net, const Schedule& sched) {
    check_schedule(net, sched);
    Trace tr;
    tr.horizon = sched.horizon;
    tr.states.assign(net.node_count(), std::vector<Route>(sched.horizon + 1));
    for (NodeIdx v = 0; v < net.node_count(); ++v) tr.states[v][0] = net.init[v];

    for (Time t = 1; t <= sched.horizon; ++t) {
        for (NodeIdx v = 0; v < net.node_count(); ++v) {
            if (!sched.active(v, t)) {
                tr.states[v][t] = tr.states[v][t - 1];
                continue;
            }
            Route acc = net.init[v];
            for (const auto& e : net.edges) {
                if (e.second != v) continue;
                Time sent = sched.beta.at(e)[t];
                acc = merge(acc, apply_transfer(e, tr.states[e.first][sent], net));
            }
            tr.states[v][t] = acc;
        }
    }
    return tr;
}

Schedule random_fair_schedule(const Network& net, uint64_t seed, Time horizon,
                              const FairnessProfile& profile) {
    if (profile.ea_period == 0 || profile.ef_lag == 0)
        throw InfeasibleProfile("eaPeriod and efLag must be positive");
    if (horizon < profile.ea_period)
        throw InfeasibleProfile("horizon shorter than the activation period");

    std::mt19937_64 rng(seed);
    Schedule s;
    s.horizon = horizon;
    s.alpha.assign(horizon + 1, {});

    // Activations: random coin per step, forced when the gap hits eaPeriod.
    std::vector<Time> last_active(net.node_count(), 0);
    for (Time t = 1; t <= horizon; ++t) {
        for (NodeIdx v = 0; v < net.node_count(); ++v) {
            bool forced = t - last_active[v] >= profile.ea_period;
            if (forced || (rng() & 1)) {
                s.alpha[t].insert(v);
                last_active[v] = t;
            }
        }
    }

    // Data flow: monotone, beta_e(t) in [t - efLag, t-1]; frozen after the
    // cutoff on failed edges.
    for (const auto& e : net.edges) {
        bool failed = profile.failed_edges.count(e) != 0;
        std::vector<Time>& b = s.beta[e];
        b.assign(horizon + 1, 0);
        for (Time t = 1; t <= horizon; ++t) {
            if (failed && t > profile.fail_cutoff) {
                b[t] = b[t - 1];
                continue;
            }
            Time lo = t > profile.ef_lag ? t - profile.ef_lag : 0;
            lo = std::max(lo, b[t - 1]);
            Time hi = t - 1;
            b[t] = lo >= hi ? hi : lo + static_cast<Time>(rng() % (hi - lo + 1));
        }
    }
    return s;
}

std::vector<bool> check_abstract_convergence(const Trace& trace, const std::vector<PredPtr>& Q,
                                             Time tail) {
    std::vector<bool> ok(trace.states.size(), true);
    for (NodeIdx v = 0; v < trace.states.size(); ++v)
        for (Time t = trace.horizon - tail; t <= trace.horizon; ++t)
            if (!eval_predicate(Q.at(v), trace.at(v, t))) {
                ok[v] = false;
                break;
            }
    return ok;
}

bool trace_quiescent(const Trace& trace, Time tail) {
    for (const auto& row : trace.states)
        for (Time t = trace.horizon - tail; t < trace.horizon; ++t)
            if (!(row[t] == row[t + 1])) return false;
    return true;
}

FairnessReport fairness_lemma_check(const Schedule& sched, Time lag) {
    FairnessReport rep;
    for (const auto& [e, b] : sched.beta) {
        EdgeFairness f;
        f.ord = true;
        for (Time t = 1; t < b.size() - 1; ++t)
            if (b[t + 1] < b[t]) f.ord = false;

        f.ef = true;
        for (Time t = 1; t < b.size(); ++t)
            if (b[t] + lag < t) f.ef = false;

        f.ed = true;
        for (Time t0 = 0; t0 + lag < b.size(); ++t0) {
            bool hit = false;
            for (Time t = std::max<Time>(t0, 1); t <= t0 + lag; ++t)
                if (b[t] >= t0) hit = true;
            if (!hit) {
                f.ed = false;
                break;
            }
        }

        if (f.ef && !f.ed) rep.lattice_holds = false;        // EF => ED
        if (f.ed && f.ord && !f.ef) rep.lattice_holds = false;  // ED & DO => EF
        rep.edges[e] = f;
    }
    return rep;
}

}  // namespace cbver
