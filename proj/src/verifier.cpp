#include "cbver/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbver {

std::set<NodeIdx> reachable_nodes(const CBGraph& g, size_t node_count) {
    std::set<NodeIdx> seen(g.roots.begin(), g.roots.end());
    std::deque<NodeIdx> work(g.roots.begin(), g.roots.end());
    while (!work.empty()) {
        NodeIdx v = work.front();
        work.pop_front();
        for (const auto& e : g.edges) {
            if (e.first != v || seen.count(e.second)) continue;
            seen.insert(e.second);
            work.push_back(e.second);
        }
    }
    (void)node_count;
    return seen;
}

bool is_connected(const CBGraph& g, size_t node_count) {
    return reachable_nodes(g, node_count).size() == node_count;
}

static std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

std::vector<VcResult> discharge_all(const std::vector<VcQuery>& vcs, const SolverConfig& cfg,
                                    int jobs) {
    std::vector<VcResult> results(vcs.size());
    std::vector<std::string> crashes(vcs.size());

    auto run_one = [&](size_t i) {
        try {
            SolverVerdict v =
                check_validity(cfg, vcs[i].script, vcs[i].route_vars, sanitize(vcs[i].name));
            results[i] = {vcs[i], std::move(v)};
        } catch (const SolverCrash& e) {
            crashes[i] = e.what();
        }
    };

    // One chunk per worker; each chunk is discharged by a single solver
    // process (see check_validity_batch), so process startup is paid per
    // worker rather than per obligation.
    auto run_chunk = [&](size_t lo, size_t hi) {
        std::vector<SolverQuery> qs;
        for (size_t i = lo; i < hi; ++i)
            qs.push_back({vcs[i].script, vcs[i].route_vars, sanitize(vcs[i].name)});
        try {
            std::vector<SolverVerdict> vs = check_validity_batch(cfg, qs);
            for (size_t i = lo; i < hi; ++i) results[i] = {vcs[i], std::move(vs[i - lo])};
        } catch (const SolverCrash& e) {
            for (size_t i = lo; i < hi; ++i) crashes[i] = e.what();
        }
    };

    if (jobs == 1) {
        for (size_t i = 0; i < vcs.size(); ++i) run_one(i);
    } else {
#ifdef _OPENMP
        int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
        int threads = jobs > 0 ? jobs : 1;
#endif
        size_t chunks = std::min<size_t>(static_cast<size_t>(threads),
                                         std::max<size_t>(vcs.size(), 1));
        std::vector<std::pair<size_t, size_t>> ranges;
        for (size_t c = 0; c < chunks; ++c) {
            size_t lo = vcs.size() * c / chunks, hi = vcs.size() * (c + 1) / chunks;
            if (lo < hi) ranges.emplace_back(lo, hi);
        }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
        for (long long c = 0; c < static_cast<long long>(ranges.size()); ++c)
            run_chunk(ranges[c].first, ranges[c].second);
    }

    for (size_t i = 0; i < vcs.size(); ++i)
        if (!crashes[i].empty())
            throw SolverCrash("obligation " + vcs[i].name + ": " + crashes[i]);
    return results;
}

CBGraph synthesize_cbgraph(const std::vector<VcResult>& results) {
    CBGraph g;
    for (const auto& r : results) {
        if (r.verdict.kind != SolverVerdict::Kind::Valid) continue;
        if (r.vc.kind == VcKind::CbRoot) g.roots.insert(r.vc.node);
        if (r.vc.kind == VcKind::CbEdge) g.edges.insert(r.vc.edge);
    }
    return g;
}

static std::string model_text(const Network& net, const std::map<std::string, Route>& model) {
    std::string out;
    for (const auto& [name, r] : model) {
        if (!out.empty()) out += ", ";
        out += name + " = " + route_to_string(r);
    }
    (void)net;
    return out;
}

TriageReport diagnose(const Network& net, const Interfaces& ifs, const VerifyResult& res) {
    TriageReport rep;
    for (const auto& r : res.results) {
        if (r.verdict.kind == SolverVerdict::Kind::Valid) continue;

        TriageEntry e;
        e.name = r.vc.name;
        if (r.verdict.kind == SolverVerdict::Kind::Unknown) {
            e.verdict = "unknown";
            e.hint = r.vc.essential
                         ? "solver could not decide an essential obligation; the claim is "
                           "unproven"
                         : "solver could not decide; the obligation is dropped from the "
                           "stability skeleton";
            rep.entries.push_back(std::move(e));
            continue;
        }

        e.verdict = "invalid";
        e.model = model_text(net, r.verdict.model);
        switch (r.vc.kind) {
            case VcKind::Init:
                e.hint = "initial route of " + net.name(r.vc.node) +
                         " falls outside its invariant; widen I or fix init";
                break;
            case VcKind::Inv:
                e.hint = "invariant of " + net.name(r.vc.edge.second) +
                         " is not closed under imports from " + net.name(r.vc.edge.first) +
                         "; widen I(" + net.name(r.vc.edge.second) + ") or tighten I(" +
                         net.name(r.vc.edge.first) + ") / the transfer policy";
                break;
            case VcKind::Prop:
                e.hint = "converged set of " + net.name(r.vc.node) +
                         " admits a route violating the node property; tighten Q or relax the "
                         "property";
                break;
            case VcKind::CbRoot:
                if (!eval_predicate(ifs.Q.at(r.vc.node), net.init.at(r.vc.node)))
                    e.hint = "initial route of " + net.name(r.vc.node) +
                             " is not already converged, so the node cannot seed stability";
                else
                    e.hint = "converged set of " + net.name(r.vc.node) +
                             " is not stable under some incoming import; the node cannot seed "
                             "stability";
                break;
            case VcKind::CbEdge:
                e.hint = "stability does not propagate " + net.name(r.vc.edge.first) + " -> " +
                         net.name(r.vc.edge.second) +
                         "; an admissible state at the target survives the import without "
                         "converging";
                break;
        }
        rep.entries.push_back(std::move(e));
    }

    for (NodeIdx v : res.unconnected) {
        TriageEntry e;
        e.name = "connectivity[" + net.name(v) + "]";
        e.verdict = "unconnected";
        std::string missing;
        for (NodeIdx u : net.in_neighbors(v)) {
            if (res.graph.edges.count({u, v})) continue;
            if (!missing.empty()) missing += ", ";
            missing += net.name(u) + "->" + net.name(v);
        }
        e.hint = "no stability path from a seed node reaches " + net.name(v) +
                 (missing.empty() ? "" : "; unproven incoming steps: " + missing);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

VerifyResult verify(const Network& net, const Interfaces& ifs, const VerifyOptions& opts) {
    SmtEncoder enc(net, opts.profile);
    std::vector<VcQuery> vcs = generate_vcs(enc, ifs);

    VerifyResult res;
    res.results = discharge_all(vcs, opts.solver, opts.jobs);

    bool essentials_ok = true;
    for (const auto& r : res.results)
        if (r.vc.essential && r.verdict.kind != SolverVerdict::Kind::Valid) essentials_ok = false;

    res.graph = synthesize_cbgraph(res.results);
    std::set<NodeIdx> reached = reachable_nodes(res.graph, net.node_count());
    for (NodeIdx v = 0; v < net.node_count(); ++v)
        if (!reached.count(v)) res.unconnected.push_back(v);

    res.correct = essentials_ok && res.unconnected.empty();
    if (!res.correct) res.triage = diagnose(net, ifs, res);
    return res;
}

}  // namespace cbver
