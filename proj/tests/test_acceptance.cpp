#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cbver/benchgen.hpp"
#include "cbver/chc.hpp"
#include "cbver/flow.hpp"
#include "cbver/simulator.hpp"
#include "cbver/verifier.hpp"

using namespace cbver;

// One pass/fail line per criterion; the assertion makes ctest agree with the
// printed verdict.
namespace {

void report(int n, const std::string& what, bool ok) {
    std::printf("criterion %d (%s): %s\n", n, what.c_str(), ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", n, ": ", what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VerifyResult verify_doc(const NetworkDocument& doc, int jobs = 0) {
    VerifyOptions opts;
    opts.solver = default_solver_config();
    opts.jobs = jobs;
    return verify(doc.net, doc.ifs, opts);
}

Route mk(uint32_t prefix, uint64_t lp, uint64_t len) {
    RouteFields f;
    f.prefix = prefix;
    f.lp = lp;
    f.path_len = len;
    return Route{std::move(f)};
}

NetworkDocument chain2() {
    using namespace pred;
    NetworkDocument doc;
    doc.net.nodes = {"A", "B"};
    doc.net.init = {mk(0, 100, 0), Route::no_route()};
    doc.net.edges = {{0, 1}};
    doc.net.transfer[{0, 1}] = {{TransferClause{ptrue(), {}, true}}};
    auto concrete = neg(is_no_route());
    doc.ifs.I = {ptrue(), ptrue()};
    doc.ifs.Q = {concrete, concrete};
    doc.ifs.Y = {concrete, concrete};
    return doc;
}

NetworkDocument cycle3() {
    using namespace pred;
    NetworkDocument doc;
    doc.net.nodes = {"A", "B", "C"};
    doc.net.init = {mk(0, 100, 0), Route::no_route(), Route::no_route()};
    doc.net.edges = {{0, 1}, {1, 2}, {2, 0}};
    for (const auto& e : doc.net.edges)
        doc.net.transfer[e] = {{TransferClause{ptrue(), {}, true}}};
    auto concrete = neg(is_no_route());
    doc.ifs.I = {
        disj({is_no_route(), len_cmp(CmpOp::Eq, 0)}),
        disj({is_no_route(), len_cmp(CmpOp::Eq, 1)}),
        disj({is_no_route(), len_cmp(CmpOp::Eq, 2)}),
    };
    doc.ifs.Q = {conj({concrete, len_cmp(CmpOp::Eq, 0)}), conj({concrete, len_cmp(CmpOp::Eq, 1)}),
                 conj({concrete, len_cmp(CmpOp::Eq, 2)})};
    doc.ifs.Y = {concrete, concrete, concrete};
    return doc;
}

// Small-instance corpus with adversarial interface mutations.
std::vector<std::pair<std::string, NetworkDocument>> soundness_corpus() {
    using namespace pred;
    std::vector<std::pair<std::string, NetworkDocument>> out;
    out.emplace_back("pkg1", running_example(1));
    out.emplace_back("pkg2", running_example(2));
    out.emplace_back("chain2", chain2());
    out.emplace_back("cycle3", cycle3());
    out.emplace_back("ft2-reach", gen_fattree(2, FattreeVariant::Reachability));
    out.emplace_back("ft2-pathlen", gen_fattree(2, FattreeVariant::PathLength));
    out.emplace_back("ft2-valley", gen_fattree(2, FattreeVariant::ValleyFree));

    NetworkDocument m = running_example(1);
    m.ifs.Y[m.net.index_of("E")] = lp_cmp(CmpOp::Eq, 100);
    out.emplace_back("pkg1-bad-Y", std::move(m));
    m = running_example(2);
    m.ifs.Q[m.net.index_of("E")] = conj({neg(is_no_route()), lp_cmp(CmpOp::Eq, 100)});
    out.emplace_back("pkg2-bad-Q", std::move(m));
    m = running_example(2);
    m.ifs.I[m.net.index_of("B")] = lp_cmp(CmpOp::Eq, 100);
    out.emplace_back("pkg2-bad-I", std::move(m));
    m = chain2();
    m.net.transfer[{0, 1}] = {{TransferClause{ptrue(), {}, false}}};
    out.emplace_back("chain2-filtered", std::move(m));
    return out;
}

// Exhaustive tolerance oracle for graphs with few edges.
NodeTolerance oracle_tolerance(const CBGraph& g, NodeIdx v) {
    if (g.roots.count(v)) return {true, 0};
    std::vector<Edge> edges(g.edges.begin(), g.edges.end());
    int best = -1;
    for (uint32_t mask = 0; mask < (1u << edges.size()); ++mask) {
        CBGraph cut;
        cut.roots = g.roots;
        for (size_t i = 0; i < edges.size(); ++i)
            if (!(mask & (1u << i))) cut.edges.insert(edges[i]);
        if (!reachable_nodes(cut, 0).count(v)) {
            int pop = __builtin_popcount(mask);
            if (best < 0 || pop < best) best = pop;
        }
    }
    if (best < 0) return {true, 0};
    return {false, best - 1};
}

}  // namespace

TEST_CASE("criterion 1: four-node example, both interface packages") {
    auto t0 = std::chrono::steady_clock::now();
    NetworkDocument d1 = running_example(1);
    VerifyResult r1 = verify_doc(d1);
    NetworkDocument d2 = running_example(2);
    VerifyResult r2 = verify_doc(d2);
    double secs = seconds_since(t0);

    bool ok = r1.correct && r2.correct;
    ok = ok && r1.graph.roots == std::set<NodeIdx>{d1.net.index_of("A")};
    ok = ok && r1.graph.edges == std::set<Edge>(d1.net.edges.begin(), d1.net.edges.end());
    ok = ok && r2.graph.roots == std::set<NodeIdx>{d2.net.index_of("A")};
    ok = ok && r2.graph.edges ==
                   std::set<Edge>{{d2.net.index_of("A"), d2.net.index_of("B")},
                                  {d2.net.index_of("A"), d2.net.index_of("C")},
                                  {d2.net.index_of("B"), d2.net.index_of("E")}};
    ok = ok && secs < 10.0;
    std::ostringstream what;
    what << "exact skeletons for both packages, " << secs << " s";
    report(1, what.str(), ok);
}

TEST_CASE("criterion 2: C->E non-edge witness replays concretely") {
    NetworkDocument doc = running_example(2);
    const Network& net = doc.net;
    NodeIdx C = net.index_of("C"), E = net.index_of("E");
    SmtEncoder enc(net);
    VcQuery vc = build_cbedge_vc(enc, doc.ifs, {C, E});
    SolverVerdict v = check_validity(default_solver_config(), vc.script, vc.route_vars);

    bool ok = v.kind == SolverVerdict::Kind::Invalid;
    ok = ok && replay_counterexample(net, doc.ifs, vc, v.model);
    if (ok) {
        const Route& su = v.model.at("su");
        const Route& sv = v.model.at("sv");
        Route after = merge(sv, apply_transfer({C, E}, su, net));
        ok = ok && eval_predicate(doc.ifs.Q[C], su);
        ok = ok && eval_predicate(doc.ifs.I[E], sv);
        ok = ok && !eval_predicate(doc.ifs.Q[E], after);
    }
    report(2, "edge obligation C->E invalid, model re-checks concretely", ok);
}

TEST_CASE("criterion 3: fat-tree variants at pods=4 and pods=6") {
    bool ok = true;
    std::ostringstream what;
    what << "pods 4/6 x 4 variants, 8 workers;";
    for (unsigned pods : {4u, 6u}) {
        double budget = pods == 4 ? 60.0 : 300.0;
        for (FattreeVariant v : {FattreeVariant::Reachability, FattreeVariant::PathLength,
                                 FattreeVariant::ValleyFree, FattreeVariant::Hijack}) {
            NetworkDocument doc = gen_fattree(pods, v);
            auto t0 = std::chrono::steady_clock::now();
            VerifyResult res = verify_doc(doc, 8);
            double secs = seconds_since(t0);
            ok = ok && res.correct && secs < budget;
            what << " " << fattree_variant_name(v) << pods << "=" << (res.correct ? "ok" : "FAIL")
                 << "/" << static_cast<int>(secs) << "s";
        }
    }
    report(3, what.str(), ok);
}

TEST_CASE("criterion 4: tolerance via max-flow, checked against brute force") {
    NetworkDocument ft = gen_fattree(4, FattreeVariant::Reachability);
    VerifyResult vr = verify_doc(ft, 8);
    REQUIRE(vr.correct);
    const CBGraph& g = vr.graph;  // for reachability: the whole topology
    ToleranceReport rep = tolerance_report(g, ft.net.node_count());
    bool ok = !rep.network.unbounded && rep.network.value == 1;

    // Direct reading of "tolerance 1": no single removal disconnects, some
    // pair does.
    std::vector<Edge> edges(g.edges.begin(), g.edges.end());
    bool single_safe = true, pair_breaks = false;
    for (size_t i = 0; i < edges.size() && single_safe; ++i) {
        CBGraph cut = g;
        cut.edges.erase(edges[i]);
        single_safe = reachable_nodes(cut, 0).size() == ft.net.node_count();
    }
    for (size_t i = 0; i < edges.size() && !pair_breaks; ++i)
        for (size_t j = i + 1; j < edges.size() && !pair_breaks; ++j) {
            CBGraph cut = g;
            cut.edges.erase(edges[i]);
            cut.edges.erase(edges[j]);
            pair_breaks = reachable_nodes(cut, 0).size() != ft.net.node_count();
        }
    ok = ok && single_safe && pair_breaks;

    // Max-flow equals the exhaustive oracle on every small random graph.
    std::mt19937_64 rng(4242);
    for (int it = 0; it < 100 && ok; ++it) {
        size_t n = 3 + rng() % 4;
        CBGraph h;
        h.roots = {static_cast<NodeIdx>(rng() % n)};
        size_t want = std::min<size_t>(rng() % 13, n * (n - 1));
        while (h.edges.size() < want) {
            NodeIdx a = rng() % n, b = rng() % n;
            if (a != b) h.edges.insert({a, b});
        }
        for (NodeIdx v = 0; v < n && ok; ++v) {
            NodeTolerance fast = max_tolerance(h, n, v);
            NodeTolerance slow = oracle_tolerance(h, v);
            ok = fast.unbounded == slow.unbounded && fast.value == slow.value;
        }
    }
    report(4, "pods=4 network tolerance 1; flow == brute force on small graphs", ok);
}

TEST_CASE("criterion 5: Correct verdicts survive 200 fair schedules each") {
    bool ok = true;
    int correct_seen = 0, violations = 0;
    FairnessProfile prof;
    prof.ea_period = 3;
    prof.ef_lag = 2;
    for (const auto& [name, doc] : soundness_corpus()) {
        VerifyResult res = verify_doc(doc);
        if (!res.correct) continue;
        ++correct_seen;
        for (uint64_t seed = 0; seed < 200; ++seed) {
            Schedule s = random_fair_schedule(doc.net, seed, 40, prof);
            Trace tr = run(doc.net, s);
            for (NodeIdx v = 0; v < doc.net.node_count(); ++v) {
                for (Time t = 0; t <= 40; ++t)
                    if (!eval_predicate(doc.ifs.I[v], tr.at(v, t))) ++violations;
                for (Time t = 35; t <= 40; ++t)
                    if (!eval_predicate(doc.ifs.Y[v], tr.at(v, t))) ++violations;
            }
        }
    }
    ok = correct_seen >= 5 && violations == 0;
    std::ostringstream what;
    what << correct_seen << " Correct instances x 200 schedules, " << violations << " violations";
    report(5, what.str(), ok);
}

TEST_CASE("criterion 6: 10000 fuzzed solver/concrete agreements") {
    const int kCases = 10000, kPerQuery = 500;
    NetworkDocument vf = gen_fattree(2, FattreeVariant::ValleyFree);
    NetworkDocument hj = gen_fattree(2, FattreeVariant::Hijack);
    std::mt19937_64 rng(20240817);

    auto rand_route = [&](const Network& n) {
        if (rng() % 5 == 0) return Route::no_route();
        RouteFields f;
        f.prefix = static_cast<uint32_t>(rng());
        f.lp = rng() % 400;
        f.path_len = rng() % 8;
        for (NodeIdx v = 0; v < n.node_count(); ++v)
            if (rng() % 3 == 0) f.visited.insert(v);
        for (TagIdx t = 0; t < n.communities.size(); ++t)
            if (rng() & 1) f.comms.insert(t);
        return Route{std::move(f)};
    };
    std::function<PredPtr(const Network&, int)> rand_pred = [&](const Network& n,
                                                                int depth) -> PredPtr {
        using namespace pred;
        if (depth == 0) {
            switch (rng() % 8) {
                case 0: return ptrue();
                case 1: return pfalse();
                case 2: return is_no_route();
                case 3: return lp_cmp(static_cast<CmpOp>(rng() % 6), rng() % 400);
                case 4: return len_cmp(static_cast<CmpOp>(rng() % 6), rng() % 8);
                case 5: return prefix_eq(static_cast<uint32_t>(rng()));
                case 6:
                    return n.communities.empty() ? ptrue()
                                                 : comm_contains(rng() % n.communities.size());
                default: return visited_contains(rng() % n.node_count());
            }
        }
        switch (rng() % 4) {
            case 0: return conj({rand_pred(n, depth - 1), rand_pred(n, depth - 1)});
            case 1: return disj({rand_pred(n, depth - 1), rand_pred(n, depth - 1)});
            case 2: return neg(rand_pred(n, depth - 1));
            default: return implies(rand_pred(n, depth - 1), rand_pred(n, depth - 1));
        }
    };

    std::vector<SolverQuery> queries;
    int made = 0;
    while (made < kCases) {
        const Network& net = ((made / kPerQuery) % 2 == 1) ? hj.net : vf.net;
        SmtEncoder enc(net, EncodingProfile::Full);
        std::ostringstream os;
        os << enc.prelude() << "(assert (not (and\n";
        for (int i = 0; i < kPerQuery && made < kCases; ++i, ++made) {
            Route r1 = rand_route(net), r2 = rand_route(net);
            std::string l1 = enc.route_literal(r1), l2 = enc.route_literal(r2);
            PredPtr p = rand_pred(net, static_cast<int>(rng() % 3));
            os << "  (= " << enc.predicate_term(p, l1) << " "
               << (eval_predicate(p, r1) ? "true" : "false") << ")\n";
            os << "  (= " << enc.merge_term(l1, l2) << " " << enc.route_literal(merge(r1, r2))
               << ")\n";
            const Edge& e = net.edges[rng() % net.edges.size()];
            os << "  (= " << enc.transfer_term(e, l1) << " "
               << enc.route_literal(apply_transfer(e, r1, net)) << ")\n";
        }
        os << ")))\n(check-sat)\n";
        queries.push_back({os.str(), {}, ""});
    }
    std::vector<SolverVerdict> vs = check_validity_batch(default_solver_config(), queries);
    bool ok = made == kCases;
    for (const auto& v : vs) ok = ok && v.kind == SolverVerdict::Kind::Valid;
    report(6, "10000 predicate/merge/transfer cases, zero mismatches", ok);
}

TEST_CASE("criterion 7: interface synthesis round trips") {
    SolverConfig cfg = default_solver_config();
    bool ok = true;
    std::ostringstream what;

    {
        auto t0 = std::chrono::steady_clock::now();
        NetworkDocument doc = running_example(1);
        CBGraph g;
        g.roots = {doc.net.index_of("A")};
        g.edges = {{doc.net.index_of("A"), doc.net.index_of("B")},
                   {doc.net.index_of("A"), doc.net.index_of("C")},
                   {doc.net.index_of("B"), doc.net.index_of("E")}};
        ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g);
        ChcSolution sol = solve_chc(sys, cfg);
        bool got = sol.kind == ChcSolution::Kind::Solution &&
                   validate_solution(doc.net, doc.ifs.Y, g, sol, sys.profile, cfg).correct;
        double secs = seconds_since(t0);
        ok = ok && got && secs < 300.0;
        what << "four-node=" << (got ? "ok" : "FAIL") << "/" << static_cast<int>(secs) << "s";
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        NetworkDocument doc = gen_fattree(4, FattreeVariant::Reachability);
        CBGraph g = bfs_cbgraph(doc.net, {doc.net.index_of("edge0_0")});
        ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g, EncodingProfile::Simple);
        ChcSolution sol = solve_chc(sys, cfg);
        bool got = sol.kind == ChcSolution::Kind::Solution &&
                   validate_solution(doc.net, doc.ifs.Y, g, sol, EncodingProfile::Simple, cfg)
                       .correct;
        double secs = seconds_since(t0);
        ok = ok && got && secs < 300.0;
        what << " pods4=" << (got ? "ok" : "FAIL") << "/" << static_cast<int>(secs) << "s";
    }
    {
        NetworkDocument doc = running_example(1);
        std::vector<PredPtr> Y = doc.ifs.Y;
        Y[doc.net.index_of("E")] = pred::pfalse();
        CBGraph g;
        g.roots = {doc.net.index_of("A")};
        g.edges.insert(doc.net.edges.begin(), doc.net.edges.end());
        ChcSolution sol = solve_chc(emit_chc(doc.net, Y, g), cfg);
        bool got = sol.kind == ChcSolution::Kind::Infeasible;
        ok = ok && got;
        what << " infeasible=" << (got ? "ok" : "FAIL");
    }
    report(7, what.str(), ok);
}

TEST_CASE("criterion 8: fairness implication lattice on 1000 schedules") {
    NetworkDocument doc = running_example(1);
    std::mt19937_64 rng(31337);
    bool ok = true;
    int ef_seen = 0, ed_only = 0;
    for (int it = 0; it < 1000; ++it) {
        const Time H = 20;
        Schedule s;
        s.horizon = H;
        s.alpha.assign(H + 1, {});
        for (const auto& e : doc.net.edges) {
            auto& b = s.beta[e];
            b.assign(H + 1, 0);
            bool monotone = rng() & 1;
            for (Time t = 1; t <= H; ++t) {
                Time lo = monotone ? b[t - 1] : 0;
                b[t] = lo + static_cast<Time>(rng() % (t - lo));
                if (b[t] >= t) b[t] = t - 1;
            }
        }
        Time lag = 1 + static_cast<Time>(rng() % 4);
        FairnessReport rep = fairness_lemma_check(s, lag);
        ok = ok && rep.lattice_holds;
        for (const auto& [e, f] : rep.edges) {
            if (f.ef && !f.ed) ok = false;       // EF => ED
            if (f.ed && f.ord && !f.ef) ok = false;  // ED & DO => EF
            if (f.ef) ++ef_seen;
            if (f.ed && !f.ef) ++ed_only;
        }
    }
    ok = ok && ef_seen > 0 && ed_only > 0;  // both sides exercised
    report(8, "EF=>ED and ED&DO=>EF, zero violations", ok);
}
