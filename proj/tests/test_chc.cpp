#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "cbver/benchgen.hpp"
#include "cbver/chc.hpp"

using namespace cbver;

namespace {

CBGraph three_edge_graph(const Network& net) {
    CBGraph g;
    g.roots = {net.index_of("A")};
    g.edges = {{net.index_of("A"), net.index_of("B")},
               {net.index_of("A"), net.index_of("C")},
               {net.index_of("B"), net.index_of("E")}};
    return g;
}

CBGraph full_graph(const Network& net) {
    CBGraph g;
    g.roots = {net.index_of("A")};
    g.edges.insert(net.edges.begin(), net.edges.end());
    return g;
}

// A predicate definition in the solved signature that accepts everything;
// splicing it over a real solution must break the round trip.
std::string always_true_def(const std::string& name, const SmtEncoder& enc) {
    std::ostringstream os;
    os << "(define-fun " << name << " ((a Bool) (b (_ BitVec " << enc.prefix_width()
       << ")) (c Int) (d Int) (e (_ BitVec " << enc.visited_width() << ")) (f (_ BitVec "
       << enc.comms_width() << "))) Bool true)";
    return os.str();
}

}  // namespace

TEST_CASE("rule counts: facts + steps + queries + root/edge obligations") {
    NetworkDocument doc = running_example(1);
    // 4 nodes, 8 network edges, root A with 2 in-edges, 3 declared edges.
    ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, three_edge_graph(doc.net));
    CHECK(sys.rule_count == 4 + 8 + 4 + (1 + 2) + 3);
    // Full declared graph: same except 8 propagation rules.
    ChcSystem full = emit_chc(doc.net, doc.ifs.Y, full_graph(doc.net));
    CHECK(full.rule_count == 4 + 8 + 4 + (1 + 2) + 8);

    Network lone;
    lone.nodes = {"A"};
    lone.init = {Route::no_route()};
    CBGraph g;
    g.roots = {0};
    ChcSystem tiny = emit_chc(lone, {pred::ptrue()}, g);
    CHECK(tiny.rule_count == 3);  // init fact + prop query + root fact
}

TEST_CASE("scripts are deterministic and keep predicates un-inlined") {
    NetworkDocument doc = running_example(1);
    ChcSystem a = emit_chc(doc.net, doc.ifs.Y, three_edge_graph(doc.net));
    ChcSystem b = emit_chc(doc.net, doc.ifs.Y, three_edge_graph(doc.net));
    CHECK(a.script == b.script);
    size_t logic = a.script.find("(set-logic HORN)");
    REQUIRE(logic != std::string::npos);
    // The transform options only take effect before set-logic.
    for (const char* opt : {":fp.xform.inline_eager false", ":fp.xform.inline_linear false",
                            ":fp.xform.slice false"}) {
        size_t at = a.script.find(opt);
        REQUIRE(at != std::string::npos);
        CHECK(at < logic);
    }
}

TEST_CASE("a graph that strands nodes is rejected up front") {
    NetworkDocument doc = running_example(1);
    CBGraph empty;  // no roots: nobody is reachable
    try {
        emit_chc(doc.net, doc.ifs.Y, empty);
        FAIL("expected DisconnectedCBGraph");
    } catch (const DisconnectedCBGraph& e) {
        CHECK(e.unreachable.size() == doc.net.node_count());
    }

    CBGraph partial;
    partial.roots = {doc.net.index_of("A")};
    partial.edges = {{doc.net.index_of("A"), doc.net.index_of("B")}};
    try {
        emit_chc(doc.net, doc.ifs.Y, partial);
        FAIL("expected DisconnectedCBGraph");
    } catch (const DisconnectedCBGraph& e) {
        CHECK(e.unreachable ==
              std::vector<NodeIdx>{doc.net.index_of("C"), doc.net.index_of("E")});
    }
}

TEST_CASE("four-node example: solved interfaces survive the round trip") {
    NetworkDocument doc = running_example(1);
    SolverConfig cfg = default_solver_config();
    for (EncodingProfile profile : {EncodingProfile::Simple, EncodingProfile::Full}) {
        CBGraph g = full_graph(doc.net);
        ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g, profile);
        ChcSolution sol = solve_chc(sys, cfg);
        REQUIRE(sol.kind == ChcSolution::Kind::Solution);
        CHECK(sol.defs.size() == 2 * doc.net.node_count());
        RoundTrip rt = validate_solution(doc.net, doc.ifs.Y, g, sol, profile, cfg);
        INFO(rt.failed);
        CHECK(rt.correct);
    }
}

TEST_CASE("sparse declared graph also admits a validated solution") {
    NetworkDocument doc = running_example(1);
    SolverConfig cfg = default_solver_config();
    CBGraph g = three_edge_graph(doc.net);
    ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g);
    ChcSolution sol = solve_chc(sys, cfg);
    REQUIRE(sol.kind == ChcSolution::Kind::Solution);
    RoundTrip rt = validate_solution(doc.net, doc.ifs.Y, g, sol, sys.profile, cfg);
    INFO(rt.failed);
    CHECK(rt.correct);

    // Splice in a predicate that accepts everything: Qf cannot imply the
    // property any more, and the round trip must say so.
    SmtEncoder enc(doc.net, sys.profile);
    ChcSolution bad = sol;
    std::string qe = "Qf" + std::to_string(doc.net.index_of("E"));
    bad.defs[qe] = always_true_def(qe, enc);
    RoundTrip broken = validate_solution(doc.net, doc.ifs.Y, g, bad, sys.profile, cfg);
    CHECK_FALSE(broken.correct);
    CHECK_FALSE(broken.failed.empty());

    // A missing definition is reported, not silently skipped.
    ChcSolution missing = sol;
    missing.defs.erase(qe);
    RoundTrip gone = validate_solution(doc.net, doc.ifs.Y, g, missing, sys.profile, cfg);
    CHECK_FALSE(gone.correct);
    CHECK(gone.failed.find("missing predicate") != std::string::npos);
}

TEST_CASE("unsatisfiable property at a connected node is Infeasible") {
    NetworkDocument doc = running_example(1);
    std::vector<PredPtr> Y = doc.ifs.Y;
    Y[doc.net.index_of("E")] = pred::pfalse();
    ChcSystem sys = emit_chc(doc.net, Y, full_graph(doc.net));
    ChcSolution sol = solve_chc(sys, default_solver_config());
    CHECK(sol.kind == ChcSolution::Kind::Infeasible);
}

TEST_CASE("pods=4 fat-tree reachability: synthesis round trip") {
    NetworkDocument doc = gen_fattree(4, FattreeVariant::Reachability);
    CBGraph g = bfs_cbgraph(doc.net, {doc.net.index_of("edge0_0")});
    SolverConfig cfg = default_solver_config();
    ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g, EncodingProfile::Simple);
    ChcSolution sol = solve_chc(sys, cfg);
    REQUIRE(sol.kind == ChcSolution::Kind::Solution);
    RoundTrip rt = validate_solution(doc.net, doc.ifs.Y, g, sol, EncodingProfile::Simple, cfg);
    INFO(rt.failed);
    CHECK(rt.correct);
}
