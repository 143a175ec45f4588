#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "cbver/benchgen.hpp"
#include "cbver/expr.hpp"
#include "cbver/network.hpp"
#include "cbver/route.hpp"

using namespace cbver;

namespace {

Route mk(uint32_t prefix, uint64_t lp, uint64_t len, std::set<NodeIdx> vis = {},
         std::set<TagIdx> com = {}) {
    RouteFields f;
    f.prefix = prefix;
    f.lp = lp;
    f.path_len = len;
    f.visited = std::move(vis);
    f.comms = std::move(com);
    return Route{std::move(f)};
}

// Every route over a tiny universe: prefix in {0,1}, lp in {100,200},
// len in {0,1}, visited subset of {0,1}, comms subset of {0}. 64 concrete
// routes plus NoRoute.
std::vector<Route> small_universe() {
    std::vector<Route> all{Route::no_route()};
    for (uint32_t p : {0u, 1u})
        for (uint64_t lp : {100u, 200u})
            for (uint64_t len : {0u, 1u})
                for (int vmask = 0; vmask < 4; ++vmask)
                    for (int cmask = 0; cmask < 2; ++cmask) {
                        std::set<NodeIdx> vis;
                        if (vmask & 1) vis.insert(0);
                        if (vmask & 2) vis.insert(1);
                        std::set<TagIdx> com;
                        if (cmask & 1) com.insert(0);
                        all.push_back(mk(p, lp, len, vis, com));
                    }
    return all;
}

uint64_t mask_of(const std::set<uint32_t>& s) {
    uint64_t m = 0;
    for (uint32_t i : s) m |= uint64_t{1} << i;
    return m;
}

// Independent preference oracle: lexicographic on
// (-lp, len, prefix, visited mask, comms mask), smaller tuple preferred.
int oracle_compare(const RouteFields& a, const RouteFields& b) {
    auto key = [](const RouteFields& r) {
        return std::tuple{~r.lp, r.path_len, uint64_t{r.prefix}, mask_of(r.visited),
                          mask_of(r.comms)};
    };
    auto ka = key(a), kb = key(b);
    if (ka < kb) return -1;
    return ka == kb ? 0 : 1;
}

}  // namespace

TEST_CASE("merge: algebraic properties over the full small universe") {
    std::vector<Route> all = small_universe();
    REQUIRE(all.size() == 65);

    for (const Route& a : all) {
        CHECK(merge(a, a) == a);                          // idempotent
        CHECK(merge(a, Route::no_route()) == a);          // identity
        CHECK(merge(Route::no_route(), a) == a);
        for (const Route& b : all) {
            Route ab = merge(a, b);
            CHECK(ab == merge(b, a));                     // commutative
            CHECK((ab == a || ab == b));                  // selective
        }
    }
    // Associativity: selective + commutative do not imply it; check directly.
    for (size_t i = 0; i < all.size(); i += 3)
        for (size_t j = 0; j < all.size(); j += 3)
            for (size_t k = 0; k < all.size(); k += 3)
                CHECK(merge(merge(all[i], all[j]), all[k]) ==
                      merge(all[i], merge(all[j], all[k])));
}

TEST_CASE("merge picks the preferred route per the documented total order") {
    std::vector<Route> all = small_universe();
    for (const Route& a : all) {
        if (a.is_no_route()) continue;
        for (const Route& b : all) {
            if (b.is_no_route()) continue;
            int cmp = oracle_compare(a.rec(), b.rec());
            CHECK(compare_preference(a.rec(), b.rec()) == cmp);
            CHECK(merge(a, b) == (cmp <= 0 ? a : b));
        }
    }
    // Spot checks of each tiebreak level.
    CHECK(merge(mk(0, 200, 5), mk(0, 100, 0)) == mk(0, 200, 5));      // lp wins
    CHECK(merge(mk(0, 100, 1), mk(0, 100, 2)) == mk(0, 100, 1));      // shorter path
    CHECK(merge(mk(1, 100, 1), mk(2, 100, 1)) == mk(1, 100, 1));      // smaller prefix
    CHECK(merge(mk(0, 100, 1, {0}), mk(0, 100, 1, {1})) == mk(0, 100, 1, {0}));
    CHECK(merge(mk(0, 100, 1, {}, {0}), mk(0, 100, 1, {}, {})) == mk(0, 100, 1, {}, {}));
}

TEST_CASE("compare_index_sets matches unsigned mask comparison") {
    std::vector<std::set<uint32_t>> sets = {{}, {0}, {1}, {0, 1}, {2}, {0, 2}, {5}, {0, 5}};
    for (const auto& a : sets)
        for (const auto& b : sets) {
            int expect = mask_of(a) < mask_of(b) ? -1 : (mask_of(a) == mask_of(b) ? 0 : 1);
            int got = compare_index_sets(a, b);
            CHECK((got < 0 ? -1 : got > 0 ? 1 : 0) == expect);
        }
    // Indices past 64 bits still order by most significant member.
    CHECK(compare_index_sets({3}, {70}) < 0);
    CHECK(compare_index_sets({70}, {3}) > 0);
    CHECK(compare_index_sets({70, 3}, {70}) > 0);
    CHECK(compare_index_sets({70, 3}, {70, 3}) == 0);
    CHECK(compare_index_sets({100}, {70, 3}) > 0);
}

TEST_CASE("route field access on NoRoute throws") {
    Route nr = Route::no_route();
    CHECK(nr.is_no_route());
    CHECK_THROWS_AS(nr.lp(), std::logic_error);
    CHECK_THROWS_AS(nr.visited(), std::logic_error);
}

TEST_CASE("eval_predicate: atoms are false on NoRoute, isNoRoute excepted") {
    using namespace pred;
    Route nr = Route::no_route();
    CHECK(eval_predicate(is_no_route(), nr));
    CHECK_FALSE(eval_predicate(lp_cmp(CmpOp::Ge, 0), nr));
    CHECK_FALSE(eval_predicate(len_cmp(CmpOp::Ge, 0), nr));
    CHECK_FALSE(eval_predicate(prefix_eq(0), nr));
    CHECK_FALSE(eval_predicate(comm_contains(0), nr));
    CHECK_FALSE(eval_predicate(visited_contains(0), nr));
    CHECK(eval_predicate(ptrue(), nr));
    CHECK_FALSE(eval_predicate(pfalse(), nr));
    // Connectives stay classical: not(lp>=0) is true on NoRoute.
    CHECK(eval_predicate(neg(lp_cmp(CmpOp::Ge, 0)), nr));
    CHECK(eval_predicate(implies(lp_cmp(CmpOp::Eq, 100), pfalse()), nr));
}

TEST_CASE("eval_predicate on concrete routes") {
    using namespace pred;
    Route r = mk(7, 150, 3, {2}, {1});
    CHECK_FALSE(eval_predicate(is_no_route(), r));
    CHECK(eval_predicate(lp_cmp(CmpOp::Eq, 150), r));
    CHECK(eval_predicate(lp_cmp(CmpOp::Ne, 100), r));
    CHECK(eval_predicate(lp_cmp(CmpOp::Gt, 149), r));
    CHECK_FALSE(eval_predicate(lp_cmp(CmpOp::Lt, 150), r));
    CHECK(eval_predicate(len_cmp(CmpOp::Le, 3), r));
    CHECK(eval_predicate(prefix_eq(7), r));
    CHECK_FALSE(eval_predicate(prefix_eq(8), r));
    CHECK(eval_predicate(comm_contains(1), r));
    CHECK_FALSE(eval_predicate(comm_contains(0), r));
    CHECK(eval_predicate(visited_contains(2), r));
    CHECK_FALSE(eval_predicate(visited_contains(0), r));
    CHECK(eval_predicate(conj({lp_cmp(CmpOp::Eq, 150), len_cmp(CmpOp::Eq, 3)}), r));
    CHECK(eval_predicate(disj({pfalse(), prefix_eq(7)}), r));
    CHECK_FALSE(eval_predicate(neg(prefix_eq(7)), r));
    CHECK(eval_predicate(implies(prefix_eq(8), pfalse()), r));
    CHECK(eval_predicate(conj({}), r));        // empty conjunction is true
    CHECK_FALSE(eval_predicate(disj({}), r));  // empty disjunction is false
}

TEST_CASE("cmp op names round-trip") {
    for (CmpOp op : {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge})
        CHECK(cmp_op_from_name(cmp_op_name(op)) == op);
    CHECK(cmp_op_from_name("==") == CmpOp::Eq);  // accepted alias
    CHECK_THROWS(cmp_op_from_name("~="));
}

TEST_CASE("apply_policy: first match wins, implicit trailing deny") {
    using namespace pred;
    TransferExpr tf;
    tf.clauses.push_back({lp_cmp(CmpOp::Ge, 200), {}, false});                    // deny high lp
    tf.clauses.push_back(
        {ptrue(), {{TransferAction::Kind::SetLp, 50, 0, 0}}, true});              // else set lp
    CHECK(apply_policy(tf, mk(0, 250, 1)).is_no_route());
    Route out = apply_policy(tf, mk(0, 100, 1));
    REQUIRE_FALSE(out.is_no_route());
    CHECK(out.lp() == 50);
    CHECK(out.path_len() == 1);  // no path extension at the policy level

    TransferExpr empty;  // no clauses: everything hits the implicit deny
    CHECK(apply_policy(empty, mk(0, 100, 0)).is_no_route());
    CHECK(apply_policy(tf, Route::no_route()).is_no_route());
}

TEST_CASE("apply_policy actions") {
    using namespace pred;
    TransferExpr tf;
    tf.clauses.push_back({ptrue(),
                          {{TransferAction::Kind::AddComm, 0, 2, 0},
                           {TransferAction::Kind::RemoveComm, 0, 1, 0},
                           {TransferAction::Kind::SetPrefix, 0, 0, 9}},
                          true});
    Route out = apply_policy(tf, mk(3, 100, 2, {}, {1}));
    REQUIRE_FALSE(out.is_no_route());
    CHECK(out.prefix() == 9);
    CHECK(out.comms() == std::set<TagIdx>{2});
}

TEST_CASE("apply_transfer extends the path and rejects unknown edges") {
    NetworkDocument doc = running_example(1);
    const Network& net = doc.net;
    Edge ab{net.index_of("A"), net.index_of("B")};
    Route out = apply_transfer(ab, net.init[net.index_of("A")], net);
    REQUIRE_FALSE(out.is_no_route());
    CHECK(out.path_len() == 1);
    CHECK(out.visited() == std::set<NodeIdx>{net.index_of("A")});
    CHECK(out.lp() == 100);
    CHECK(apply_transfer(ab, Route::no_route(), net).is_no_route());

    Edge ae{net.index_of("A"), net.index_of("E")};
    CHECK_THROWS_AS(apply_transfer(ae, net.init[0], net), UnknownEdgeError);
}

TEST_CASE("validate_network reports each defect class") {
    auto codes = [](const NetworkDocument& doc) {
        std::vector<std::string> cs;
        for (const auto& e : validate_network(doc.net, doc.ifs)) cs.push_back(e.code);
        return cs;
    };
    auto has = [](const std::vector<std::string>& cs, const std::string& c) {
        return std::find(cs.begin(), cs.end(), c) != cs.end();
    };

    NetworkDocument ok = running_example(1);
    CHECK(codes(ok).empty());

    NetworkDocument d = running_example(1);
    d.net.edges.push_back({0, 9});
    CHECK(has(codes(d), "UnknownNode"));

    d = running_example(1);
    d.net.edges.push_back({2, 2});
    CHECK(has(codes(d), "SelfLoop"));

    d = running_example(1);
    d.net.edges.push_back(d.net.edges.front());
    std::sort(d.net.edges.begin(), d.net.edges.end());
    CHECK(has(codes(d), "DuplicateEdge"));

    d = running_example(1);
    d.net.init.pop_back();
    CHECK(has(codes(d), "MissingInit"));

    d = running_example(1);
    d.net.transfer.erase(d.net.transfer.begin());
    CHECK(has(codes(d), "MissingTransfer"));

    d = running_example(1);
    d.net.transfer[{0, 3}] = TransferExpr{};
    CHECK(has(codes(d), "UnknownEdge"));

    d = running_example(1);
    d.ifs.Q.pop_back();
    CHECK(has(codes(d), "MissingInterface"));
}

TEST_CASE("network document JSON round-trips to a fixed point") {
    for (int pkg : {1, 2}) {
        NetworkDocument doc = running_example(pkg);
        std::string j1 = network_to_json(doc);
        NetworkDocument back = parse_network_json(j1);
        std::string j2 = network_to_json(back);
        CHECK(j1 == j2);
        CHECK(back.net.nodes == doc.net.nodes);
        CHECK(back.net.edges == doc.net.edges);
        CHECK(back.net.init.size() == doc.net.init.size());
        for (size_t v = 0; v < doc.net.init.size(); ++v)
            CHECK(back.net.init[v] == doc.net.init[v]);
    }
    // Fat-tree documents too (communities, prefix filters, tag actions).
    for (auto variant : {FattreeVariant::ValleyFree, FattreeVariant::Hijack}) {
        NetworkDocument doc = gen_fattree(4, variant);
        std::string j1 = network_to_json(doc);
        CHECK(j1 == network_to_json(parse_network_json(j1)));
    }
}

TEST_CASE("route JSON: null is NoRoute, hex prefixes, name-based sets") {
    NetworkDocument doc = running_example(1);
    const Network& net = doc.net;
    CHECK(route_from_json_text("null", net).is_no_route());
    Route r = mk(0xdeadbeef, 42, 7, {net.index_of("B")}, {});
    Route back = route_from_json_text(route_to_json(r, net), net);
    CHECK(back == r);
    CHECK(route_to_json(Route::no_route(), net) == "null");
}

TEST_CASE("predicate JSON survives a parse cycle for every head") {
    using namespace pred;
    NetworkDocument doc = gen_fattree(4, FattreeVariant::ValleyFree);
    std::vector<PredPtr> samples = {
        ptrue(),
        pfalse(),
        is_no_route(),
        lp_cmp(CmpOp::Ge, 100),
        len_cmp(CmpOp::Lt, 3),
        prefix_eq(0x12345678),
        comm_contains(0),
        visited_contains(2),
        conj({lp_cmp(CmpOp::Eq, 100), neg(is_no_route())}),
        disj({is_no_route(), implies(len_cmp(CmpOp::Eq, 0), neg(comm_contains(0)))}),
    };
    for (const PredPtr& p : samples) {
        doc.ifs.Y.assign(doc.net.node_count(), p);
        std::string j1 = network_to_json(doc);
        CHECK(j1 == network_to_json(parse_network_json(j1)));
    }
}

TEST_CASE("parse_network_json rejects malformed input") {
    CHECK_THROWS(parse_network_json("{}"));  // no nodes
    CHECK_THROWS(parse_network_json(R"({"nodes":["A"],"edges":[],"init":{},
        "I":{"A":["frobnicate"]}})"));
    // Tags mentioned in guards are auto-collected into the universe...
    NetworkDocument auto_tag = parse_network_json(R"({"nodes":["A","B"],"edges":[["A","B"]],
        "transfer":{"A->B":[{"guard":["comm","contains","9:9"],"verdict":"permit"}]},
        "init":{"A":null,"B":null},"communities":[]})");
    CHECK(auto_tag.net.communities == std::vector<CommunityTag>{{9, 9}});
    // ...but a route carrying a tag no guard or declaration mentions is an error.
    CHECK_THROWS(parse_network_json(R"({"nodes":["A","B"],"edges":[["A","B"]],
        "transfer":{"A->B":[{"guard":["true"],"verdict":"permit"}]},
        "init":{"A":{"lp":100,"pathLen":0,"comms":["8:8"]},"B":null},"communities":[]})"));
}

TEST_CASE("in_neighbors and index_of") {
    NetworkDocument doc = running_example(1);
    const Network& net = doc.net;
    auto in_e = net.in_neighbors(net.index_of("E"));
    std::set<NodeIdx> got(in_e.begin(), in_e.end());
    CHECK(got == std::set<NodeIdx>{net.index_of("B"), net.index_of("C")});
    CHECK_THROWS(net.index_of("nope"));
}
