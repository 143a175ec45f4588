#include "cbver/benchgen.hpp"

#include <algorithm>
#include <deque>

namespace cbver {

namespace {

TransferExpr permit_all() {
    return {{TransferClause{pred::ptrue(), {}, true}}};
}

TransferExpr set_lp(uint64_t lp) {
    return {{TransferClause{pred::ptrue(), {{TransferAction::Kind::SetLp, lp, 0, 0}}, true}}};
}

Route concrete(uint32_t prefix, uint64_t lp, uint64_t len) {
    RouteFields f;
    f.prefix = prefix;
    f.lp = lp;
    f.path_len = len;
    return Route{std::move(f)};
}

void add_duplex(Network& net, NodeIdx a, NodeIdx b, TransferExpr ab, TransferExpr ba) {
    net.edges.push_back({a, b});
    net.edges.push_back({b, a});
    net.transfer[{a, b}] = std::move(ab);
    net.transfer[{b, a}] = std::move(ba);
}

}  // namespace

NetworkDocument running_example(int package) {
    if (package != 1 && package != 2)
        throw std::invalid_argument("running example has packages 1 and 2");

    NetworkDocument doc;
    Network& net = doc.net;
    net.nodes = {"A", "B", "C", "E"};
    const NodeIdx A = 0, B = 1, C = 2, E = 3;
    net.init = {concrete(0, 100, 0), Route::no_route(), Route::no_route(), Route::no_route()};
    add_duplex(net, A, B, set_lp(100), set_lp(100));
    add_duplex(net, A, C, set_lp(100), set_lp(100));
    add_duplex(net, B, E, set_lp(300), set_lp(100));
    add_duplex(net, C, E, set_lp(100), set_lp(100));
    std::sort(net.edges.begin(), net.edges.end());

    Interfaces& ifs = doc.ifs;
    using namespace pred;
    auto concrete_route = neg(is_no_route());
    if (package == 1) {
        ifs.I = {ptrue(), ptrue(), ptrue(), ptrue()};
        ifs.Q = {concrete_route, concrete_route, concrete_route, concrete_route};
        ifs.Y = {ptrue(), ptrue(), ptrue(), concrete_route};
        return doc;
    }

    auto no_c = neg(visited_contains(C));
    ifs.Q = {
        conj({concrete_route, lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Eq, 0), no_c}),
        conj({concrete_route, lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Eq, 1), no_c}),
        conj({concrete_route, lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Eq, 1)}),
        conj({concrete_route, lp_cmp(CmpOp::Eq, 300), len_cmp(CmpOp::Eq, 2), no_c}),
    };
    ifs.I = {
        disj({is_no_route(),
              conj({lp_cmp(CmpOp::Eq, 100), implies(len_cmp(CmpOp::Eq, 0), no_c)})}),
        disj({is_no_route(), conj({lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Ge, 1),
                                   implies(len_cmp(CmpOp::Eq, 1), no_c)})}),
        disj({is_no_route(), conj({lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Ge, 1)})}),
        disj({is_no_route(),
              conj({lp_cmp(CmpOp::Le, 300), len_cmp(CmpOp::Ge, 2),
                    implies(conj({lp_cmp(CmpOp::Eq, 300), len_cmp(CmpOp::Eq, 2)}), no_c)})}),
    };
    ifs.Y = {ptrue(), ptrue(), ptrue(), conj({concrete_route, no_c})};
    return doc;
}

const char* fattree_variant_name(FattreeVariant v) {
    switch (v) {
        case FattreeVariant::Reachability: return "reachability";
        case FattreeVariant::PathLength: return "pathlength";
        case FattreeVariant::ValleyFree: return "valleyfree";
        case FattreeVariant::Hijack: return "hijack";
    }
    return "?";
}

FattreeVariant fattree_variant_from_name(const std::string& s) {
    for (FattreeVariant v : {FattreeVariant::Reachability, FattreeVariant::PathLength,
                             FattreeVariant::ValleyFree, FattreeVariant::Hijack})
        if (s == fattree_variant_name(v)) return v;
    throw std::invalid_argument("unknown fat-tree variant: " + s);
}

std::vector<uint32_t> bfs_distances(const Network& net, NodeIdx src) {
    std::vector<uint32_t> dist(net.node_count(), UINT32_MAX);
    std::deque<NodeIdx> work{src};
    dist[src] = 0;
    while (!work.empty()) {
        NodeIdx v = work.front();
        work.pop_front();
        for (const auto& e : net.edges) {
            if (e.first != v || dist[e.second] != UINT32_MAX) continue;
            dist[e.second] = dist[v] + 1;
            work.push_back(e.second);
        }
    }
    return dist;
}

CBGraph bfs_cbgraph(const Network& net, const std::set<NodeIdx>& roots) {
    std::vector<uint32_t> dist(net.node_count(), UINT32_MAX);
    std::deque<NodeIdx> work;
    for (NodeIdx r : roots) {
        dist[r] = 0;
        work.push_back(r);
    }
    while (!work.empty()) {
        NodeIdx v = work.front();
        work.pop_front();
        for (const auto& e : net.edges) {
            if (e.first != v || dist[e.second] != UINT32_MAX) continue;
            dist[e.second] = dist[v] + 1;
            work.push_back(e.second);
        }
    }
    CBGraph g;
    g.roots = roots;
    for (const auto& e : net.edges)
        if (dist[e.first] != UINT32_MAX && dist[e.second] == dist[e.first] + 1)
            g.edges.insert(e);
    return g;
}

std::set<NodeIdx> uphill_nodes(const Network& net, NodeIdx src) {
    auto layer = [&](NodeIdx v) -> char { return net.name(v)[0]; };  // e / a / c / h
    std::set<NodeIdx> seen{src};
    std::deque<NodeIdx> work{src};
    while (!work.empty()) {
        NodeIdx v = work.front();
        work.pop_front();
        for (const auto& e : net.edges) {
            if (e.first != v || seen.count(e.second)) continue;
            bool up = (layer(e.first) == 'e' && layer(e.second) == 'a') ||
                      (layer(e.first) == 'a' && layer(e.second) == 'c');
            if (!up) continue;
            seen.insert(e.second);
            work.push_back(e.second);
        }
    }
    return seen;
}

NetworkDocument gen_fattree(unsigned pods, FattreeVariant variant) {
    if (pods < 2 || pods % 2 != 0)
        throw BadPods("pods must be an even integer >= 2, got " + std::to_string(pods));
    unsigned half = pods / 2;

    NetworkDocument doc;
    Network& net = doc.net;

    auto edge_node = [&](unsigned p, unsigned i) { return p * half + i; };
    auto agg_node = [&](unsigned p, unsigned j) { return pods * half + p * half + j; };
    auto core_node = [&](unsigned c) { return 2 * pods * half + c; };

    for (unsigned p = 0; p < pods; ++p)
        for (unsigned i = 0; i < half; ++i)
            net.nodes.push_back("edge" + std::to_string(p) + "_" + std::to_string(i));
    for (unsigned p = 0; p < pods; ++p)
        for (unsigned j = 0; j < half; ++j)
            net.nodes.push_back("agg" + std::to_string(p) + "_" + std::to_string(j));
    for (unsigned c = 0; c < half * half; ++c) net.nodes.push_back("core_" + std::to_string(c));

    bool hijack = variant == FattreeVariant::Hijack;
    bool valley = variant == FattreeVariant::ValleyFree;
    NodeIdx hijacker = 0;
    if (hijack) {
        hijacker = static_cast<NodeIdx>(net.nodes.size());
        net.nodes.push_back("hijacker");
    }
    if (valley) net.communities.push_back({1, 0});

    TransferExpr up = permit_all(), down = permit_all();
    if (valley) {
        // Down links tag 1:0; up links drop tagged routes.
        down = {{TransferClause{pred::ptrue(), {{TransferAction::Kind::AddComm, 0, 0, 0}},
                                true}}};
        up = {{TransferClause{pred::comm_contains(0), {}, false},
               TransferClause{pred::ptrue(), {}, true}}};
    }

    for (unsigned p = 0; p < pods; ++p)
        for (unsigned i = 0; i < half; ++i)
            for (unsigned j = 0; j < half; ++j)
                add_duplex(net, edge_node(p, i), agg_node(p, j), up, down);
    for (unsigned p = 0; p < pods; ++p)
        for (unsigned j = 0; j < half; ++j)
            for (unsigned i = 0; i < half; ++i)
                add_duplex(net, agg_node(p, j), core_node(j * half + i), up, down);
    if (hijack) {
        // Cores filter the internal prefix from the hijacker; the hijacker
        // accepts nothing back.
        TransferExpr filter = {{TransferClause{pred::prefix_eq(0), {}, false},
                                TransferClause{pred::ptrue(), {}, true}}};
        TransferExpr drop = {{TransferClause{pred::ptrue(), {}, false}}};
        for (unsigned c = 0; c < half * half; ++c)
            add_duplex(net, hijacker, core_node(c), filter, drop);
    }
    std::sort(net.edges.begin(), net.edges.end());

    NodeIdx dest = edge_node(0, 0);
    net.init.assign(net.node_count(), Route::no_route());
    net.init[dest] = concrete(0, 100, 0);
    if (hijack) net.init[hijacker] = concrete(0, 200, 0);

    Interfaces& ifs = doc.ifs;
    ifs.I.resize(net.node_count());
    ifs.Q.resize(net.node_count());
    ifs.Y.resize(net.node_count());

    using namespace pred;
    auto concrete_route = neg(is_no_route());
    std::vector<uint32_t> dist = bfs_distances(net, dest);
    std::set<NodeIdx> uphill = uphill_nodes(net, dest);

    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        switch (variant) {
            case FattreeVariant::Reachability:
                ifs.I[v] = ptrue();
                ifs.Q[v] = concrete_route;
                ifs.Y[v] = concrete_route;
                break;
            case FattreeVariant::PathLength:
                ifs.I[v] = disj({is_no_route(), conj({lp_cmp(CmpOp::Eq, 100),
                                                      len_cmp(CmpOp::Ge, dist[v])})});
                ifs.Q[v] = conj({concrete_route, lp_cmp(CmpOp::Eq, 100),
                                 len_cmp(CmpOp::Eq, dist[v])});
                ifs.Y[v] = conj({concrete_route, len_cmp(CmpOp::Eq, dist[v])});
                break;
            case FattreeVariant::ValleyFree: {
                auto untagged = neg(comm_contains(0));
                bool uh = uphill.count(v) != 0;
                std::vector<PredPtr> inv = {lp_cmp(CmpOp::Eq, 100), len_cmp(CmpOp::Ge, dist[v])};
                if (uh) inv.push_back(implies(len_cmp(CmpOp::Eq, dist[v]), untagged));
                ifs.I[v] = disj({is_no_route(), conj(std::move(inv))});
                std::vector<PredPtr> q = {concrete_route, lp_cmp(CmpOp::Eq, 100),
                                          len_cmp(CmpOp::Eq, dist[v])};
                if (uh) q.push_back(untagged);
                ifs.Q[v] = conj(std::move(q));
                ifs.Y[v] = uh ? conj({concrete_route, untagged}) : concrete_route;
                break;
            }
            case FattreeVariant::Hijack: {
                if (hijack && v == hijacker) {
                    ifs.I[v] = conj({concrete_route, prefix_eq(0)});
                    ifs.Q[v] = ifs.I[v];
                    ifs.Y[v] = ptrue();
                } else {
                    auto clean = neg(visited_contains(hijacker));
                    ifs.I[v] = disj({is_no_route(), clean});
                    ifs.Q[v] = conj({concrete_route, clean});
                    ifs.Y[v] = conj({concrete_route, clean});
                }
                break;
            }
        }
    }
    return doc;
}

}  // namespace cbver
