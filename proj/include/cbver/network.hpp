#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cbver/expr.hpp"
#include "cbver/route.hpp"

namespace cbver {

using Edge = std::pair<NodeIdx, NodeIdx>;

struct CommunityTag {
    uint16_t hi = 0;
    uint16_t lo = 0;
    auto operator<=>(const CommunityTag&) const = default;
    std::string str() const { return std::to_string(hi) + ":" + std::to_string(lo); }
};

enum class MergeKind { BgpLpThenLen };

struct Network {
    std::vector<std::string> nodes;          // node order defines NodeIdx
    std::vector<CommunityTag> communities;   // tag order defines TagIdx
    std::vector<Edge> edges;                 // sorted, unique
    std::vector<Route> init;                 // per node
    std::map<Edge, TransferExpr> transfer;   // per edge
    MergeKind merge_kind = MergeKind::BgpLpThenLen;

    size_t node_count() const { return nodes.size(); }
    bool has_edge(const Edge& e) const { return transfer.count(e) != 0; }
    std::vector<NodeIdx> in_neighbors(NodeIdx v) const;
    const std::string& name(NodeIdx v) const { return nodes.at(v); }
    NodeIdx index_of(const std::string& name) const;
};

struct Interfaces {
    std::vector<PredPtr> I, Q, Y;  // per node
};

struct ValidationError {
    std::string code;   // UnknownNode, MissingTransfer, ...
    std::string locus;  // node or edge name
    std::string detail;
};

std::vector<ValidationError> validate_network(const Network& net, const Interfaces& ifs);

// Transfer along e applied to r: policy clauses, then path extension
// (pathLen+1, sender into visited) on permit. Throws UnknownEdge on e not in E.
Route apply_transfer(const Edge& e, const Route& r, const Network& net);

struct UnknownEdgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- JSON I/O (single document: network + interfaces) ---

struct NetworkDocument {
    Network net;
    Interfaces ifs;
};

NetworkDocument load_network_json(const std::string& path);
NetworkDocument parse_network_json(const std::string& text);
std::string network_to_json(const NetworkDocument& doc);

std::string route_to_json(const Route& r, const Network& net);
Route route_from_json_text(const std::string& text, const Network& net);

std::string predicate_to_json(const PredPtr& p, const Network& net);

}  // namespace cbver
