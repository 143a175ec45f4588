#include "cbver/network.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace cbver {

std::vector<NodeIdx> Network::in_neighbors(NodeIdx v) const {
    std::vector<NodeIdx> res;
    for (const auto& e : edges)
        if (e.second == v) res.push_back(e.first);
    return res;
}

NodeIdx Network::index_of(const std::string& n) const {
    auto it = std::find(nodes.begin(), nodes.end(), n);
    if (it == nodes.end()) throw std::runtime_error("unknown node: " + n);
    return static_cast<NodeIdx>(it - nodes.begin());
}

Route apply_transfer(const Edge& e, const Route& r, const Network& net) {
    auto it = net.transfer.find(e);
    if (it == net.transfer.end())
        throw UnknownEdgeError("unknown edge: " + net.name(e.first) + "->" + net.name(e.second));
    Route out = apply_policy(it->second, r);
    if (out.is_no_route()) return out;
    out.rec().path_len += 1;
    out.rec().visited.insert(e.first);
    return out;
}

std::vector<ValidationError> validate_network(const Network& net, const Interfaces& ifs) {
    std::vector<ValidationError> errs;
    auto node_name = [&](NodeIdx v) {
        return v < net.node_count() ? net.name(v) : "#" + std::to_string(v);
    };
    auto edge_name = [&](const Edge& e) { return node_name(e.first) + "->" + node_name(e.second); };

    for (const auto& e : net.edges) {
        if (e.first >= net.node_count() || e.second >= net.node_count())
            errs.push_back({"UnknownNode", edge_name(e), "edge endpoint not declared"});
        else if (e.first == e.second)
            errs.push_back({"SelfLoop", edge_name(e), "self-loops are not allowed"});
    }
    for (size_t i = 1; i < net.edges.size(); ++i)
        if (net.edges[i] == net.edges[i - 1])
            errs.push_back({"DuplicateEdge", edge_name(net.edges[i]), "edge declared twice"});

    if (net.init.size() != net.node_count())
        errs.push_back({"MissingInit", "", "init entries do not cover the node set"});
    for (const auto& e : net.edges)
        if (!net.transfer.count(e))
            errs.push_back({"MissingTransfer", edge_name(e), "no transfer for declared edge"});
    for (const auto& [e, tf] : net.transfer)
        if (std::find(net.edges.begin(), net.edges.end(), e) == net.edges.end())
            errs.push_back({"UnknownEdge", edge_name(e), "transfer on undeclared edge"});

    for (auto* m : {&ifs.I, &ifs.Q, &ifs.Y})
        if (m->size() != net.node_count())
            errs.push_back({"MissingInterface", "", "interface map does not cover the node set"});
    return errs;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

static CommunityTag parse_tag(const std::string& s) {
    auto pos = s.find(':');
    if (pos == std::string::npos) throw std::runtime_error("bad community tag: " + s);
    return {static_cast<uint16_t>(std::stoul(s.substr(0, pos))),
            static_cast<uint16_t>(std::stoul(s.substr(pos + 1)))};
}

static uint32_t parse_prefix(const json& j) {
    if (j.is_number_unsigned()) return j.get<uint32_t>();
    std::string s = j.get<std::string>();
    return static_cast<uint32_t>(std::stoul(s, nullptr, 0));
}

static std::string prefix_str(uint32_t p) {
    char buf[16];
    snprintf(buf, sizeof buf, "0x%08x", p);
    return buf;
}

namespace {

struct TagTable {
    std::vector<CommunityTag> tags;
    TagIdx index(const CommunityTag& t) const {
        auto it = std::find(tags.begin(), tags.end(), t);
        if (it == tags.end()) throw std::runtime_error("undeclared community: " + t.str());
        return static_cast<TagIdx>(it - tags.begin());
    }
};

// First pass: gather every community tag mentioned anywhere so the tag
// universe is fixed before predicates are resolved.
void collect_tags(const json& j, std::set<CommunityTag>& out) {
    if (j.is_array()) {
        if (j.size() >= 2 && j[0].is_string()) {
            std::string head = j[0].get<std::string>();
            if (head == "comm" && j.size() == 3 && j[2].is_string())
                out.insert(parse_tag(j[2].get<std::string>()));
            if ((head == "add-comm" || head == "remove-comm") && j[1].is_string())
                out.insert(parse_tag(j[1].get<std::string>()));
        }
        for (const auto& c : j) collect_tags(c, out);
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items()) collect_tags(v, out);
    }
}

PredPtr parse_pred(const json& j, const Network& net, const TagTable& tags) {
    if (j.is_boolean()) return j.get<bool>() ? pred::ptrue() : pred::pfalse();
    if (!j.is_array() || j.empty() || !j[0].is_string())
        throw std::runtime_error("malformed predicate: " + j.dump());
    std::string head = j[0].get<std::string>();
    if (head == "true") return pred::ptrue();
    if (head == "false") return pred::pfalse();
    if (head == "isNoRoute") return pred::is_no_route();
    if (head == "lp") return pred::lp_cmp(cmp_op_from_name(j.at(1)), j.at(2).get<uint64_t>());
    if (head == "pathLen" || head == "len")
        return pred::len_cmp(cmp_op_from_name(j.at(1)), j.at(2).get<uint64_t>());
    if (head == "prefix") return pred::prefix_eq(parse_prefix(j.at(2)));
    if (head == "comm") return pred::comm_contains(tags.index(parse_tag(j.at(2))));
    if (head == "visited") return pred::visited_contains(net.index_of(j.at(2)));
    std::vector<PredPtr> args;
    for (size_t i = 1; i < j.size(); ++i) args.push_back(parse_pred(j[i], net, tags));
    if (head == "and") return pred::conj(std::move(args));
    if (head == "or") return pred::disj(std::move(args));
    if (head == "not") {
        if (args.size() != 1) throw std::runtime_error("not takes one argument");
        return pred::neg(args[0]);
    }
    if (head == "implies") {
        if (args.size() != 2) throw std::runtime_error("implies takes two arguments");
        return pred::implies(args[0], args[1]);
    }
    throw std::runtime_error("unknown predicate head: " + head);
}

Route parse_route(const json& j, const Network& net, const TagTable& tags) {
    if (j.is_null()) return Route::no_route();
    RouteFields f;
    if (j.contains("prefix")) f.prefix = parse_prefix(j["prefix"]);
    if (j.contains("lp")) f.lp = j["lp"].get<uint64_t>();
    if (j.contains("pathLen")) f.path_len = j["pathLen"].get<uint64_t>();
    for (const auto& v : j.value("visited", json::array())) f.visited.insert(net.index_of(v));
    for (const auto& c : j.value("comms", json::array()))
        f.comms.insert(tags.index(parse_tag(c.get<std::string>())));
    return Route{std::move(f)};
}

TransferExpr parse_transfer(const json& j, const Network& net, const TagTable& tags) {
    TransferExpr tf;
    for (const auto& cj : j) {
        TransferClause cl;
        cl.guard = cj.contains("guard") ? parse_pred(cj["guard"], net, tags) : pred::ptrue();
        std::string verdict = cj.value("verdict", "permit");
        cl.permit = verdict == "permit";
        for (const auto& aj : cj.value("actions", json::array())) {
            std::string kind = aj.at(0).get<std::string>();
            TransferAction a;
            if (kind == "set-lp") {
                a.kind = TransferAction::Kind::SetLp;
                a.lp = aj.at(1).get<uint64_t>();
            } else if (kind == "add-comm") {
                a.kind = TransferAction::Kind::AddComm;
                a.tag = tags.index(parse_tag(aj.at(1)));
            } else if (kind == "remove-comm") {
                a.kind = TransferAction::Kind::RemoveComm;
                a.tag = tags.index(parse_tag(aj.at(1)));
            } else if (kind == "set-prefix") {
                a.kind = TransferAction::Kind::SetPrefix;
                a.prefix = parse_prefix(aj.at(1));
            } else {
                throw std::runtime_error("unknown transfer action: " + kind);
            }
            cl.actions.push_back(a);
        }
        tf.clauses.push_back(std::move(cl));
    }
    return tf;
}

json pred_to_json(const PredPtr& p, const Network& net);

json preds_to_json(const std::vector<PredPtr>& args, const char* head, const Network& net) {
    json j = json::array({head});
    for (const auto& a : args) j.push_back(pred_to_json(a, net));
    return j;
}

json pred_to_json(const PredPtr& p, const Network& net) {
    using P = PredicateExpr;
    return std::visit(
        [&](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, P::True>) return json::array({"true"});
            else if constexpr (std::is_same_v<T, P::False>) return json::array({"false"});
            else if constexpr (std::is_same_v<T, P::IsNoRoute>) return json::array({"isNoRoute"});
            else if constexpr (std::is_same_v<T, P::LpCmp>)
                return json::array({"lp", cmp_op_name(n.op), n.value});
            else if constexpr (std::is_same_v<T, P::LenCmp>)
                return json::array({"pathLen", cmp_op_name(n.op), n.value});
            else if constexpr (std::is_same_v<T, P::PrefixEq>)
                return json::array({"prefix", "=", prefix_str(n.pattern)});
            else if constexpr (std::is_same_v<T, P::CommContains>)
                return json::array({"comm", "contains", net.communities.at(n.tag).str()});
            else if constexpr (std::is_same_v<T, P::VisitedContains>)
                return json::array({"visited", "contains", net.name(n.node)});
            else if constexpr (std::is_same_v<T, P::And>) return preds_to_json(n.args, "and", net);
            else if constexpr (std::is_same_v<T, P::Or>) return preds_to_json(n.args, "or", net);
            else if constexpr (std::is_same_v<T, P::Not>)
                return json::array({"not", pred_to_json(n.arg, net)});
            else
                return json::array({"implies", pred_to_json(n.lhs, net), pred_to_json(n.rhs, net)});
        },
        p->node);
}

json route_to_json_obj(const Route& r, const Network& net) {
    if (r.is_no_route()) return nullptr;
    json j;
    j["prefix"] = prefix_str(r.prefix());
    j["lp"] = r.lp();
    j["pathLen"] = r.path_len();
    json vis = json::array();
    for (auto v : r.visited()) vis.push_back(net.name(v));
    j["visited"] = vis;
    json comms = json::array();
    for (auto t : r.comms()) comms.push_back(net.communities.at(t).str());
    j["comms"] = comms;
    return j;
}

}  // namespace

NetworkDocument parse_network_json(const std::string& text) {
    json j = json::parse(text);
    NetworkDocument doc;
    Network& net = doc.net;

    for (const auto& n : j.at("nodes")) net.nodes.push_back(n.get<std::string>());

    std::set<CommunityTag> tagset;
    for (const auto& c : j.value("communities", json::array()))
        tagset.insert(parse_tag(c.get<std::string>()));
    collect_tags(j, tagset);
    TagTable tags{{tagset.begin(), tagset.end()}};
    net.communities = tags.tags;

    for (const auto& ej : j.at("edges"))
        net.edges.emplace_back(net.index_of(ej.at(0)), net.index_of(ej.at(1)));
    std::sort(net.edges.begin(), net.edges.end());

    const json& initj = j.value("init", json::object());
    net.init.assign(net.node_count(), Route::no_route());
    for (const auto& [name, rj] : initj.items())
        net.init[net.index_of(name)] = parse_route(rj, net, tags);

    const json transferj = j.value("transfer", json::object());
    for (const auto& [ename, tj] : transferj.items()) {
        auto pos = ename.find("->");
        if (pos == std::string::npos) throw std::runtime_error("bad edge key: " + ename);
        Edge e{net.index_of(ename.substr(0, pos)), net.index_of(ename.substr(pos + 2))};
        net.transfer[e] = parse_transfer(tj, net, tags);
    }

    auto load_ifs = [&](const char* key, std::vector<PredPtr>& out) {
        out.assign(net.node_count(), pred::ptrue());
        const json sec = j.value(key, json::object());
        for (const auto& [name, pj] : sec.items())
            out[net.index_of(name)] = parse_pred(pj, net, tags);
    };
    load_ifs("I", doc.ifs.I);
    load_ifs("Q", doc.ifs.Q);
    load_ifs("Y", doc.ifs.Y);
    return doc;
}

NetworkDocument load_network_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network_json(ss.str());
}

std::string network_to_json(const NetworkDocument& doc) {
    const Network& net = doc.net;
    json j;
    j["nodes"] = net.nodes;
    json comms = json::array();
    for (const auto& t : net.communities) comms.push_back(t.str());
    j["communities"] = comms;
    json edges = json::array();
    for (const auto& e : net.edges) edges.push_back({net.name(e.first), net.name(e.second)});
    j["edges"] = edges;
    json init;
    for (NodeIdx v = 0; v < net.node_count(); ++v)
        init[net.name(v)] = route_to_json_obj(net.init[v], net);
    j["init"] = init;
    json transfer;
    for (const auto& [e, tf] : net.transfer) {
        json clauses = json::array();
        for (const auto& cl : tf.clauses) {
            json cj;
            cj["guard"] = pred_to_json(cl.guard, net);
            json acts = json::array();
            for (const auto& a : cl.actions) {
                switch (a.kind) {
                    case TransferAction::Kind::SetLp: acts.push_back({"set-lp", a.lp}); break;
                    case TransferAction::Kind::AddComm:
                        acts.push_back({"add-comm", net.communities.at(a.tag).str()});
                        break;
                    case TransferAction::Kind::RemoveComm:
                        acts.push_back({"remove-comm", net.communities.at(a.tag).str()});
                        break;
                    case TransferAction::Kind::SetPrefix:
                        acts.push_back({"set-prefix", prefix_str(a.prefix)});
                        break;
                }
            }
            cj["actions"] = acts;
            cj["verdict"] = cl.permit ? "permit" : "deny";
            clauses.push_back(cj);
        }
        transfer[net.name(e.first) + "->" + net.name(e.second)] = clauses;
    }
    j["transfer"] = transfer;
    for (auto [key, ifs] : {std::pair{"I", &doc.ifs.I}, {"Q", &doc.ifs.Q}, {"Y", &doc.ifs.Y}}) {
        json m;
        for (NodeIdx v = 0; v < net.node_count(); ++v)
            m[net.name(v)] = pred_to_json(ifs->at(v), net);
        j[key] = m;
    }
    return j.dump(2);
}

std::string route_to_json(const Route& r, const Network& net) {
    return route_to_json_obj(r, net).dump();
}

Route route_from_json_text(const std::string& text, const Network& net) {
    std::set<CommunityTag> tagset(net.communities.begin(), net.communities.end());
    TagTable tags{net.communities};
    return parse_route(json::parse(text), net, tags);
}

std::string predicate_to_json(const PredPtr& p, const Network& net) {
    return pred_to_json(p, net).dump();
}

}  // namespace cbver
