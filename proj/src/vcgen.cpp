#include "cbver/vcgen.hpp"

#include <sstream>

namespace cbver {

const char* vc_kind_name(VcKind k) {
    switch (k) {
        case VcKind::Init: return "init";
        case VcKind::Inv: return "inv";
        case VcKind::Prop: return "prop";
        case VcKind::CbRoot: return "root";
        case VcKind::CbEdge: return "edge";
    }
    return "?";
}

static void declare_route(std::ostringstream& os, const SmtEncoder& enc, const std::string& name) {
    os << "(declare-const " << name << " Route)\n";
    os << "(assert " << enc.wellformed_term(name) << ")\n";
}

static std::string finish(std::ostringstream& os) {
    os << "(check-sat)\n(get-model)\n";
    return os.str();
}

VcQuery build_init_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v) {
    const Network& net = enc.net();
    VcQuery q;
    q.kind = VcKind::Init;
    q.node = v;
    q.name = "init[" + net.name(v) + "]";
    q.essential = true;
    std::ostringstream os;
    os << enc.prelude();
    os << "(assert (not " << enc.predicate_term(ifs.I.at(v), enc.route_literal(net.init.at(v)))
       << "))\n";
    q.script = finish(os);
    return q;
}

VcQuery build_inv_vc(const SmtEncoder& enc, const Interfaces& ifs, const Edge& e) {
    const Network& net = enc.net();
    VcQuery q;
    q.kind = VcKind::Inv;
    q.edge = e;
    q.name = "inv[" + net.name(e.first) + "->" + net.name(e.second) + "]";
    q.essential = true;
    q.route_vars = {"su", "sv"};
    std::ostringstream os;
    os << enc.prelude();
    declare_route(os, enc, "su");
    declare_route(os, enc, "sv");
    os << "(assert " << enc.predicate_term(ifs.I.at(e.first), "su") << ")\n";
    os << "(assert " << enc.predicate_term(ifs.I.at(e.second), "sv") << ")\n";
    std::string merged = enc.merge_term("sv", enc.transfer_term(e, "su"));
    os << "(assert (not " << enc.predicate_term(ifs.I.at(e.second), merged) << "))\n";
    q.script = finish(os);
    return q;
}

VcQuery build_prop_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v) {
    const Network& net = enc.net();
    VcQuery q;
    q.kind = VcKind::Prop;
    q.node = v;
    q.name = "prop[" + net.name(v) + "]";
    q.essential = true;
    q.route_vars = {"s"};
    std::ostringstream os;
    os << enc.prelude();
    declare_route(os, enc, "s");
    os << "(assert " << enc.predicate_term(ifs.Q.at(v), "s") << ")\n";
    os << "(assert (not " << enc.predicate_term(ifs.Y.at(v), "s") << "))\n";
    q.script = finish(os);
    return q;
}

VcQuery build_cbroot_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v) {
    const Network& net = enc.net();
    VcQuery q;
    q.kind = VcKind::CbRoot;
    q.node = v;
    q.name = "root[" + net.name(v) + "]";
    std::ostringstream os;
    os << enc.prelude();
    // One query for the whole conjunction: the negation is a disjunction over
    // the ground init clause and one skolemized clause per incoming edge.
    std::vector<std::string> disjuncts;
    disjuncts.push_back(
        "(not " + enc.predicate_term(ifs.Q.at(v), enc.route_literal(net.init.at(v))) + ")");
    for (NodeIdx u : net.in_neighbors(v)) {
        std::string su = "su" + std::to_string(u);
        std::string sv = "sv" + std::to_string(u);
        declare_route(os, enc, su);
        declare_route(os, enc, sv);
        q.route_vars.push_back(su);
        q.route_vars.push_back(sv);
        std::string merged = enc.merge_term(sv, enc.transfer_term({u, v}, su));
        disjuncts.push_back("(and " + enc.predicate_term(ifs.I.at(u), su) + " " +
                            enc.predicate_term(ifs.Q.at(v), sv) + " (not " +
                            enc.predicate_term(ifs.Q.at(v), merged) + "))");
    }
    if (disjuncts.size() == 1) {
        os << "(assert " << disjuncts[0] << ")\n";
    } else {
        os << "(assert (or";
        for (const auto& d : disjuncts) os << " " << d;
        os << "))\n";
    }
    q.script = finish(os);
    return q;
}

VcQuery build_cbedge_vc(const SmtEncoder& enc, const Interfaces& ifs, const Edge& e) {
    const Network& net = enc.net();
    VcQuery q;
    q.kind = VcKind::CbEdge;
    q.edge = e;
    q.name = "edge[" + net.name(e.first) + "->" + net.name(e.second) + "]";
    q.route_vars = {"su", "sv"};
    std::ostringstream os;
    os << enc.prelude();
    declare_route(os, enc, "su");
    declare_route(os, enc, "sv");
    os << "(assert " << enc.predicate_term(ifs.Q.at(e.first), "su") << ")\n";
    os << "(assert " << enc.predicate_term(ifs.I.at(e.second), "sv") << ")\n";
    std::string merged = enc.merge_term("sv", enc.transfer_term(e, "su"));
    os << "(assert (not " << enc.predicate_term(ifs.Q.at(e.second), merged) << "))\n";
    q.script = finish(os);
    return q;
}

std::vector<VcQuery> generate_vcs(const SmtEncoder& enc, const Interfaces& ifs) {
    const Network& net = enc.net();
    std::vector<VcQuery> out;
    for (NodeIdx v = 0; v < net.node_count(); ++v) out.push_back(build_init_vc(enc, ifs, v));
    for (const auto& e : net.edges) out.push_back(build_inv_vc(enc, ifs, e));
    for (NodeIdx v = 0; v < net.node_count(); ++v) out.push_back(build_prop_vc(enc, ifs, v));
    for (NodeIdx v = 0; v < net.node_count(); ++v) out.push_back(build_cbroot_vc(enc, ifs, v));
    for (const auto& e : net.edges) out.push_back(build_cbedge_vc(enc, ifs, e));
    return out;
}

bool replay_counterexample(const Network& net, const Interfaces& ifs, const VcQuery& vc,
                           const std::map<std::string, Route>& model) {
    switch (vc.kind) {
        case VcKind::Init:
            return !eval_predicate(ifs.I.at(vc.node), net.init.at(vc.node));
        case VcKind::Inv: {
            const Route& su = model.at("su");
            const Route& sv = model.at("sv");
            if (!eval_predicate(ifs.I.at(vc.edge.first), su)) return false;
            if (!eval_predicate(ifs.I.at(vc.edge.second), sv)) return false;
            Route merged = merge(sv, apply_transfer(vc.edge, su, net));
            return !eval_predicate(ifs.I.at(vc.edge.second), merged);
        }
        case VcKind::Prop: {
            const Route& s = model.at("s");
            return eval_predicate(ifs.Q.at(vc.node), s) && !eval_predicate(ifs.Y.at(vc.node), s);
        }
        case VcKind::CbRoot: {
            if (!eval_predicate(ifs.Q.at(vc.node), net.init.at(vc.node))) return true;
            for (NodeIdx u : net.in_neighbors(vc.node)) {
                auto su_it = model.find("su" + std::to_string(u));
                auto sv_it = model.find("sv" + std::to_string(u));
                if (su_it == model.end() || sv_it == model.end()) continue;
                if (!eval_predicate(ifs.I.at(u), su_it->second)) continue;
                if (!eval_predicate(ifs.Q.at(vc.node), sv_it->second)) continue;
                Route merged =
                    merge(sv_it->second, apply_transfer({u, vc.node}, su_it->second, net));
                if (!eval_predicate(ifs.Q.at(vc.node), merged)) return true;
            }
            return false;
        }
        case VcKind::CbEdge: {
            const Route& su = model.at("su");
            const Route& sv = model.at("sv");
            if (!eval_predicate(ifs.Q.at(vc.edge.first), su)) return false;
            if (!eval_predicate(ifs.I.at(vc.edge.second), sv)) return false;
            Route merged = merge(sv, apply_transfer(vc.edge, su, net));
            return !eval_predicate(ifs.Q.at(vc.edge.second), merged);
        }
    }
    return false;
}

}  // namespace cbver
