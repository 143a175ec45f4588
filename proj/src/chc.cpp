#include "cbver/chc.hpp"

#include <cctype>
#include <sstream>

namespace cbver {

namespace {

// One route value in the flattened tuple encoding; each member is a term.
struct Flat {
    std::string nr, pf, lp, ln, vi, co;
};

Flat flat_vars(const std::string& p) {
    return {p + "nr", p + "pf", p + "lp", p + "ln", p + "vi", p + "co"};
}

std::string flat_decls(const SmtEncoder& enc, const Flat& f) {
    std::ostringstream os;
    os << "(" << f.nr << " Bool) (" << f.pf << " (_ BitVec " << enc.prefix_width() << ")) ("
       << f.lp << " Int) (" << f.ln << " Int) (" << f.vi << " (_ BitVec " << enc.visited_width()
       << ")) (" << f.co << " (_ BitVec " << enc.comms_width() << "))";
    return os.str();
}

std::string flat_app(const std::string& pred, const Flat& f) {
    return "(" + pred + " " + f.nr + " " + f.pf + " " + f.lp + " " + f.ln + " " + f.vi + " " +
           f.co + ")";
}

Flat flat_zero(const SmtEncoder& enc) {
    return {"true", enc.bv_literal(0, enc.prefix_width()), "0", "0",
            enc.bv_literal(0, enc.visited_width()), enc.bv_literal(0, enc.comms_width())};
}

Flat flat_literal(const SmtEncoder& enc, const Route& r) {
    if (r.is_no_route()) return flat_zero(enc);
    const RouteFields& f = r.rec();
    return {"false",
            enc.bv_literal(f.prefix, enc.prefix_width()),
            std::to_string(f.lp),
            std::to_string(f.path_len),
            enc.mask_literal(f.visited, enc.visited_width()),
            enc.mask_literal(f.comms, enc.comms_width())};
}

// Canonical-form side condition: NoRoute carries all-zero fields, concrete
// routes carry non-negative integers.
std::string flat_wf(const SmtEncoder& enc, const Flat& f) {
    Flat z = flat_zero(enc);
    return "(and (=> " + f.nr + " (and (= " + f.pf + " " + z.pf + ") (= " + f.lp +
           " 0) (= " + f.ln + " 0) (= " + f.vi + " " + z.vi + ") (= " + f.co + " " + z.co +
           "))) (=> (not " + f.nr + ") (and (>= " + f.lp + " 0) (>= " + f.ln + " 0))))";
}

std::string int_cmp_flat(CmpOp op, const std::string& lhs, uint64_t rhs) {
    std::string r = std::to_string(rhs);
    switch (op) {
        case CmpOp::Eq: return "(= " + lhs + " " + r + ")";
        case CmpOp::Ne: return "(not (= " + lhs + " " + r + "))";
        case CmpOp::Lt: return "(< " + lhs + " " + r + ")";
        case CmpOp::Le: return "(<= " + lhs + " " + r + ")";
        case CmpOp::Gt: return "(> " + lhs + " " + r + ")";
        case CmpOp::Ge: return "(>= " + lhs + " " + r + ")";
    }
    return "false";
}

std::string pred_flat(const SmtEncoder& enc, const PredPtr& p, const Flat& s) {
    using P = PredicateExpr;
    std::string concrete = "(not " + s.nr + ")";
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, P::True>) {
                return "true";
            } else if constexpr (std::is_same_v<T, P::False>) {
                return "false";
            } else if constexpr (std::is_same_v<T, P::IsNoRoute>) {
                return s.nr;
            } else if constexpr (std::is_same_v<T, P::LpCmp>) {
                return "(and " + concrete + " " + int_cmp_flat(n.op, s.lp, n.value) + ")";
            } else if constexpr (std::is_same_v<T, P::LenCmp>) {
                return "(and " + concrete + " " + int_cmp_flat(n.op, s.ln, n.value) + ")";
            } else if constexpr (std::is_same_v<T, P::PrefixEq>) {
                return "(and " + concrete + " (= " + s.pf + " " +
                       enc.bv_literal(n.pattern, enc.prefix_width()) + "))";
            } else if constexpr (std::is_same_v<T, P::CommContains>) {
                std::string bit = enc.mask_literal({n.tag}, enc.comms_width());
                return "(and " + concrete + " (= (bvand " + s.co + " " + bit + ") " + bit + "))";
            } else if constexpr (std::is_same_v<T, P::VisitedContains>) {
                std::string bit = enc.mask_literal({n.node}, enc.visited_width());
                return "(and " + concrete + " (= (bvand " + s.vi + " " + bit + ") " + bit + "))";
            } else if constexpr (std::is_same_v<T, P::And>) {
                if (n.args.empty()) return "true";
                if (n.args.size() == 1) return pred_flat(enc, n.args[0], s);
                std::string out = "(and";
                for (const auto& a : n.args) out += " " + pred_flat(enc, a, s);
                return out + ")";
            } else if constexpr (std::is_same_v<T, P::Or>) {
                if (n.args.empty()) return "false";
                if (n.args.size() == 1) return pred_flat(enc, n.args[0], s);
                std::string out = "(or";
                for (const auto& a : n.args) out += " " + pred_flat(enc, a, s);
                return out + ")";
            } else if constexpr (std::is_same_v<T, P::Not>) {
                return "(not " + pred_flat(enc, n.arg, s) + ")";
            } else {
                static_assert(std::is_same_v<T, P::Implies>);
                return "(=> " + pred_flat(enc, n.lhs, s) + " " + pred_flat(enc, n.rhs, s) + ")";
            }
        },
        p->node);
}

Flat transfer_flat(const SmtEncoder& enc, const Edge& e, const Flat& s) {
    const TransferExpr& tf = enc.net().transfer.at(e);
    Flat deny = flat_zero(enc);
    Flat body = deny;
    for (auto c = tf.clauses.rbegin(); c != tf.clauses.rend(); ++c) {
        Flat branch;
        if (!c->permit) {
            branch = deny;
        } else {
            branch.nr = "false";
            branch.pf = s.pf;
            branch.lp = s.lp;
            branch.co = s.co;
            for (const auto& act : c->actions) {
                switch (act.kind) {
                    case TransferAction::Kind::SetLp: branch.lp = std::to_string(act.lp); break;
                    case TransferAction::Kind::SetPrefix:
                        branch.pf = enc.bv_literal(act.prefix, enc.prefix_width());
                        break;
                    case TransferAction::Kind::AddComm:
                        branch.co = "(bvor " + branch.co + " " +
                                    enc.mask_literal({act.tag}, enc.comms_width()) + ")";
                        break;
                    case TransferAction::Kind::RemoveComm:
                        branch.co = "(bvand " + branch.co + " (bvnot " +
                                    enc.mask_literal({act.tag}, enc.comms_width()) + "))";
                        break;
                }
            }
            branch.ln = "(+ " + s.ln + " 1)";
            branch.vi = "(bvor " + s.vi + " " +
                        enc.mask_literal({e.first}, enc.visited_width()) + ")";
        }
        std::string g = pred_flat(enc, c->guard, s);
        Flat next;
        next.nr = "(ite " + g + " " + branch.nr + " " + body.nr + ")";
        next.pf = "(ite " + g + " " + branch.pf + " " + body.pf + ")";
        next.lp = "(ite " + g + " " + branch.lp + " " + body.lp + ")";
        next.ln = "(ite " + g + " " + branch.ln + " " + body.ln + ")";
        next.vi = "(ite " + g + " " + branch.vi + " " + body.vi + ")";
        next.co = "(ite " + g + " " + branch.co + " " + body.co + ")";
        body = next;
    }
    Flat out;
    out.nr = "(ite " + s.nr + " true " + body.nr + ")";
    out.pf = "(ite " + s.nr + " " + deny.pf + " " + body.pf + ")";
    out.lp = "(ite " + s.nr + " 0 " + body.lp + ")";
    out.ln = "(ite " + s.nr + " 0 " + body.ln + ")";
    out.vi = "(ite " + s.nr + " " + deny.vi + " " + body.vi + ")";
    out.co = "(ite " + s.nr + " " + deny.co + " " + body.co + ")";
    return out;
}

Flat merge_flat(const Flat& a, const Flat& b) {
    // Same total order as the datatype encoding.
    std::string sel = "(or (> " + a.lp + " " + b.lp + ") (and (= " + a.lp + " " + b.lp +
                      ") (or (< " + a.ln + " " + b.ln + ") (and (= " + a.ln + " " + b.ln +
                      ") (or (bvult " + a.pf + " " + b.pf + ") (and (= " + a.pf + " " + b.pf +
                      ") (or (bvult " + a.vi + " " + b.vi + ") (and (= " + a.vi + " " + b.vi +
                      ") (or (bvult " + a.co + " " + b.co + ") (= " + a.co + " " + b.co +
                      "))))))))))";
    auto pick = [&](const std::string& x, const std::string& y, const std::string& anr,
                    const std::string& bnr) {
        return "(ite " + anr + " " + y + " (ite " + bnr + " " + x + " (ite " + sel + " " + x +
               " " + y + ")))";
    };
    Flat m;
    m.nr = "(and " + a.nr + " " + b.nr + ")";
    m.pf = pick(a.pf, b.pf, a.nr, b.nr);
    m.lp = pick(a.lp, b.lp, a.nr, b.nr);
    m.ln = pick(a.ln, b.ln, a.nr, b.nr);
    m.vi = pick(a.vi, b.vi, a.nr, b.nr);
    m.co = pick(a.co, b.co, a.nr, b.nr);
    return m;
}

std::string eq_bind(const Flat& var, const Flat& term) {
    return "(= " + var.nr + " " + term.nr + ") (= " + var.pf + " " + term.pf + ") (= " + var.lp +
           " " + term.lp + ") (= " + var.ln + " " + term.ln + ") (= " + var.vi + " " + term.vi +
           ") (= " + var.co + " " + term.co + ")";
}

std::string iname(NodeIdx v) { return "If" + std::to_string(v); }
std::string qname(NodeIdx v) { return "Qf" + std::to_string(v); }

}  // namespace

ChcSystem emit_chc(const Network& net, const std::vector<PredPtr>& Y, const CBGraph& g,
                   EncodingProfile profile) {
    std::set<NodeIdx> reached = reachable_nodes(g, net.node_count());
    if (reached.size() != net.node_count()) {
        std::vector<NodeIdx> missing;
        for (NodeIdx v = 0; v < net.node_count(); ++v)
            if (!reached.count(v)) missing.push_back(v);
        throw DisconnectedCBGraph(std::move(missing));
    }

    SmtEncoder enc(net, profile);
    ChcSystem sys;
    sys.profile = profile;
    std::ostringstream os;
    // Keep the solver from inlining/slicing predicates away: interpretations
    // must stay quantifier-free and named If*/Qf* for round-trip validation.
    // These must precede (set-logic HORN) to take effect.
    os << "(set-option :fp.xform.inline_eager false)\n";
    os << "(set-option :fp.xform.inline_linear false)\n";
    os << "(set-option :fp.xform.slice false)\n";
    os << "(set-logic HORN)\n";

    std::string sig;
    {
        std::ostringstream ss;
        ss << "(Bool (_ BitVec " << enc.prefix_width() << ") Int Int (_ BitVec "
           << enc.visited_width() << ") (_ BitVec " << enc.comms_width() << "))";
        sig = ss.str();
    }
    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        os << "(declare-fun " << iname(v) << " " << sig << " Bool)\n";
        os << "(declare-fun " << qname(v) << " " << sig << " Bool)\n";
    }

    size_t rules = 0;
    // Invariant facts: the initial route of every node.
    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        os << "(assert " << flat_app(iname(v), flat_literal(enc, net.init[v])) << ")\n";
        ++rules;
    }
    // Invariant steps: one per network edge.
    for (const auto& e : net.edges) {
        Flat u = flat_vars("u"), s = flat_vars("v"), m = flat_vars("m");
        Flat merged = merge_flat(s, transfer_flat(enc, e, u));
        os << "(assert (forall (" << flat_decls(enc, u) << " " << flat_decls(enc, s) << " "
           << flat_decls(enc, m) << ") (=> (and " << flat_app(iname(e.first), u) << " "
           << flat_app(iname(e.second), s) << " " << flat_wf(enc, u) << " " << flat_wf(enc, s)
           << " " << eq_bind(m, merged) << ") " << flat_app(iname(e.second), m) << ")))\n";
        ++rules;
    }
    // Property queries: one per node.
    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        Flat s = flat_vars("s");
        os << "(assert (forall (" << flat_decls(enc, s) << ") (=> (and "
           << flat_app(qname(v), s) << " " << flat_wf(enc, s) << " (not "
           << pred_flat(enc, Y.at(v), s) << ")) false)))\n";
        ++rules;
    }
    // Declared roots: converged fact + one stability rule per incoming edge.
    for (NodeIdx v : g.roots) {
        os << "(assert " << flat_app(qname(v), flat_literal(enc, net.init[v])) << ")\n";
        ++rules;
        for (NodeIdx u : net.in_neighbors(v)) {
            Flat fu = flat_vars("u"), fv = flat_vars("v"), m = flat_vars("m");
            Flat merged = merge_flat(fv, transfer_flat(enc, {u, v}, fu));
            os << "(assert (forall (" << flat_decls(enc, fu) << " " << flat_decls(enc, fv) << " "
               << flat_decls(enc, m) << ") (=> (and " << flat_app(iname(u), fu) << " "
               << flat_app(qname(v), fv) << " " << flat_wf(enc, fu) << " " << flat_wf(enc, fv)
               << " " << eq_bind(m, merged) << ") " << flat_app(qname(v), m) << ")))\n";
            ++rules;
        }
    }
    // Declared graph edges: stability propagation.
    for (const auto& e : g.edges) {
        Flat fu = flat_vars("u"), fv = flat_vars("v"), m = flat_vars("m");
        Flat merged = merge_flat(fv, transfer_flat(enc, e, fu));
        os << "(assert (forall (" << flat_decls(enc, fu) << " " << flat_decls(enc, fv) << " "
           << flat_decls(enc, m) << ") (=> (and " << flat_app(qname(e.first), fu) << " "
           << flat_app(iname(e.second), fv) << " " << flat_wf(enc, fu) << " "
           << flat_wf(enc, fv) << " " << eq_bind(m, merged) << ") "
           << flat_app(qname(e.second), m) << ")))\n";
        ++rules;
    }

    os << "(check-sat)\n(get-model)\n";
    sys.script = os.str();
    sys.rule_count = rules;
    return sys;
}

ChcSolution solve_chc(const ChcSystem& sys, const SolverConfig& cfg) {
    SolverOutput out = run_solver_process(cfg, sys.script, "chc_system");
    if (out.status == SolverOutput::Status::Timeout)
        return {ChcSolution::Kind::Unknown, {}, out.detail};
    if (out.status == SolverOutput::Status::Crashed) throw SolverCrash(out.detail);

    size_t i = 0;
    while (i < out.stdout_text.size() &&
           std::isspace(static_cast<unsigned char>(out.stdout_text[i])))
        ++i;
    size_t j = i;
    while (j < out.stdout_text.size() &&
           !std::isspace(static_cast<unsigned char>(out.stdout_text[j])))
        ++j;
    std::string first = out.stdout_text.substr(i, j - i);

    if (first == "unsat") return {ChcSolution::Kind::Infeasible, {}, ""};
    if (first == "unknown")
        return {ChcSolution::Kind::Unknown, {}, "solver returned unknown"};
    if (first != "sat") throw SolverCrash("unrecognized solver output: " + first);

    ChcSolution sol;
    sol.kind = ChcSolution::Kind::Solution;
    std::vector<Sexp> forms = parse_sexprs(out.stdout_text.substr(j));
    std::vector<const Sexp*> defs;
    for (const auto& f : forms) {
        if (f.is_atom()) continue;
        if (!f.items.empty() && f.items[0].atom == "model") {
            for (size_t k = 1; k < f.items.size(); ++k) defs.push_back(&f.items[k]);
        } else if (!f.items.empty() && f.items[0].atom == "define-fun") {
            defs.push_back(&f);
        } else {
            for (const auto& d : f.items)
                if (!d.is_atom() && !d.items.empty() && d.items[0].atom == "define-fun")
                    defs.push_back(&d);
        }
    }
    for (const Sexp* d : defs) {
        if (d->items.size() < 5) continue;
        const std::string& name = d->items[1].atom;
        if (name.rfind("If", 0) == 0 || name.rfind("Qf", 0) == 0)
            sol.defs[name] = sexp_to_string(*d);
    }
    return sol;
}

RoundTrip validate_solution(const Network& net, const std::vector<PredPtr>& Y, const CBGraph& g,
                            const ChcSolution& sol, EncodingProfile profile,
                            const SolverConfig& cfg) {
    SmtEncoder enc(net, profile);

    // Common header: datatype prelude, solved flat predicates, and bridges
    // from the datatype onto the flat tuple (canonical zeros for NoRoute).
    std::ostringstream head;
    head << enc.prelude();
    Flat z = flat_zero(enc);
    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        auto it_i = sol.defs.find(iname(v));
        auto it_q = sol.defs.find(qname(v));
        if (it_i == sol.defs.end() || it_q == sol.defs.end())
            return {false, "missing predicate definition for node " + net.name(v)};
        head << it_i->second << "\n" << it_q->second << "\n";
        for (const char* side : {"I", "Q"}) {
            std::string flat = (side[0] == 'I' ? iname(v) : qname(v));
            head << "(define-fun " << side << "w" << v << " ((s Route)) Bool"
                 << " (ite ((_ is NoRoute) s) (" << flat << " true " << z.pf
                 << " 0 0 " << z.vi << " " << z.co << ") (" << flat
                 << " false (rtPrefix s) (rtLp s) (rtLen s) (rtVis s) (rtCom s))))\n";
        }
    }
    std::string prefix = head.str();

    auto iw = [](NodeIdx v) { return "(Iw" + std::to_string(v) + " %)"; };
    auto qw = [](NodeIdx v) { return "(Qw" + std::to_string(v) + " %)"; };
    auto subst = [](std::string tpl, const std::string& arg) {
        return tpl.replace(tpl.find('%'), 1, arg);
    };

    std::vector<VcQuery> checks;
    auto add = [&](const std::string& name, const std::string& body) {
        VcQuery q;
        q.name = name;
        q.script = prefix + body + "(check-sat)\n(get-model)\n";
        checks.push_back(std::move(q));
    };

    for (NodeIdx v = 0; v < net.node_count(); ++v)
        add("init[" + net.name(v) + "]",
            "(assert (not " + subst(iw(v), enc.route_literal(net.init[v])) + "))\n");
    for (const auto& e : net.edges) {
        std::ostringstream b;
        b << "(declare-const su Route)\n(assert " << enc.wellformed_term("su") << ")\n";
        b << "(declare-const sv Route)\n(assert " << enc.wellformed_term("sv") << ")\n";
        b << "(assert " << subst(iw(e.first), "su") << ")\n";
        b << "(assert " << subst(iw(e.second), "sv") << ")\n";
        b << "(assert (not "
          << subst(iw(e.second), enc.merge_term("sv", enc.transfer_term(e, "su"))) << "))\n";
        add("inv[" + net.name(e.first) + "->" + net.name(e.second) + "]", b.str());
    }
    for (NodeIdx v = 0; v < net.node_count(); ++v) {
        std::ostringstream b;
        b << "(declare-const s Route)\n(assert " << enc.wellformed_term("s") << ")\n";
        b << "(assert " << subst(qw(v), "s") << ")\n";
        b << "(assert (not " << enc.predicate_term(Y.at(v), "s") << "))\n";
        add("prop[" + net.name(v) + "]", b.str());
    }
    for (NodeIdx v : g.roots) {
        std::ostringstream b;
        std::vector<std::string> dis;
        dis.push_back("(not " + subst(qw(v), enc.route_literal(net.init[v])) + ")");
        for (NodeIdx u : net.in_neighbors(v)) {
            std::string su = "su" + std::to_string(u);
            std::string sv = "sv" + std::to_string(u);
            b << "(declare-const " << su << " Route)\n(assert " << enc.wellformed_term(su)
              << ")\n";
            b << "(declare-const " << sv << " Route)\n(assert " << enc.wellformed_term(sv)
              << ")\n";
            dis.push_back("(and " + subst(iw(u), su) + " " + subst(qw(v), sv) + " (not " +
                          subst(qw(v), enc.merge_term(sv, enc.transfer_term({u, v}, su))) +
                          "))");
        }
        if (dis.size() == 1) {
            b << "(assert " << dis[0] << ")\n";
        } else {
            b << "(assert (or";
            for (const auto& d : dis) b << " " << d;
            b << "))\n";
        }
        add("root[" + net.name(v) + "]", b.str());
    }
    for (const auto& e : g.edges) {
        std::ostringstream b;
        b << "(declare-const su Route)\n(assert " << enc.wellformed_term("su") << ")\n";
        b << "(declare-const sv Route)\n(assert " << enc.wellformed_term("sv") << ")\n";
        b << "(assert " << subst(qw(e.first), "su") << ")\n";
        b << "(assert " << subst(iw(e.second), "sv") << ")\n";
        b << "(assert (not "
          << subst(qw(e.second), enc.merge_term("sv", enc.transfer_term(e, "su"))) << "))\n";
        add("edge[" + net.name(e.first) + "->" + net.name(e.second) + "]", b.str());
    }

    std::vector<VcResult> results = discharge_all(checks, cfg, 0);
    for (const auto& r : results)
        if (r.verdict.kind != SolverVerdict::Kind::Valid) return {false, r.vc.name};
    return {true, ""};
}

}  // namespace cbver
