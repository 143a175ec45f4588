#include "cbver/expr.hpp"

#include <stdexcept>

namespace cbver {

const char* cmp_op_name(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

CmpOp cmp_op_from_name(const std::string& s) {
    if (s == "=" || s == "==") return CmpOp::Eq;
    if (s == "!=" || s == "<>") return CmpOp::Ne;
    if (s == "<") return CmpOp::Lt;
    if (s == "<=") return CmpOp::Le;
    if (s == ">") return CmpOp::Gt;
    if (s == ">=") return CmpOp::Ge;
    throw std::invalid_argument("unknown comparison operator: " + s);
}

bool cmp_eval(CmpOp op, uint64_t lhs, uint64_t rhs) {
    switch (op) {
        case CmpOp::Eq: return lhs == rhs;
        case CmpOp::Ne: return lhs != rhs;
        case CmpOp::Lt: return lhs < rhs;
        case CmpOp::Le: return lhs <= rhs;
        case CmpOp::Gt: return lhs > rhs;
        case CmpOp::Ge: return lhs >= rhs;
    }
    return false;
}

namespace pred {

static PredPtr make(PredicateExpr e) { return std::make_shared<const PredicateExpr>(std::move(e)); }

PredPtr ptrue() { return make({PredicateExpr::True{}}); }
PredPtr pfalse() { return make({PredicateExpr::False{}}); }
PredPtr is_no_route() { return make({PredicateExpr::IsNoRoute{}}); }
PredPtr lp_cmp(CmpOp op, uint64_t v) { return make({PredicateExpr::LpCmp{op, v}}); }
PredPtr len_cmp(CmpOp op, uint64_t v) { return make({PredicateExpr::LenCmp{op, v}}); }
PredPtr prefix_eq(uint32_t pattern) { return make({PredicateExpr::PrefixEq{pattern}}); }
PredPtr comm_contains(TagIdx tag) { return make({PredicateExpr::CommContains{tag}}); }
PredPtr visited_contains(NodeIdx node) { return make({PredicateExpr::VisitedContains{node}}); }
PredPtr conj(std::vector<PredPtr> args) { return make({PredicateExpr::And{std::move(args)}}); }
PredPtr disj(std::vector<PredPtr> args) { return make({PredicateExpr::Or{std::move(args)}}); }
PredPtr neg(PredPtr arg) { return make({PredicateExpr::Not{std::move(arg)}}); }
PredPtr implies(PredPtr lhs, PredPtr rhs) {
    return make({PredicateExpr::Implies{std::move(lhs), std::move(rhs)}});
}

}  // namespace pred

bool eval_predicate(const PredicateExpr& p, const Route& r) {
    using P = PredicateExpr;
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, P::True>) {
                return true;
            } else if constexpr (std::is_same_v<T, P::False>) {
                return false;
            } else if constexpr (std::is_same_v<T, P::IsNoRoute>) {
                return r.is_no_route();
            } else if constexpr (std::is_same_v<T, P::LpCmp>) {
                return !r.is_no_route() && cmp_eval(n.op, r.lp(), n.value);
            } else if constexpr (std::is_same_v<T, P::LenCmp>) {
                return !r.is_no_route() && cmp_eval(n.op, r.path_len(), n.value);
            } else if constexpr (std::is_same_v<T, P::PrefixEq>) {
                return !r.is_no_route() && r.prefix() == n.pattern;
            } else if constexpr (std::is_same_v<T, P::CommContains>) {
                return !r.is_no_route() && r.comms().count(n.tag) != 0;
            } else if constexpr (std::is_same_v<T, P::VisitedContains>) {
                return !r.is_no_route() && r.visited().count(n.node) != 0;
            } else if constexpr (std::is_same_v<T, P::And>) {
                for (const auto& a : n.args)
                    if (!eval_predicate(*a, r)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, P::Or>) {
                for (const auto& a : n.args)
                    if (eval_predicate(*a, r)) return true;
                return false;
            } else if constexpr (std::is_same_v<T, P::Not>) {
                return !eval_predicate(*n.arg, r);
            } else {
                static_assert(std::is_same_v<T, P::Implies>);
                return !eval_predicate(*n.lhs, r) || eval_predicate(*n.rhs, r);
            }
        },
        p.node);
}

Route apply_policy(const TransferExpr& tf, const Route& r) {
    if (r.is_no_route()) return Route::no_route();
    for (const auto& clause : tf.clauses) {
        if (!eval_predicate(*clause.guard, r)) continue;
        if (!clause.permit) return Route::no_route();
        RouteFields out = r.rec();
        for (const auto& act : clause.actions) {
            switch (act.kind) {
                case TransferAction::Kind::SetLp: out.lp = act.lp; break;
                case TransferAction::Kind::AddComm: out.comms.insert(act.tag); break;
                case TransferAction::Kind::RemoveComm: out.comms.erase(act.tag); break;
                case TransferAction::Kind::SetPrefix: out.prefix = act.prefix; break;
            }
        }
        return Route{std::move(out)};
    }
    return Route::no_route();  // implicit deny
}

}  // namespace cbver
