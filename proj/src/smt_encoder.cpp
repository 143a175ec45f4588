#include "cbver/smt.hpp"

#include <algorithm>
#include <sstream>

namespace cbver {

SmtEncoder::SmtEncoder(const Network& net, EncodingProfile profile)
    : net_(&net),
      profile_(profile),
      prefix_width_(profile == EncodingProfile::Full ? 32 : 1),
      visited_width_(std::max<size_t>(net.node_count(), 1)),
      comms_width_(std::max<size_t>(net.communities.size(), 1)) {}

std::string SmtEncoder::bv_literal(uint64_t value, unsigned width) const {
    std::string s = "#b";
    for (unsigned i = width; i-- > 0;) s += (i < 64 && (value >> i) & 1) ? '1' : '0';
    return s;
}

std::string SmtEncoder::mask_literal(const std::set<uint32_t>& idxs, unsigned width) const {
    std::string s = "#b";
    for (unsigned i = width; i-- > 0;) s += idxs.count(i) ? '1' : '0';
    return s;
}

std::string SmtEncoder::prelude() const {
    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    os << "(declare-datatypes ((Route 0)) (((NoRoute) (RouteRec"
       << " (rtPrefix (_ BitVec " << prefix_width_ << "))"
       << " (rtLp Int) (rtLen Int)"
       << " (rtVis (_ BitVec " << visited_width_ << "))"
       << " (rtCom (_ BitVec " << comms_width_ << "))))))\n";
    // prefSel a b: merge of two concrete routes selects a. Total order:
    // higher lp, then shorter path, then smaller prefix, visited, comms.
    os << "(define-fun prefSel ((a Route) (b Route)) Bool"
       << " (or (> (rtLp a) (rtLp b)) (and (= (rtLp a) (rtLp b))"
       << " (or (< (rtLen a) (rtLen b)) (and (= (rtLen a) (rtLen b))"
       << " (or (bvult (rtPrefix a) (rtPrefix b)) (and (= (rtPrefix a) (rtPrefix b))"
       << " (or (bvult (rtVis a) (rtVis b)) (and (= (rtVis a) (rtVis b))"
       << " (or (bvult (rtCom a) (rtCom b)) (= (rtCom a) (rtCom b))))))))))))\n";
    os << "(define-fun rmerge ((a Route) (b Route)) Route"
       << " (ite ((_ is NoRoute) a) b (ite ((_ is NoRoute) b) a"
       << " (ite (prefSel a b) a b))))\n";
    return os.str();
}

std::string SmtEncoder::route_literal(const Route& r) const {
    if (r.is_no_route()) return "NoRoute";
    const RouteFields& f = r.rec();
    std::ostringstream os;
    os << "(RouteRec " << bv_literal(f.prefix, prefix_width_) << " " << f.lp << " " << f.path_len
       << " " << mask_literal(f.visited, visited_width_) << " "
       << mask_literal(f.comms, comms_width_) << ")";
    return os.str();
}

std::string SmtEncoder::merge_term(const std::string& a, const std::string& b) const {
    return "(rmerge " + a + " " + b + ")";
}

std::string SmtEncoder::wellformed_term(const std::string& s) const {
    return "(or ((_ is NoRoute) " + s + ") (and (>= (rtLp " + s + ") 0) (>= (rtLen " + s +
           ") 0)))";
}

static std::string int_cmp(CmpOp op, const std::string& lhs, uint64_t rhs) {
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

std::string SmtEncoder::predicate_term(const PredPtr& p, const std::string& s) const {
    using P = PredicateExpr;
    std::string not_nr = "(not ((_ is NoRoute) " + s + "))";
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, P::True>) {
                return "true";
            } else if constexpr (std::is_same_v<T, P::False>) {
                return "false";
            } else if constexpr (std::is_same_v<T, P::IsNoRoute>) {
                return "((_ is NoRoute) " + s + ")";
            } else if constexpr (std::is_same_v<T, P::LpCmp>) {
                return "(and " + not_nr + " " + int_cmp(n.op, "(rtLp " + s + ")", n.value) + ")";
            } else if constexpr (std::is_same_v<T, P::LenCmp>) {
                return "(and " + not_nr + " " + int_cmp(n.op, "(rtLen " + s + ")", n.value) + ")";
            } else if constexpr (std::is_same_v<T, P::PrefixEq>) {
                return "(and " + not_nr + " (= (rtPrefix " + s + ") " +
                       bv_literal(n.pattern, prefix_width_) + "))";
            } else if constexpr (std::is_same_v<T, P::CommContains>) {
                std::string bit = mask_literal({n.tag}, comms_width_);
                return "(and " + not_nr + " (= (bvand (rtCom " + s + ") " + bit + ") " + bit +
                       "))";
            } else if constexpr (std::is_same_v<T, P::VisitedContains>) {
                std::string bit = mask_literal({n.node}, visited_width_);
                return "(and " + not_nr + " (= (bvand (rtVis " + s + ") " + bit + ") " + bit +
                       "))";
            } else if constexpr (std::is_same_v<T, P::And>) {
                if (n.args.empty()) return "true";
                if (n.args.size() == 1) return predicate_term(n.args[0], s);
                std::string out = "(and";
                for (const auto& a : n.args) out += " " + predicate_term(a, s);
                return out + ")";
            } else if constexpr (std::is_same_v<T, P::Or>) {
                if (n.args.empty()) return "false";
                if (n.args.size() == 1) return predicate_term(n.args[0], s);
                std::string out = "(or";
                for (const auto& a : n.args) out += " " + predicate_term(a, s);
                return out + ")";
            } else if constexpr (std::is_same_v<T, P::Not>) {
                return "(not " + predicate_term(n.arg, s) + ")";
            } else {
                static_assert(std::is_same_v<T, P::Implies>);
                return "(=> " + predicate_term(n.lhs, s) + " " + predicate_term(n.rhs, s) + ")";
            }
        },
        p->node);
}

std::string SmtEncoder::transfer_term(const Edge& e, const std::string& s) const {
    auto it = net_->transfer.find(e);
    if (it == net_->transfer.end())
        throw UnknownEdgeError("transfer term for edge not in the network");
    const TransferExpr& tf = it->second;

    // Innermost alternative: no clause matched, implicit deny.
    std::string body = "NoRoute";
    for (auto c = tf.clauses.rbegin(); c != tf.clauses.rend(); ++c) {
        std::string result;
        if (!c->permit) {
            result = "NoRoute";
        } else {
            std::string pfx = "(rtPrefix " + s + ")";
            std::string lp = "(rtLp " + s + ")";
            std::string com = "(rtCom " + s + ")";
            for (const auto& act : c->actions) {
                switch (act.kind) {
                    case TransferAction::Kind::SetLp: lp = std::to_string(act.lp); break;
                    case TransferAction::Kind::SetPrefix:
                        pfx = bv_literal(act.prefix, prefix_width_);
                        break;
                    case TransferAction::Kind::AddComm:
                        com = "(bvor " + com + " " + mask_literal({act.tag}, comms_width_) + ")";
                        break;
                    case TransferAction::Kind::RemoveComm:
                        com = "(bvand " + com + " (bvnot " +
                              mask_literal({act.tag}, comms_width_) + "))";
                        break;
                }
            }
            // Path extension: pathLen + 1, sender added to visited.
            result = "(RouteRec " + pfx + " " + lp + " (+ (rtLen " + s + ") 1) (bvor (rtVis " +
                     s + ") " + mask_literal({e.first}, visited_width_) + ") " + com + ")";
        }
        body = "(ite " + predicate_term(c->guard, s) + " " + result + " " + body + ")";
    }
    return "(ite ((_ is NoRoute) " + s + ") NoRoute " + body + ")";
}

}  // namespace cbver
