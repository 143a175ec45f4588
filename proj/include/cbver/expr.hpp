#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cbver/route.hpp"

namespace cbver {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_name(CmpOp op);
CmpOp cmp_op_from_name(const std::string& s);
bool cmp_eval(CmpOp op, uint64_t lhs, uint64_t rhs);

// ---------------------------------------------------------------------------
// Predicate expressions over a single free route variable.
// All field atoms evaluate to false on NoRoute; isNoRoute is the only atom
// that looks at the constructor.
// ---------------------------------------------------------------------------

struct PredicateExpr;
using PredPtr = std::shared_ptr<const PredicateExpr>;

struct PredicateExpr {
    struct True {};
    struct False {};
    struct IsNoRoute {};
    struct LpCmp { CmpOp op; uint64_t value; };
    struct LenCmp { CmpOp op; uint64_t value; };
    struct PrefixEq { uint32_t pattern; };
    struct CommContains { TagIdx tag; };
    struct VisitedContains { NodeIdx node; };
    struct And { std::vector<PredPtr> args; };
    struct Or { std::vector<PredPtr> args; };
    struct Not { PredPtr arg; };
    struct Implies { PredPtr lhs, rhs; };

    std::variant<True, False, IsNoRoute, LpCmp, LenCmp, PrefixEq, CommContains,
                 VisitedContains, And, Or, Not, Implies>
        node;
};

namespace pred {
PredPtr ptrue();
PredPtr pfalse();
PredPtr is_no_route();
PredPtr lp_cmp(CmpOp op, uint64_t v);
PredPtr len_cmp(CmpOp op, uint64_t v);
PredPtr prefix_eq(uint32_t pattern);
PredPtr comm_contains(TagIdx tag);
PredPtr visited_contains(NodeIdx node);
PredPtr conj(std::vector<PredPtr> args);
PredPtr disj(std::vector<PredPtr> args);
PredPtr neg(PredPtr arg);
PredPtr implies(PredPtr lhs, PredPtr rhs);
}  // namespace pred

bool eval_predicate(const PredicateExpr& p, const Route& r);
inline bool eval_predicate(const PredPtr& p, const Route& r) { return eval_predicate(*p, r); }

// ---------------------------------------------------------------------------
// Transfer expressions: first-match guarded clauses with an implicit
// trailing deny. On permit the actions run, then the path is extended
// (pathLen+1, sender inserted into visited) by apply_transfer.
// ---------------------------------------------------------------------------

struct TransferAction {
    enum class Kind { SetLp, AddComm, RemoveComm, SetPrefix };
    Kind kind;
    uint64_t lp = 0;
    TagIdx tag = 0;
    uint32_t prefix = 0;
};

struct TransferClause {
    PredPtr guard;
    std::vector<TransferAction> actions;
    bool permit = true;
};

struct TransferExpr {
    std::vector<TransferClause> clauses;  // implicit trailing deny
};

// Applies the policy only (guard match + actions + deny); path extension is
// done by apply_transfer in network.cpp, which knows the sending node.
Route apply_policy(const TransferExpr& tf, const Route& r);

}  // namespace cbver
