#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbver/network.hpp"
#include "cbver/smt.hpp"

namespace cbver {

enum class VcKind { Init, Inv, Prop, CbRoot, CbEdge };

const char* vc_kind_name(VcKind k);

// One proof obligation, already lowered to a complete solver script that
// asserts the negation; unsat means the obligation holds.
struct VcQuery {
    VcKind kind;
    NodeIdx node = 0;      // Init / Prop / CbRoot
    Edge edge{};           // Inv / CbEdge
    std::string name;      // stable id, e.g. "inv[A->B]"
    std::string script;
    std::vector<std::string> route_vars;  // model constants to extract on sat
    bool essential = false;               // failure refutes the whole claim
};

VcQuery build_init_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v);
VcQuery build_inv_vc(const SmtEncoder& enc, const Interfaces& ifs, const Edge& e);
VcQuery build_prop_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v);
VcQuery build_cbroot_vc(const SmtEncoder& enc, const Interfaces& ifs, NodeIdx v);
VcQuery build_cbedge_vc(const SmtEncoder& enc, const Interfaces& ifs, const Edge& e);

// All obligations of one verification run: per node init/prop/root, per edge
// inv/edge-step.
std::vector<VcQuery> generate_vcs(const SmtEncoder& enc, const Interfaces& ifs);

// Concretely re-executes the obligation on the model routes; true when the
// model is a genuine violation. Ground obligations (Init) ignore the model.
bool replay_counterexample(const Network& net, const Interfaces& ifs, const VcQuery& vc,
                           const std::map<std::string, Route>& model);

}  // namespace cbver
