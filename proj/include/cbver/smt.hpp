#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbver/network.hpp"

namespace cbver {

// Route encoding profile. Full: 32-bit prefix. Simple: 1-bit prefix (the
// CHC backend's cheaper theory).
enum class EncodingProfile { Full, Simple };

// Emits SMT-LIB text for the route datatype, merge, transfers, and
// predicates of one network. All term builders are pure; scripts built from
// identical inputs are byte-identical.
class SmtEncoder {
public:
    SmtEncoder(const Network& net, EncodingProfile profile = EncodingProfile::Full);

    const Network& net() const { return *net_; }
    EncodingProfile profile() const { return profile_; }
    unsigned prefix_width() const { return prefix_width_; }
    unsigned visited_width() const { return visited_width_; }
    unsigned comms_width() const { return comms_width_; }

    // Sort + merge declarations shared by every script.
    std::string prelude() const;

    // Route literal of the given concrete route.
    std::string route_literal(const Route& r) const;

    // merge(a, b) as a term.
    std::string merge_term(const std::string& a, const std::string& b) const;

    // Transfer along e applied to route term s (policy + path extension).
    std::string transfer_term(const Edge& e, const std::string& s) const;

    // Predicate applied to route term s.
    std::string predicate_term(const PredPtr& p, const std::string& s) const;

    // Sort side conditions on a declared route constant (non-negative ints).
    std::string wellformed_term(const std::string& s) const;

    std::string bv_literal(uint64_t value, unsigned width) const;
    std::string mask_literal(const std::set<uint32_t>& idxs, unsigned width) const;

private:
    const Network* net_;
    EncodingProfile profile_;
    unsigned prefix_width_, visited_width_, comms_width_;
};

// --- solver driver ---

struct SolverConfig {
    std::string path = "z3";                 // overridden by flag/env
    std::vector<std::string> args = {"-in"};
    double timeout_seconds = 60.0;
    std::string dump_dir;                    // when set, scripts are saved here
};

SolverConfig default_solver_config();

struct SolverOutput {
    enum class Status { Finished, Timeout, Crashed };
    Status status = Status::Crashed;
    std::string stdout_text;
    std::string detail;
};

SolverOutput run_solver_process(const SolverConfig& cfg, const std::string& script,
                                const std::string& dump_name = "");

struct SolverCrash : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Verdict of a validity query (assert the negation; unsat = Valid).
struct SolverVerdict {
    enum class Kind { Valid, Invalid, Unknown };
    Kind kind = Kind::Unknown;
    std::map<std::string, Route> model;  // route constants, on Invalid
    std::string reason;                  // on Unknown
};

// Runs one script that ends in (check-sat)(get-model); parses the verdict and
// the model values of the named route constants. Throws SolverCrash on
// process failure or unparseable output.
SolverVerdict check_validity(const SolverConfig& cfg, const std::string& script,
                             const std::vector<std::string>& route_vars,
                             const std::string& dump_name = "");

struct SolverQuery {
    std::string script;
    std::vector<std::string> route_vars;
    std::string dump_name;
};

// Discharges many independent queries in a single solver process, separated
// by (reset) and tagged with (echo ...) markers; process startup is paid once
// per batch instead of once per query. Falls back to one process per query if
// the batch times out or the output cannot be split.
std::vector<SolverVerdict> check_validity_batch(const SolverConfig& cfg,
                                                const std::vector<SolverQuery>& queries);

// --- s-expression helpers (exposed for the CHC model path) ---

struct Sexp {
    std::string atom;          // set when leaf
    std::vector<Sexp> items;   // set when list
    bool is_atom() const { return items.empty() && !atom.empty(); }
};

std::vector<Sexp> parse_sexprs(const std::string& text);
std::string sexp_to_string(const Sexp& s);

// Parses a ground Route term (NoRoute / (RouteRec ...)) from a model.
Route parse_route_term(const Sexp& s);

}  // namespace cbver
