#include "cbver/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace cbver {

SolverConfig default_solver_config() {
    SolverConfig cfg;
    if (const char* env = std::getenv("CBVER_SOLVER"); env && *env) cfg.path = env;
    return cfg;
}

static void dump_script(const SolverConfig& cfg, const std::string& script,
                        const std::string& dump_name) {
    if (cfg.dump_dir.empty() || dump_name.empty()) return;
    std::filesystem::create_directories(cfg.dump_dir);
    std::ofstream out(std::filesystem::path(cfg.dump_dir) / (dump_name + ".smt2"));
    out << script;
}

SolverOutput run_solver_process(const SolverConfig& cfg, const std::string& script,
                                const std::string& dump_name) {
    dump_script(cfg, script, dump_name);

    // A solver that exits mid-feed must surface as EPIPE, not kill us.
    static const bool sigpipe_ignored = (signal(SIGPIPE, SIG_IGN), true);
    (void)sigpipe_ignored;

    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        return {SolverOutput::Status::Crashed, "", "pipe() failed"};

    // posix_spawnp, not fork+exec: callers launch solvers from several
    // threads, and running library code between fork and exec in a
    // multithreaded process can deadlock on inherited locks.
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cfg.path.c_str()));
    for (const auto& a : cfg.args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&fa, out_pipe[1], STDERR_FILENO);
    posix_spawn_file_actions_addclose(&fa, in_pipe[0]);
    posix_spawn_file_actions_addclose(&fa, in_pipe[1]);
    posix_spawn_file_actions_addclose(&fa, out_pipe[0]);
    posix_spawn_file_actions_addclose(&fa, out_pipe[1]);

    pid_t pid = -1;
    int spawn_err = posix_spawnp(&pid, cfg.path.c_str(), &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (spawn_err != 0) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        return {SolverOutput::Status::Crashed, "",
                "could not execute solver '" + cfg.path + "': " + std::strerror(spawn_err)};
    }

    // Feed the script, then read until EOF or deadline.
    size_t written = 0;
    while (written < script.size()) {
        ssize_t n = write(in_pipe[1], script.data() + written, script.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;  // solver may have exited early; its output still decides
        }
        written += static_cast<size_t>(n);
    }
    close(in_pipe[1]);

    SolverOutput out;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration<double>(cfg.timeout_seconds);
    char buf[4096];
    bool timed_out = false;
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left <= 0) {
            timed_out = true;
            break;
        }
        struct pollfd pfd = {out_pipe[0], POLLIN, 0};
        int pr = poll(&pfd, 1, static_cast<int>(left));
        if (pr < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (pr == 0) {
            timed_out = true;
            break;
        }
        ssize_t n = read(out_pipe[0], buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (n == 0) break;  // EOF
        out.stdout_text.append(buf, static_cast<size_t>(n));
    }
    close(out_pipe[0]);

    if (timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, nullptr, 0);
        out.status = SolverOutput::Status::Timeout;
        out.detail = "solver exceeded " + std::to_string(cfg.timeout_seconds) + "s";
        return out;
    }

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
        out.status = SolverOutput::Status::Crashed;
        out.detail = "could not execute solver '" + cfg.path + "'";
        return out;
    }
    if (WIFSIGNALED(status)) {
        out.status = SolverOutput::Status::Crashed;
        out.detail = "solver killed by signal " + std::to_string(WTERMSIG(status));
        return out;
    }
    out.status = SolverOutput::Status::Finished;
    return out;
}

// --- s-expression parsing ---

static void skip_ws(const std::string& t, size_t& i) {
    while (i < t.size()) {
        if (std::isspace(static_cast<unsigned char>(t[i]))) {
            ++i;
        } else if (t[i] == ';') {
            while (i < t.size() && t[i] != '\n') ++i;
        } else {
            return;
        }
    }
}

static Sexp parse_one(const std::string& t, size_t& i) {
    skip_ws(t, i);
    if (i >= t.size()) throw SolverCrash("unexpected end of solver output");
    Sexp s;
    if (t[i] == '(') {
        ++i;
        for (;;) {
            skip_ws(t, i);
            if (i >= t.size()) throw SolverCrash("unbalanced parenthesis in solver output");
            if (t[i] == ')') {
                ++i;
                if (s.items.empty()) s.items.push_back(Sexp{});  // keep () a list
                return s;
            }
            s.items.push_back(parse_one(t, i));
        }
    }
    if (t[i] == '"') {
        size_t start = i++;
        while (i < t.size() && t[i] != '"') ++i;
        if (i < t.size()) ++i;
        s.atom = t.substr(start, i - start);
        return s;
    }
    if (t[i] == '|') {
        size_t start = i++;
        while (i < t.size() && t[i] != '|') ++i;
        if (i < t.size()) ++i;
        s.atom = t.substr(start, i - start);
        return s;
    }
    size_t start = i;
    while (i < t.size() && !std::isspace(static_cast<unsigned char>(t[i])) && t[i] != '(' &&
           t[i] != ')' && t[i] != ';')
        ++i;
    s.atom = t.substr(start, i - start);
    return s;
}

std::vector<Sexp> parse_sexprs(const std::string& text) {
    std::vector<Sexp> out;
    size_t i = 0;
    for (;;) {
        skip_ws(text, i);
        if (i >= text.size()) return out;
        out.push_back(parse_one(text, i));
    }
}

std::string sexp_to_string(const Sexp& s) {
    if (s.is_atom()) return s.atom;
    std::string out = "(";
    for (size_t i = 0; i < s.items.size(); ++i) {
        if (i) out += " ";
        out += sexp_to_string(s.items[i]);
    }
    return out + ")";
}

// --- model value parsing ---

static uint64_t parse_bv_bits(const Sexp& s, std::set<uint32_t>* set_out) {
    uint64_t value = 0;
    auto set_bit = [&](unsigned bit) {
        if (bit < 64) value |= uint64_t{1} << bit;
        if (set_out) set_out->insert(bit);
    };
    if (s.is_atom() && s.atom.rfind("#b", 0) == 0) {
        const std::string& bits = s.atom;
        for (size_t k = 2; k < bits.size(); ++k)
            if (bits[k] == '1') set_bit(bits.size() - 1 - k);
        return value;
    }
    if (s.is_atom() && s.atom.rfind("#x", 0) == 0) {
        for (size_t k = 2; k < s.atom.size(); ++k) {
            unsigned nib = std::stoul(s.atom.substr(k, 1), nullptr, 16);
            unsigned base = 4 * (s.atom.size() - 1 - k);
            for (unsigned b = 0; b < 4; ++b)
                if (nib & (1u << b)) set_bit(base + b);
        }
        return value;
    }
    // (_ bvN width)
    if (!s.is_atom() && s.items.size() == 3 && s.items[0].atom == "_" &&
        s.items[1].atom.rfind("bv", 0) == 0) {
        uint64_t v = std::stoull(s.items[1].atom.substr(2));
        for (unsigned b = 0; b < 64; ++b)
            if (v & (uint64_t{1} << b)) set_bit(b);
        return value;
    }
    throw SolverCrash("unparseable bitvector in model: " + sexp_to_string(s));
}

static uint64_t parse_int(const Sexp& s) {
    if (s.is_atom()) return std::stoull(s.atom);
    if (s.items.size() == 2 && s.items[0].atom == "-")
        throw SolverCrash("negative integer in model violates well-formedness");
    throw SolverCrash("unparseable integer in model: " + sexp_to_string(s));
}

Route parse_route_term(const Sexp& s) {
    const Sexp* t = &s;
    // unwrap (as <term> Route)
    while (!t->is_atom() && t->items.size() == 3 && t->items[0].atom == "as") t = &t->items[1];
    if (t->is_atom()) {
        if (t->atom == "NoRoute") return Route::no_route();
        throw SolverCrash("unparseable route in model: " + sexp_to_string(s));
    }
    if (t->items.size() == 6 && t->items[0].atom == "RouteRec") {
        RouteFields f;
        f.prefix = static_cast<uint32_t>(parse_bv_bits(t->items[1], nullptr));
        f.lp = parse_int(t->items[2]);
        f.path_len = parse_int(t->items[3]);
        parse_bv_bits(t->items[4], &f.visited);
        parse_bv_bits(t->items[5], &f.comms);
        return Route{std::move(f)};
    }
    throw SolverCrash("unparseable route in model: " + sexp_to_string(s));
}

static SolverVerdict parse_verdict(const std::string& text,
                                   const std::vector<std::string>& route_vars) {
    size_t i = 0;
    skip_ws(text, i);
    size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string first = text.substr(i, j - i);

    if (first == "unsat") return {SolverVerdict::Kind::Valid, {}, ""};
    if (first == "unknown") {
        std::string reason = text.substr(j);
        return {SolverVerdict::Kind::Unknown, {}, reason.empty() ? "solver returned unknown"
                                                                 : reason};
    }
    if (first != "sat")
        throw SolverCrash("unrecognized solver output: " +
                          text.substr(0, std::min<size_t>(text.size(), 200)));

    SolverVerdict v;
    v.kind = SolverVerdict::Kind::Invalid;
    if (route_vars.empty()) return v;

    std::vector<Sexp> forms = parse_sexprs(text.substr(j));
    std::vector<const Sexp*> defs;
    for (const auto& f : forms) {
        if (f.is_atom()) continue;
        if (!f.items.empty() && f.items[0].atom == "model") {
            for (size_t k = 1; k < f.items.size(); ++k) defs.push_back(&f.items[k]);
        } else if (!f.items.empty() && f.items[0].atom == "define-fun") {
            defs.push_back(&f);
        } else {
            for (const auto& g : f.items)
                if (!g.is_atom() && !g.items.empty() && g.items[0].atom == "define-fun")
                    defs.push_back(&g);
        }
    }
    for (const Sexp* d : defs) {
        if (d->items.size() < 5 || d->items[0].atom != "define-fun") continue;
        const std::string& name = d->items[1].atom;
        if (std::find(route_vars.begin(), route_vars.end(), name) == route_vars.end()) continue;
        if (d->items[3].atom != "Route") continue;
        v.model[name] = parse_route_term(d->items[4]);
    }
    for (const auto& rv : route_vars)
        if (!v.model.count(rv))
            throw SolverCrash("model is missing route constant " + rv);
    return v;
}

SolverVerdict check_validity(const SolverConfig& cfg, const std::string& script,
                             const std::vector<std::string>& route_vars,
                             const std::string& dump_name) {
    SolverOutput out = run_solver_process(cfg, script, dump_name);
    if (out.status == SolverOutput::Status::Timeout)
        return {SolverVerdict::Kind::Unknown, {}, out.detail};
    if (out.status == SolverOutput::Status::Crashed) throw SolverCrash(out.detail);
    return parse_verdict(out.stdout_text, route_vars);
}

std::vector<SolverVerdict> check_validity_batch(const SolverConfig& cfg,
                                                const std::vector<SolverQuery>& queries) {
    std::vector<SolverVerdict> out(queries.size());
    if (queries.empty()) return out;
    if (queries.size() == 1) {
        out[0] = check_validity(cfg, queries[0].script, queries[0].route_vars,
                                queries[0].dump_name);
        return out;
    }

    auto marker = [](size_t i) { return "=query-" + std::to_string(i) + "="; };
    std::string combined;
    for (size_t i = 0; i < queries.size(); ++i) {
        dump_script(cfg, queries[i].script, queries[i].dump_name);
        combined += "(echo \"" + marker(i) + "\")\n";
        combined += queries[i].script;
        combined += "\n(reset)\n";
    }

    SolverConfig nodump = cfg;
    nodump.dump_dir.clear();
    // Whole-batch deadline scales with the batch; a single slow query falls
    // back to its own process below, where the per-query timeout applies.
    nodump.timeout_seconds = cfg.timeout_seconds * static_cast<double>(queries.size());
    SolverOutput run = run_solver_process(nodump, combined);

    auto fallback = [&](size_t i) {
        out[i] = check_validity(cfg, queries[i].script, queries[i].route_vars, "");
    };
    if (run.status == SolverOutput::Status::Crashed) throw SolverCrash(run.detail);

    std::vector<size_t> pos(queries.size(), std::string::npos);
    size_t from = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
        pos[i] = run.stdout_text.find(marker(i), from);
        if (pos[i] == std::string::npos) break;
        from = pos[i];
    }
    for (size_t i = 0; i < queries.size(); ++i) {
        bool has_next = i + 1 < queries.size() && pos[i + 1] != std::string::npos;
        // A missing marker means the solver died or timed out mid-batch; a
        // timed-out batch may also have truncated its final segment. Rerun
        // those queries singly, where the per-query timeout applies.
        if (pos[i] == std::string::npos ||
            (run.status == SolverOutput::Status::Timeout && !has_next)) {
            fallback(i);
            continue;
        }
        size_t start = pos[i] + marker(i).size();
        size_t end = has_next ? pos[i + 1] : run.stdout_text.size();
        try {
            out[i] = parse_verdict(run.stdout_text.substr(start, end - start),
                                   queries[i].route_vars);
        } catch (const SolverCrash&) {
            fallback(i);  // per-query run reproduces (or clears) the problem
        }
    }
    return out;
}

}  // namespace cbver
