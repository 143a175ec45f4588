#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbver/benchgen.hpp"
#include "cbver/chc.hpp"
#include "cbver/flow.hpp"
#include "cbver/simulator.hpp"
#include "cbver/verifier.hpp"

using nlohmann::json;
using namespace cbver;

namespace {

struct SolverFlags {
    std::string solver;
    double timeout = 0;
    std::string dump_dir;

    SolverConfig config() const {
        SolverConfig cfg = default_solver_config();
        if (!solver.empty()) cfg.path = solver;
        if (timeout > 0) cfg.timeout_seconds = timeout;
        cfg.dump_dir = dump_dir;
        return cfg;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--solver", f.solver, "solver binary (overrides CBVER_SOLVER, default z3)");
    cmd->add_option("--timeout", f.timeout, "per-query solver timeout in seconds");
    cmd->add_option("--dump-smt", f.dump_dir, "directory to save emitted solver scripts");
}

NetworkDocument load_checked(const std::string& path) {
    NetworkDocument doc = load_network_json(path);
    auto errs = validate_network(doc.net, doc.ifs);
    if (!errs.empty()) {
        std::string msg = "invalid network document:";
        for (const auto& e : errs) msg += "\n  " + e.code + " at " + e.locus + ": " + e.detail;
        throw std::runtime_error(msg);
    }
    return doc;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json graph_to_json(const Network& net, const CBGraph& g) {
    json j;
    j["roots"] = json::array();
    for (NodeIdx v : g.roots) j["roots"].push_back(net.name(v));
    j["edges"] = json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({net.name(e.first), net.name(e.second)});
    return j;
}

CBGraph graph_from_json(const Network& net, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json j = json::parse(in);
    CBGraph g;
    for (const auto& r : j.at("roots")) g.roots.insert(net.index_of(r.get<std::string>()));
    for (const auto& e : j.at("edges"))
        g.edges.insert({net.index_of(e.at(0).get<std::string>()),
                        net.index_of(e.at(1).get<std::string>())});
    return g;
}

json verdict_to_json(const Network& net, const VerifyResult& res) {
    json j;
    j["verdict"] = res.correct ? "correct" : "fail";
    j["graph"] = graph_to_json(net, res.graph);
    j["unconnected"] = json::array();
    for (NodeIdx v : res.unconnected) j["unconnected"].push_back(net.name(v));
    j["obligations"] = json::array();
    for (const auto& r : res.results) {
        const char* k = r.verdict.kind == SolverVerdict::Kind::Valid     ? "valid"
                        : r.verdict.kind == SolverVerdict::Kind::Invalid ? "invalid"
                                                                         : "unknown";
        j["obligations"].push_back({{"name", r.vc.name}, {"verdict", k}});
    }
    j["triage"] = json::array();
    for (const auto& t : res.triage.entries)
        j["triage"].push_back({{"name", t.name},
                               {"verdict", t.verdict},
                               {"hint", t.hint},
                               {"model", t.model}});
    return j;
}

void print_verdict(const Network& net, const VerifyResult& res) {
    std::cout << (res.correct ? "Correct" : "Fail") << "\n";
    std::cout << "roots:";
    for (NodeIdx v : res.graph.roots) std::cout << " " << net.name(v);
    std::cout << "\nedges:";
    for (const auto& e : res.graph.edges)
        std::cout << " " << net.name(e.first) << "->" << net.name(e.second);
    std::cout << "\n";
    if (!res.unconnected.empty()) {
        std::cout << "unconnected:";
        for (NodeIdx v : res.unconnected) std::cout << " " << net.name(v);
        std::cout << "\n";
    }
    for (const auto& t : res.triage.entries) {
        std::cout << t.name << " [" << t.verdict << "]: " << t.hint << "\n";
        if (!t.model.empty()) std::cout << "  model: " << t.model << "\n";
    }
}

Edge parse_edge(const Network& net, const std::string& s) {
    size_t pos = s.find("->");
    if (pos == std::string::npos)
        throw std::runtime_error("expected u->v edge syntax, got " + s);
    return {net.index_of(s.substr(0, pos)), net.index_of(s.substr(pos + 2))};
}

int run(int argc, char** argv) {
    CLI::App app{"control-plane convergence verifier and interface synthesizer"};
    app.require_subcommand(1);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "discharge obligations and check stability");
    std::string net_path, json_out;
    int jobs = 0;
    std::string profile_name = "full";
    SolverFlags sf;
    verify_cmd->add_option("--net", net_path, "network document")->required();
    verify_cmd->add_option("--jobs", jobs, "parallel solver processes (1 = serial)");
    verify_cmd->add_option("--json", json_out, "write JSON verdict to this file");
    verify_cmd->add_option("--profile", profile_name, "route encoding: full or simple");
    add_solver_flags(verify_cmd, sf);

    // tolerance
    auto* tol_cmd = app.add_subcommand("tolerance", "edge-failure tolerance of the stability skeleton");
    std::string tol_net, tol_json;
    int tol_jobs = 0;
    int64_t k_query = -1;
    SolverFlags tol_sf;
    tol_cmd->add_option("--net", tol_net, "network document")->required();
    tol_cmd->add_option("--k", k_query, "query whether the network tolerates k failures");
    tol_cmd->add_option("--jobs", tol_jobs, "parallel workers");
    tol_cmd->add_option("--json", tol_json, "write JSON report to this file");
    add_solver_flags(tol_cmd, tol_sf);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "synthesize interfaces for a declared graph");
    std::string synth_net, synth_graph, synth_out, synth_profile = "simple";
    SolverFlags synth_sf;
    synth_cmd->add_option("--net", synth_net, "network document (Y properties used)")->required();
    synth_cmd->add_option("--cbgraph", synth_graph, "declared graph JSON")->required();
    synth_cmd->add_option("--profile", synth_profile, "route encoding: simple or full");
    synth_cmd->add_option("--out", synth_out, "write solved interfaces to this file");
    add_solver_flags(synth_cmd, synth_sf);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run the asynchronous semantics");
    std::string sim_net, trace_out;
    uint64_t seed = 0;
    unsigned horizon = 50;
    std::vector<std::string> fails;
    sim_cmd->add_option("--net", sim_net, "network document")->required();
    sim_cmd->add_option("--seed", seed, "schedule seed");
    sim_cmd->add_option("--horizon", horizon, "number of steps");
    sim_cmd->add_option("--fail", fails, "failed edge u->v (repeatable)");
    sim_cmd->add_option("--trace", trace_out, "write trace JSON to this file");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate benchmark inputs");
    unsigned fattree_k = 0;
    std::string variant = "reachability", out_dir = ".", example;
    gen_cmd->add_option("--fattree", fattree_k, "fat-tree pods parameter (even, >= 2)");
    gen_cmd->add_option("--variant", variant,
                        "reachability | pathlength | valleyfree | hijack");
    gen_cmd->add_option("--example", example, "named example (fournode)");
    gen_cmd->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (verify_cmd->parsed()) {
        NetworkDocument doc = load_checked(net_path);
        VerifyOptions opts;
        opts.solver = sf.config();
        opts.jobs = jobs;
        opts.profile = profile_name == "simple" ? EncodingProfile::Simple : EncodingProfile::Full;
        VerifyResult res = verify(doc.net, doc.ifs, opts);
        if (!json_out.empty()) write_file(json_out, verdict_to_json(doc.net, res).dump(2) + "\n");
        print_verdict(doc.net, res);
        return res.correct ? 0 : 1;
    }

    if (tol_cmd->parsed()) {
        NetworkDocument doc = load_checked(tol_net);
        VerifyOptions opts;
        opts.solver = tol_sf.config();
        opts.jobs = tol_jobs;
        VerifyResult res = verify(doc.net, doc.ifs, opts);
        if (!res.correct) {
            std::cerr << "network does not verify; tolerance is undefined\n";
            return 1;
        }
        std::optional<int64_t> k;
        if (k_query >= 0) k = k_query;
        ToleranceReport rep = tolerance_report(res.graph, doc.net.node_count(), k, tol_jobs);
        json j;
        for (const auto& [v, t] : rep.per_node)
            j["perNode"][doc.net.name(v)] = t.unbounded ? json("unbounded") : json(t.value);
        j["network"] = rep.network.unbounded ? json("unbounded") : json(rep.network.value);
        if (rep.for_k_query) j["forK"] = *rep.for_k_query;
        if (!tol_json.empty()) write_file(tol_json, j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
        if (rep.for_k_query && !*rep.for_k_query) return 1;
        return 0;
    }

    if (synth_cmd->parsed()) {
        NetworkDocument doc = load_checked(synth_net);
        CBGraph g = graph_from_json(doc.net, synth_graph);
        EncodingProfile profile =
            synth_profile == "full" ? EncodingProfile::Full : EncodingProfile::Simple;
        SolverConfig cfg = synth_sf.config();
        ChcSystem sys = emit_chc(doc.net, doc.ifs.Y, g, profile);
        if (!cfg.dump_dir.empty()) {
            std::filesystem::create_directories(cfg.dump_dir);
            write_file((std::filesystem::path(cfg.dump_dir) / "chc_system.smt2").string(),
                       sys.script);
        }
        ChcSolution sol = solve_chc(sys, cfg);
        if (sol.kind == ChcSolution::Kind::Infeasible) {
            std::cout << "Infeasible\n";
            return 1;
        }
        if (sol.kind == ChcSolution::Kind::Unknown) {
            std::cerr << "solver could not decide: " << sol.reason << "\n";
            return 2;
        }
        RoundTrip rt = validate_solution(doc.net, doc.ifs.Y, g, sol, profile, cfg);
        if (!rt.correct) {
            std::cerr << "round-trip validation failed at " << rt.failed << "\n";
            return 2;
        }
        if (!synth_out.empty()) {
            json j;
            for (const auto& [name, text] : sol.defs) j[name] = text;
            write_file(synth_out, j.dump(2) + "\n");
        }
        std::cout << "Solution (round-trip validated)\n";
        return 0;
    }

    if (sim_cmd->parsed()) {
        NetworkDocument doc = load_checked(sim_net);
        FairnessProfile prof;
        for (const auto& f : fails) prof.failed_edges.insert(parse_edge(doc.net, f));
        Schedule sched = random_fair_schedule(doc.net, seed, horizon, prof);
        Trace tr = run(doc.net, sched);
        json j;
        for (NodeIdx v = 0; v < doc.net.node_count(); ++v) {
            json col = json::array();
            for (Time t = 0; t <= tr.horizon; ++t)
                col.push_back(json::parse(route_to_json(tr.at(v, t), doc.net)));
            j[doc.net.name(v)] = std::move(col);
        }
        if (!trace_out.empty())
            write_file(trace_out, j.dump(2) + "\n");
        else
            std::cout << j.dump(2) << "\n";
        return 0;
    }

    // gen
    std::filesystem::create_directories(out_dir);
    auto out_path = [&](const std::string& f) {
        return (std::filesystem::path(out_dir) / f).string();
    };
    if (example == "fournode") {
        NetworkDocument p1 = running_example(1);
        NetworkDocument p2 = running_example(2);
        write_file(out_path("fournode_pkg1.json"), network_to_json(p1));
        write_file(out_path("fournode_pkg2.json"), network_to_json(p2));
        CBGraph g;
        g.roots = {p1.net.index_of("A")};
        g.edges = {{p1.net.index_of("A"), p1.net.index_of("B")},
                   {p1.net.index_of("A"), p1.net.index_of("C")},
                   {p1.net.index_of("B"), p1.net.index_of("E")}};
        write_file(out_path("fournode_cbgraph.json"), graph_to_json(p1.net, g).dump(2) + "\n");
        return 0;
    }
    if (fattree_k > 0) {
        FattreeVariant var = fattree_variant_from_name(variant);
        NetworkDocument doc = gen_fattree(fattree_k, var);
        std::string base = "fattree" + std::to_string(fattree_k) + "_" + variant;
        write_file(out_path(base + ".json"), network_to_json(doc));
        std::set<NodeIdx> roots = {doc.net.index_of("edge0_0")};
        if (var == FattreeVariant::Hijack) roots.insert(doc.net.index_of("hijacker"));
        CBGraph g = bfs_cbgraph(doc.net, roots);
        write_file(out_path(base + "_cbgraph.json"), graph_to_json(doc.net, g).dump(2) + "\n");
        return 0;
    }
    std::cerr << "gen requires --example fournode or --fattree K\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
