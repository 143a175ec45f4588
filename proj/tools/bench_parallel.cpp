// Compares the serial reference paths (jobs=1) against the parallel fan-outs
// for obligation discharge and per-node tolerance analysis, checking that
// both produce identical results.

#include <chrono>
#include <iostream>

#include "cbver/benchgen.hpp"
#include "cbver/flow.hpp"
#include "cbver/verifier.hpp"

using namespace cbver;
using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    unsigned pods = argc > 1 ? static_cast<unsigned>(std::stoul(argv[1])) : 4;
    int jobs = argc > 2 ? std::stoi(argv[2]) : 8;

    NetworkDocument doc = running_example(2);
    SmtEncoder enc(doc.net, EncodingProfile::Full);
    std::vector<VcQuery> vcs = generate_vcs(enc, doc.ifs);
    SolverConfig cfg = default_solver_config();

    std::cout << "obligation discharge (" << vcs.size() << " queries, 4-node example)\n";
    auto t0 = Clock::now();
    auto serial = discharge_all(vcs, cfg, 1);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    auto parallel = discharge_all(vcs, cfg, jobs);
    double tp = seconds_since(t0);
    bool same = serial.size() == parallel.size();
    for (size_t i = 0; same && i < serial.size(); ++i)
        same = serial[i].verdict.kind == parallel[i].verdict.kind;
    std::cout << "  serial " << ts << "s, " << jobs << " workers " << tp << "s, speedup "
              << ts / tp << ", results " << (same ? "identical" : "DIVERGED") << "\n";

    NetworkDocument ft = gen_fattree(pods, FattreeVariant::Reachability);
    CBGraph g = bfs_cbgraph(ft.net, {ft.net.index_of("edge0_0")});
    std::cout << "tolerance analysis (fat-tree pods=" << pods << ", " << ft.net.node_count()
              << " nodes)\n";
    t0 = Clock::now();
    ToleranceReport rs = tolerance_report(g, ft.net.node_count(), std::nullopt, 1);
    ts = seconds_since(t0);
    t0 = Clock::now();
    ToleranceReport rp = tolerance_report(g, ft.net.node_count(), std::nullopt, jobs);
    tp = seconds_since(t0);
    bool tol_same = rs.per_node.size() == rp.per_node.size();
    for (const auto& [v, t] : rs.per_node)
        if (tol_same)
            tol_same = rp.per_node.at(v).unbounded == t.unbounded &&
                       rp.per_node.at(v).value == t.value;
    std::cout << "  serial " << ts << "s, " << jobs << " workers " << tp << "s, speedup "
              << ts / tp << ", results " << (tol_same ? "identical" : "DIVERGED") << "\n";

    return same && tol_same ? 0 : 1;
}
