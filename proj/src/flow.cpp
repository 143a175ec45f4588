#include "cbver/flow.hpp"

#include <algorithm>
#include <queue>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbver {

namespace {

// Dinitz max-flow; arcs stored with their reverse arcs interleaved.
struct FlowGraph {
    struct Arc {
        int to;
        int64_t cap;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj;
    std::vector<int> level, iter;

    explicit FlowGraph(int n) : adj(n), level(n), iter(n) {}

    void add_edge(int from, int to, int64_t cap) {
        adj[from].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({to, cap});
        adj[to].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({from, 0});
    }

    bool bfs(int s, int t) {
        std::fill(level.begin(), level.end(), -1);
        std::queue<int> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int id : adj[v]) {
                if (arcs[id].cap <= 0 || level[arcs[id].to] >= 0) continue;
                level[arcs[id].to] = level[v] + 1;
                q.push(arcs[id].to);
            }
        }
        return level[t] >= 0;
    }

    int64_t dfs(int v, int t, int64_t f) {
        if (v == t) return f;
        for (int& i = iter[v]; i < static_cast<int>(adj[v].size()); ++i) {
            int id = adj[v][i];
            Arc& a = arcs[id];
            if (a.cap <= 0 || level[a.to] != level[v] + 1) continue;
            int64_t d = dfs(a.to, t, std::min(f, a.cap));
            if (d > 0) {
                a.cap -= d;
                arcs[id ^ 1].cap += d;
                return d;
            }
        }
        return 0;
    }

    int64_t max_flow(int s, int t) {
        int64_t flow = 0;
        while (bfs(s, t)) {
            std::fill(iter.begin(), iter.end(), 0);
            while (int64_t f = dfs(s, t, INT64_MAX)) flow += f;
        }
        return flow;
    }
};

}  // namespace

NodeTolerance max_tolerance(const CBGraph& g, size_t node_count, NodeIdx v) {
    if (g.roots.count(v)) return {true, 0};

    int n = static_cast<int>(node_count);
    FlowGraph fg(n + 1);
    int source = n;
    int64_t inf = static_cast<int64_t>(g.edges.size()) + 1;
    for (NodeIdx r : g.roots) fg.add_edge(source, static_cast<int>(r), inf);
    for (const auto& e : g.edges)
        fg.add_edge(static_cast<int>(e.first), static_cast<int>(e.second), 1);

    int64_t flow = fg.max_flow(source, static_cast<int>(v));
    return {false, flow - 1};
}

ToleranceReport tolerance_report(const CBGraph& g, size_t node_count, std::optional<int64_t> k,
                                 int jobs) {
    ToleranceReport rep;
    std::vector<NodeTolerance> per(node_count);

#ifdef _OPENMP
    if (jobs != 1) {
        int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long v = 0; v < static_cast<long long>(node_count); ++v)
            per[v] = max_tolerance(g, node_count, static_cast<NodeIdx>(v));
    } else {
        for (NodeIdx v = 0; v < node_count; ++v) per[v] = max_tolerance(g, node_count, v);
    }
#else
    (void)jobs;
    for (NodeIdx v = 0; v < node_count; ++v) per[v] = max_tolerance(g, node_count, v);
#endif

    rep.network = {true, 0};
    for (NodeIdx v = 0; v < node_count; ++v) {
        rep.per_node[v] = per[v];
        if (per[v].unbounded) continue;
        if (rep.network.unbounded || per[v].value < rep.network.value)
            rep.network = per[v];
    }
    if (k) rep.for_k_query = rep.network.unbounded || rep.network.value >= *k;
    return rep;
}

}  // namespace cbver
