#pragma once

#include "lcl/builtins.hpp"
#include "lcl/core.hpp"
#include "lcl/io.hpp"
#include "lcl/sim.hpp"
#include "lcl/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

// d_i = 2^(2^i), saturating at `cap`.
inline auto forest_d(int i, long cap) -> long
{
    if (i >= 6)
        return cap;
    long double v = std::pow(2.0L, std::pow(2.0L, i));
    return v >= static_cast<long double>(cap) ? cap : static_cast<long>(v);
}

struct RoundStats
{
    int round = 0;
    long d = 0;
    int unsettled = 0;
    int hubs = 0;
    int newly_settled = 0;
    double settled_fraction = 0;
    int max_cluster_radius = 0;
    int luby_iterations = 0;
    int deficient_hubs = 0;   // hubs with fewer than delta retained directions
    int tree_violations = 0;  // clusters whose BFS region is not a tree
};

struct ForestOptions
{
    int max_rounds = 16;
    std::uint64_t seed = 0;
    bool finalize = true;
    bool track_radius = false;
};

struct ForestState
{
    int round = 0;
    std::vector<char> unsettled;
    std::vector<char> hub;
    std::vector<int> out_port;      // -1 for unsettled vertices and sinks
    std::vector<int> settled_round; // round of settling, -1 while unsettled
    std::vector<char> sink;         // finalized roots
    std::vector<long> d_schedule;
    std::vector<RoundStats> stats;
    bool finalized = false;
    bool tracked = false;
    std::vector<long> state_radius; // per vertex, radius fixing its own out-edge

    auto size() const -> int { return static_cast<int>(unsettled.size()); }
    auto unsettled_count() const -> int
    {
        return static_cast<int>(std::count(unsettled.begin(), unsettled.end(), 1));
    }
    auto parent(const PortGraph & g, int v) const -> int
    {
        return out_port[v] < 0 ? -1 : g.port(v, out_port[v]).to;
    }
};

namespace detail {

    // BFS inside the vertex set `inside`, from `sources` in the given order.
    struct Bfs
    {
        std::vector<int> dist, pred, pred_port, root;

        Bfs(const PortGraph & g, const std::vector<char> & inside, const std::vector<int> & sources, long limit = -1)
        {
            int n = g.size();
            dist.assign(n, -1);
            pred.assign(n, -1);
            pred_port.assign(n, -1);
            root.assign(n, -1);
            std::deque<int> q;
            for (int s : sources) {
                if (dist[s] >= 0)
                    continue;
                dist[s] = 0;
                root[s] = s;
                q.push_back(s);
            }
            while (!q.empty()) {
                int v = q.front();
                q.pop_front();
                if (limit >= 0 && dist[v] >= limit)
                    continue;
                for (int p = 0; p < g.delta(); ++p) {
                    const auto & pt = g.port(v, p);
                    if (pt.to == kVirtual || !inside[pt.to] || dist[pt.to] >= 0)
                        continue;
                    dist[pt.to] = dist[v] + 1;
                    pred[pt.to] = v;
                    pred_port[pt.to] = pt.to_port;
                    root[pt.to] = root[v];
                    q.push_back(pt.to);
                }
            }
        }
    };

    // Randomized maximal independent set; returns the decision iteration of
    // every vertex (members and removed alike) and the membership flags.
    inline auto luby_mis(const std::vector<std::vector<int>> & adj, const std::vector<int> & names, std::uint64_t seed,
        int round) -> std::pair<std::vector<char>, std::vector<int>>
    {
        int m = static_cast<int>(adj.size());
        std::vector<char> in(m, 0), alive(m, 1);
        std::vector<int> decided(m, 0);
        int left = m, iter = 0;
        std::vector<std::uint64_t> pr(m);
        while (left > 0) {
            ++iter;
            for (int a = 0; a < m; ++a)
                if (alive[a])
                    pr[a] = mix_words({seed, 0x1b, static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(iter),
                        static_cast<std::uint64_t>(names[a])});
            std::vector<int> join;
            for (int a = 0; a < m; ++a) {
                if (!alive[a])
                    continue;
                bool best = true;
                for (int b : adj[a])
                    if (alive[b] && (pr[b] < pr[a] || (pr[b] == pr[a] && names[b] < names[a]))) {
                        best = false;
                        break;
                    }
                if (best)
                    join.push_back(a);
            }
            for (int a : join) {
                in[a] = 1;
                if (alive[a]) {
                    alive[a] = 0;
                    decided[a] = iter;
                    --left;
                }
                for (int b : adj[a])
                    if (alive[b]) {
                        alive[b] = 0;
                        decided[b] = iter;
                        --left;
                    }
            }
        }
        return {in, decided};
    }

    inline auto check_forest_instance(const PortGraph & g) -> bool
    {
        if (g.delta() < 3)
            throw std::invalid_argument("one-ended forest needs delta >= 3");
        if (!is_connected(g))
            throw std::invalid_argument("instance is disconnected");
        bool tree = is_tree(g);
        if (!tree)
            for (int v = 0; v < g.size(); ++v)
                if (g.degree(v) != g.delta())
                    throw std::invalid_argument("instance is neither a tree nor delta-regular");
        return tree;
    }

    // Max over y within `radius` of x (inside `inside`) of dist(x, y) + val[y].
    class BallMax
    {
    public:
        explicit BallMax(int n) : stamp_(n, 0), dist_(n, 0) {}

        auto operator()(const PortGraph & g, const std::vector<char> & inside, int x, long radius,
            const std::vector<long> & val) -> long
        {
            ++cur_;
            stamp_[x] = cur_;
            dist_[x] = 0;
            queue_.clear();
            queue_.push_back(x);
            long best = val[x];
            for (std::size_t h = 0; h < queue_.size(); ++h) {
                int v = queue_[h];
                if (dist_[v] >= radius)
                    continue;
                for (int p = 0; p < g.delta(); ++p) {
                    int w = g.port(v, p).to;
                    if (w == kVirtual || !inside[w] || stamp_[w] == cur_)
                        continue;
                    stamp_[w] = cur_;
                    dist_[w] = dist_[v] + 1;
                    best = std::max(best, dist_[w] + val[w]);
                    queue_.push_back(w);
                }
            }
            return best;
        }

    private:
        std::vector<int> stamp_;
        std::vector<long> dist_;
        std::vector<int> queue_;
        int cur_ = 0;
    };

} // namespace detail

// Settled vertices point along out_port; following pointers must terminate in
// an unsettled vertex or a sink, and never revisit a vertex.
inline auto forest_acyclic(const PortGraph & g, const ForestState & st) -> bool
{
    int n = g.size();
    std::vector<char> state(n, 0); // 0 new, 1 on stack, 2 done
    for (int s = 0; s < n; ++s) {
        std::vector<int> path;
        int v = s;
        while (v >= 0 && state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = st.parent(g, v);
        }
        if (v >= 0 && state[v] == 1)
            return false;
        for (int w : path)
            state[w] = 2;
    }
    return true;
}

namespace detail {

    // Diameter of T[inside] (max over components), computed exactly only when
    // a double sweep cannot already show it is at least `need`.
    inline auto diameter_within(const PortGraph & g, const std::vector<char> & inside, long need) -> int
    {
        int n = g.size();
        std::vector<char> seen(n, 0);
        int lower = 0;
        for (int v = 0; v < n; ++v) {
            if (!inside[v] || seen[v])
                continue;
            Bfs a(g, inside, {v});
            int far = v;
            for (int w = 0; w < n; ++w)
                if (a.dist[w] >= 0) {
                    seen[w] = 1;
                    if (a.dist[w] > a.dist[far])
                        far = w;
                }
            Bfs b(g, inside, {far});
            lower = std::max(lower, *std::max_element(b.dist.begin(), b.dist.end()));
        }
        if (lower >= need)
            return lower;
        int exact = lower;
        detail::BallMax ball(n);
        std::vector<long> zero(n, 0);
        for (int v = 0; v < n; ++v)
            if (inside[v])
                exact = std::max<int>(exact, static_cast<int>(ball(g, inside, v, n, zero)));
        return exact;
    }

    inline auto forest_round(const PortGraph & g, ForestState & st, int i, std::uint64_t seed, bool tree) -> bool
    {
        int n = g.size(), delta = g.delta();
        const auto prev_u = st.unsettled;
        std::vector<int> prev_hubs;
        for (int v = 0; v < n; ++v)
            if (st.hub[v])
                prev_hubs.push_back(v);
        long d = forest_d(i, std::max(1, diameter_within(g, prev_u, forest_d(i, n))));
        st.d_schedule.push_back(d);

        // hub graph: distance <= d inside T[U_{i-1}]
        std::vector<int> index(n, -1);
        for (std::size_t a = 0; a < prev_hubs.size(); ++a)
            index[prev_hubs[a]] = static_cast<int>(a);
        std::vector<std::vector<int>> hadj(prev_hubs.size());
        std::vector<long> reach(prev_hubs.size(), 0); // min(d, eccentricity) inside T[U_{i-1}]
        {
            std::vector<int> stamp(n, -1), dist(n, 0), queue;
            for (std::size_t a = 0; a < prev_hubs.size(); ++a) {
                int s = prev_hubs[a];
                queue.assign(1, s);
                stamp[s] = static_cast<int>(a);
                dist[s] = 0;
                for (std::size_t h = 0; h < queue.size(); ++h) {
                    int v = queue[h];
                    if (v != s && index[v] >= 0)
                        hadj[a].push_back(index[v]);
                    reach[a] = std::max<long>(reach[a], dist[v]);
                    if (dist[v] >= d)
                        continue;
                    for (int w : g.neighbors(v))
                        if (prev_u[w] && stamp[w] != static_cast<int>(a)) {
                            stamp[w] = static_cast<int>(a);
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                }
                std::sort(hadj[a].begin(), hadj[a].end());
            }
        }
        auto [in_mis, decided] = luby_mis(hadj, prev_hubs, seed, i);
        std::vector<int> hubs;
        for (std::size_t a = 0; a < prev_hubs.size(); ++a)
            if (in_mis[a])
                hubs.push_back(prev_hubs[a]);

        // clusters: nearest hub, ties to the earlier (smaller id) source
        Bfs cl(g, prev_u, hubs);
        std::vector<int> dir(n, -1);
        std::vector<int> order;
        for (int v = 0; v < n; ++v)
            if (prev_u[v])
                order.push_back(v);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return cl.dist[a] < cl.dist[b]; });
        for (int x : order) {
            if (cl.dist[x] < 0)
                throw std::logic_error("unsettled vertex not reachable from any hub");
            if (cl.dist[x] == 1)
                dir[x] = g.port(x, cl.pred_port[x]).to_port;
            else if (cl.dist[x] > 1)
                dir[x] = dir[cl.pred[x]];
        }
        std::vector<int> radius(n, 0);
        for (int x : order)
            radius[cl.root[x]] = std::max(radius[cl.root[x]], cl.dist[x]);

        RoundStats rs;
        rs.round = i;
        rs.d = d;
        rs.luby_iterations = decided.empty() ? 0 : *std::max_element(decided.begin(), decided.end());
        for (int h : hubs)
            rs.max_cluster_radius = std::max(rs.max_cluster_radius, radius[h]);

        // tree-likeness of every cluster: only BFS-tree edges inside it
        std::vector<char> bad(n, 0);
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto & pe = g.edges()[e];
            if (!prev_u[pe.u] || !prev_u[pe.v] || cl.root[pe.u] != cl.root[pe.v])
                continue;
            bool tree_edge = (cl.pred[pe.v] == pe.u && cl.pred_port[pe.v] == pe.pu)
                || (cl.pred[pe.u] == pe.v && cl.pred_port[pe.u] == pe.pv);
            if (!tree_edge)
                bad[cl.root[pe.u]] = 1;
        }
        for (int h : hubs)
            rs.tree_violations += bad[h];

        // boundary edges per hub and direction
        std::vector<std::vector<std::vector<int>>> boundary(n);
        for (int h : hubs)
            boundary[h].assign(delta, {});
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto & pe = g.edges()[e];
            if (!prev_u[pe.u] || !prev_u[pe.v] || cl.root[pe.u] == cl.root[pe.v])
                continue;
            boundary[cl.root[pe.u]][dir[pe.u] < 0 ? pe.pu : dir[pe.u]].push_back(e);
            boundary[cl.root[pe.v]][dir[pe.v] < 0 ? pe.pv : dir[pe.v]].push_back(e);
        }

        std::vector<char> next_u(n, 0);
        std::vector<int> retained(n, 0);
        for (int h : hubs) {
            next_u[h] = 1;
            for (int l = 0; l < delta; ++l) {
                const auto & cand = boundary[h][l];
                if (cand.empty())
                    continue;
                ++retained[h];
                Rng rng(mix_words({seed, 0xe1, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(h),
                    static_cast<std::uint64_t>(l)}));
                const auto & pe = g.edges()[cand[rng.uniform_below(cand.size())]];
                for (int x : {pe.u, pe.v})
                    for (int w = x; w >= 0; w = cl.pred[w])
                        next_u[w] = 1;
            }
        }
        for (int h : hubs)
            if (retained[h] < g.degree(h))
                ++rs.deficient_hubs;

        // newly settled vertices orient toward the nearest retained vertex
        std::vector<int> sources;
        for (int v = 0; v < n; ++v)
            if (next_u[v])
                sources.push_back(v);
        Bfs to_u(g, prev_u, sources);
        for (int v = 0; v < n; ++v) {
            if (!prev_u[v] || next_u[v])
                continue;
            if (to_u.dist[v] <= 0)
                throw std::logic_error("settled vertex found no retained vertex");
            st.out_port[v] = to_u.pred_port[v];
            st.settled_round[v] = i;
            ++rs.newly_settled;
        }

        if (st.tracked) {
            // a vertex's round-i state is fixed by its cluster, the neighboring
            // clusters' boundary choices, the path to U_i and the MIS decisions
            // of its hub, on top of round i-1 states in that region
            std::vector<long> next_r = st.state_radius;
            BallMax ball(n);
            for (int x = 0; x < n; ++x) {
                if (!prev_u[x])
                    continue;
                int h = cl.root[x];
                long lambda = cl.dist[x] + 2L * radius[h] + 1;
                if (!next_u[x])
                    lambda += to_u.dist[x];
                long mis = reach[index[h]] * decided[index[h]];
                next_r[x] = mis + ball(g, prev_u, x, lambda, st.state_radius);
            }
            st.state_radius = std::move(next_r);
        }

        bool changed = next_u != prev_u || prev_hubs.size() != hubs.size();
        st.unsettled = next_u;
        std::fill(st.hub.begin(), st.hub.end(), 0);
        for (int h : hubs)
            st.hub[h] = 1;
        st.round = i;
        rs.unsettled = st.unsettled_count();
        rs.hubs = static_cast<int>(hubs.size());
        rs.settled_fraction = 1.0 - static_cast<double>(rs.unsettled) / n;

        // round invariants
        for (int v = 0; v < n; ++v) {
            if (prev_u[v] || !st.unsettled[v])
                continue;
            throw std::logic_error("settled vertex became unsettled");
        }
        for (int v = 0; v < n; ++v) {
            int p = st.parent(g, v);
            if (st.settled_round[v] == i && p >= 0 && !prev_u[p])
                throw std::logic_error("new out-edge enters a frozen below-tree");
            if (!st.unsettled[v] && st.out_port[v] < 0)
                throw std::logic_error("settled vertex without out-edge");
        }
        if (!forest_acyclic(g, st))
            throw std::logic_error("orientation has a cycle");
        for (int v = 0; v < n; ++v) {
            if (!st.unsettled[v])
                continue;
            int deg = 0;
            for (int w : g.neighbors(v))
                deg += st.unsettled[w];
            if (st.hub[v]) {
                if (tree ? deg != retained[v] : deg < retained[v])
                    throw std::logic_error("hub degree in T[U_i] differs from its retained directions");
            } else if (deg < 2) {
                throw std::logic_error("non-hub vertex of T[U_i] has degree below 2");
            }
        }
        long bound = std::accumulate(st.d_schedule.begin(), st.d_schedule.end(), 0L);
        Bfs near(g, st.unsettled, hubs);
        for (int v = 0; v < n; ++v)
            if (st.unsettled[v] && (near.dist[v] < 0 || near.dist[v] > bound))
                throw std::logic_error("unsettled vertex too far from every hub");
        st.stats.push_back(rs);
        return changed;
    }

} // namespace detail

// Residual unsettled components are rooted at their smallest hub and oriented
// along a BFS tree toward it; the roots become sinks.
inline auto finalize_forest(const PortGraph & g, ForestState & st) -> void
{
    int n = g.size();
    std::vector<int> roots;
    std::vector<char> seen(n, 0);
    for (int pass = 0; pass < 2; ++pass)
        for (int v = 0; v < n; ++v) {
            if (!st.unsettled[v] || seen[v] || (pass == 0 && !st.hub[v]))
                continue;
            roots.push_back(v);
            detail::Bfs comp(g, st.unsettled, {v});
            for (int w = 0; w < n; ++w)
                if (comp.dist[w] >= 0)
                    seen[w] = 1;
        }
    detail::Bfs b(g, st.unsettled, roots);
    std::vector<long> next_r = st.state_radius;
    if (st.tracked) {
        // a residual vertex needs its whole residual component
        std::vector<long> comp_max(n, 0);
        for (int v = 0; v < n; ++v)
            if (st.unsettled[v])
                comp_max[b.root[v]] = std::max(comp_max[b.root[v]], st.state_radius[v] + b.dist[v]);
        for (int v = 0; v < n; ++v)
            if (st.unsettled[v])
                next_r[v] = comp_max[b.root[v]] + b.dist[v];
    }
    for (int v = 0; v < n; ++v) {
        if (!st.unsettled[v])
            continue;
        if (b.dist[v] == 0) {
            st.sink[v] = 1;
        } else {
            st.out_port[v] = b.pred_port[v];
        }
        st.settled_round[v] = st.round + 1;
        st.unsettled[v] = 0;
    }
    st.state_radius = std::move(next_r);
    st.finalized = true;
    if (!forest_acyclic(g, st))
        throw std::logic_error("finalized orientation has a cycle");
}

inline auto one_ended_forest(const PortGraph & g, const ForestOptions & opt = {}) -> ForestState
{
    bool tree = detail::check_forest_instance(g);
    int n = g.size();
    ForestState st;
    st.unsettled.assign(n, 1);
    st.hub.assign(n, 1);
    st.out_port.assign(n, -1);
    st.settled_round.assign(n, -1);
    st.sink.assign(n, 0);
    st.tracked = opt.track_radius;
    if (st.tracked)
        st.state_radius.assign(n, 0);
    RoundStats r0;
    r0.unsettled = n;
    r0.hubs = n;
    st.stats.push_back(r0);
    for (int i = 1; i <= opt.max_rounds; ++i)
        if (!detail::forest_round(g, st, i, opt.seed, tree))
            break;
    if (opt.finalize)
        finalize_forest(g, st);
    return st;
}

inline auto one_ended_forest(const MultiGraph & m, const ForestOptions & opt = {}) -> std::pair<PortGraph, ForestState>
{
    int d = m.max_degree();
    auto g = m.to_port_graph(d);
    auto st = one_ended_forest(g, opt);
    return {std::move(g), std::move(st)};
}

// Vertices ordered by the height of their below-tree under `out`, ties by id.
inline auto height_order(const PortGraph & g, const std::vector<int> & out)
    -> std::pair<std::vector<int>, std::vector<int>>
{
    int n = g.size();
    auto parent = [&](int v) { return out[v] < 0 ? -1 : g.port(v, out[v]).to; };
    std::vector<int> pending(n, 0), height(n, 0);
    for (int v = 0; v < n; ++v)
        if (int p = parent(v); p >= 0)
            ++pending[p];
    std::vector<int> frontier;
    for (int v = 0; v < n; ++v)
        if (pending[v] == 0)
            frontier.push_back(v);
    std::vector<int> order;
    for (std::size_t h = 0; h < frontier.size(); ++h) {
        int v = frontier[h];
        order.push_back(v);
        if (int p = parent(v); p >= 0) {
            height[p] = std::max(height[p], height[v] + 1);
            if (--pending[p] == 0)
                frontier.push_back(p);
        }
    }
    if (static_cast<int>(order.size()) != n)
        throw std::logic_error("orientation is cyclic");
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return height[a] != height[b] ? height[a] < height[b] : a < b;
    });
    return {order, height};
}

inline auto forest_height_order(const PortGraph & g, const ForestState & st)
    -> std::pair<std::vector<int>, std::vector<int>>
{
    return height_order(g, st.out_port);
}

// R(v): radius of information fixing the whole below-tree of v.
inline auto coding_radii(const PortGraph & g, const ForestState & st) -> std::vector<long>
{
    if (!st.tracked)
        throw std::invalid_argument("dependency tracking was disabled for this run");
    if (!st.finalized)
        throw std::invalid_argument("forest is not finalized");
    auto [order, height] = forest_height_order(g, st);
    std::vector<long> R = st.state_radius;
    for (int v : order)
        if (int p = st.parent(g, v); p >= 0)
            R[p] = std::max(R[p], R[v] + 1);
    return R;
}

struct RadiusQuantile
{
    double eps;
    long radius;
};

inline auto radius_quantiles(std::vector<long> radii, const std::vector<double> & eps_grid) -> std::vector<RadiusQuantile>
{
    std::sort(radii.begin(), radii.end());
    std::vector<RadiusQuantile> out;
    for (double e : eps_grid) {
        if (!(e > 0 && e < 1))
            throw std::invalid_argument("epsilon must lie in (0, 1)");
        if (radii.empty()) {
            out.push_back({e, 0});
            continue;
        }
        auto idx = static_cast<std::size_t>(std::ceil((1 - e) * static_cast<double>(radii.size())));
        idx = std::clamp<std::size_t>(idx, 1, radii.size()) - 1;
        out.push_back({e, radii[idx]});
    }
    return out;
}

inline auto coding_radius_profile(const PortGraph & g, std::uint64_t seed, const std::vector<double> & eps_grid,
    int max_rounds = 16) -> std::vector<RadiusQuantile>
{
    ForestOptions opt;
    opt.seed = seed;
    opt.max_rounds = max_rounds;
    opt.track_radius = true;
    auto st = one_ended_forest(g, opt);
    return radius_quantiles(coding_radii(g, st), eps_grid);
}

// Least-squares slope of log(radius) against log(1/eps).
inline auto loglog_slope(const std::vector<RadiusQuantile> & q) -> double
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (auto & e : q) {
        double x = std::log(1 / e.eps), y = std::log(std::max<long>(1, e.radius));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    double den = k * sxx - sx * sx;
    return den == 0 ? 0 : (k * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// Power-2 perfect matching from the forest

struct MatchEntry
{
    enum class Kind { Matched, Unmatched, Line } kind = Kind::Unmatched;
    int other = -1;
    int via = -1; // middle vertex of a distance-2 pair, -1 when direct
};

struct Matching2
{
    std::vector<MatchEntry> entry;
    int grafts = 0; // crossing edges used to join the forest's trees

    auto residue() const -> int
    {
        return static_cast<int>(std::count_if(entry.begin(), entry.end(),
            [](const MatchEntry & e) { return e.kind != MatchEntry::Kind::Matched; }));
    }
};

namespace detail {

    // Makes `v` the root of its tree by reversing its path to the current root.
    inline auto reroot(const PortGraph & g, std::vector<int> & out, int v) -> void
    {
        std::vector<int> path{v};
        while (out[path.back()] >= 0)
            path.push_back(g.port(path.back(), out[path.back()]).to);
        std::vector<int> back(path.size(), -1);
        for (std::size_t j = 1; j < path.size(); ++j)
            back[j] = g.port(path[j - 1], out[path[j - 1]]).to_port;
        for (std::size_t j = path.size() - 1; j >= 1; --j)
            out[path[j]] = back[j];
        out[v] = -1;
    }

    inline auto root_of(const PortGraph & g, const std::vector<int> & out) -> std::vector<int>
    {
        auto [order, height] = height_order(g, out);
        std::vector<int> root(g.size(), -1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            root[v] = out[v] < 0 ? v : root[g.port(v, out[v]).to];
        }
        return root;
    }

} // namespace detail

// On a finite instance the forest splits into finite trees, each of which can
// leave its root unmatched. Trees are first grafted along crossing edges (in
// edge order) into one spanning tree per component; the induction then runs
// on that tree exactly as in the one-ended case.
inline auto pm2_from_forest(const PortGraph & g, const ForestState & st) -> Matching2
{
    if (!st.finalized)
        throw std::invalid_argument("forest is not finalized");
    int n = g.size();
    auto out = st.out_port;
    int grafts = 0;
    {
        auto root = detail::root_of(g, out);
        std::vector<int> uf(n);
        std::iota(uf.begin(), uf.end(), 0);
        auto find = [&](int x) {
            while (uf[x] != x)
                x = uf[x] = uf[uf[x]];
            return x;
        };
        for (const auto & pe : g.edges()) {
            int a = find(root[pe.u]), b = find(root[pe.v]);
            if (a == b)
                continue;
            detail::reroot(g, out, pe.u);
            out[pe.u] = pe.pu;
            uf[a] = b;
            ++grafts;
        }
    }
    auto [order, height] = height_order(g, out);
    Matching2 m;
    m.entry.assign(n, {});
    m.grafts = grafts;
    std::vector<char> open(n, 1);
    auto pair = [&](int a, int b, int via) {
        m.entry[a] = {MatchEntry::Kind::Matched, b, via};
        m.entry[b] = {MatchEntry::Kind::Matched, a, via};
        open[a] = open[b] = 0;
    };
    auto run = [&] {
        for (int v : order) {
            // unmatched children in ascending port order of v
            std::vector<int> kids;
            for (int p = 0; p < g.delta(); ++p) {
                const auto & pt = g.port(v, p);
                if (pt.to != kVirtual && out[pt.to] == pt.to_port && open[pt.to])
                    kids.push_back(pt.to);
            }
            std::size_t start = 0;
            if (kids.size() % 2 == 1) {
                pair(v, kids[0], -1);
                start = 1;
            }
            for (std::size_t k = start; k + 1 < kids.size(); k += 2)
                pair(kids[k], kids[k + 1], v);
        }
    };
    run();
    // an odd component leaves its root open; move the root to a vertex with
    // a virtual port so the residue can still be encoded
    bool moved = false;
    for (int v = 0; v < n; ++v)
        if (open[v] && out[v] < 0 && g.degree(v) == g.delta()) {
            auto root = detail::root_of(g, out);
            for (int w = 0; w < n; ++w)
                if (root[w] == v && g.degree(w) < g.delta()) {
                    detail::reroot(g, out, w);
                    moved = true;
                    break;
                }
        }
    if (moved) {
        std::fill(open.begin(), open.end(), 1);
        m.entry.assign(n, {});
        std::tie(order, height) = height_order(g, out);
        run();
    }
    for (int v = 0; v < n; ++v)
        if (open[v] && g.delta() - g.degree(v) >= 2)
            m.entry[v] = {MatchEntry::Kind::Line, -1, -1};
    return m;
}

// Involution, distance at most two and the line rule.
inline auto validate_matching2(const PortGraph & g, const Matching2 & m) -> bool
{
    int n = g.size();
    if (static_cast<int>(m.entry.size()) != n)
        return false;
    auto adjacent = [&](int a, int b) {
        for (int p = 0; p < g.delta(); ++p)
            if (g.port(a, p).to == b)
                return true;
        return false;
    };
    for (int v = 0; v < n; ++v) {
        const auto & e = m.entry[v];
        if (e.kind == MatchEntry::Kind::Matched) {
            int u = e.other;
            if (u < 0 || u >= n || u == v || m.entry[u].kind != MatchEntry::Kind::Matched || m.entry[u].other != v
                || m.entry[u].via != e.via)
                return false;
            if (e.via < 0 ? !adjacent(v, u) : !(adjacent(v, e.via) && adjacent(e.via, u)))
                return false;
        } else if (e.kind == MatchEntry::Kind::Line) {
            // runs are single vertices carrying both line half-edges on
            // virtual ports, so no real edge needs the {line,line} rule
            if (g.delta() - g.degree(v) < 2)
                return false;
        }
    }
    return true;
}

// Labels over add_paths(pm_power2): matched pairs through the pm_power2
// encoding, unmatched vertices escape through a virtual port, line vertices put
// the line label on two virtual ports.
inline auto encode_matching2(const PortGraph & g, const Matching2 & m) -> HalfEdgeLabeling
{
    int n = g.size();
    std::vector<int> partner(n);
    for (int v = 0; v < n; ++v)
        partner[v] = m.entry[v].kind == MatchEntry::Kind::Matched ? m.entry[v].other : kEscape;
    auto lab = encode_pm_power2(g, partner);
    Label line = pm2::kLabels;
    for (int v = 0; v < n; ++v) {
        if (m.entry[v].kind != MatchEntry::Kind::Line)
            continue;
        int placed = 0;
        for (int p = 0; p < g.delta(); ++p)
            if (g.port(v, p).to == kVirtual)
                lab.set(v, p, placed++ < 2 ? line : pm2::make(0, 0));
        if (placed < 2)
            throw std::invalid_argument("line vertex without two virtual ports");
    }
    return lab;
}

inline auto matching_to_json(const Matching2 & m) -> json
{
    json pairs = json::array(), unmatched = json::array(), line = json::array();
    for (int v = 0; v < static_cast<int>(m.entry.size()); ++v) {
        const auto & e = m.entry[v];
        if (e.kind == MatchEntry::Kind::Matched && v < e.other) {
            json p = {{"u", v}, {"v", e.other}};
            if (e.via >= 0)
                p["via"] = e.via;
            pairs.push_back(p);
        } else if (e.kind == MatchEntry::Kind::Unmatched) {
            unmatched.push_back(v);
        } else if (e.kind == MatchEntry::Kind::Line) {
            line.push_back(v);
        }
    }
    return {{"pairs", pairs}, {"unmatched", unmatched}, {"line", line}};
}

// ---------------------------------------------------------------------------
// Four-edge-coloring of subcubic graphs

struct EdgeColoring4
{
    std::vector<int> color; // per edge, in 1..4
    int complement_edges = 0;
    int fallbacks = 0;      // edges that needed a fan recoloring
};

inline auto edge_coloring_valid(const PortGraph & g, const std::vector<int> & color, int palette) -> bool
{
    if (static_cast<int>(color.size()) != g.edge_count())
        return false;
    for (int c : color)
        if (c < 1 || c > palette)
            return false;
    for (int v = 0; v < g.size(); ++v)
        for (int p = 0; p < g.delta(); ++p)
            for (int q = p + 1; q < g.delta(); ++q) {
                const auto & a = g.port(v, p);
                const auto & b = g.port(v, q);
                if (a.to != kVirtual && b.to != kVirtual && a.edge != b.edge && color[a.edge] == color[b.edge])
                    return false;
            }
    return true;
}

namespace detail {

    // Misra-Gries fan recoloring of one uncolored edge (colors 0..3, -1 =
    // uncolored) on a simple graph of max degree 3.
    inline auto fan_recolor(const PortGraph & g, std::vector<int> & c, int e) -> void
    {
        constexpr int k = 4;
        auto edge_at = [&](int x, int col) {
            for (int p = 0; p < g.delta(); ++p) {
                const auto & pt = g.port(x, p);
                if (pt.to != kVirtual && c[pt.edge] == col)
                    return pt.edge;
            }
            return -1;
        };
        auto is_free = [&](int x, int col) { return edge_at(x, col) < 0; };
        auto free_color = [&](int x) {
            for (int col = 0; col < k; ++col)
                if (is_free(x, col))
                    return col;
            throw std::logic_error("no free color at a subcubic vertex");
        };
        auto other = [&](int edge, int x) {
            const auto & pe = g.edges()[edge];
            return pe.u == x ? pe.v : pe.u;
        };
        int u = g.edges()[e].u;
        std::vector<int> fv{other(e, u)}, fe{e};
        for (bool grew = true; grew;) {
            grew = false;
            for (int p = 0; p < g.delta() && !grew; ++p) {
                const auto & pt = g.port(u, p);
                if (pt.to == kVirtual || c[pt.edge] < 0)
                    continue;
                if (std::find(fv.begin(), fv.end(), pt.to) != fv.end())
                    continue;
                if (is_free(fv.back(), c[pt.edge])) {
                    fv.push_back(pt.to);
                    fe.push_back(pt.edge);
                    grew = true;
                }
            }
        }
        int cu = free_color(u), dk = free_color(fv.back());
        // invert the cu/dk path starting at u
        if (cu != dk) {
            std::vector<int> path;
            int x = u, want = dk;
            for (int edge = edge_at(x, want); edge >= 0; edge = edge_at(x, want)) {
                if (std::find(path.begin(), path.end(), edge) != path.end())
                    break;
                path.push_back(edge);
                x = other(edge, x);
                want = want == dk ? cu : dk;
            }
            for (int edge : path)
                c[edge] = c[edge] == dk ? cu : dk;
        }
        for (std::size_t j = 0; j < fv.size(); ++j) {
            bool fan = true;
            for (std::size_t i = 0; i + 1 <= j && fan; ++i)
                fan = c[fe[i + 1]] >= 0 && is_free(fv[i], c[fe[i + 1]]);
            if (!fan || !is_free(fv[j], dk))
                continue;
            for (std::size_t i = 0; i < j; ++i)
                c[fe[i]] = c[fe[i + 1]];
            c[fe[j]] = -1;
            if (!is_free(u, dk) || !is_free(fv[j], dk))
                break;
            c[fe[j]] = dk;
            return;
        }
        throw std::logic_error("fan recoloring failed");
    }

} // namespace detail

inline auto vizing3_edge_color(const PortGraph & g, std::uint64_t seed) -> EdgeColoring4
{
    if (g.delta() != 3)
        throw std::invalid_argument("vizing3 needs delta = 3");
    int m = g.edge_count();
    EdgeColoring4 out;
    std::vector<int> c(m, -1);
    if (g.size() <= 1 || m == 0) {
        out.color.assign(m, 1);
        return out;
    }
    ForestOptions opt;
    opt.seed = seed;
    auto st = one_ended_forest(g, opt);
    std::vector<char> grabbed(m, 0);
    for (int v = 0; v < g.size(); ++v)
        if (st.out_port[v] >= 0)
            grabbed[g.port(v, st.out_port[v]).edge] = 1;

    // the complement has max degree 2: 3-color its line graph
    std::vector<int> rest, pos(m, -1);
    for (int e = 0; e < m; ++e)
        if (!grabbed[e]) {
            pos[e] = static_cast<int>(rest.size());
            rest.push_back(e);
        }
    out.complement_edges = static_cast<int>(rest.size());
    if (!rest.empty()) {
        std::vector<std::vector<int>> adj(rest.size());
        for (int v = 0; v < g.size(); ++v) {
            std::vector<int> here;
            for (int p = 0; p < 3; ++p) {
                const auto & pt = g.port(v, p);
                if (pt.to != kVirtual && pos[pt.edge] >= 0
                    && std::find(here.begin(), here.end(), pos[pt.edge]) == here.end())
                    here.push_back(pos[pt.edge]);
            }
            if (here.size() > 2)
                throw std::logic_error("non-grabbed edges have a vertex of degree 3");
            if (here.size() == 2) {
                adj[here[0]].push_back(here[1]);
                adj[here[1]].push_back(here[0]);
            }
        }
        for (auto & a : adj) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        std::vector<long long> ids(rest.size());
        std::iota(ids.begin(), ids.end(), 0);
        auto col = color_graph(adj, ids, std::max<long long>(2, static_cast<long long>(rest.size())), 2, 3);
        for (std::size_t i = 0; i < rest.size(); ++i)
            c[rest[i]] = static_cast<int>(col[i]);
    }

    // forest edges below each vertex, in increasing height
    auto [order, height] = forest_height_order(g, st);
    for (int v : order)
        for (int p = 0; p < 3; ++p) {
            const auto & pt = g.port(v, p);
            if (pt.to == kVirtual || st.out_port[pt.to] != pt.to_port)
                continue;
            std::vector<char> used(4, 0);
            for (int x : {v, pt.to})
                for (int q = 0; q < 3; ++q) {
                    const auto & o = g.port(x, q);
                    if (o.to != kVirtual && c[o.edge] >= 0)
                        used[c[o.edge]] = 1;
                }
            int pick = static_cast<int>(std::find(used.begin(), used.end(), 0) - used.begin());
            if (pick < 4) {
                c[pt.edge] = pick;
            } else {
                detail::fan_recolor(g, c, pt.edge);
                ++out.fallbacks;
            }
        }
    out.color.resize(m);
    for (int e = 0; e < m; ++e)
        out.color[e] = c[e] + 1;
    if (!edge_coloring_valid(g, out.color, 4))
        throw std::logic_error("edge coloring is not proper");
    return out;
}

// Random d-regular graph (union of d matchings) with girth at least `target`.
inline auto high_girth_regular(int n, int d, int target, std::uint64_t seed, int retries = 20) -> MultiGraph
{
    for (int attempt = 0; attempt < retries; ++attempt) {
        auto g = gen_config_model(n, d, mix_words({seed, 0x9e, static_cast<std::uint64_t>(attempt)}));
        Rng rng(mix_words({seed, 0x5a, static_cast<std::uint64_t>(attempt)}));
        if (repair_short_cycles(g, target, rng, 50L * n))
            return g;
    }
    throw CapExceeded("no graph of the requested girth within the retry budget");
}

// ---------------------------------------------------------------------------
// Exports

inline auto round_stats_csv(const ForestState & st) -> std::string
{
    std::ostringstream os;
    os << "round,d,unsettled,hubs,settled_fraction,max_cluster_radius,luby_iterations,deficient_hubs,tree_violations\n";
    for (auto & r : st.stats)
        os << r.round << ',' << r.d << ',' << r.unsettled << ',' << r.hubs << ',' << r.settled_fraction << ','
           << r.max_cluster_radius << ',' << r.luby_iterations << ',' << r.deficient_hubs << ','
           << r.tree_violations << '\n';
    return os.str();
}

inline auto radius_profile_csv(const std::vector<RadiusQuantile> & q) -> std::string
{
    std::ostringstream os;
    os << "eps,radius\n";
    for (auto & e : q)
        os << e.eps << ',' << e.radius << '\n';
    return os.str();
}

inline auto forest_to_json(const PortGraph & g, const ForestState & st) -> json
{
    json stats = json::array();
    for (auto & r : st.stats)
        stats.push_back({{"round", r.round}, {"d", r.d}, {"unsettled", r.unsettled}, {"hubs", r.hubs},
            {"newly_settled", r.newly_settled}, {"settled_fraction", r.settled_fraction},
            {"max_cluster_radius", r.max_cluster_radius}, {"luby_iterations", r.luby_iterations},
            {"deficient_hubs", r.deficient_hubs}, {"tree_violations", r.tree_violations}});
    json sinks = json::array();
    for (int v = 0; v < g.size(); ++v)
        if (st.sink[v])
            sinks.push_back(v);
    return {{"rounds", st.round}, {"finalized", st.finalized}, {"out_port", st.out_port},
        {"settled_round", st.settled_round}, {"sinks", sinks}, {"stats", stats},
        {"note", "finite-instance finalization roots each residual component at a sink"}};
}

inline auto forest_dot(const PortGraph & g, const ForestState & st) -> std::string
{
    std::ostringstream os;
    os << "digraph forest {\n";
    for (int v = 0; v < g.size(); ++v)
        if (st.sink[v] || st.unsettled[v])
            os << "  " << v << " [shape=" << (st.sink[v] ? "doublecircle" : "box") << "];\n";
    for (int v = 0; v < g.size(); ++v)
        if (int p = st.parent(g, v); p >= 0)
            os << "  " << v << " -> " << p << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace lcl
