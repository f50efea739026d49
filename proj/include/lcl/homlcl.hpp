#pragma once

#include "lcl/core.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

// Pi_G: labels are the vertices of G, every vertex is monochromatic and every
// edge color allows exactly the edges of G.
inline auto make_homomorphism_problem(const TargetGraph & g, int delta) -> LclProblem
{
    if (g.size() == 0)
        throw std::invalid_argument("homomorphism target must be nonempty");
    g.validate();
    std::vector<Config> vs;
    for (int a = 0; a < g.size(); ++a)
        vs.push_back(Config(delta, a));
    std::vector<std::vector<std::pair<Label, Label>>> es(delta, g.edges);
    return LclProblem(delta, g.names, vs, es, true);
}

inline constexpr int kExactSolverCap = 40;

namespace detail {

    // Backtracking k-coloring restricted to the vertices in `active`; new colors
    // are opened in order, which removes color-permutation symmetry.
    class Colorer
    {
    public:
        Colorer(const std::vector<std::vector<char>> & adj, const std::vector<int> & active, int k) :
            adj_(adj), active_(active), k_(k), color_(adj.size(), -1)
        {
        }

        auto run() -> std::optional<std::vector<int>>
        {
            if (active_.empty())
                return color_;
            if (k_ <= 0)
                return std::nullopt;
            if (solve(0, 0))
                return color_;
            return std::nullopt;
        }

    private:
        auto solve(int assigned, int used) -> bool
        {
            if (assigned == static_cast<int>(active_.size()))
                return true;
            // DSATUR order: most distinct neighbor colors, then most uncolored neighbors, then index.
            int best = -1, best_sat = -1, best_deg = -1;
            for (int v : active_) {
                if (color_[v] >= 0)
                    continue;
                std::uint64_t seen = 0;
                int deg = 0;
                for (int w : active_) {
                    if (!adj_[v][w])
                        continue;
                    if (color_[w] >= 0)
                        seen |= 1ULL << color_[w];
                    else
                        ++deg;
                }
                int sat = __builtin_popcountll(seen);
                if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
                    best = v;
                    best_sat = sat;
                    best_deg = deg;
                }
            }
            for (int c = 0; c < std::min(k_, used + 1); ++c) {
                bool ok = true;
                for (int w : active_)
                    if (adj_[best][w] && color_[w] == c) {
                        ok = false;
                        break;
                    }
                if (!ok)
                    continue;
                color_[best] = c;
                if (solve(assigned + 1, std::max(used, c + 1)))
                    return true;
                color_[best] = -1;
            }
            return false;
        }

        const std::vector<std::vector<char>> & adj_;
        std::vector<int> active_;
        int k_;
        std::vector<int> color_;
    };

    inline auto all_vertices(int n) -> std::vector<int>
    {
        std::vector<int> v(n);
        for (int i = 0; i < n; ++i)
            v[i] = i;
        return v;
    }

    inline auto check_cap(const TargetGraph & g, int cap) -> void
    {
        if (g.size() > cap)
            throw CapExceeded("graph has " + std::to_string(g.size()) + " vertices, exact solver cap is " +
                std::to_string(cap));
    }

} // namespace detail

// Proper coloring with at most k colors of the vertices in `subset` (all when
// empty flag is false); returned vector has -1 outside the subset.
inline auto k_coloring(const TargetGraph & g, int k, const std::vector<int> & subset)
    -> std::optional<std::vector<int>>
{
    auto adj = g.adjacency();
    return detail::Colorer(adj, subset, k).run();
}

inline auto k_coloring(const TargetGraph & g, int k) -> std::optional<std::vector<int>>
{
    return k_coloring(g, k, detail::all_vertices(g.size()));
}

inline auto chromatic_number(const TargetGraph & g) -> int
{
    detail::check_cap(g, kExactSolverCap);
    if (g.size() == 0)
        return 0;
    for (int k = 1;; ++k)
        if (k_coloring(g, k))
            return k;
}

struct DeltaStarWitness
{
    std::vector<int> s0, s1;       // sorted vertex lists
    std::vector<int> c0, c1;       // colors in [0, delta-2] outside S_i, -1 inside
};

inline auto validate_delta_star(const TargetGraph & g, const DeltaStarWitness & w, int delta) -> bool
{
    int n = g.size();
    if (static_cast<int>(w.c0.size()) != n || static_cast<int>(w.c1.size()) != n)
        return false;
    std::vector<char> in0(n, 0), in1(n, 0);
    for (int v : w.s0)
        in0.at(v) = 1;
    for (int v : w.s1)
        in1.at(v) = 1;
    for (auto [u, v] : g.edges) {
        if ((in0[u] && in1[v]) || (in1[u] && in0[v]))
            return false;
        if (!in0[u] && !in0[v] && w.c0[u] == w.c0[v])
            return false;
        if (!in1[u] && !in1[v] && w.c1[u] == w.c1[v])
            return false;
    }
    for (int v = 0; v < n; ++v) {
        if (!in0[v] && (w.c0[v] < 0 || w.c0[v] > delta - 2))
            return false;
        if (!in1[v] && (w.c1[v] < 0 || w.c1[v] > delta - 2))
            return false;
    }
    return true;
}

inline constexpr int kDeltaStarCap = 20;

// Exhaustive over S0 in increasing bitmask order. For a fixed S0 the largest
// admissible S1 is V minus the neighborhood of S0, and enlarging S1 only makes
// its complement easier to color, so that choice is without loss of generality.
inline auto has_delta_star(const TargetGraph & g, int delta) -> std::optional<DeltaStarWitness>
{
    detail::check_cap(g, kDeltaStarCap);
    if (delta < 2)
        throw std::invalid_argument("delta must be at least 2");
    int n = g.size();
    auto adj = g.adjacency();
    std::vector<std::uint32_t> nbr(n, 0);
    for (auto [u, v] : g.edges) {
        nbr[u] |= 1u << v;
        nbr[v] |= 1u << u;
    }
    std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
    std::vector<signed char> memo(std::size_t{1} << n, -1); // colorability of V \ mask
    auto complement_colorable = [&](std::uint32_t mask) -> bool {
        auto & m = memo[mask];
        if (m < 0) {
            std::vector<int> rest;
            for (int v = 0; v < n; ++v)
                if (!(mask >> v & 1))
                    rest.push_back(v);
            m = detail::Colorer(adj, rest, delta - 1).run().has_value();
        }
        return m != 0;
    };
    auto coloring_of = [&](std::uint32_t mask) {
        std::vector<int> rest;
        for (int v = 0; v < n; ++v)
            if (!(mask >> v & 1))
                rest.push_back(v);
        return *detail::Colorer(adj, rest, delta - 1).run();
    };
    for (std::uint64_t m0 = 0; m0 <= full; ++m0) {
        auto s0 = static_cast<std::uint32_t>(m0);
        if (!complement_colorable(s0))
            continue;
        std::uint32_t ns0 = 0;
        for (int v = 0; v < n; ++v)
            if (s0 >> v & 1)
                ns0 |= nbr[v];
        std::uint32_t s1 = full & ~ns0;
        if (!complement_colorable(s1))
            continue;
        DeltaStarWitness w;
        for (int v = 0; v < n; ++v) {
            if (s0 >> v & 1)
                w.s0.push_back(v);
            if (s1 >> v & 1)
                w.s1.push_back(v);
        }
        w.c0 = coloring_of(s0);
        w.c1 = coloring_of(s1);
        if (!validate_delta_star(g, w, delta))
            throw std::logic_error("has_delta_star produced an invalid witness");
        return w;
    }
    return std::nullopt;
}

// Index layout of H_delta (k = delta - 1): V0 copies 0..k-1, V1 copies k..2k-1,
// P = K_k x K_k at 2k + i*k + j, and the dagger vertex last.
struct HDeltaLayout
{
    int k;
    auto v0(int i) const -> int { return i; }
    auto v1(int j) const -> int { return k + j; }
    auto p(int i, int j) const -> int { return 2 * k + i * k + j; }
    auto dagger() const -> int { return 2 * k + k * k; }
    auto size() const -> int { return dagger() + 1; }
};

inline auto build_H_delta(int delta) -> TargetGraph
{
    if (delta < 3)
        throw std::invalid_argument("H_delta needs delta >= 3");
    HDeltaLayout L{delta - 1};
    int k = L.k;
    TargetGraph g;
    g.names.resize(L.size());
    for (int i = 0; i < k; ++i) {
        g.names[L.v0(i)] = "V0:" + std::to_string(i + 1);
        g.names[L.v1(i)] = "V1:" + std::to_string(i + 1);
        for (int j = 0; j < k; ++j)
            g.names[L.p(i, j)] = "P:" + std::to_string(i + 1) + "," + std::to_string(j + 1);
    }
    g.names[L.dagger()] = "dagger";
    for (int i = 0; i < k; ++i)
        for (int i2 = i + 1; i2 < k; ++i2) {
            g.edges.emplace_back(L.v0(i), L.v0(i2));
            g.edges.emplace_back(L.v1(i), L.v1(i2));
        }
    // categorical product: both coordinates must differ
    for (int a = 0; a < k * k; ++a)
        for (int b = a + 1; b < k * k; ++b) {
            int i = a / k, j = a % k, i2 = b / k, j2 = b % k;
            if (i != i2 && j != j2)
                g.edges.emplace_back(L.p(i, j), L.p(i2, j2));
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            g.edges.emplace_back(L.dagger(), L.p(i, j));
            for (int o = 0; o < k; ++o) {
                if (o != i)
                    g.edges.emplace_back(L.v0(i), L.p(o, j));
                if (o != j)
                    g.edges.emplace_back(L.v1(j), L.p(i, o));
            }
        }
    g.validate();
    return g;
}

inline auto is_homomorphism(const TargetGraph & g, const TargetGraph & h, const std::vector<int> & map) -> bool
{
    if (static_cast<int>(map.size()) != g.size())
        return false;
    auto adj = h.adjacency();
    for (int x : map)
        if (x < 0 || x >= h.size())
            return false;
    for (auto [u, v] : g.edges)
        if (!adj[map[u]][map[v]])
            return false;
    return true;
}

inline auto theta_map(const TargetGraph & g, const DeltaStarWitness & w, int delta) -> std::vector<int>
{
    if (!validate_delta_star(g, w, delta))
        throw std::invalid_argument("theta_map: witness is not valid");
    HDeltaLayout L{delta - 1};
    int n = g.size();
    std::vector<char> in0(n, 0), in1(n, 0);
    for (int v : w.s0)
        in0[v] = 1;
    for (int v : w.s1)
        in1[v] = 1;
    std::vector<int> theta(n);
    for (int v = 0; v < n; ++v) {
        if (in0[v] && in1[v])
            theta[v] = L.dagger();
        else if (in1[v])
            theta[v] = L.v0(w.c0[v]);
        else if (in0[v])
            theta[v] = L.v1(w.c1[v]);
        else
            theta[v] = L.p(w.c0[v], w.c1[v]);
    }
    if (!is_homomorphism(g, build_H_delta(delta), theta))
        throw std::logic_error("theta_map output is not a homomorphism");
    return theta;
}

inline constexpr long kHomomorphismCap = 10000;

namespace detail {

    class HomSearch
    {
    public:
        HomSearch(const TargetGraph & g, const TargetGraph & h) :
            n_(g.size()), m_(h.size()), gadj_(g.adjacency()), hadj_(h.adjacency()),
            dom_(n_, std::vector<char>(m_, 1)), map_(n_, -1)
        {
        }

        auto run() -> std::optional<std::vector<int>>
        {
            if (n_ == 0)
                return map_;
            if (m_ == 0)
                return std::nullopt;
            if (!arc_consistent(dom_))
                return std::nullopt;
            if (solve(dom_, 0))
                return map_;
            return std::nullopt;
        }

    private:
        using Domains = std::vector<std::vector<char>>;

        // AC-3 style revision until no domain changes.
        auto arc_consistent(Domains & d) const -> bool
        {
            bool changed = true;
            while (changed) {
                changed = false;
                for (int u = 0; u < n_; ++u)
                    for (int v = 0; v < n_; ++v) {
                        if (!gadj_[u][v])
                            continue;
                        for (int a = 0; a < m_; ++a) {
                            if (!d[u][a])
                                continue;
                            bool support = false;
                            for (int b = 0; b < m_ && !support; ++b)
                                support = d[v][b] && hadj_[a][b];
                            if (!support) {
                                d[u][a] = 0;
                                changed = true;
                            }
                        }
                    }
                for (int u = 0; u < n_; ++u)
                    if (std::find(d[u].begin(), d[u].end(), 1) == d[u].end())
                        return false;
            }
            return true;
        }

        auto solve(Domains & d, int assigned) -> bool
        {
            if (assigned == n_)
                return true;
            int best = -1, best_size = m_ + 1;
            for (int u = 0; u < n_; ++u) {
                if (map_[u] >= 0)
                    continue;
                int s = static_cast<int>(std::count(d[u].begin(), d[u].end(), 1));
                if (s < best_size) {
                    best = u;
                    best_size = s;
                }
            }
            for (int a = 0; a < m_; ++a) {
                if (!d[best][a])
                    continue;
                Domains next = d;
                std::fill(next[best].begin(), next[best].end(), 0);
                next[best][a] = 1;
                bool wipe = false;
                for (int v = 0; v < n_ && !wipe; ++v) {
                    if (!gadj_[best][v])
                        continue;
                    for (int b = 0; b < m_; ++b)
                        if (!hadj_[a][b])
                            next[v][b] = 0;
                    wipe = std::find(next[v].begin(), next[v].end(), 1) == next[v].end();
                }
                if (wipe || !arc_consistent(next))
                    continue;
                map_[best] = a;
                if (solve(next, assigned + 1))
                    return true;
                map_[best] = -1;
            }
            return false;
        }

        int n_, m_;
        std::vector<std::vector<char>> gadj_, hadj_;
        Domains dom_;
        std::vector<int> map_;
    };

} // namespace detail

inline auto has_homomorphism(const TargetGraph & g, const TargetGraph & h) -> std::optional<std::vector<int>>
{
    if (static_cast<long>(g.size()) * h.size() > kHomomorphismCap)
        throw CapExceeded("homomorphism search cap |V(G)|*|V(H)| <= 10^4 exceeded");
    auto r = detail::HomSearch(g, h).run();
    if (r && !is_homomorphism(g, h, *r))
        throw std::logic_error("homomorphism search returned an invalid map");
    return r;
}

} // namespace lcl
