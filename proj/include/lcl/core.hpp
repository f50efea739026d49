#pragma once

#include "lcl/util.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lcl {

using Label = int;
using Config = std::vector<Label>; // canonical form: sorted ascending

inline auto canonical(Config c) -> Config
{
    std::sort(c.begin(), c.end());
    return c;
}

inline auto canonical_pair(Label a, Label b) -> std::pair<Label, Label>
{
    return a <= b ? std::pair{a, b} : std::pair{b, a};
}

// An LCL (Sigma, V, E). Uncolored problems keep a single edge set; edge-colored
// problems keep one set per color 0..delta-1.
class LclProblem
{
public:
    LclProblem() = default;

    LclProblem(int delta, std::vector<std::string> alphabet, std::vector<Config> vertex_configs,
        std::vector<std::vector<std::pair<Label, Label>>> edge_sets, bool edge_colored) :
        delta_(delta), alphabet_(std::move(alphabet)), edge_colored_(edge_colored)
    {
        if (delta_ < 2)
            throw std::invalid_argument("delta must be at least 2");
        std::set<std::string> names(alphabet_.begin(), alphabet_.end());
        if (names.size() != alphabet_.size())
            throw std::invalid_argument("duplicate label names in alphabet");
        if (edge_colored_ && static_cast<int>(edge_sets.size()) != delta_)
            throw std::invalid_argument("edge-colored problem needs exactly delta edge sets");
        if (!edge_colored_ && edge_sets.size() != 1)
            throw std::invalid_argument("uncolored problem needs exactly one edge set");

        std::set<Config> vs;
        for (auto & c : vertex_configs) {
            if (static_cast<int>(c.size()) != delta_)
                throw std::invalid_argument("vertex configuration of wrong arity");
            for (auto a : c)
                check_label(a);
            vs.insert(canonical(c));
        }
        vertex_configs_.assign(vs.begin(), vs.end());

        int k = label_count();
        edge_table_.assign(edge_sets.size(), std::vector<char>(static_cast<std::size_t>(k) * k, 0));
        edge_configs_.resize(edge_sets.size());
        for (std::size_t col = 0; col < edge_sets.size(); ++col) {
            std::set<std::pair<Label, Label>> es;
            for (auto [a, b] : edge_sets[col]) {
                check_label(a);
                check_label(b);
                es.insert(canonical_pair(a, b));
                edge_table_[col][a * k + b] = 1;
                edge_table_[col][b * k + a] = 1;
            }
            edge_configs_[col].assign(es.begin(), es.end());
        }
    }

    auto delta() const -> int { return delta_; }
    auto label_count() const -> int { return static_cast<int>(alphabet_.size()); }
    auto alphabet() const -> const std::vector<std::string> & { return alphabet_; }
    auto name(Label a) const -> const std::string & { return alphabet_.at(a); }
    auto vertex_configs() const -> const std::vector<Config> & { return vertex_configs_; }
    auto edge_colored() const -> bool { return edge_colored_; }
    auto edge_color_count() const -> int { return static_cast<int>(edge_configs_.size()); }

    // Edge set for color `col`; uncolored problems ignore the color.
    auto edge_configs(int col = 0) const -> const std::vector<std::pair<Label, Label>> &
    {
        return edge_configs_.at(edge_colored_ ? col : 0);
    }

    auto label_id(const std::string & n) const -> Label
    {
        for (int i = 0; i < label_count(); ++i)
            if (alphabet_[i] == n)
                return i;
        throw std::invalid_argument("unknown label name '" + n + "'");
    }

    auto has_vertex_config(const Config & sorted) const -> bool
    {
        return std::binary_search(vertex_configs_.begin(), vertex_configs_.end(), sorted);
    }

    auto edge_allowed(Label a, Label b, int col = 0) const -> bool
    {
        const auto & t = edge_table_.at(edge_colored_ ? col : 0);
        return t[a * label_count() + b] != 0;
    }

    auto check_label(Label a) const -> void
    {
        if (a < 0 || a >= label_count())
            throw std::invalid_argument("label id " + std::to_string(a) + " out of range");
    }

    friend auto operator==(const LclProblem & x, const LclProblem & y) -> bool
    {
        return x.delta_ == y.delta_ && x.alphabet_ == y.alphabet_ && x.vertex_configs_ == y.vertex_configs_ &&
            x.edge_colored_ == y.edge_colored_ && x.edge_configs_ == y.edge_configs_;
    }

private:
    int delta_ = 0;
    std::vector<std::string> alphabet_;
    std::vector<Config> vertex_configs_;
    bool edge_colored_ = false;
    std::vector<std::vector<std::pair<Label, Label>>> edge_configs_;
    std::vector<std::vector<char>> edge_table_;
};

// Simple undirected graph used as homomorphism target and in the small exact
// solvers.
struct TargetGraph
{
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> edges;

    auto size() const -> int { return static_cast<int>(names.size()); }

    auto adjacency() const -> std::vector<std::vector<char>>
    {
        std::vector<std::vector<char>> adj(size(), std::vector<char>(size(), 0));
        for (auto [u, v] : edges) {
            adj[u][v] = 1;
            adj[v][u] = 1;
        }
        return adj;
    }

    static auto unnamed(int n, std::vector<std::pair<int, int>> edges) -> TargetGraph
    {
        TargetGraph g;
        for (int i = 0; i < n; ++i)
            g.names.push_back(std::to_string(i));
        g.edges = std::move(edges);
        g.validate();
        return g;
    }

    auto validate() const -> void
    {
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= size() || v >= size())
                throw std::invalid_argument("target graph edge out of range");
            if (u == v)
                throw std::invalid_argument("target graph must not have self-loops");
            if (!seen.insert(canonical_pair(u, v)).second)
                throw std::invalid_argument("target graph has a repeated edge");
        }
    }
};

inline auto complete_graph(int k) -> TargetGraph
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            e.emplace_back(i, j);
    return TargetGraph::unnamed(k, e);
}

inline auto cycle_graph(int k) -> TargetGraph
{
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < k; ++i)
        e.emplace_back(i, (i + 1) % k);
    return TargetGraph::unnamed(k, e);
}

inline constexpr int kVirtual = -1;

struct Port
{
    int to = kVirtual;   // neighbor vertex, or kVirtual
    int to_port = -1;    // port index at the neighbor
    int edge = -1;       // index into PortGraph::edges
};

struct PortEdge
{
    int u, pu, v, pv;
};

// Every vertex has exactly delta ports; unused ports are virtual half-edges.
// Self-loops occupy two ports of the same vertex, parallel edges are allowed.
class PortGraph
{
public:
    PortGraph() = default;
    PortGraph(int n, int delta) : n_(n), delta_(delta), ports_(static_cast<std::size_t>(n) * delta)
    {
        if (delta < 1)
            throw std::invalid_argument("delta must be positive");
        if (n < 0)
            throw std::invalid_argument("negative vertex count");
    }

    auto size() const -> int { return n_; }
    auto delta() const -> int { return delta_; }
    auto port(int v, int p) const -> const Port & { return ports_[static_cast<std::size_t>(v) * delta_ + p]; }
    auto edges() const -> const std::vector<PortEdge> & { return edges_; }
    auto edge_count() const -> int { return static_cast<int>(edges_.size()); }
    auto has_colors() const -> bool { return !colors_.empty(); }
    auto colors() const -> const std::vector<int> & { return colors_; }
    auto color(int e) const -> int { return colors_.empty() ? -1 : colors_[e]; }

    auto degree(int v) const -> int
    {
        int d = 0;
        for (int p = 0; p < delta_; ++p)
            d += port(v, p).to != kVirtual;
        return d;
    }

    auto free_port(int v) const -> int
    {
        for (int p = 0; p < delta_; ++p)
            if (port(v, p).to == kVirtual)
                return p;
        return -1;
    }

    // Adds an edge on explicit ports (or the lowest free ports when given -1).
    auto add_edge(int u, int v, int pu = -1, int pv = -1) -> int
    {
        check_vertex(u);
        check_vertex(v);
        if (pu < 0)
            pu = free_port(u);
        if (pu < 0)
            throw std::invalid_argument("vertex " + std::to_string(u) + " has no free port");
        if (pv < 0) {
            pv = -1;
            for (int p = 0; p < delta_; ++p)
                if (port(v, p).to == kVirtual && !(u == v && p == pu)) {
                    pv = p;
                    break;
                }
            if (pv < 0)
                throw std::invalid_argument("vertex " + std::to_string(v) + " has no free port");
        }
        if (pu >= delta_ || pv >= delta_)
            throw std::invalid_argument("port index out of range");
        if (port(u, pu).to != kVirtual || port(v, pv).to != kVirtual || (u == v && pu == pv))
            throw std::invalid_argument("port already in use");
        int e = edge_count();
        mut(u, pu) = Port{v, pv, e};
        mut(v, pv) = Port{u, pu, e};
        edges_.push_back(PortEdge{u, pu, v, pv});
        return e;
    }

    auto set_colors(std::vector<int> colors) -> void
    {
        if (!colors.empty() && static_cast<int>(colors.size()) != edge_count())
            throw std::invalid_argument("edge color array does not cover every edge");
        colors_ = std::move(colors);
    }

    auto neighbors(int v) const -> std::vector<int>
    {
        std::vector<int> r;
        for (int p = 0; p < delta_; ++p)
            if (port(v, p).to != kVirtual)
                r.push_back(port(v, p).to);
        return r;
    }

private:
    auto mut(int v, int p) -> Port & { return ports_[static_cast<std::size_t>(v) * delta_ + p]; }
    auto check_vertex(int v) const -> void
    {
        if (v < 0 || v >= n_)
            throw std::invalid_argument("vertex index out of range");
    }

    int n_ = 0;
    int delta_ = 0;
    std::vector<Port> ports_;
    std::vector<PortEdge> edges_;
    std::vector<int> colors_;
};

// A finite tree with virtual half-edges is a PortGraph whose real edges form a
// tree; see is_tree / check_tree.
using RegularTree = PortGraph;

struct MultiGraph
{
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> colors; // empty or one per edge

    auto validate() const -> void
    {
        for (auto [u, v] : edges)
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::invalid_argument("multigraph edge out of range");
        if (!colors.empty() && colors.size() != edges.size())
            throw std::invalid_argument("color array does not cover every edge");
    }

    auto max_degree() const -> int
    {
        std::vector<int> d(n, 0);
        for (auto [u, v] : edges) {
            ++d[u];
            ++d[v];
        }
        return n == 0 ? 0 : *std::max_element(d.begin(), d.end());
    }

    // Ports are assigned in edge-list order unless the coloring is proper with
    // colors below delta, in which case port index = color.
    auto to_port_graph(int delta = -1) const -> PortGraph
    {
        validate();
        if (delta < 0)
            delta = std::max(1, max_degree());
        bool by_color = !colors.empty();
        if (by_color) {
            std::vector<std::vector<char>> used(n, std::vector<char>(delta, 0));
            for (std::size_t i = 0; i < edges.size() && by_color; ++i) {
                auto [u, v] = edges[i];
                int c = colors[i];
                if (c < 0 || c >= delta || u == v || used[u][c] || used[v][c])
                    by_color = false;
                else
                    used[u][c] = used[v][c] = 1;
            }
        }
        PortGraph g(n, delta);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            if (by_color)
                g.add_edge(u, v, colors[i], colors[i]);
            else
                g.add_edge(u, v);
        }
        g.set_colors(colors);
        return g;
    }
};

inline auto to_multigraph(const PortGraph & g) -> MultiGraph
{
    MultiGraph m;
    m.n = g.size();
    for (auto & e : g.edges())
        m.edges.emplace_back(e.u, e.v);
    m.colors = g.colors();
    return m;
}

class HalfEdgeLabeling
{
public:
    HalfEdgeLabeling() = default;
    HalfEdgeLabeling(int n, int delta, Label fill = -1) :
        n_(n), delta_(delta), labels_(static_cast<std::size_t>(n) * delta, fill)
    {
    }

    auto size() const -> int { return n_; }
    auto delta() const -> int { return delta_; }
    auto at(int v, int p) const -> Label { return labels_[static_cast<std::size_t>(v) * delta_ + p]; }
    auto set(int v, int p, Label a) -> void { labels_[static_cast<std::size_t>(v) * delta_ + p] = a; }

    auto vertex(int v) const -> std::vector<Label>
    {
        auto b = labels_.begin() + static_cast<std::ptrdiff_t>(v) * delta_;
        return {b, b + delta_};
    }

    auto set_vertex(int v, const std::vector<Label> & ls) -> void
    {
        if (static_cast<int>(ls.size()) != delta_)
            throw std::invalid_argument("labeling arity mismatch");
        for (int p = 0; p < delta_; ++p)
            set(v, p, ls[p]);
    }

    auto total() const -> bool
    {
        return std::none_of(labels_.begin(), labels_.end(), [](Label a) { return a < 0; });
    }

    friend auto operator==(const HalfEdgeLabeling &, const HalfEdgeLabeling &) -> bool = default;

private:
    int n_ = 0;
    int delta_ = 0;
    std::vector<Label> labels_;
};

struct ValidityReport
{
    bool ok = true;
    std::vector<int> vertex_violations;
    std::vector<int> edge_violations; // indices into the instance's edge list
};

inline auto validate_labeling(const LclProblem & problem, const PortGraph & g, const HalfEdgeLabeling & lab)
    -> ValidityReport
{
    if (problem.delta() != g.delta() || lab.delta() != g.delta() || lab.size() != g.size())
        throw std::invalid_argument("arity mismatch between problem, instance and labeling");
    if (problem.edge_colored() && !g.has_colors() && g.edge_count() > 0)
        throw std::invalid_argument("edge-colored problem needs an edge-colored instance");
    ValidityReport r;
    for (int v = 0; v < g.size(); ++v) {
        auto c = lab.vertex(v);
        for (auto a : c) {
            if (a < 0)
                throw std::invalid_argument("labeling is not total");
            problem.check_label(a);
        }
        if (!problem.has_vertex_config(canonical(c)))
            r.vertex_violations.push_back(v);
    }
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto & pe = g.edges()[e];
        int col = g.color(e);
        if (problem.edge_colored() && (col < 0 || col >= problem.edge_color_count()))
            throw std::invalid_argument("edge color out of range for problem");
        if (!problem.edge_allowed(lab.at(pe.u, pe.pu), lab.at(pe.v, pe.pv), col))
            r.edge_violations.push_back(e);
    }
    r.ok = r.vertex_violations.empty() && r.edge_violations.empty();
    return r;
}

inline auto validate_labeling(const LclProblem & problem, const MultiGraph & g, const HalfEdgeLabeling & lab)
    -> ValidityReport
{
    return validate_labeling(problem, g.to_port_graph(problem.delta()), lab);
}

// All multisets of size k over labels [0, m), in lexicographic order.
inline auto multisets(int m, int k) -> std::vector<Config>
{
    std::vector<Config> out;
    Config cur;
    std::function<void(int)> rec = [&](int from) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int a = from; a < m; ++a) {
            cur.push_back(a);
            rec(a);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// The transform adjoining a "line" label (Pi-bar).
inline auto add_paths(const LclProblem & p) -> LclProblem
{
    if (p.edge_colored())
        throw std::invalid_argument("add_paths expects an uncolored problem");
    auto alphabet = p.alphabet();
    std::string line = "line";
    while (std::find(alphabet.begin(), alphabet.end(), line) != alphabet.end())
        line += "_";
    alphabet.push_back(line);
    Label l = p.label_count();
    auto vcs = p.vertex_configs();
    for (auto & rest : multisets(p.label_count(), p.delta() - 2)) {
        Config c = rest;
        c.push_back(l);
        c.push_back(l);
        vcs.push_back(canonical(c));
    }
    auto es = p.edge_configs();
    es.emplace_back(l, l);
    return LclProblem(p.delta(), alphabet, vcs, {es}, false);
}

inline auto is_connected(const PortGraph & g) -> bool
{
    if (g.size() == 0)
        return true;
    std::vector<char> seen(g.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(v))
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == g.size();
}

inline auto is_tree(const PortGraph & g) -> bool
{
    return g.size() >= 1 && g.edge_count() == g.size() - 1 && is_connected(g);
}

inline auto edge_coloring_proper(const PortGraph & g) -> bool
{
    if (!g.has_colors())
        return false;
    for (int v = 0; v < g.size(); ++v) {
        std::set<int> seen;
        for (int p = 0; p < g.delta(); ++p) {
            const auto & pt = g.port(v, p);
            if (pt.to == kVirtual)
                continue;
            if (!seen.insert(g.color(pt.edge)).second)
                return false;
        }
    }
    return true;
}

inline auto check_tree(const PortGraph & g) -> void
{
    if (!is_tree(g))
        throw std::invalid_argument("instance is not a tree");
    if (g.has_colors() && !edge_coloring_proper(g))
        throw std::invalid_argument("tree edge coloring is not proper");
}

struct TreeKind
{
    enum class Shape { complete, random, path } shape = Shape::random;
    int size = 1; // depth for complete, vertex count otherwise

    static auto complete(int depth) -> TreeKind { return {Shape::complete, depth}; }
    static auto random(int n) -> TreeKind { return {Shape::random, n}; }
    static auto path(int n) -> TreeKind { return {Shape::path, n}; }
};

// Builds a tree from a parent array (parent[0] = -1, parent[i] < i), coloring
// edges greedily from the root and using port index = edge color.
inline auto tree_from_parents(const std::vector<int> & parent, int delta) -> RegularTree
{
    int n = static_cast<int>(parent.size());
    std::vector<std::vector<int>> children(n);
    for (int v = 1; v < n; ++v)
        children[parent[v]].push_back(v);
    std::vector<int> up_color(n, -1);
    std::vector<std::tuple<int, int, int>> es; // (parent, child, color)
    for (int v = 0; v < n; ++v) {
        int next = 0;
        for (int c : children[v]) {
            if (next == up_color[v])
                ++next;
            if (next >= delta)
                throw std::invalid_argument("vertex degree exceeds delta");
            up_color[c] = next;
            es.emplace_back(v, c, next);
            ++next;
        }
    }
    PortGraph g(n, delta);
    std::vector<int> colors;
    for (auto [u, v, c] : es) {
        g.add_edge(u, v, c, c);
        colors.push_back(c);
    }
    g.set_colors(colors);
    return g;
}

inline auto gen_tree(TreeKind kind, int delta, std::uint64_t seed) -> RegularTree
{
    if (delta < 2)
        throw std::invalid_argument("delta must be at least 2");
    std::vector<int> parent{-1};
    switch (kind.shape) {
    case TreeKind::Shape::complete: {
        if (kind.size < 0)
            throw std::invalid_argument("depth must be non-negative");
        std::vector<int> frontier{0};
        for (int d = 0; d < kind.size; ++d) {
            std::vector<int> next;
            for (int v : frontier) {
                int kids = v == 0 ? delta : delta - 1;
                for (int j = 0; j < kids; ++j) {
                    next.push_back(static_cast<int>(parent.size()));
                    parent.push_back(v);
                }
            }
            frontier = std::move(next);
        }
        break;
    }
    case TreeKind::Shape::path:
        if (kind.size < 1)
            throw std::invalid_argument("path needs at least one vertex");
        for (int v = 1; v < kind.size; ++v)
            parent.push_back(v - 1);
        break;
    case TreeKind::Shape::random: {
        if (kind.size < 1)
            throw std::invalid_argument("tree needs at least one vertex");
        Rng rng(seed);
        std::vector<int> open{0};
        std::vector<int> deg(kind.size, 0);
        for (int v = 1; v < kind.size; ++v) {
            auto idx = rng.uniform_below(open.size());
            int p = open[idx];
            parent.push_back(p);
            if (++deg[p] == delta) {
                open[idx] = open.back();
                open.pop_back();
            }
            ++deg[v];
            if (deg[v] < delta)
                open.push_back(v);
        }
        break;
    }
    }
    return tree_from_parents(parent, delta);
}

// Union of d independent uniform random perfect matchings on [n]; edge colors
// record which matching an edge came from.
inline auto gen_config_model(int n, int d, std::uint64_t seed) -> MultiGraph
{
    if (n % 2 != 0 || n <= 0)
        throw std::invalid_argument("configuration model needs a positive even n");
    if (d < 1)
        throw std::invalid_argument("degree must be positive");
    Rng rng(seed);
    MultiGraph g;
    g.n = n;
    std::vector<int> perm(n);
    for (int m = 0; m < d; ++m) {
        for (int i = 0; i < n; ++i)
            perm[i] = i;
        rng.shuffle(perm);
        for (int i = 0; i < n; i += 2) {
            g.edges.emplace_back(perm[i], perm[i + 1]);
            g.colors.push_back(m);
        }
    }
    return g;
}

inline constexpr int kInfiniteGirth = std::numeric_limits<int>::max();

// Shortest cycle length through any vertex; self-loops count 1, parallel
// edges 2. Stops early once no cycle shorter than `below` can be found.
inline auto girth(int n, const std::vector<std::pair<int, int>> & edges, int below = kInfiniteGirth) -> int
{
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    std::set<std::pair<int, int>> seen;
    int best = below;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [u, v] = edges[i];
        if (u == v)
            return 1;
        if (!seen.insert(canonical_pair(u, v)).second)
            best = std::min(best, 2);
        adj[u].emplace_back(v, static_cast<int>(i));
        adj[v].emplace_back(u, static_cast<int>(i));
    }
    if (best <= 2)
        return best;
    std::vector<int> dist(n, -1), via(n, -1);
    std::vector<int> touched;
    for (int s = 0; s < n; ++s) {
        for (int x : touched)
            dist[x] = -1;
        touched.clear();
        std::queue<int> q;
        dist[s] = 0;
        touched.push_back(s);
        q.push(s);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            if (2 * dist[x] + 1 >= best)
                break;
            for (auto [y, e] : adj[x]) {
                if (e == via[x] && x != s)
                    continue;
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    via[y] = e;
                    touched.push_back(y);
                    q.push(y);
                } else {
                    best = std::min(best, dist[x] + dist[y] + 1);
                }
            }
        }
    }
    return best;
}

inline auto girth(const MultiGraph & g) -> int { return girth(g.n, g.edges); }

inline auto girth(const PortGraph & g) -> int
{
    std::vector<std::pair<int, int>> es;
    for (auto & e : g.edges())
        es.emplace_back(e.u, e.v);
    return girth(g.size(), es);
}

// Removes cycles shorter than `target` by double-edge switches {x,y},{a,b} ->
// {x,a},{y,b} between edges of the same color, so per-color degrees are kept.
// A switch is taken only when neither new edge closes a cycle shorter than
// `target`. Returns true once the girth reaches `target`.
inline auto repair_short_cycles(MultiGraph & g, int target, Rng & rng, long max_switches) -> bool
{
    int n = g.n;
    int m = static_cast<int>(g.edges.size());
    if (m == 0)
        return true;
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int e = 0; e < m; ++e) {
        auto [u, v] = g.edges[e];
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
    }
    std::map<int, std::vector<int>> by_color;
    for (int e = 0; e < m; ++e)
        by_color[g.colors.empty() ? 0 : g.colors[e]].push_back(e);
    auto detach = [&](int e) {
        for (int w : {g.edges[e].first, g.edges[e].second}) {
            auto & l = adj[w];
            for (std::size_t i = 0; i < l.size(); ++i)
                if (l[i].second == e) {
                    l[i] = l.back();
                    l.pop_back();
                    break;
                }
        }
    };
    auto attach = [&](int e, int u, int v) {
        g.edges[e] = {u, v};
        adj[u].emplace_back(v, e);
        adj[v].emplace_back(u, e);
    };
    std::vector<int> dist(n, -1), via(n, -1), touched;
    auto reset = [&] {
        for (int x : touched)
            dist[x] = -1;
        touched.clear();
    };
    // An edge on some cycle of length < target through s, or -1.
    auto short_cycle_edge = [&](int s) -> int {
        reset();
        std::queue<int> q;
        dist[s] = 0;
        via[s] = -1;
        touched.push_back(s);
        q.push(s);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            if (2 * dist[x] + 1 >= target)
                break;
            for (auto [y, e] : adj[x]) {
                if (e == via[x])
                    continue;
                if (y == x)
                    return e;
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    via[y] = e;
                    touched.push_back(y);
                    q.push(y);
                } else if (dist[x] + dist[y] + 1 < target)
                    return e;
            }
        }
        return -1;
    };
    // Is the distance between u and v at least `need` (bounded BFS)?
    auto far_apart = [&](int u, int v, int need) -> bool {
        if (u == v)
            return false;
        reset();
        std::queue<int> q;
        dist[u] = 0;
        touched.push_back(u);
        q.push(u);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            if (dist[x] + 1 >= need)
                break;
            for (auto [y, e] : adj[x]) {
                (void)e;
                if (dist[y] >= 0)
                    continue;
                if (y == v)
                    return false;
                dist[y] = dist[x] + 1;
                touched.push_back(y);
                q.push(y);
            }
        }
        return true;
    };
    int cursor = 0;
    long switches = 0;
    int clean_run = 0; // consecutive vertices verified free of short cycles
    while (clean_run < n) {
        int e = short_cycle_edge(cursor);
        if (e < 0) {
            ++clean_run;
            cursor = (cursor + 1) % n;
            continue;
        }
        clean_run = 0;
        if (switches++ >= max_switches)
            return false;
        auto & pool = by_color[g.colors.empty() ? 0 : g.colors[e]];
        if (pool.size() < 2)
            return false;
        int f = pool[rng.uniform_below(pool.size())];
        if (f == e)
            continue;
        auto [x, y] = g.edges[e];
        auto [a, b] = g.edges[f];
        if (rng.uniform_below(2))
            std::swap(a, b);
        detach(e);
        detach(f);
        if (far_apart(x, a, target - 1) && far_apart(y, b, target - 1) && !(x == b && y == a)) {
            attach(e, x, a);
            if (far_apart(y, b, target - 1)) {
                attach(f, y, b);
                continue;
            }
            detach(e);
        }
        attach(e, x, y);
        attach(f, g.edges[f].first, g.edges[f].second);
    }
    return girth(g.n, g.edges, target) >= target;
}

// BFS distances from s (or -1 when unreachable).
inline auto bfs_distances(const PortGraph & g, int s) -> std::vector<int>
{
    std::vector<int> dist(g.size(), -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int p = 0; p < g.delta(); ++p) {
            int y = g.port(x, p).to;
            if (y != kVirtual && dist[y] < 0) {
                dist[y] = dist[x] + 1;
                q.push(y);
            }
        }
    }
    return dist;
}

inline auto eccentricities(const PortGraph & g, int threads = 1) -> std::vector<int>
{
    std::vector<int> ecc(g.size(), 0);
    parallel_for(g.size(), threads, [&](std::size_t v) {
        auto d = bfs_distances(g, static_cast<int>(v));
        ecc[v] = *std::max_element(d.begin(), d.end());
    });
    return ecc;
}

} // namespace lcl
