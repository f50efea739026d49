#pragma once

#include "lcl/core.hpp"
#include "lcl/ellfull.hpp"
#include "lcl/io.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

struct CompressPath
{
    int layer = 0;
    std::vector<int> vertices;
    int end_a = -1; // neighbor of vertices.front() outside the path
    int end_b = -1; // neighbor of vertices.back()
};

struct Decomposition
{
    std::vector<int> layer;        // 1-based layer index per vertex
    std::vector<char> compress;    // 1 for Compress layer, 0 for Rake layer
    std::vector<CompressPath> paths;
    int L = 0;                     // number of rake layers
    int ell_prime = 1;

    auto tag(int v) const -> std::string
    {
        return (compress[v] ? "C" : "R") + std::to_string(layer[v]);
    }
};

// Rake removes every vertex of degree <= 1 at once; Compress cuts maximal
// degree-2 chains of at least ell' vertices into segments of ell'..2ell'
// vertices separated by single vertices, which remain for later layers.
inline auto decompose(const PortGraph & tree, int ell_prime) -> Decomposition
{
    if (ell_prime < 1)
        throw std::invalid_argument("ell' must be at least 1");
    if (!is_connected(tree))
        throw std::invalid_argument("decompose expects a connected tree");
    int n = tree.size();
    Decomposition dec;
    dec.ell_prime = ell_prime;
    dec.layer.assign(n, 0);
    dec.compress.assign(n, 0);
    std::vector<char> alive(n, 1);
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v)
        deg[v] = tree.degree(v);
    int remaining = n;
    auto remove = [&](int v) {
        alive[v] = 0;
        --remaining;
        for (int w : tree.neighbors(v))
            if (alive[w])
                --deg[w];
    };
    for (int i = 1; remaining > 0; ++i) {
        std::vector<int> raked;
        for (int v = 0; v < n; ++v)
            if (alive[v] && deg[v] <= 1)
                raked.push_back(v);
        for (int v : raked)
            dec.layer[v] = i;
        for (int v : raked)
            remove(v);
        dec.L = i;
        if (remaining == 0)
            break;
        // chains of degree-2 vertices
        std::vector<char> visited(n, 0);
        std::vector<std::vector<int>> chains;
        for (int v = 0; v < n; ++v) {
            if (!alive[v] || deg[v] != 2 || visited[v])
                continue;
            // walk to one end of the chain
            int start = v, prev = -1;
            while (true) {
                int next = -1;
                for (int w : tree.neighbors(start))
                    if (alive[w] && w != prev && deg[w] == 2) {
                        next = w;
                        break;
                    }
                if (next < 0 || next == v)
                    break;
                prev = start;
                start = next;
            }
            std::vector<int> chain{start};
            visited[start] = 1;
            prev = -1;
            int cur = start;
            while (true) {
                int next = -1;
                for (int w : tree.neighbors(cur))
                    if (alive[w] && w != prev && deg[w] == 2 && !visited[w]) {
                        next = w;
                        break;
                    }
                if (next < 0)
                    break;
                visited[next] = 1;
                chain.push_back(next);
                prev = cur;
                cur = next;
            }
            chains.push_back(std::move(chain));
        }
        std::vector<int> compressed;
        for (auto & chain : chains) {
            int m = static_cast<int>(chain.size());
            if (m < ell_prime)
                continue;
            if (chain.back() < chain.front())
                std::reverse(chain.begin(), chain.end());
            int q = (m + 1 + 2 * ell_prime) / (2 * ell_prime + 1); // ceil((m+1)/(2l'+1))
            int seg_total = m - (q - 1);
            int base = seg_total / q, extra = seg_total % q;
            int pos = 0;
            for (int s = 0; s < q; ++s) {
                int len = base + (s < extra ? 1 : 0);
                if (len < ell_prime || len > 2 * ell_prime)
                    throw std::logic_error("compress segment outside [l', 2l']");
                CompressPath path;
                path.layer = i;
                path.vertices.assign(chain.begin() + pos, chain.begin() + pos + len);
                dec.paths.push_back(std::move(path));
                pos += len + 1; // skip the separator
            }
        }
        for (auto it = dec.paths.rbegin(); it != dec.paths.rend() && it->layer == i; ++it)
            for (int v : it->vertices) {
                dec.layer[v] = i;
                dec.compress[v] = 1;
                compressed.push_back(v);
            }
        for (int v : compressed)
            remove(v);
    }
    // attachment endpoints: the path's neighbors in later layers
    for (auto & path : dec.paths) {
        int rank = 2 * path.layer + 1;
        auto outside = [&](int v, int not_this) {
            for (int w : tree.neighbors(v))
                if (w != not_this && 2 * dec.layer[w] + (dec.compress[w] ? 1 : 0) > rank)
                    return w;
            return -1;
        };
        path.end_a = outside(path.vertices.front(), -1);
        path.end_b = outside(path.vertices.back(), path.vertices.size() == 1 ? path.end_a : -1);
    }
    return dec;
}

// Position of a layer in the order R1 < C1 < R2 < ... (higher = earlier labeled).
inline auto layer_rank(const Decomposition & dec, int v) -> int { return 2 * dec.layer[v] + (dec.compress[v] ? 1 : 0); }

// Throws std::logic_error describing the first violated invariant.
inline auto check_decomposition(const PortGraph & tree, const Decomposition & dec) -> void
{
    int n = tree.size();
    for (int v = 0; v < n; ++v) {
        if (dec.layer[v] < 1 || dec.layer[v] > dec.L)
            throw std::logic_error("vertex " + std::to_string(v) + " has no layer");
        int up = 0;
        for (int w : tree.neighbors(v))
            if (layer_rank(dec, w) >= layer_rank(dec, v))
                ++up;
        if (!dec.compress[v] && up > 1)
            throw std::logic_error("rake vertex " + std::to_string(v) + " has degree > 1 in its remaining graph");
        if (dec.compress[v] && up != 2)
            throw std::logic_error("compress vertex " + std::to_string(v) + " is not of degree 2");
    }
    std::vector<int> covered(n, 0);
    for (auto & path : dec.paths) {
        int s = static_cast<int>(path.vertices.size());
        if (s < dec.ell_prime || s > 2 * dec.ell_prime)
            throw std::logic_error("compress path length outside [l', 2l']");
        for (int v : path.vertices)
            if (++covered[v] > 1 || !dec.compress[v] || dec.layer[v] != path.layer)
                throw std::logic_error("compress paths overlap or disagree with layer tags");
        if (path.end_a < 0 || path.end_b < 0 || layer_rank(dec, path.end_a) <= layer_rank(dec, path.vertices[0]) ||
            layer_rank(dec, path.end_b) <= layer_rank(dec, path.vertices[0]))
            throw std::logic_error("compress path is not attached to later layers at both ends");
    }
    for (int v = 0; v < n; ++v)
        if (dec.compress[v] && covered[v] != 1)
            throw std::logic_error("compress vertex outside every path");
}

inline auto decomposition_to_json(const Decomposition & dec) -> json
{
    json j;
    j["L"] = dec.L;
    j["ell_prime"] = dec.ell_prime;
    j["layers"] = json::array();
    for (std::size_t v = 0; v < dec.layer.size(); ++v)
        j["layers"].push_back(dec.tag(static_cast<int>(v)));
    j["paths"] = json::array();
    for (auto & p : dec.paths)
        j["paths"].push_back({{"layer", p.layer}, {"vertices", p.vertices}, {"ends", {p.end_a, p.end_b}}});
    return j;
}

inline auto decomposition_dot(const PortGraph & tree, const Decomposition & dec) -> std::string
{
    std::ostringstream out;
    out << "graph D {\n";
    for (int v = 0; v < tree.size(); ++v)
        out << "  " << v << " [label=\"" << v << " " << dec.tag(v) << "\", shape="
            << (dec.compress[v] ? "box" : "ellipse") << "];\n";
    for (auto & e : tree.edges())
        out << "  " << e.u << " -- " << e.v << ";\n";
    out << "}\n";
    return out.str();
}

namespace detail {

    // Writes config c at v: `fixed` maps ports to labels that must go there, the
    // remaining labels fill the other ports in ascending order.
    inline auto place_config(HalfEdgeLabeling & lab, int v, Config c, const std::vector<std::pair<int, Label>> & fixed,
        int delta) -> void
    {
        std::vector<char> used(delta, 0);
        for (auto [port, a] : fixed) {
            auto it = std::find(c.begin(), c.end(), a);
            if (it == c.end())
                throw std::logic_error("place_config: label missing from configuration");
            c.erase(it);
            lab.set(v, port, a);
            used[port] = 1;
        }
        std::size_t next = 0;
        for (int q = 0; q < delta; ++q)
            if (!used[q])
                lab.set(v, q, c[next++]);
    }

    inline auto port_towards(const PortGraph & g, int v, int w) -> int
    {
        for (int q = 0; q < g.delta(); ++q)
            if (g.port(v, q).to == w)
                return q;
        return -1;
    }

} // namespace detail

inline auto solve_from_ell_full(const LclProblem & p, const EllFullCertificate & cert, const PortGraph & tree,
    const Decomposition & dec) -> HalfEdgeLabeling
{
    if (!cert.full)
        throw std::invalid_argument("certificate is not Full");
    int n = tree.size(), d = p.delta();
    auto subset = cert.subset;
    std::sort(subset.begin(), subset.end());
    HalfEdgeLabeling lab(n, d);
    std::vector<char> done(n, 0);

    auto rake = [&](int v) {
        int anchor = -1;
        for (int w : tree.neighbors(v))
            if (done[w]) {
                if (anchor >= 0 && anchor != w)
                    throw std::logic_error("rake vertex sees two labeled neighbors");
                anchor = w;
            }
        if (anchor < 0) {
            detail::place_config(lab, v, subset.front(), {}, d);
        }
        else {
            int pv = detail::port_towards(tree, v, anchor);
            Label x = lab.at(anchor, tree.port(v, pv).to_port);
            bool placed = false;
            for (auto & c : subset) {
                for (auto a : c)
                    if (p.edge_allowed(x, a)) {
                        detail::place_config(lab, v, c, {{pv, a}}, d);
                        placed = true;
                        break;
                    }
                if (placed)
                    break;
            }
            if (!placed)
                throw std::logic_error("rake extension failed: certificate is broken");
        }
        done[v] = 1;
    };

    PathAutomaton aut(p, subset);
    auto fill_path = [&](const CompressPath & path) {
        const auto & vs = path.vertices;
        int s = static_cast<int>(vs.size());
        int pa = detail::port_towards(tree, vs.front(), path.end_a);
        int pb = detail::port_towards(tree, vs.back(), path.end_b);
        Label x = lab.at(path.end_a, tree.port(vs.front(), pa).to_port);
        Label y = lab.at(path.end_b, tree.port(vs.back(), pb).to_port);
        int S = aut.size();
        std::vector<std::vector<int>> from(s, std::vector<int>(S, -2)); // predecessor state, -1 for start
        auto st = aut.starts(x);
        for (int j = 0; j < S; ++j)
            if (st[j])
                from[0][j] = -1;
        for (int i = 1; i < s; ++i)
            for (int j = 0; j < S; ++j)
                if (from[i - 1][j] != -2)
                    for (int t : aut.successors(j))
                        if (from[i][t] == -2)
                            from[i][t] = j;
        int last = -1;
        for (int j = 0; j < S && last < 0; ++j)
            if (from[s - 1][j] != -2 && aut.accepts(j, y))
                last = j;
        if (last < 0)
            throw std::logic_error("compress path has no completion: certificate is broken");
        std::vector<int> states(s);
        states[s - 1] = last;
        for (int i = s - 1; i > 0; --i)
            states[i - 1] = from[i][states[i]];
        for (int i = 0; i < s; ++i) {
            int v = vs[i];
            auto [c, in] = aut.state(states[i]);
            int prev_port = i == 0 ? pa : detail::port_towards(tree, v, vs[i - 1]);
            int next_port = i == s - 1 ? pb : detail::port_towards(tree, v, vs[i + 1]);
            Config rest = c;
            rest.erase(std::find(rest.begin(), rest.end(), in));
            Label out = -1;
            for (auto b : rest) {
                bool ok = i == s - 1 ? p.edge_allowed(b, y) : p.edge_allowed(b, aut.state(states[i + 1]).second);
                if (ok) {
                    out = b;
                    break;
                }
            }
            if (out < 0)
                throw std::logic_error("compress backtrack inconsistency");
            detail::place_config(lab, v, c, {{prev_port, in}, {next_port, out}}, d);
            done[v] = 1;
        }
    };

    std::vector<std::vector<int>> rake_layers(dec.L + 1);
    for (int v = 0; v < n; ++v)
        if (!dec.compress[v])
            rake_layers[dec.layer[v]].push_back(v);
    for (int i = dec.L; i >= 1; --i) {
        for (auto & path : dec.paths)
            if (path.layer == i)
                fill_path(path);
        for (int v : rake_layers[i])
            rake(v);
    }
    return lab;
}

inline auto solve_from_ell_full(const LclProblem & p, const EllFullCertificate & cert, const PortGraph & tree)
    -> HalfEdgeLabeling
{
    if (p.edge_colored())
        throw std::invalid_argument("the rake-and-compress solver expects an uncolored problem");
    auto dec = decompose(tree, std::max(1, cert.ell - 2));
    return solve_from_ell_full(p, cert, tree, dec);
}

} // namespace lcl
