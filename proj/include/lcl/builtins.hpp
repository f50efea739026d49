#pragma once

#include "lcl/core.hpp"
#include "lcl/homlcl.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

struct BuiltinParams
{
    int k = -1;                        // palette size for the coloring problems
    std::optional<TargetGraph> target; // for homomorphism
};

inline auto builtin_names() -> std::vector<std::string>
{
    return {"proper_coloring", "perfect_matching", "edge_grabbing", "pm_power2", "homomorphism", "edge_coloring"};
}

namespace pm2 {

    // Label id = own * 2 + relay, own in {0,1,2}, relay in {0,1}.
    inline constexpr int kLabels = 6;
    inline auto own(Label a) -> int { return a / 2; }
    inline auto relay(Label a) -> int { return a % 2; }
    inline auto make(int own, int relay) -> Label { return own * 2 + relay; }

    inline auto vertex_ok(const Config & c) -> bool
    {
        int owned = 0, relays = 0;
        for (auto a : c) {
            owned += own(a) != 0;
            relays += relay(a);
        }
        return owned == 1 && relays % 2 == 0;
    }

    inline auto edge_ok(Label a, Label b) -> bool
    {
        return (own(a) == 1) == (own(b) == 1) && (own(a) == 2) == (relay(b) == 1) &&
            (own(b) == 2) == (relay(a) == 1);
    }

} // namespace pm2

inline auto make_pm_power2(int delta) -> LclProblem
{
    std::vector<std::string> alphabet;
    for (int o = 0; o < 3; ++o)
        for (int r = 0; r < 2; ++r)
            alphabet.push_back(std::to_string(o) + std::to_string(r));
    std::vector<Config> vs;
    for (auto & c : multisets(pm2::kLabels, delta))
        if (pm2::vertex_ok(c))
            vs.push_back(c);
    std::vector<std::pair<Label, Label>> es;
    for (Label a = 0; a < pm2::kLabels; ++a)
        for (Label b = a; b < pm2::kLabels; ++b)
            if (pm2::edge_ok(a, b))
                es.emplace_back(a, b);
    return LclProblem(delta, alphabet, vs, {es}, false);
}

inline auto make_builtin(const std::string & name, int delta, const BuiltinParams & params = {}) -> LclProblem
{
    if (delta < 2)
        throw std::invalid_argument("delta must be at least 2");
    auto palette = [&](int k) {
        std::vector<std::string> a;
        for (int i = 1; i <= k; ++i)
            a.push_back(std::to_string(i));
        return a;
    };
    if (name == "proper_coloring") {
        if (params.k < 1)
            throw std::invalid_argument("proper_coloring needs k >= 1");
        std::vector<Config> vs;
        std::vector<std::pair<Label, Label>> es;
        for (int a = 0; a < params.k; ++a) {
            vs.push_back(Config(delta, a));
            for (int b = a + 1; b < params.k; ++b)
                es.emplace_back(a, b);
        }
        return LclProblem(delta, palette(params.k), vs, {es}, false);
    }
    if (name == "perfect_matching") {
        Config c(delta, 1);
        c[0] = 0;
        return LclProblem(delta, {"M", "U"}, {c}, {{{0, 0}, {1, 1}}}, false);
    }
    if (name == "edge_grabbing") {
        Config c(delta, 1);
        c[0] = 0;
        return LclProblem(delta, {"g", "n"}, {c}, {{{0, 1}, {1, 1}}}, false);
    }
    if (name == "pm_power2")
        return make_pm_power2(delta);
    if (name == "edge_coloring") {
        if (params.k < 1)
            throw std::invalid_argument("edge_coloring needs k >= 1");
        std::vector<Config> vs;
        for (auto & c : multisets(params.k, delta))
            if (std::adjacent_find(c.begin(), c.end()) == c.end())
                vs.push_back(c);
        std::vector<std::pair<Label, Label>> es;
        for (int a = 0; a < params.k; ++a)
            es.emplace_back(a, a);
        return LclProblem(delta, palette(params.k), vs, {es}, false);
    }
    if (name == "homomorphism") {
        if (!params.target)
            throw std::invalid_argument("homomorphism needs a target graph");
        return make_homomorphism_problem(*params.target, delta);
    }
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

inline constexpr int kEscape = -2;

// Partner of every vertex under the distance-2 pairing encoded by a pm_power2
// labeling: a vertex index, or kEscape when the match leaves through a virtual
// port. Relay ports of a vertex are paired in ascending port order. Returns
// nullopt when the labeling does not describe a consistent pairing.
inline auto decode_pm_power2(const PortGraph & g, const HalfEdgeLabeling & lab) -> std::optional<std::vector<int>>
{
    int n = g.size(), d = g.delta();
    std::vector<int> partner(n, -1);
    for (int v = 0; v < n; ++v) {
        int port = -1;
        for (int p = 0; p < d; ++p)
            if (pm2::own(lab.at(v, p)) != 0) {
                if (port >= 0)
                    return std::nullopt;
                port = p;
            }
        if (port < 0)
            return std::nullopt;
        const auto & pt = g.port(v, port);
        if (pt.to == kVirtual) {
            partner[v] = kEscape;
            continue;
        }
        if (pm2::own(lab.at(v, port)) == 1) {
            partner[v] = pt.to;
            continue;
        }
        int w = pt.to;
        std::vector<int> relays;
        for (int q = 0; q < d; ++q)
            if (pm2::relay(lab.at(w, q)))
                relays.push_back(q);
        auto it = std::find(relays.begin(), relays.end(), pt.to_port);
        if (it == relays.end() || relays.size() % 2 != 0)
            return std::nullopt;
        auto pos = it - relays.begin();
        int mate = relays[pos ^ 1];
        const auto & out = g.port(w, mate);
        partner[v] = out.to == kVirtual ? kEscape : out.to;
    }
    for (int v = 0; v < n; ++v)
        if (partner[v] >= 0 && partner[partner[v]] != v)
            return std::nullopt;
    return partner;
}

// Encodes a pairing of vertices at distance <= 2 (partner[v] = u, u != v).
// partner[v] = kEscape matches v across its first virtual port.
inline auto encode_pm_power2(const PortGraph & g, const std::vector<int> & partner) -> HalfEdgeLabeling
{
    int n = g.size(), d = g.delta();
    HalfEdgeLabeling lab(n, d, pm2::make(0, 0));
    auto port_to = [&](int v, int u) {
        for (int p = 0; p < d; ++p)
            if (g.port(v, p).to == u)
                return p;
        return -1;
    };
    for (int v = 0; v < n; ++v) {
        int u = partner.at(v);
        if (u == kEscape) {
            int p = g.free_port(v);
            if (p < 0)
                throw std::invalid_argument("escaping vertex has no virtual port");
            lab.set(v, p, pm2::make(1, 0));
            continue;
        }
        if (u < 0 || u == v || partner.at(u) != v)
            throw std::invalid_argument("partner array is not a fixed-point-free involution");
        if (u < v)
            continue;
        int p = port_to(v, u);
        if (p >= 0) {
            lab.set(v, p, pm2::make(1, 0));
            lab.set(u, port_to(u, v), pm2::make(1, 0));
            continue;
        }
        bool done = false;
        for (int q = 0; q < d && !done; ++q) {
            int w = g.port(v, q).to;
            if (w == kVirtual)
                continue;
            int pw = port_to(w, u);
            if (pw < 0)
                continue;
            lab.set(v, q, pm2::make(2, pm2::relay(lab.at(v, q))));
            int pu = port_to(u, w);
            lab.set(u, pu, pm2::make(2, pm2::relay(lab.at(u, pu))));
            int wv = g.port(v, q).to_port;
            lab.set(w, wv, pm2::make(pm2::own(lab.at(w, wv)), 1));
            lab.set(w, pw, pm2::make(pm2::own(lab.at(w, pw)), 1));
            done = true;
        }
        if (!done)
            throw std::invalid_argument("partners are farther than distance 2");
    }
    return lab;
}

} // namespace lcl
