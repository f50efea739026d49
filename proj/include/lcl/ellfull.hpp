#pragma once

#include "lcl/core.hpp"
#include "lcl/io.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

// States are (config, incoming label): the label the config places on the
// port facing the previous path vertex. (c,a) -> (c',a') iff c minus one copy
// of a contains some b with {b, a'} in E.
class PathAutomaton
{
public:
    PathAutomaton(const LclProblem & p, const std::vector<Config> & subset) : problem_(&p), subset_(subset)
    {
        std::set<Label> ls;
        for (auto & c : subset_)
            for (auto a : c) {
                ls.insert(a);
                if (states_.empty() || states_.back() != std::pair{static_cast<int>(&c - subset_.data()), a})
                    states_.emplace_back(static_cast<int>(&c - subset_.data()), a);
            }
        labels_.assign(ls.begin(), ls.end());
        int s = size();
        out_.assign(s, {});
        for (int i = 0; i < s; ++i) {
            auto rest = subset_[states_[i].first];
            rest.erase(std::find(rest.begin(), rest.end(), states_[i].second));
            for (int j = 0; j < s; ++j) {
                Label a2 = states_[j].second;
                for (auto b : rest)
                    if (p.edge_allowed(b, a2)) {
                        out_[i].push_back(j);
                        break;
                    }
            }
        }
    }

    auto size() const -> int { return static_cast<int>(states_.size()); }
    auto state(int i) const -> std::pair<const Config &, Label> { return {subset_[states_[i].first], states_[i].second}; }
    auto successors(int i) const -> const std::vector<int> & { return out_[i]; }
    // Labels that can face inward at an endpoint.
    auto endpoint_labels() const -> const std::vector<Label> & { return labels_; }

    // First middle vertex next to an endpoint whose inward label is a1.
    auto starts(Label a1) const -> std::vector<char>
    {
        std::vector<char> v(size(), 0);
        for (int i = 0; i < size(); ++i)
            v[i] = problem_->edge_allowed(a1, states_[i].second);
        return v;
    }

    // Last middle vertex can hand some b to an endpoint whose inward label is a2.
    auto accepts(int i, Label a2) const -> bool
    {
        auto rest = subset_[states_[i].first];
        rest.erase(std::find(rest.begin(), rest.end(), states_[i].second));
        for (auto b : rest)
            if (problem_->edge_allowed(b, a2))
                return true;
        return false;
    }

private:
    const LclProblem * problem_;
    std::vector<Config> subset_;
    std::vector<std::pair<int, Label>> states_;
    std::vector<Label> labels_;
    std::vector<std::vector<int>> out_;
};

struct EllFullCounterexample
{
    Config c1;
    Label a1;
    Config c2;
    Label a2;
    int k; // number of path vertices
};

struct EllFullCertificate
{
    std::vector<Config> subset;
    int ell = 2;
    bool full = false;
    std::optional<EllFullCounterexample> counterexample;
    std::optional<int> minimal_ell; // smallest l for which the subset is l-full, if any
    int preperiod = 0;              // of the sequence S * T^m, m = k - 3
    int period = 0;
};

inline constexpr int kEllFullIterationCap = 200000;

namespace detail {

    inline auto check_subset(const LclProblem & p, const std::vector<Config> & subset) -> std::vector<Config>
    {
        if (p.edge_colored())
            throw std::invalid_argument("l-fullness is defined for uncolored problems only");
        if (subset.empty())
            throw std::invalid_argument("l-full subset must be nonempty");
        std::set<Config> s;
        for (auto & c : subset) {
            auto cc = canonical(c);
            if (!p.has_vertex_config(cc))
                throw std::invalid_argument("subset contains a configuration outside V");
            s.insert(cc);
        }
        return {s.begin(), s.end()};
    }

    // Failure pattern of all path lengths: fails[k] for the explicit range plus
    // the periodic tail description.
    struct PathAnalysis
    {
        std::vector<char> fails; // index k, valid for 2 <= k < limit
        int limit = 0;           // fails beyond limit repeat with the period
        int preperiod = 0, period = 0;
        bool periodic_failure = false;
        std::vector<std::vector<std::pair<Label, Label>>> bad; // failing (a1, a2) per k
    };

    inline auto analyze_paths(const LclProblem & p, const std::vector<Config> & subset) -> PathAnalysis
    {
        PathAutomaton aut(p, subset);
        const auto & labels = aut.endpoint_labels();
        int s = aut.size();
        int L = static_cast<int>(labels.size());
        PathAnalysis res;
        // k = 2: the endpoints are adjacent
        std::vector<std::pair<Label, Label>> bad2;
        for (auto a1 : labels)
            for (auto a2 : labels)
                if (!p.edge_allowed(a1, a2))
                    bad2.emplace_back(a1, a2);
        // rows[i] = reachable middle states after m transitions from starts(labels[i])
        std::vector<std::vector<char>> rows(L);
        for (int i = 0; i < L; ++i)
            rows[i] = aut.starts(labels[i]);
        std::vector<std::vector<char>> acc(s, std::vector<char>(L, 0));
        for (int st = 0; st < s; ++st)
            for (int j = 0; j < L; ++j)
                acc[st][j] = aut.accepts(st, labels[j]);
        auto failing = [&](const std::vector<std::vector<char>> & r) {
            std::vector<std::pair<Label, Label>> out;
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j) {
                    bool ok = false;
                    for (int st = 0; st < s && !ok; ++st)
                        ok = r[i][st] && acc[st][j];
                    if (!ok)
                        out.emplace_back(labels[i], labels[j]);
                }
            return out;
        };
        std::map<std::vector<std::vector<char>>, int> seen;
        std::vector<std::vector<std::pair<Label, Label>>> bad_by_m;
        int m = 0;
        while (true) {
            auto it = seen.find(rows);
            if (it != seen.end()) {
                res.preperiod = it->second;
                res.period = m - it->second;
                break;
            }
            if (m >= kEllFullIterationCap)
                throw CapExceeded("reachability sequence did not cycle within the iteration cap");
            seen.emplace(rows, m);
            bad_by_m.push_back(failing(rows));
            std::vector<std::vector<char>> next(L, std::vector<char>(s, 0));
            for (int i = 0; i < L; ++i)
                for (int st = 0; st < s; ++st)
                    if (rows[i][st])
                        for (int t : aut.successors(st))
                            next[i][t] = 1;
            rows = std::move(next);
            ++m;
        }
        res.limit = 3 + m;
        res.fails.assign(res.limit, 0);
        res.bad.assign(res.limit, {});
        res.fails[2] = !bad2.empty();
        res.bad[2] = bad2;
        for (int i = 0; i < m; ++i) {
            res.fails[3 + i] = !bad_by_m[i].empty();
            res.bad[3 + i] = bad_by_m[i];
            if (i >= res.preperiod && res.fails[3 + i])
                res.periodic_failure = true;
        }
        return res;
    }

    // Whether length k fails, for any k >= 2.
    inline auto fails_at(const PathAnalysis & a, int k) -> bool
    {
        if (k < a.limit)
            return a.fails[k] != 0;
        int m = k - 3;
        int idx = a.preperiod + (m - a.preperiod) % a.period;
        return a.fails[3 + idx] != 0;
    }

    inline auto bad_at(const PathAnalysis & a, int k) -> const std::vector<std::pair<Label, Label>> &
    {
        if (k < a.limit)
            return a.bad[k];
        int m = k - 3;
        return a.bad[3 + a.preperiod + (m - a.preperiod) % a.period];
    }

    inline auto minimal_ell(const PathAnalysis & a) -> std::optional<int>
    {
        if (a.periodic_failure)
            return std::nullopt;
        int last = 1;
        for (int k = 2; k < a.limit; ++k)
            if (a.fails[k])
                last = k;
        return std::max(2, last + 1);
    }

} // namespace detail

inline auto is_ell_full(const LclProblem & p, const std::vector<Config> & subset_in, int ell) -> EllFullCertificate
{
    if (ell < 2)
        throw std::invalid_argument("ell must be at least 2");
    auto subset = detail::check_subset(p, subset_in);
    auto a = detail::analyze_paths(p, subset);
    EllFullCertificate cert;
    cert.subset = subset;
    cert.ell = ell;
    cert.preperiod = a.preperiod;
    cert.period = a.period;
    cert.minimal_ell = detail::minimal_ell(a);
    cert.full = cert.minimal_ell && *cert.minimal_ell <= ell;
    if (!cert.full) {
        // smallest failing length >= ell; the tail is periodic so one period past
        // the explicit range suffices
        for (int k = ell; k < std::max(ell, a.limit) + a.period + 1; ++k)
            if (detail::fails_at(a, k)) {
                auto [a1, a2] = detail::bad_at(a, k).front();
                auto holder = [&](Label x) {
                    for (auto & c : subset)
                        if (std::find(c.begin(), c.end(), x) != c.end())
                            return c;
                    throw std::logic_error("endpoint label not in subset");
                };
                cert.counterexample = EllFullCounterexample{holder(a1), a1, holder(a2), a2, k};
                break;
            }
        if (!cert.counterexample)
            throw std::logic_error("not full but no failing path length found");
    }
    return cert;
}

inline constexpr int kSubsetSearchCap = 20;

struct EllFullSearch
{
    std::optional<EllFullCertificate> best;
    long inspected = 0;
    int ell_max = 0;
};

// Subsets in decreasing size (lexicographic on config indices within a size);
// returns the certificate with the smallest l, ties going to the subset seen
// first.
inline auto find_ell_full(const LclProblem & p, int ell_max, int cap = kSubsetSearchCap) -> EllFullSearch
{
    if (ell_max < 2)
        throw std::invalid_argument("ell_max must be at least 2");
    if (p.edge_colored())
        throw std::invalid_argument("l-fullness is defined for uncolored problems only");
    const auto & vs = p.vertex_configs();
    int m = static_cast<int>(vs.size());
    if (m > cap)
        throw CapExceeded("|V| = " + std::to_string(m) + " exceeds the subset-search cap " + std::to_string(cap));
    EllFullSearch out;
    out.ell_max = ell_max;
    for (int size = m; size >= 1; --size) {
        std::vector<int> pick(size);
        for (int i = 0; i < size; ++i)
            pick[i] = i;
        while (true) {
            std::vector<Config> subset;
            for (int i : pick)
                subset.push_back(vs[i]);
            ++out.inspected;
            auto a = detail::analyze_paths(p, subset);
            auto ell = detail::minimal_ell(a);
            if (ell && *ell <= ell_max && (!out.best || *ell < out.best->ell)) {
                EllFullCertificate c;
                c.subset = subset;
                c.ell = *ell;
                c.full = true;
                c.minimal_ell = ell;
                c.preperiod = a.preperiod;
                c.period = a.period;
                out.best = c;
                if (*ell == 2)
                    return out;
            }
            int i = size - 1;
            while (i >= 0 && pick[i] == m - size + i)
                --i;
            if (i < 0)
                break;
            ++pick[i];
            for (int j = i + 1; j < size; ++j)
                pick[j] = pick[j - 1] + 1;
        }
    }
    return out;
}

inline auto certificate_to_json(const LclProblem & p, const EllFullCertificate & c) -> json
{
    auto names = [&](const Config & cfg) {
        json a = json::array();
        for (auto x : cfg)
            a.push_back(p.name(x));
        return a;
    };
    json j;
    j["subset"] = json::array();
    for (auto & cfg : c.subset)
        j["subset"].push_back(names(cfg));
    j["ell"] = c.ell;
    j["verdict"] = c.full ? "Full" : "NotFull";
    j["minimal_ell"] = c.minimal_ell ? json(*c.minimal_ell) : json(nullptr);
    j["period"] = {{"preperiod", c.preperiod}, {"period", c.period}};
    if (c.counterexample) {
        auto & x = *c.counterexample;
        j["counterexample"] = {
            {"c1", names(x.c1)}, {"a1", p.name(x.a1)}, {"c2", names(x.c2)}, {"a2", p.name(x.a2)}, {"k", x.k}};
    }
    return j;
}

inline auto certificate_from_json(const LclProblem & p, const json & j) -> EllFullCertificate
{
    try {
        EllFullCertificate c;
        for (auto & cfg : j.at("subset")) {
            Config x;
            for (auto & n : cfg)
                x.push_back(p.label_id(n.get<std::string>()));
            c.subset.push_back(canonical(x));
        }
        c.ell = j.at("ell").get<int>();
        c.full = j.at("verdict").get<std::string>() == "Full";
        if (j.contains("minimal_ell") && !j["minimal_ell"].is_null())
            c.minimal_ell = j["minimal_ell"].get<int>();
        if (j.contains("period")) {
            c.preperiod = j["period"].value("preperiod", 0);
            c.period = j["period"].value("period", 0);
        }
        return c;
    }
    catch (const json::exception & e) {
        throw InputError(std::string("certificate file: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("certificate file: ") + e.what());
    }
}

// ---- Pole-tree signatures ------------------------------------------------------

inline constexpr int kSignatureVertexCap = 14;

// YES/NO over all tuples (I_1..I_k), I_i a multiset of size delta - deg(v_i);
// tuple index is mixed radix (last pole fastest) over the lexicographic
// enumeration of each pole's multisets.
struct HFunction
{
    int label_count = 0;
    std::vector<int> pole_sizes; // delta - deg(v_i)
    std::vector<char> bits;

    auto radix(int i) const -> int { return static_cast<int>(multisets(label_count, pole_sizes[i]).size()); }

    auto index(const std::vector<Config> & tuple) const -> std::size_t
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < pole_sizes.size(); ++i) {
            auto ms = multisets(label_count, pole_sizes[i]);
            auto it = std::find(ms.begin(), ms.end(), canonical(tuple.at(i)));
            if (it == ms.end())
                throw std::invalid_argument("tuple entry has the wrong size");
            idx = idx * ms.size() + static_cast<std::size_t>(it - ms.begin());
        }
        return idx;
    }

    auto yes(const std::vector<Config> & tuple) const -> bool { return bits.at(index(tuple)) != 0; }
    auto count_yes() const -> long { return std::count(bits.begin(), bits.end(), 1); }

    friend auto operator==(const HFunction &, const HFunction &) -> bool = default;
};

// Exact via a tree DP: for each vertex and each label it puts on its parent
// port, the set of partial pole tuples realizable in its subtree. Fixed labels
// (>= 0 entries of `fixed`) restrict the arrangements. Virtual ports of
// non-pole vertices are unconstrained.
inline auto class_signature(const LclProblem & p, const PortGraph & tree, const std::vector<int> & poles,
    const HalfEdgeLabeling * fixed = nullptr, int cap = kSignatureVertexCap) -> HFunction
{
    if (p.edge_colored())
        throw std::invalid_argument("signatures are defined for uncolored problems");
    if (tree.size() > cap)
        throw CapExceeded("pole tree has " + std::to_string(tree.size()) + " vertices, cap is " + std::to_string(cap));
    check_tree(tree);
    if (tree.delta() != p.delta())
        throw std::invalid_argument("tree and problem disagree on delta");
    int n = tree.size(), d = p.delta(), k = static_cast<int>(poles.size());
    std::vector<int> pole_of(n, -1);
    HFunction h;
    h.label_count = p.label_count();
    std::vector<std::map<Config, int>> ms_index(k);
    std::vector<int> radix(k);
    for (int i = 0; i < k; ++i) {
        int v = poles[i];
        if (v < 0 || v >= n || pole_of[v] >= 0)
            throw std::invalid_argument("poles must be distinct vertices of the tree");
        pole_of[v] = i;
        h.pole_sizes.push_back(d - tree.degree(v));
        auto ms = multisets(p.label_count(), h.pole_sizes.back());
        for (std::size_t j = 0; j < ms.size(); ++j)
            ms_index[i][ms[j]] = static_cast<int>(j);
        radix[i] = static_cast<int>(ms.size());
    }

    // all port arrangements of every config
    std::vector<std::vector<Label>> arrangements;
    for (auto c : p.vertex_configs()) {
        do
            arrangements.push_back(c);
        while (std::next_permutation(c.begin(), c.end()));
    }

    using Tuple = std::vector<int>;
    using TupleSet = std::set<Tuple>;
    // order vertices by BFS from 0
    std::vector<int> order{0}, parent(n, -1), parent_port(n, -1);
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        int v = order[i];
        for (int q = 0; q < d; ++q) {
            int w = tree.port(v, q).to;
            if (w != kVirtual && !seen[w]) {
                seen[w] = 1;
                parent[w] = v;
                parent_port[w] = tree.port(v, q).to_port;
                order.push_back(w);
            }
        }
    }
    // dp[v][a] for a = label on v's parent port (index label_count for the root)
    std::vector<std::vector<TupleSet>> dp(n, std::vector<TupleSet>(p.label_count() + 1));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        // compat[q][a]: tuples from the child across port q when v writes a there
        std::vector<std::vector<TupleSet>> compat(d);
        for (int q = 0; q < d; ++q) {
            int w = tree.port(v, q).to;
            if (w == kVirtual || w == parent[v])
                continue;
            compat[q].resize(p.label_count());
            for (Label a = 0; a < p.label_count(); ++a)
                for (Label b = 0; b < p.label_count(); ++b)
                    if (p.edge_allowed(a, b))
                        compat[q][a].insert(dp[w][b].begin(), dp[w][b].end());
        }
        for (auto & arr : arrangements) {
            bool ok = true;
            for (int q = 0; q < d && ok; ++q)
                if (fixed && fixed->at(v, q) >= 0 && fixed->at(v, q) != arr[q])
                    ok = false;
            if (!ok)
                continue;
            Tuple base(k, -1);
            if (pole_of[v] >= 0) {
                Config virt;
                for (int q = 0; q < d; ++q)
                    if (tree.port(v, q).to == kVirtual)
                        virt.push_back(arr[q]);
                std::sort(virt.begin(), virt.end());
                base[pole_of[v]] = ms_index[pole_of[v]].at(virt);
            }
            TupleSet acc{base};
            for (int q = 0; q < d && !acc.empty(); ++q) {
                if (compat[q].empty())
                    continue;
                const auto & cs = compat[q][arr[q]];
                TupleSet next;
                for (auto & x : acc)
                    for (auto & y : cs) {
                        Tuple z = x;
                        for (int i = 0; i < k; ++i)
                            if (y[i] >= 0)
                                z[i] = y[i];
                        next.insert(std::move(z));
                    }
                acc = std::move(next);
            }
            int slot = parent[v] < 0 ? p.label_count() : arr[parent_port[v]];
            dp[v][slot].insert(acc.begin(), acc.end());
        }
    }
    std::size_t total = 1;
    for (int r : radix)
        total *= static_cast<std::size_t>(r);
    h.bits.assign(total, 0);
    for (auto & t : dp[0][p.label_count()]) {
        std::size_t idx = 0;
        for (int i = 0; i < k; ++i)
            idx = idx * radix[i] + static_cast<std::size_t>(t[i]);
        h.bits[idx] = 1;
    }
    return h;
}

struct RootedTree
{
    PortGraph tree;
    int root = 0;
};

// Joins the roots of consecutive trees by an edge on their lowest free ports.
inline auto concatenate(const std::vector<RootedTree> & parts) -> std::pair<PortGraph, std::vector<int>>
{
    if (parts.empty())
        throw std::invalid_argument("empty chain");
    int d = parts.front().tree.delta();
    int n = 0;
    for (auto & t : parts) {
        if (t.tree.delta() != d)
            throw std::invalid_argument("chain trees disagree on delta");
        n += t.tree.size();
    }
    PortGraph g(n, d);
    std::vector<int> roots;
    int off = 0;
    for (auto & t : parts) {
        for (auto & e : t.tree.edges())
            g.add_edge(e.u + off, e.v + off, e.pu, e.pv);
        roots.push_back(off + t.root);
        off += t.tree.size();
    }
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        g.add_edge(roots[i], roots[i + 1]);
    return {g, roots};
}

// Earliest (a, b), 1-based, smallest b first, with Class2(T_1..T_a) equal to
// Class2(T_1..T_b). A one-tree prefix has a single pole and is never equal to a
// two-pole signature.
inline auto pump_split(const LclProblem & p, const std::vector<RootedTree> & chain, int cap = kSignatureVertexCap)
    -> std::optional<std::pair<int, int>>
{
    int k = static_cast<int>(chain.size());
    if (k < 2)
        return std::nullopt;
    std::vector<HFunction> sig(k + 1);
    for (int a = 1; a <= k; ++a) {
        std::vector<RootedTree> prefix(chain.begin(), chain.begin() + a);
        auto [g, roots] = concatenate(prefix);
        std::vector<int> poles = a == 1 ? std::vector<int>{roots[0]} : std::vector<int>{roots.front(), roots.back()};
        sig[a] = class_signature(p, g, poles, nullptr, cap);
        for (int b0 = 1; b0 < a; ++b0)
            if (sig[b0] == sig[a])
                return std::pair{b0, a};
    }
    return std::nullopt;
}

} // namespace lcl
