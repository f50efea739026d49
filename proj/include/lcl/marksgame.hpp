#pragma once

#include "lcl/core.hpp"
#include "lcl/io.hpp"
#include "lcl/playability.hpp"
#include "lcl/sim.hpp"
#include "lcl/util.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace lcl {

// ---- ID graphs --------------------------------------------------------------------

struct IdGraph
{
    int delta = 0;
    int degree = 0; // edges of each color per vertex
    long n = 0;
    int t = 0;
    double r = 0;
    MultiGraph graph; // colors in [0, delta)

    // certificates
    int girth = 0;
    bool coverage = false;
    std::vector<int> mis_size;
    std::vector<double> mis_ratio;
    int attempts = 0;

    // nbr[c][v]: distinct neighbors of v along color-c edges, ascending
    std::vector<std::vector<std::vector<int>>> nbr;

    auto size() const -> int { return graph.n; }

    auto index() -> void
    {
        nbr.assign(delta, std::vector<std::vector<int>>(graph.n));
        for (std::size_t i = 0; i < graph.edges.size(); ++i) {
            auto [u, v] = graph.edges[i];
            int c = graph.colors.at(i);
            nbr.at(c)[u].push_back(v);
            if (u != v)
                nbr.at(c)[v].push_back(u);
        }
        for (auto & per : nbr)
            for (auto & l : per) {
                std::sort(l.begin(), l.end());
                l.erase(std::unique(l.begin(), l.end()), l.end());
            }
    }

    auto has_edge(int c, int u, int v) const -> bool
    {
        const auto & l = nbr.at(c).at(u);
        return std::binary_search(l.begin(), l.end(), v);
    }
};

inline constexpr int kMisVertexCap = 160;

namespace detail {

    // Exact maximum independent set by branching on a maximum-degree vertex,
    // with degree-0/1 reductions, cycles solved in closed form once every
    // degree is 2, and the bound alpha <= |alive| - |greedy matching|.
    class MisSolver
    {
    public:
        explicit MisSolver(std::vector<std::vector<int>> adj) :
            adj_(std::move(adj)), alive_(adj_.size(), 1), deg_(adj_.size(), 0)
        {
            for (std::size_t v = 0; v < adj_.size(); ++v)
                deg_[v] = static_cast<int>(adj_[v].size());
            alive_count_ = static_cast<int>(adj_.size());
        }

        auto run() -> int
        {
            best_ = 0;
            search(0);
            return best_;
        }

    private:
        auto remove(int v) -> void
        {
            alive_[v] = 0;
            --alive_count_;
            for (int w : adj_[v])
                if (alive_[w])
                    --deg_[w];
            stack_.push_back(v);
        }

        auto undo_to(std::size_t size) -> void
        {
            while (stack_.size() > size) {
                int v = stack_.back();
                stack_.pop_back();
                alive_[v] = 1;
                ++alive_count_;
                for (int w : adj_[v])
                    if (alive_[w])
                        ++deg_[w];
            }
        }

        auto take(int v) -> void
        {
            for (int w : adj_[v])
                if (alive_[w])
                    remove(w);
            remove(v);
        }

        auto matching_bound() -> int
        {
            std::vector<char> used(adj_.size(), 0);
            int m = 0;
            for (std::size_t v = 0; v < adj_.size(); ++v) {
                if (!alive_[v] || used[v])
                    continue;
                for (int w : adj_[v])
                    if (alive_[w] && !used[w] && w != static_cast<int>(v)) {
                        used[v] = used[w] = 1;
                        ++m;
                        break;
                    }
            }
            return alive_count_ - m;
        }

        auto cycles_value() -> int
        {
            std::vector<char> seen(adj_.size(), 0);
            int total = 0;
            for (std::size_t s = 0; s < adj_.size(); ++s) {
                if (!alive_[s] || seen[s])
                    continue;
                int len = 0;
                std::vector<int> st{static_cast<int>(s)};
                seen[s] = 1;
                while (!st.empty()) {
                    int x = st.back();
                    st.pop_back();
                    ++len;
                    for (int w : adj_[x])
                        if (alive_[w] && !seen[w]) {
                            seen[w] = 1;
                            st.push_back(w);
                        }
                }
                total += len / 2;
            }
            return total;
        }

        auto search(int current) -> void
        {
            std::size_t mark = stack_.size();
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::size_t v = 0; v < adj_.size(); ++v)
                    if (alive_[v] && deg_[v] <= 1) {
                        take(static_cast<int>(v));
                        ++current;
                        changed = true;
                    }
            }
            if (alive_count_ == 0) {
                best_ = std::max(best_, current);
                undo_to(mark);
                return;
            }
            if (current + matching_bound() <= best_) {
                undo_to(mark);
                return;
            }
            int pick = -1;
            for (std::size_t v = 0; v < adj_.size(); ++v)
                if (alive_[v] && (pick < 0 || deg_[v] > deg_[pick]))
                    pick = static_cast<int>(v);
            if (deg_[pick] <= 2) {
                best_ = std::max(best_, current + cycles_value());
                undo_to(mark);
                return;
            }
            std::size_t inner = stack_.size();
            take(pick);
            search(current + 1);
            undo_to(inner);
            remove(pick);
            search(current);
            undo_to(mark);
        }

        std::vector<std::vector<int>> adj_;
        std::vector<char> alive_;
        std::vector<int> deg_;
        std::vector<int> stack_;
        int alive_count_ = 0;
        int best_ = 0;
    };

} // namespace detail

// Exact independence number of a simple graph, component by component.
// Components of maximum degree > 2 above `cap` vertices are rejected.
inline auto independence_number(int n, const std::vector<std::pair<int, int>> & edges, int cap = kMisVertexCap) -> int
{
    std::vector<std::set<int>> nb(n);
    for (auto [u, v] : edges)
        if (u != v) {
            nb[u].insert(v);
            nb[v].insert(u);
        }
    std::vector<int> comp(n, -1);
    int total = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0)
            continue;
        std::vector<int> members{s};
        comp[s] = s;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (int w : nb[members[i]])
                if (comp[w] < 0) {
                    comp[w] = s;
                    members.push_back(w);
                }
        std::map<int, int> local;
        for (std::size_t i = 0; i < members.size(); ++i)
            local[members[i]] = static_cast<int>(i);
        std::vector<std::vector<int>> adj(members.size());
        std::size_t max_deg = 0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (int w : nb[members[i]])
                adj[i].push_back(local[w]);
            max_deg = std::max(max_deg, adj[i].size());
        }
        if (max_deg > 2 && static_cast<int>(members.size()) > cap)
            throw CapExceeded("independent set component of " + std::to_string(members.size()) +
                " vertices exceeds the exact-solver cap " + std::to_string(cap));
        total += detail::MisSolver(std::move(adj)).run();
    }
    return total;
}

struct IdGraphCheck
{
    bool size_ok = false, girth_ok = false, coverage_ok = false, mis_ok = false;
    std::string failure; // first failed condition, empty when valid

    auto ok() const -> bool { return size_ok && girth_ok && coverage_ok && mis_ok; }
};

// Verifies all four ID-graph conditions exactly and stores the certificates.
inline auto certify_id_graph(IdGraph & h, int mis_cap = kMisVertexCap) -> IdGraphCheck
{
    IdGraphCheck c;
    h.index();
    c.size_ok = h.size() <= h.n;
    h.girth = girth(h.graph.n, h.graph.edges, 2 * h.t + 2);
    c.girth_ok = h.girth >= 2 * h.t + 2;
    if (c.girth_ok)
        h.girth = girth(h.graph.n, h.graph.edges); // exact value for the certificate
    c.coverage_ok = true;
    for (int col = 0; col < h.delta; ++col)
        for (int v = 0; v < h.size(); ++v)
            if (h.nbr[col][v].empty())
                c.coverage_ok = false;
    h.coverage = c.coverage_ok;
    h.mis_size.assign(h.delta, -1);
    h.mis_ratio.assign(h.delta, -1);
    c.mis_ok = c.girth_ok && c.coverage_ok;
    if (c.mis_ok) {
        for (int col = 0; col < h.delta; ++col) {
            std::vector<std::pair<int, int>> es;
            for (std::size_t i = 0; i < h.graph.edges.size(); ++i)
                if (h.graph.colors[i] == col)
                    es.push_back(h.graph.edges[i]);
            h.mis_size[col] = independence_number(h.size(), es, mis_cap);
            h.mis_ratio[col] = static_cast<double>(h.mis_size[col]) / h.size();
            if (h.mis_ratio[col] > h.r)
                c.mis_ok = false;
        }
    }
    if (!c.size_ok)
        c.failure = "size";
    else if (!c.girth_ok)
        c.failure = "girth";
    else if (!c.coverage_ok)
        c.failure = "coverage";
    else if (!c.mis_ok)
        c.failure = "independence ratio";
    return c;
}

// Smallest d >= 3 with 3 ln(d) / d < r, capped at 8.
inline auto id_graph_degree(double r) -> int
{
    for (int d = 3; d < 8; ++d)
        if (3 * std::log(static_cast<double>(d)) / d < r)
            return d;
    return 8;
}

struct IdGraphOptions
{
    std::optional<int> degree;
    int retries = 50;
    int mis_cap = kMisVertexCap;
    long switches_per_vertex = 2;
};

struct IdGraphError : CapExceeded
{
    std::map<std::string, int> failures;
    IdGraphError(const std::string & what, std::map<std::string, int> f) : CapExceeded(what), failures(std::move(f)) {}
};

// Delta independent d-regular configuration-model samples on one vertex set,
// the alpha-th sample colored alpha, short cycles removed by same-color
// switches, then certified exactly; resampled until valid.
inline auto build_id_graph(long n, int t, double r, int delta, std::uint64_t seed, const IdGraphOptions & opt = {})
    -> IdGraph
{
    if (n <= 0 || n % 2 != 0)
        throw std::invalid_argument("ID graph size must be positive and even");
    if (!(r > 0))
        throw std::invalid_argument("r must be positive");
    if (t < 0 || delta < 2)
        throw std::invalid_argument("need t >= 0 and delta >= 2");
    int d = opt.degree.value_or(id_graph_degree(r));
    std::map<std::string, int> failures;
    for (int attempt = 0; attempt < opt.retries; ++attempt) {
        IdGraph h;
        h.delta = delta;
        h.degree = d;
        h.n = n;
        h.t = t;
        h.r = r;
        h.attempts = attempt + 1;
        h.graph.n = static_cast<int>(n);
        for (int a = 0; a < delta; ++a) {
            auto sample = gen_config_model(static_cast<int>(n), d, mix_words({seed, 0x1dULL, std::uint64_t(attempt), std::uint64_t(a)}));
            for (auto & e : sample.edges) {
                h.graph.edges.push_back(e);
                h.graph.colors.push_back(a);
            }
        }
        Rng rng(mix_words({seed, 0x5eedULL, std::uint64_t(attempt)}));
        repair_short_cycles(h.graph, 2 * t + 2, rng, opt.switches_per_vertex * n);
        IdGraphCheck c;
        try {
            c = certify_id_graph(h, opt.mis_cap);
        }
        catch (const CapExceeded &) {
            ++failures["independence ratio (exact solver cap)"];
            continue;
        }
        if (c.ok())
            return h;
        ++failures[c.failure];
    }
    std::string worst;
    int most = -1;
    for (auto & [k, v] : failures)
        if (v > most) {
            most = v;
            worst = k;
        }
    throw IdGraphError("no valid ID graph after " + std::to_string(opt.retries) + " attempts; most frequent failure: " +
            worst + " (" + std::to_string(most) + ")",
        failures);
}

// K_4 with its proper 3-edge-coloring: colors are the three perfect matchings.
inline auto k4_id_graph(int t = 0, double r = 0.5) -> IdGraph
{
    IdGraph h;
    h.delta = 3;
    h.degree = 1;
    h.n = 4;
    h.t = t;
    h.r = r;
    h.graph.n = 4;
    h.graph.edges = {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {0, 3}, {1, 2}};
    h.graph.colors = {0, 0, 1, 1, 2, 2};
    certify_id_graph(h);
    return h;
}

inline auto id_graph_to_json(const IdGraph & h) -> json
{
    json j = graph_to_json(h.graph, h.delta * std::max(1, h.degree));
    j["delta"] = h.delta;
    j["degree"] = h.degree;
    j["n"] = h.n;
    j["t"] = h.t;
    j["r"] = h.r;
    j["certificates"] = {{"girth", h.girth == kInfiniteGirth ? -1 : h.girth}, {"coverage", h.coverage},
        {"mis_size", h.mis_size}, {"mis_ratio", h.mis_ratio}, {"attempts", h.attempts}};
    return j;
}

inline auto id_graph_from_json(const json & j) -> IdGraph
{
    try {
        IdGraph h;
        h.delta = j.at("delta").get<int>();
        h.degree = j.value("degree", 0);
        h.graph.n = j.at("vertices").get<int>();
        h.n = j.value("n", static_cast<long>(h.graph.n));
        h.t = j.value("t", 0);
        h.r = j.value("r", 1.0);
        for (auto & e : j.at("edges"))
            h.graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        h.graph.colors = j.at("edge_colors").get<std::vector<int>>();
        h.graph.validate();
        for (int c : h.graph.colors)
            if (c < 0 || c >= h.delta)
                throw InputError("ID graph edge color out of range");
        if (h.graph.colors.size() != h.graph.edges.size())
            throw InputError("ID graph needs one color per edge");
        h.index();
        return h;
    }
    catch (const json::exception & e) {
        throw InputError(std::string("ID graph: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("ID graph: ") + e.what());
    }
}

// ---- games --------------------------------------------------------------------------

enum class Player { Alice, Bob };

inline auto player_name(Player p) -> std::string { return p == Player::Alice ? "Alice" : "Bob"; }

// Complete rooted delta-regular tree of depth t plus one padding layer, port =
// edge color. The padding makes depth-t vertices show real (hidden) ports in
// every radius-t view, as they do inside a larger tree.
struct GameTree
{
    int delta = 0, t = 0;
    PortGraph graph;
    std::vector<int> parent, color, depth, side;
    std::vector<std::vector<int>> path; // colors from the root
    int inner = 0;                      // nodes of depth <= t (a BFS prefix)
    std::map<std::vector<int>, int> by_path;
};

inline auto make_game_tree(int delta, int t) -> GameTree
{
    GameTree g;
    g.delta = delta;
    g.t = t;
    g.parent = {-1};
    g.color = {-1};
    g.depth = {0};
    g.side = {-1};
    g.path = {{}};
    for (std::size_t i = 0; i < g.parent.size(); ++i) {
        if (g.depth[i] == t + 1)
            continue;
        for (int c = 0; c < delta; ++c) {
            if (c == g.color[i])
                continue;
            g.parent.push_back(static_cast<int>(i));
            g.color.push_back(c);
            g.depth.push_back(g.depth[i] + 1);
            g.side.push_back(i == 0 ? c : g.side[i]);
            auto p = g.path[i];
            p.push_back(c);
            g.path.push_back(p);
        }
    }
    int total = static_cast<int>(g.parent.size());
    g.graph = PortGraph(total, delta);
    std::vector<int> colors;
    for (int v = 1; v < total; ++v) {
        g.graph.add_edge(g.parent[v], v, g.color[v], g.color[v]);
        colors.push_back(g.color[v]);
    }
    g.graph.set_colors(colors);
    for (int v = 0; v < total; ++v) {
        if (g.depth[v] <= t)
            ++g.inner;
        g.by_path[g.path[v]] = v;
    }
    return g;
}

inline constexpr long kGameNodeCap = 10000000;

// Bob-families are bitmasks over subsets of the alphabet: bit S set iff Bob
// wins the game with target set S. Needs |Sigma| <= 6.
using BobMask = std::uint64_t;
using Profile = std::vector<BobMask>; // one mask per color

// Exact backward induction for the games of one algorithm on one ID graph.
// A full play assigns every non-root inner node one "digit": the index of its
// label among the ID-graph neighbors of the parent's label along the node's
// color. Terminal outputs are tabulated once per root label and shared by
// every color and target set.
class GameEngine
{
public:
    GameEngine(const LocalAlgorithm & alg, const IdGraph & h, int t, int label_count, long n = 0,
        long cap = kGameNodeCap) :
        alg_(&alg), h_(&h), t_(t), labels_(label_count), n_(n > 0 ? n : h.n)
    {
        if (t < 1)
            throw std::invalid_argument("games need t >= 1");
        if (label_count > 6)
            throw CapExceeded("game profiles support at most 6 labels");
        if (static_cast<int>(h.nbr.size()) != h.delta)
            throw std::invalid_argument("ID graph is not indexed");
        radius_ = alg.radius(n_);
        if (radius_ > t)
            throw std::invalid_argument("algorithm radius exceeds the game depth");
        d_ = -1;
        for (auto & per : h.nbr)
            for (auto & l : per) {
                int sz = static_cast<int>(l.size());
                if (d_ < 0)
                    d_ = sz;
                if (sz != d_ || sz == 0)
                    throw std::invalid_argument("games need every vertex to have the same number of neighbors per color");
            }
        tree_ = make_game_tree(h.delta, t);
        long leaves = 1;
        for (int i = 1; i < tree_.inner; ++i) {
            if (leaves > cap / d_)
                throw CapExceeded("game tree exceeds the position cap " + std::to_string(cap));
            leaves *= d_;
        }
        leaves_ = leaves;
        subsets_ = 1 << labels_;
        full_ = subsets_ == 64 ? ~BobMask{0} : ((BobMask{1} << subsets_) - 1);
        contains_.assign(labels_, 0);
        for (int o = 0; o < labels_; ++o)
            for (int s = 0; s < subsets_; ++s)
                if (s >> o & 1)
                    contains_[o] |= BobMask{1} << s;
        groups_.assign(h.delta, {});
        for (int a = 0; a < h.delta; ++a) {
            groups_[a].assign(2 * t, {});
            for (int v = 1; v < tree_.inner; ++v)
                groups_[a][2 * (tree_.depth[v] - 1) + (tree_.side[v] == a ? 0 : 1)].push_back(v);
        }
    }

    auto tree() const -> const GameTree & { return tree_; }
    auto id_graph() const -> const IdGraph & { return *h_; }
    auto degree() const -> int { return d_; }
    auto leaf_count() const -> long { return leaves_; }
    auto full_mask() const -> BobMask { return full_; }
    auto label_count() const -> int { return labels_; }
    auto claimed_n() const -> long { return n_; }
    auto groups(int alpha) const -> const std::vector<std::vector<int>> & { return groups_.at(alpha); }
    static auto mover(int group) -> Player { return group % 2 == 0 ? Player::Alice : Player::Bob; }

    // Labels of inner nodes for a (partial) digit vector; -1 where unassigned.
    auto labels_of(int sigma, const std::vector<int> & digits) const -> std::vector<int>
    {
        std::vector<int> lab(tree_.inner, -1);
        lab[0] = sigma;
        for (int v = 1; v < tree_.inner; ++v) {
            if (digits[v] < 0)
                continue;
            int p = lab[tree_.parent[v]];
            if (p < 0)
                throw std::logic_error("digit assigned below an unlabeled node");
            lab[v] = h_->nbr[tree_.color[v]][p].at(digits[v]);
        }
        return lab;
    }

    auto digit_of(int parent_label, int color, int label) const -> int
    {
        const auto & l = h_->nbr.at(color).at(parent_label);
        auto it = std::lower_bound(l.begin(), l.end(), label);
        if (it == l.end() || *it != label)
            return -1;
        return static_cast<int>(it - l.begin());
    }

    // Identifiers for the padded tree: ID-graph labels inside, fresh values on
    // the padding layer (never visible in a radius-t view of the root).
    auto ids_for(const std::vector<int> & labels) const -> std::vector<std::uint64_t>
    {
        std::vector<std::uint64_t> ids(tree_.graph.size());
        for (int v = 0; v < tree_.graph.size(); ++v)
            ids[v] = v < tree_.inner ? static_cast<std::uint64_t>(labels.at(v)) : static_cast<std::uint64_t>(h_->size() + v);
        return ids;
    }

    auto evaluate(const std::vector<int> & labels) const -> std::vector<Label>
    {
        auto ball = build_ball(tree_.graph, 0, radius_, ids_for(labels), n_);
        auto out = alg_->evaluate(ball);
        if (static_cast<int>(out.size()) != h_->delta)
            throw std::runtime_error("algorithm output has wrong arity");
        for (auto o : out)
            if (o < 0 || o >= labels_)
                throw std::runtime_error("algorithm output label out of range");
        return out;
    }

    auto leaf_index(const std::vector<int> & digits) const -> long
    {
        long idx = 0;
        for (int v = tree_.inner - 1; v >= 1; --v)
            idx = idx * d_ + digits[v];
        return idx;
    }

    // Root outputs of every full play from root label sigma (leaf-major).
    auto outputs(int sigma) -> const std::vector<Label> &
    {
        auto hit = cache_.find(sigma);
        if (hit != cache_.end())
            return hit->second;
        if (cache_.size() >= kCachedRoots)
            cache_.erase(cache_.begin());
        auto & table = cache_[sigma];
        table.assign(static_cast<std::size_t>(leaves_) * h_->delta, 0);
        std::vector<int> digits(tree_.inner, 0);
        digits[0] = -1;
        for (long leaf = 0; leaf < leaves_; ++leaf) {
            long x = leaf;
            for (int v = 1; v < tree_.inner; ++v) {
                digits[v] = static_cast<int>(x % d_);
                x /= d_;
            }
            auto out = evaluate(labels_of(sigma, digits));
            std::copy(out.begin(), out.end(), table.begin() + leaf * h_->delta);
        }
        return table;
    }

    // Bob-family of the subgame where groups < `group` are fixed by `digits`.
    auto value(int sigma, int alpha, std::vector<int> & digits, int group) -> BobMask
    {
        if (group == 2 * t_) {
            ++visited_;
            const auto & out = outputs(sigma);
            return contains_[out[leaf_index(digits) * h_->delta + alpha]];
        }
        const auto & nodes = groups_[alpha][group];
        bool alice = mover(group) == Player::Alice;
        BobMask acc = alice ? full_ : 0;
        for (int v : nodes)
            digits[v] = 0;
        while (true) {
            BobMask child = value(sigma, alpha, digits, group + 1);
            acc = alice ? (acc & child) : (acc | child);
            if (acc == (alice ? 0 : full_) || !next(nodes, digits))
                break;
        }
        for (int v : nodes)
            digits[v] = -1;
        return acc;
    }

    auto bob_mask(int sigma, int alpha) -> BobMask
    {
        std::vector<int> digits(tree_.inner, -1);
        return value(sigma, alpha, digits, 0);
    }

    // Sets the digits of `group` to a move winning the game for its mover with
    // target set s; false when the mover has none.
    auto winning_move(int sigma, int alpha, Subset s, std::vector<int> & digits, int group) -> bool
    {
        const auto & nodes = groups_[alpha][group];
        bool want_bob = mover(group) == Player::Bob;
        for (int v : nodes)
            digits[v] = 0;
        while (true) {
            bool bob = value(sigma, alpha, digits, group + 1) >> s & 1;
            if (bob == want_bob)
                return true;
            if (!next(nodes, digits))
                break;
        }
        for (int v : nodes)
            digits[v] = -1;
        return false;
    }

    auto root_output(int sigma, const std::vector<int> & digits) -> std::vector<Label>
    {
        const auto & out = outputs(sigma);
        long leaf = leaf_index(digits);
        return {out.begin() + leaf * h_->delta, out.begin() + (leaf + 1) * h_->delta};
    }

    auto visited() const -> long { return visited_; }

    // Odometer over the digits of the given nodes.
    auto next(const std::vector<int> & nodes, std::vector<int> & digits) const -> bool
    {
        for (int v : nodes) {
            if (++digits[v] < d_)
                return true;
            digits[v] = 0;
        }
        return false;
    }

private:
    const LocalAlgorithm * alg_;
    const IdGraph * h_;
    int t_, labels_, radius_ = 0, d_ = 0, subsets_ = 0;
    long n_;
    long leaves_ = 0;
    BobMask full_ = 0;
    std::vector<BobMask> contains_;
    std::vector<std::vector<std::vector<int>>> groups_;
    GameTree tree_;
    static constexpr std::size_t kCachedRoots = 4;
    std::map<int, std::vector<Label>> cache_;
    long visited_ = 0;
};

struct GameSpec
{
    const LocalAlgorithm * algorithm = nullptr;
    const IdGraph * id_graph = nullptr;
    int alpha = 0;
    int sigma = 0;
    Subset S = 0;
    int t = 1;
    int label_count = 0;
    long n = 0;
};

struct GameOutcome
{
    Player winner = Player::Alice;
    // position key (labels of the assigned nodes, BFS order) -> labels placed
    std::map<std::string, std::vector<int>> strategy;
    long positions = 0;
};

// Position key: labels of all inner nodes in BFS order, "-1" where unassigned.
inline auto position_key(const std::vector<int> & labels) -> std::string
{
    std::string k;
    for (int x : labels) {
        k += std::to_string(x);
        k += ',';
    }
    return k;
}

namespace detail {

    inline auto collect_strategy(GameEngine & eng, int sigma, int alpha, Subset s, Player winner,
        std::vector<int> & digits, int group, GameOutcome & out) -> void
    {
        if (group == 2 * eng.tree().t)
            return;
        const auto & nodes = eng.groups(alpha)[group];
        if (GameEngine::mover(group) == winner) {
            if (!eng.winning_move(sigma, alpha, s, digits, group))
                throw std::logic_error("winner has no winning move");
            auto lab = eng.labels_of(sigma, digits);
            std::vector<int> move;
            for (int v : nodes)
                move.push_back(lab[v]);
            auto before = digits;
            for (int v : nodes)
                before[v] = -1;
            out.strategy[position_key(eng.labels_of(sigma, before))] = move;
            collect_strategy(eng, sigma, alpha, s, winner, digits, group + 1, out);
            for (int v : nodes)
                digits[v] = -1;
            return;
        }
        for (int v : nodes)
            digits[v] = 0;
        do
            collect_strategy(eng, sigma, alpha, s, winner, digits, group + 1, out);
        while (eng.next(nodes, digits));
        for (int v : nodes)
            digits[v] = -1;
    }

} // namespace detail

inline auto solve_game(const GameSpec & spec, long cap = kGameNodeCap) -> GameOutcome
{
    if (!spec.algorithm || !spec.id_graph)
        throw std::invalid_argument("game needs an algorithm and an ID graph");
    GameEngine eng(*spec.algorithm, *spec.id_graph, spec.t, spec.label_count, spec.n, cap);
    GameOutcome out;
    BobMask m = eng.bob_mask(spec.sigma, spec.alpha);
    out.winner = (m >> spec.S & 1) ? Player::Bob : Player::Alice;
    std::vector<int> digits(eng.tree().inner, -1);
    detail::collect_strategy(eng, spec.sigma, spec.alpha, spec.S, out.winner, digits, 0, out);
    out.positions = eng.visited();
    return out;
}

// Plays the stored strategy of the winner against `plays` random opponents and
// checks that every play ends with the declared winner.
inline auto audit_strategy(const GameSpec & spec, const GameOutcome & outcome, int plays, std::uint64_t seed) -> bool
{
    GameEngine eng(*spec.algorithm, *spec.id_graph, spec.t, spec.label_count, spec.n);
    Rng rng(seed);
    const auto & tree = eng.tree();
    for (int play = 0; play < plays; ++play) {
        std::vector<int> digits(tree.inner, -1);
        for (int g = 0; g < 2 * spec.t; ++g) {
            const auto & nodes = eng.groups(spec.alpha)[g];
            if (GameEngine::mover(g) == outcome.winner) {
                auto lab = eng.labels_of(spec.sigma, digits);
                auto it = outcome.strategy.find(position_key(lab));
                if (it == outcome.strategy.end() || it->second.size() != nodes.size())
                    return false;
                for (std::size_t i = 0; i < nodes.size(); ++i) {
                    int v = nodes[i];
                    digits[v] = eng.digit_of(lab[tree.parent[v]], tree.color[v], it->second[i]);
                    if (digits[v] < 0)
                        return false;
                }
            }
            else
                for (int v : nodes)
                    digits[v] = static_cast<int>(rng.uniform_below(eng.degree()));
        }
        auto out = eng.root_output(spec.sigma, digits);
        bool bob = spec.S >> out[spec.alpha] & 1;
        if (bob != (outcome.winner == Player::Bob))
            return false;
    }
    return true;
}

// Lambda^sigma_alpha for every sigma: Bob-families over all subsets.
inline auto compute_lambda_profiles(GameEngine & eng) -> std::vector<Profile>
{
    const auto & h = eng.id_graph();
    std::vector<Profile> prof(h.size(), Profile(h.delta, 0));
    for (int s = 0; s < h.size(); ++s)
        for (int a = 0; a < h.delta; ++a) {
            BobMask m = eng.bob_mask(s, a);
            if (!(m >> ((1 << eng.label_count()) - 1) & 1))
                throw std::logic_error("Bob must win the game for the full alphabet");
            prof[s][a] = m;
        }
    return prof;
}

inline auto compute_lambda_profiles(const LocalAlgorithm & alg, const IdGraph & h, int t, int label_count, long n = 0)
    -> std::vector<Profile>
{
    GameEngine eng(alg, h, t, label_count, n);
    return compute_lambda_profiles(eng);
}

inline auto bob_family_upward_closed(BobMask m, int label_count) -> bool
{
    int subsets = 1 << label_count;
    for (int s = 0; s < subsets; ++s)
        if (m >> s & 1)
            for (int x = 0; x < label_count; ++x)
                if (!(m >> (s | 1 << x) & 1))
                    return false;
    return true;
}

// ---- refutations ---------------------------------------------------------------------

struct Refutation
{
    enum class Kind { VertexFail, EdgeFail, Inconclusive } kind = Kind::Inconclusive;
    std::string step;   // which part of the pipeline produced it
    std::string reason;
    PortGraph instance; // port = edge color
    std::vector<std::uint64_t> ids;
    long n = 0;
    int radius = 0;
    int alpha = -1;
    int root0 = -1, root1 = -1;   // instance vertices
    int sigma0 = -1, sigma1 = -1; // their ID-graph labels
    std::vector<Subset> sets;     // the Alice tuple, or the Bob pair (S, T)
    std::vector<Label> output0, output1;
};

inline auto refutation_kind_name(Refutation::Kind k) -> std::string
{
    switch (k) {
    case Refutation::Kind::VertexFail:
        return "VertexFail";
    case Refutation::Kind::EdgeFail:
        return "EdgeFail";
    default:
        return "Inconclusive";
    }
}

// Re-runs the algorithm on the embedded instance and checks the recorded
// violation and identifier distinctness.
inline auto replay_refutation(const LocalAlgorithm & alg, const LclProblem & p, const Refutation & ref) -> bool
{
    if (ref.kind == Refutation::Kind::Inconclusive)
        return true;
    std::unordered_set<std::uint64_t> seen(ref.ids.begin(), ref.ids.end());
    if (seen.size() != ref.ids.size() || static_cast<int>(ref.ids.size()) != ref.instance.size())
        return false;
    int r = alg.radius(ref.n);
    try {
        auto out0 = alg.evaluate(build_ball(ref.instance, ref.root0, r, ref.ids, ref.n));
        if (out0 != ref.output0)
            return false;
        if (ref.kind == Refutation::Kind::VertexFail)
            return !p.has_vertex_config(out0);
        auto out1 = alg.evaluate(build_ball(ref.instance, ref.root1, r, ref.ids, ref.n));
        if (out1 != ref.output1)
            return false;
        // ports are colors: both endpoints use port alpha for the joining edge
        const auto & pt = ref.instance.port(ref.root0, ref.alpha);
        if (pt.to != ref.root1 || pt.to_port != ref.alpha)
            return false;
        return !p.edge_allowed(out0[ref.alpha], out1[ref.alpha], ref.alpha);
    }
    catch (const std::exception &) {
        return false;
    }
}

namespace detail {

    inline auto inconclusive(std::string reason) -> Refutation
    {
        Refutation r;
        r.kind = Refutation::Kind::Inconclusive;
        r.reason = std::move(reason);
        return r;
    }

    inline auto maximal_alice(BobMask m, int label_count) -> std::vector<Subset>
    {
        std::vector<Subset> out;
        int subsets = 1 << label_count;
        for (int s = 0; s < subsets; ++s) {
            if (m >> s & 1)
                continue;
            bool maximal = true;
            for (int x = 0; x < label_count && maximal; ++x)
                if (!(s >> x & 1) && !(m >> (s | 1 << x) & 1))
                    maximal = false;
            if (maximal)
                out.push_back(static_cast<Subset>(s));
        }
        return out;
    }

    inline auto minimal_bob(BobMask m, int label_count) -> std::vector<Subset>
    {
        std::vector<Subset> out;
        int subsets = 1 << label_count;
        for (int s = 0; s < subsets; ++s) {
            if (!(m >> s & 1))
                continue;
            bool minimal = true;
            for (int x = 0; x < label_count && minimal; ++x)
                if ((s >> x & 1) && (m >> (s & ~(1 << x)) & 1))
                    minimal = false;
            if (minimal)
                out.push_back(static_cast<Subset>(s));
        }
        return out;
    }

    // (A) violation of one profile: a tuple of Alice sets no configuration avoids.
    inline auto clause_a_violation(const Profile & prof, const std::vector<std::vector<Label>> & reals, int label_count)
        -> std::optional<std::vector<Subset>>
    {
        int d = static_cast<int>(prof.size());
        std::vector<std::vector<Subset>> alice(d);
        for (int a = 0; a < d; ++a) {
            alice[a] = maximal_alice(prof[a], label_count);
            if (alice[a].empty())
                return std::nullopt;
        }
        std::vector<std::size_t> idx(d, 0);
        while (true) {
            std::vector<Subset> tuple(d);
            for (int a = 0; a < d; ++a)
                tuple[a] = alice[a][idx[a]];
            if (!clause_a_holds(reals, tuple))
                return tuple;
            int a = 0;
            while (a < d && ++idx[a] == alice[a].size()) {
                idx[a] = 0;
                ++a;
            }
            if (a == d)
                return std::nullopt;
        }
    }

    // (B) violation between two Bob-families of one color: S Bob for the first,
    // T Bob for the second, S and T not adjacent.
    inline auto clause_b_violation(const ConfigGraph & g, int alpha, BobMask m0, BobMask m1, int label_count)
        -> std::optional<std::pair<Subset, Subset>>
    {
        auto b0 = minimal_bob(m0, label_count), b1 = minimal_bob(m1, label_count);
        for (auto s : b0)
            for (auto t : b1)
                if (!g.adjacent(alpha, s, t))
                    return std::make_pair(s, t);
        return std::nullopt;
    }

} // namespace detail

// Glues delta Alice strategies at root sigma (each winning her own game for
// the tuple's set) into one labeled depth-t tree.
inline auto glue_alice(GameEngine & eng, int sigma, const std::vector<Subset> & tuple) -> std::vector<int>
{
    const auto & tree = eng.tree();
    int d = tree.delta;
    std::vector<int> digits(tree.inner, -1);
    for (int k = 1; k <= tree.t; ++k) {
        // every Alice moves on the same position: the other sides of depth k
        // are still empty when she chooses
        auto next = digits;
        for (int a = 0; a < d; ++a) {
            auto work = digits;
            if (!eng.winning_move(sigma, a, tuple[a], work, 2 * (k - 1)))
                throw std::logic_error("Alice lost a position her strategy should win");
            for (int v : eng.groups(a)[2 * (k - 1)])
                next[v] = work[v];
        }
        digits = std::move(next);
    }
    return digits;
}

struct BobGlue
{
    std::vector<int> digits0, digits1;
};

// Bob's winning strategies of the games at sigma0 (set s) and sigma1 (set t)
// played against each other across an alpha-edge: the alpha-side of either
// game is the other root's own side.
inline auto glue_bob(GameEngine & eng, int alpha, int sigma0, Subset s, int sigma1, Subset t) -> BobGlue
{
    const auto & tree = eng.tree();
    BobGlue g{std::vector<int>(tree.inner, -1), std::vector<int>(tree.inner, -1)};
    // copies the other game's own side onto this game's alpha side at depth k
    auto mirror = [&](std::vector<int> & dst, int dst_sigma, const std::vector<int> & src, int src_sigma, int k) {
        auto src_lab = eng.labels_of(src_sigma, src);
        auto dst_lab = eng.labels_of(dst_sigma, dst);
        for (int v : eng.groups(alpha)[2 * (k - 1)]) {
            std::vector<int> rest(tree.path[v].begin() + 1, tree.path[v].end());
            int u = tree.by_path.at(rest);
            int label = src_lab.at(u);
            int dg = eng.digit_of(dst_lab[tree.parent[v]], tree.color[v], label);
            if (dg < 0)
                throw std::logic_error("mirrored label is not an ID-graph neighbor");
            dst[v] = dg;
            dst_lab[v] = label;
        }
    };
    for (int k = 1; k <= tree.t; ++k) {
        mirror(g.digits0, sigma0, g.digits1, sigma1, k);
        if (!eng.winning_move(sigma0, alpha, s, g.digits0, 2 * (k - 1) + 1))
            throw std::logic_error("Bob lost a position his strategy should win");
        mirror(g.digits1, sigma1, g.digits0, sigma0, k);
        if (!eng.winning_move(sigma1, alpha, t, g.digits1, 2 * (k - 1) + 1))
            throw std::logic_error("Bob lost a position his strategy should win");
    }
    return g;
}

namespace detail {

    inline auto distinct_labels(const std::vector<int> & labels) -> bool
    {
        std::unordered_set<int> s(labels.begin(), labels.end());
        return s.size() == labels.size();
    }

    // Two game trees joined at their roots by an alpha-edge, each contributing
    // its own (non-alpha) side plus padding.
    inline auto joined_instance(GameEngine & eng, int alpha, int sigma0, const std::vector<int> & d0, int sigma1,
        const std::vector<int> & d1, Refutation & ref) -> bool
    {
        const auto & tree = eng.tree();
        int total = tree.graph.size();
        std::vector<int> keep;
        for (int v = 0; v < total; ++v)
            if (v == 0 || tree.side[v] != alpha)
                keep.push_back(v);
        int half = static_cast<int>(keep.size());
        std::vector<int> local(total, -1);
        for (int i = 0; i < half; ++i)
            local[keep[i]] = i;
        PortGraph g(2 * half, tree.delta);
        std::vector<int> colors;
        for (int side = 0; side < 2; ++side)
            for (int i = 1; i < half; ++i) {
                int v = keep[i];
                g.add_edge(side * half + local[tree.parent[v]], side * half + i, tree.color[v], tree.color[v]);
                colors.push_back(tree.color[v]);
            }
        g.add_edge(0, half, alpha, alpha);
        colors.push_back(alpha);
        g.set_colors(colors);
        auto l0 = eng.labels_of(sigma0, d0), l1 = eng.labels_of(sigma1, d1);
        std::vector<std::uint64_t> ids(2 * half);
        std::vector<int> inner_labels;
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < half; ++i) {
                int v = keep[i];
                if (v < tree.inner) {
                    int lab = (side == 0 ? l0 : l1).at(v);
                    ids[side * half + i] = static_cast<std::uint64_t>(lab);
                    inner_labels.push_back(lab);
                }
                else
                    ids[side * half + i] = static_cast<std::uint64_t>(eng.id_graph().size() + side * half + i);
            }
        if (!distinct_labels(inner_labels))
            return false;
        ref.instance = std::move(g);
        ref.ids = std::move(ids);
        ref.root0 = 0;
        ref.root1 = half;
        return true;
    }

} // namespace detail

struct RefuteOptions
{
    double r = -1; // pigeonhole threshold; the ID graph's r when negative
    int subset_cap = kDefaultSubsetCap;
};

// Turns an algorithm into a failing instance, following the profile argument:
// (A) violated at some sigma -> glue Alice strategies (VertexFail); else a
// profile class X larger than r|V| with a (B) violation and an alpha-edge
// inside X -> glue Bob strategies (EdgeFail); else any alpha-edge whose two
// endpoint profiles jointly violate (B) (EdgeFail); else Inconclusive. Every
// returned failure passes the replay gate.
inline auto refute_algorithm(const LocalAlgorithm & alg, const LclProblem & p, const IdGraph & h, int t,
    const RefuteOptions & opt = {}) -> Refutation
{
    if (!p.edge_colored())
        throw std::invalid_argument("refutation needs an edge-colored problem");
    if (p.delta() != h.delta)
        throw std::invalid_argument("problem and ID graph disagree on delta");
    if (h.girth < 2 * t + 2)
        throw std::invalid_argument("ID graph girth certificate missing or below 2t+2");
    int labels = p.label_count();
    GameEngine eng(alg, h, t, labels);
    ConfigGraph cg(p, opt.subset_cap);
    auto reals = realizations(p);
    auto profiles = compute_lambda_profiles(eng);
    for (auto & prof : profiles)
        for (auto m : prof)
            if (!bob_family_upward_closed(m, labels))
                throw std::logic_error("computed Bob-family is not upward closed");

    auto finish = [&](Refutation ref) -> Refutation {
        ref.n = eng.claimed_n();
        ref.radius = alg.radius(ref.n);
        if (!replay_refutation(alg, p, ref))
            throw std::logic_error("refutation failed replay");
        return ref;
    };

    for (int s = 0; s < h.size(); ++s) {
        auto tuple = detail::clause_a_violation(profiles[s], reals, labels);
        if (!tuple)
            continue;
        auto digits = glue_alice(eng, s, *tuple);
        auto lab = eng.labels_of(s, digits);
        if (!detail::distinct_labels(lab))
            return detail::inconclusive("identifier collision while gluing Alice strategies");
        Refutation ref;
        ref.kind = Refutation::Kind::VertexFail;
        ref.step = "alice-gluing";
        ref.reason = "no vertex configuration avoids the Alice sets at the root";
        ref.instance = eng.tree().graph;
        ref.ids = eng.ids_for(lab);
        ref.root0 = 0;
        ref.sigma0 = s;
        ref.sets = *tuple;
        ref.output0 = eng.root_output(s, digits);
        return finish(ref);
    }

    auto edge_fail = [&](int a, int s0, Subset S, int s1, Subset T, std::string step) -> std::optional<Refutation> {
        auto glue = glue_bob(eng, a, s0, S, s1, T);
        Refutation ref;
        if (!detail::joined_instance(eng, a, s0, glue.digits0, s1, glue.digits1, ref))
            return std::nullopt;
        ref.kind = Refutation::Kind::EdgeFail;
        ref.step = std::move(step);
        ref.reason = "the two endpoint outputs on the shared edge are not an allowed edge configuration";
        ref.alpha = a;
        ref.sigma0 = s0;
        ref.sigma1 = s1;
        ref.sets = {S, T};
        ref.output0 = eng.root_output(s0, glue.digits0);
        ref.output1 = eng.root_output(s1, glue.digits1);
        return finish(ref);
    };

    double r = opt.r > 0 ? opt.r : h.r;
    std::map<Profile, std::vector<int>> classes;
    for (int s = 0; s < h.size(); ++s)
        classes[profiles[s]].push_back(s);
    const std::vector<int> * largest = nullptr;
    for (auto & [prof, members] : classes)
        if (!largest || members.size() > largest->size())
            largest = &members;
    if (largest && static_cast<double>(largest->size()) > r * h.size()) {
        const auto & prof = profiles[largest->front()];
        std::set<int> in_x(largest->begin(), largest->end());
        for (int a = 0; a < h.delta; ++a) {
            auto viol = detail::clause_b_violation(cg, a, prof[a], prof[a], labels);
            if (!viol)
                continue;
            for (int s0 : *largest)
                for (int s1 : h.nbr[a][s0])
                    if (in_x.count(s1))
                        if (auto ref = edge_fail(a, s0, viol->first, s1, viol->second, "pigeonhole"))
                            return *ref;
        }
    }
    for (int a = 0; a < h.delta; ++a)
        for (int s0 = 0; s0 < h.size(); ++s0)
            for (int s1 : h.nbr[a][s0]) {
                auto viol = detail::clause_b_violation(cg, a, profiles[s0][a], profiles[s1][a], labels);
                if (viol)
                    if (auto ref = edge_fail(a, s0, viol->first, s1, viol->second, "edge-scan"))
                        return *ref;
            }
    return detail::inconclusive(
        "every profile satisfies (A) and no ID-graph edge carries a (B) violation; the problem may be playable "
        "or the ID graph too small");
}

inline auto refutation_to_json(const LclProblem & p, const Refutation & ref) -> json
{
    json j;
    j["kind"] = refutation_kind_name(ref.kind);
    j["reason"] = ref.reason;
    if (ref.kind == Refutation::Kind::Inconclusive)
        return j;
    auto names = [&](const std::vector<Label> & ls) {
        json a = json::array();
        for (auto l : ls)
            a.push_back(p.name(l));
        return a;
    };
    j["step"] = ref.step;
    j["n"] = ref.n;
    j["radius"] = ref.radius;
    j["instance"] = graph_to_json(ref.instance);
    j["ids"] = ref.ids;
    j["root0"] = ref.root0;
    j["sigma0"] = ref.sigma0;
    j["output0"] = names(ref.output0);
    json sets = json::array();
    for (auto s : ref.sets)
        sets.push_back(subset_names(p, s));
    j["sets"] = sets;
    if (ref.kind == Refutation::Kind::EdgeFail) {
        j["alpha"] = ref.alpha;
        j["root1"] = ref.root1;
        j["sigma1"] = ref.sigma1;
        j["output1"] = names(ref.output1);
    }
    return j;
}

// ---- the radius-1 coloring suite ----------------------------------------------------

// Tabulates f on every root view that occurs in the games on h, giving a
// lookup-table algorithm with a fixed fallback for anything else.
inline auto tabulate_game_views(const IdGraph & h, int t, const std::function<std::vector<Label>(const BallView &)> & f,
    std::vector<Label> fallback) -> LookupTableAlgorithm
{
    std::map<std::string, std::vector<Label>> table;
    FunctionAlgorithm probe(t, [&](const BallView & b) {
        auto out = f(b);
        table[b.key()] = out;
        return out;
    });
    GameEngine eng(probe, h, t, 6);
    for (int s = 0; s < h.size(); ++s)
        eng.outputs(s);
    return LookupTableAlgorithm(t, std::move(table), std::move(fallback));
}

struct NamedAlgorithm
{
    std::string name;
    LookupTableAlgorithm algorithm;
};

// Five radius-1 heuristics for proper 3-coloring of 3-regular trees (labels
// 0, 1, 2 as the homomorphism problem to K_3 names them).
inline auto coloring_suite(const IdGraph & h) -> std::vector<NamedAlgorithm>
{
    auto mono = [](int c) { return std::vector<Label>(3, c); };
    auto neighbor_ids = [](const BallView & b) {
        std::vector<std::uint64_t> ids;
        for (auto & pt : b.center().ports)
            if (pt.to >= 0)
                ids.push_back(b.nodes[pt.to].id);
        return ids;
    };
    std::vector<NamedAlgorithm> out;
    out.push_back({"constant-by-port", tabulate_game_views(h, 1, [](const BallView &) { return std::vector<Label>{0, 1, 2}; }, {0, 1, 2})});
    out.push_back({"constant-color", tabulate_game_views(h, 1, [&](const BallView &) { return mono(0); }, mono(0))});
    out.push_back({"greedy-smaller-id-count", tabulate_game_views(h, 1,
                                                  [&](const BallView & b) {
                                                      int smaller = 0;
                                                      for (auto id : neighbor_ids(b))
                                                          smaller += id < b.center().id;
                                                      return mono(std::min(smaller, 2));
                                                  },
                                                  mono(0))});
    out.push_back({"id-mod-3", tabulate_game_views(h, 1, [&](const BallView & b) { return mono(static_cast<int>(b.center().id % 3)); }, mono(0))});
    out.push_back({"greedy-guessed-neighbors", tabulate_game_views(h, 1,
                                                   [&](const BallView & b) {
                                                       std::vector<char> used(3, 0);
                                                       for (auto id : neighbor_ids(b))
                                                           if (id < b.center().id)
                                                               used[id % 3] = 1;
                                                       for (int c = 0; c < 3; ++c)
                                                           if (!used[c])
                                                               return mono(c);
                                                       return mono(0);
                                                   },
                                                   mono(0))});
    return out;
}

// A random radius-1 lookup table over the game views of h.
inline auto random_lookup_table(const IdGraph & h, int label_count, int delta, std::uint64_t seed, bool monochrome)
    -> LookupTableAlgorithm
{
    Rng rng(seed);
    std::map<std::string, std::vector<Label>> memo;
    return tabulate_game_views(h, 1,
        [&](const BallView & b) {
            auto key = b.key();
            auto it = memo.find(key);
            if (it != memo.end())
                return it->second;
            std::vector<Label> out(delta);
            if (monochrome)
                std::fill(out.begin(), out.end(), static_cast<Label>(rng.uniform_below(label_count)));
            else
                for (auto & o : out)
                    o = static_cast<Label>(rng.uniform_below(label_count));
            memo[key] = out;
            return out;
        },
        std::vector<Label>(delta, 0));
}

} // namespace lcl
