#pragma once

#include "lcl/core.hpp"
#include "lcl/io.hpp"

#include <boost/math/distributions/beta.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lcl {

// Port of a node at the boundary of a ball: a real edge whose far end is not
// part of the view.
inline constexpr int kHidden = -2;

struct BallPort
{
    int to = kVirtual; // ball node index, kVirtual, or kHidden
    int to_port = -1;
    int color = -1;
};

struct BallNode
{
    int vertex = -1;    // instance vertex; only the engine and tape access use it
    std::uint64_t id = 0;
    int depth = 0;
    std::vector<BallPort> ports;
};

// The radius-r view of a vertex: everything within distance r, except that the
// nodes at depth exactly r only show which of their ports are real (and the
// edge colors), not where those edges go.
struct BallView
{
    long n = 0;
    int radius = 0;
    int delta = 0;
    std::vector<BallNode> nodes; // BFS order, node 0 is the center
    bool complete = false;       // the view determines the whole component
    const RandomSource * tape = nullptr;

    auto center() const -> const BallNode & { return nodes.front(); }

    auto random_word(int node, std::uint64_t index) const -> std::uint64_t
    {
        if (!tape)
            throw std::logic_error("ball view carries no random tapes");
        return tape->word(static_cast<std::uint64_t>(nodes.at(node).vertex), index);
    }

    // Canonical port-ordered DFS serialization, used as lookup-table key.
    // Node: "[id;e0,e1,...]" (depth-r nodes still list their port kinds).
    // Entry: "v" virtual, otherwise "<color>/<far port>:" followed by a nested
    // node, "^" for the edge back to the DFS parent, "#k" for an already
    // written node with preorder index k, or "?" for a hidden endpoint.
    auto key() const -> std::string
    {
        std::string out;
        std::vector<int> pre(nodes.size(), -1);
        int counter = 0;
        std::function<void(int, int, int)> write = [&](int x, int parent, int parent_port) {
            pre[x] = counter++;
            out += '[';
            out += std::to_string(nodes[x].id);
            out += ';';
            const auto & ps = nodes[x].ports;
            for (int p = 0; p < static_cast<int>(ps.size()); ++p) {
                if (p)
                    out += ',';
                const auto & bp = ps[p];
                if (bp.to == kVirtual) {
                    out += 'v';
                    continue;
                }
                out += std::to_string(bp.color);
                out += '/';
                out += std::to_string(bp.to_port);
                out += ':';
                if (bp.to == kHidden)
                    out += '?';
                else if (bp.to == parent && p == parent_port)
                    out += '^';
                else if (pre[bp.to] >= 0) {
                    out += '#';
                    out += std::to_string(pre[bp.to]);
                }
                else
                    write(bp.to, x, bp.to_port);
            }
            out += ']';
        };
        write(0, -1, -1);
        return out;
    }
};

inline auto build_ball(const PortGraph & g, int center, int r, const std::vector<std::uint64_t> & ids, long n,
    const RandomSource * tape = nullptr) -> BallView
{
    BallView b;
    b.n = n;
    b.radius = r;
    b.delta = g.delta();
    b.tape = tape;
    std::unordered_map<int, int> index;
    auto add = [&](int v, int depth) {
        BallNode node;
        node.vertex = v;
        node.id = ids.empty() ? static_cast<std::uint64_t>(v) : ids[v];
        node.depth = depth;
        node.ports.resize(g.delta());
        index.emplace(v, static_cast<int>(b.nodes.size()));
        b.nodes.push_back(std::move(node));
    };
    add(center, 0);
    bool frontier_nonempty = false;
    for (std::size_t i = 0; i < b.nodes.size(); ++i) {
        int v = b.nodes[i].vertex;
        int depth = b.nodes[i].depth;
        if (depth == r && depth > 0)
            frontier_nonempty = true;
        for (int p = 0; p < g.delta(); ++p) {
            const auto & pt = g.port(v, p);
            BallPort bp;
            if (pt.to != kVirtual) {
                bp.to_port = pt.to_port;
                bp.color = g.color(pt.edge);
                if (depth == r)
                    bp.to = kHidden;
                else {
                    auto it = index.find(pt.to);
                    if (it == index.end()) {
                        add(pt.to, depth + 1);
                        bp.to = static_cast<int>(b.nodes.size()) - 1;
                    }
                    else
                        bp.to = it->second;
                }
            }
            b.nodes[i].ports[p] = bp;
        }
    }
    bool hidden = false;
    for (auto & node : b.nodes)
        for (auto & bp : node.ports)
            hidden |= bp.to == kHidden;
    b.complete = !hidden;
    (void)frontier_nonempty;
    return b;
}

class LocalAlgorithm
{
public:
    virtual ~LocalAlgorithm() = default;
    virtual auto radius(long n) const -> int = 0;
    virtual auto evaluate(const BallView & ball) const -> std::vector<Label> = 0;
};

class FunctionAlgorithm : public LocalAlgorithm
{
public:
    using Radius = std::function<int(long)>;
    using Eval = std::function<std::vector<Label>(const BallView &)>;

    FunctionAlgorithm(Radius r, Eval e) : r_(std::move(r)), e_(std::move(e)) {}
    FunctionAlgorithm(int r, Eval e) : r_([r](long) { return r; }), e_(std::move(e)) {}

    auto radius(long n) const -> int override { return r_(n); }
    auto evaluate(const BallView & ball) const -> std::vector<Label> override { return e_(ball); }

private:
    Radius r_;
    Eval e_;
};

// A constant-radius algorithm given as data: canonical ball key -> labels.
// Keys missing from the table fall back to the default output when one is set.
class LookupTableAlgorithm : public LocalAlgorithm
{
public:
    LookupTableAlgorithm() = default;
    LookupTableAlgorithm(int r, std::map<std::string, std::vector<Label>> table,
        std::optional<std::vector<Label>> fallback = std::nullopt) :
        r_(r), table_(std::move(table)), fallback_(std::move(fallback))
    {
    }

    auto radius(long) const -> int override { return r_; }
    auto evaluate(const BallView & ball) const -> std::vector<Label> override
    {
        auto it = table_.find(ball.key());
        if (it != table_.end())
            return it->second;
        if (fallback_)
            return *fallback_;
        throw std::out_of_range("lookup table has no entry for ball " + ball.key());
    }

    auto table() const -> const std::map<std::string, std::vector<Label>> & { return table_; }
    auto fallback() const -> const std::optional<std::vector<Label>> & { return fallback_; }
    auto fixed_radius() const -> int { return r_; }

    auto to_json(const LclProblem & p) const -> json
    {
        auto names = [&](const std::vector<Label> & ls) {
            json a = json::array();
            for (auto l : ls)
                a.push_back(p.name(l));
            return a;
        };
        json t = json::object();
        for (auto & [k, v] : table_)
            t[k] = names(v);
        json j{{"radius", r_}, {"table", t}};
        if (fallback_)
            j["default"] = names(*fallback_);
        return j;
    }

    static auto from_json(const LclProblem & p, const json & j) -> LookupTableAlgorithm
    {
        try {
            auto labels = [&](const json & a) {
                std::vector<Label> ls;
                for (auto & x : a)
                    ls.push_back(p.label_id(x.get<std::string>()));
                if (static_cast<int>(ls.size()) != p.delta())
                    throw InputError("lookup table output has wrong arity");
                return ls;
            };
            std::map<std::string, std::vector<Label>> t;
            for (auto & [k, v] : j.at("table").items())
                t[k] = labels(v);
            std::optional<std::vector<Label>> fb;
            if (j.contains("default"))
                fb = labels(j.at("default"));
            return LookupTableAlgorithm(j.at("radius").get<int>(), std::move(t), std::move(fb));
        }
        catch (const json::exception & e) {
            throw InputError(std::string("lookup table: ") + e.what());
        }
        catch (const std::invalid_argument & e) {
            throw InputError(std::string("lookup table: ") + e.what());
        }
    }

private:
    int r_ = 0;
    std::map<std::string, std::vector<Label>> table_;
    std::optional<std::vector<Label>> fallback_;
};

class UniformAlgorithm
{
public:
    virtual ~UniformAlgorithm() = default;
    // nullopt means "need a larger ball".
    virtual auto evaluate(const BallView & ball) const -> std::optional<std::vector<Label>> = 0;
};

class FunctionUniformAlgorithm : public UniformAlgorithm
{
public:
    using Eval = std::function<std::optional<std::vector<Label>>(const BallView &)>;
    explicit FunctionUniformAlgorithm(Eval e) : e_(std::move(e)) {}
    auto evaluate(const BallView & ball) const -> std::optional<std::vector<Label>> override { return e_(ball); }

private:
    Eval e_;
};

struct RunStats
{
    int radius = 0;                  // LOCAL radius, or max coding radius for uniform runs
    std::vector<int> coding_radii;   // per vertex; -1 for non-terminated vertices
    std::vector<int> non_terminated;
    double seconds = 0;
    std::uint64_t seed = 0;
    std::optional<ValidityReport> validity;
};

inline constexpr int kDefaultIdExponent = 3;

// Distinct identifiers drawn uniformly from [1, n^exponent].
inline auto random_ids(int n, std::uint64_t seed, int exponent = kDefaultIdExponent) -> std::vector<std::uint64_t>
{
    long double range = std::pow(static_cast<long double>(std::max(n, 1)), exponent);
    std::uint64_t hi = range > 4e18L ? std::uint64_t{4000000000000000000ULL} : static_cast<std::uint64_t>(range);
    if (hi < static_cast<std::uint64_t>(n))
        throw std::invalid_argument("identifier range smaller than n");
    Rng rng(mix_words({seed, 0x1d5ULL}));
    std::unordered_set<std::uint64_t> used;
    std::vector<std::uint64_t> ids(n);
    for (int v = 0; v < n; ++v) {
        std::uint64_t x;
        do
            x = 1 + rng.uniform_below(hi);
        while (!used.insert(x).second);
        ids[v] = x;
    }
    return ids;
}

struct LocalRunOptions
{
    std::optional<std::vector<std::uint64_t>> ids; // random ids from `seed` when absent
    std::uint64_t seed = 0;
    std::optional<long> n_override;
    int id_exponent = kDefaultIdExponent;
    int threads = 1;
    const LclProblem * problem = nullptr; // when set, stats carry a validity report
};

inline auto run_local(const LocalAlgorithm & alg, const PortGraph & g, const LocalRunOptions & opt = {})
    -> std::pair<HalfEdgeLabeling, RunStats>
{
    Stopwatch clock;
    int n = g.size();
    std::vector<std::uint64_t> ids = opt.ids ? *opt.ids : random_ids(n, opt.seed, opt.id_exponent);
    if (static_cast<int>(ids.size()) != n)
        throw std::invalid_argument("identifier assignment does not cover every vertex");
    {
        std::unordered_set<std::uint64_t> seen(ids.begin(), ids.end());
        if (static_cast<int>(seen.size()) != n)
            throw std::invalid_argument("identifiers are not injective");
    }
    long claimed = opt.n_override.value_or(n);
    int r = alg.radius(claimed);
    if (r < 0)
        throw std::invalid_argument("negative algorithm radius");
    RandomSource tape{opt.seed};
    HalfEdgeLabeling lab(n, g.delta());
    parallel_for(n, opt.threads, [&](std::size_t v) {
        auto ball = build_ball(g, static_cast<int>(v), r, ids, claimed, &tape);
        auto out = alg.evaluate(ball);
        lab.set_vertex(static_cast<int>(v), out);
    });
    RunStats st;
    st.radius = r;
    st.coding_radii.assign(n, r);
    st.seed = opt.seed;
    if (opt.problem)
        st.validity = validate_labeling(*opt.problem, g, lab);
    st.seconds = clock.seconds();
    return {lab, st};
}

struct UniformRunOptions
{
    std::uint64_t seed = 0;
    std::optional<int> radius_cap; // default: the vertex's eccentricity + 1 (ball = whole component)
    int threads = 1;
    const LclProblem * problem = nullptr;
};

// Labels of non-terminated vertices stay -1 in the returned labeling.
inline auto run_uniform(const UniformAlgorithm & alg, const PortGraph & g, const UniformRunOptions & opt = {})
    -> std::pair<HalfEdgeLabeling, RunStats>
{
    Stopwatch clock;
    int n = g.size();
    RandomSource tape{opt.seed};
    HalfEdgeLabeling lab(n, g.delta());
    std::vector<int> radii(n, -1);
    std::vector<std::uint64_t> ids; // uniform algorithms see vertex indices as ids only through tapes
    parallel_for(n, opt.threads, [&](std::size_t vi) {
        int v = static_cast<int>(vi);
        for (int r = 0;; ++r) {
            if (opt.radius_cap && r > *opt.radius_cap)
                break;
            auto ball = build_ball(g, v, r, ids, n, &tape);
            auto out = alg.evaluate(ball);
            if (out) {
                lab.set_vertex(v, *out);
                radii[v] = r;
                break;
            }
            if (ball.complete)
                break;
        }
    });
    RunStats st;
    st.seed = opt.seed;
    st.coding_radii = radii;
    for (int v = 0; v < n; ++v) {
        if (radii[v] < 0)
            st.non_terminated.push_back(v);
        st.radius = std::max(st.radius, radii[v]);
    }
    if (opt.problem && st.non_terminated.empty())
        st.validity = validate_labeling(*opt.problem, g, lab);
    st.seconds = clock.seconds();
    return {lab, st};
}

inline auto quantile(std::vector<int> xs, double q) -> int
{
    if (xs.empty())
        return 0;
    std::sort(xs.begin(), xs.end());
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
    idx = std::clamp<std::size_t>(idx, 1, xs.size()) - 1;
    return xs[idx];
}

inline auto stats_csv(const RunStats & st) -> std::string
{
    std::string out = "id,coding_radius\n";
    for (std::size_t v = 0; v < st.coding_radii.size(); ++v)
        out += std::to_string(v) + "," + std::to_string(st.coding_radii[v]) + "\n";
    return out;
}

inline auto stats_summary_json(const RunStats & st) -> json
{
    std::vector<int> done;
    for (int r : st.coding_radii)
        if (r >= 0)
            done.push_back(r);
    json j;
    j["vertices"] = st.coding_radii.size();
    j["seed"] = st.seed;
    j["max_radius"] = st.radius;
    j["quantiles"] = {{"p50", quantile(done, 0.5)}, {"p90", quantile(done, 0.9)}, {"p99", quantile(done, 0.99)},
        {"max", quantile(done, 1.0)}};
    j["non_terminated"] = st.non_terminated.size();
    if (st.validity)
        j["valid"] = st.validity->ok;
    return j;
}

// Empirical tail P(R >= t) for t = 0..max over the terminated vertices.
inline auto tail_curve(const std::vector<int> & radii) -> std::vector<double>
{
    int mx = 0;
    for (int r : radii)
        mx = std::max(mx, r);
    std::vector<double> tail(mx + 2, 0.0);
    if (radii.empty())
        return tail;
    for (int r : radii)
        for (int t = 0; t <= std::max(r, 0); ++t)
            tail[t] += 1;
    for (auto & x : tail)
        x /= static_cast<double>(radii.size());
    return tail;
}

struct FailureEstimate
{
    int trials = 0;
    int failures = 0;
    double rate = 0;
    double lo = 0, hi = 0; // Clopper-Pearson interval
};

inline auto clopper_pearson(int failures, int trials, double confidence = 0.95) -> std::pair<double, double>
{
    if (trials < 1)
        throw std::invalid_argument("need at least one trial");
    double a = (1 - confidence) / 2;
    double lo = 0, hi = 1;
    if (failures > 0)
        lo = boost::math::quantile(boost::math::beta_distribution<double>(failures, trials - failures + 1), a);
    if (failures < trials)
        hi = boost::math::quantile(boost::math::beta_distribution<double>(failures + 1, trials - failures), 1 - a);
    return {lo, hi};
}

// `failed(trial)` runs one trial (generator + algorithm + check) and reports
// whether its labeling was invalid.
inline auto estimate_failure(int trials, const std::function<bool(int)> & failed) -> FailureEstimate
{
    if (trials < 1)
        throw std::invalid_argument("trials must be at least 1");
    FailureEstimate e;
    e.trials = trials;
    for (int t = 0; t < trials; ++t)
        e.failures += failed(t) ? 1 : 0;
    e.rate = static_cast<double>(e.failures) / trials;
    std::tie(e.lo, e.hi) = clopper_pearson(e.failures, trials);
    return e;
}

// t1((eps/2) / delta^(t2(eps/2) + 1)) + t2(eps/2)
template <typename F1, typename F2>
auto compose_tail_bound(F1 && t1, F2 && t2, int delta, double eps) -> double
{
    if (!(eps > 0 && eps < 1))
        throw std::invalid_argument("eps must lie in (0, 1)");
    double half = eps / 2;
    double b = t2(half);
    double inner = half / std::pow(static_cast<double>(delta), b + 1);
    if (!(inner >= std::numeric_limits<double>::min()))
        throw std::range_error("composed tail argument underflows a double");
    return t1(inner) + b;
}

// ---- Maximal independent set -------------------------------------------------

// Labels: I (in the set, all ports), P (points at an in-set neighbor), O.
inline auto mis_problem(int delta) -> LclProblem
{
    Config in(delta, 0), out(delta, 2);
    out[0] = 1;
    return LclProblem(delta, {"I", "P", "O"}, {in, canonical(out)}, {{{0, 1}, {0, 2}, {2, 2}}}, false);
}

// Luby's algorithm as a uniform algorithm. In iteration k every undecided
// vertex draws tape word k as priority; local maxima among undecided
// neighbors join, their neighbors drop out. The state after k iterations at a
// node of depth d is determined once d + 2k <= radius. Self-loops are ignored.
class LubyMis : public UniformAlgorithm
{
public:
    enum State : signed char { Undecided = 0, In = 1, Out = 2 };

    auto evaluate(const BallView & ball) const -> std::optional<std::vector<Label>> override
    {
        int m = static_cast<int>(ball.nodes.size());
        // a complete view knows every iteration; each one decides at least the
        // top undecided vertex, so m iterations always suffice
        int r = ball.complete ? 2 * m + 2 : ball.radius;
        int d = ball.delta;
        std::vector<std::vector<int>> nb(m);
        for (int x = 0; x < m; ++x)
            if (ball.nodes[x].depth < r)
                for (auto & bp : ball.nodes[x].ports)
                    if (bp.to >= 0 && bp.to != x)
                        nb[x].push_back(bp.to);
        if (r >= 1 && nb[0].empty())
            return std::vector<Label>(d, 0);
        std::vector<State> state(m, Undecided);
        std::vector<char> joins(m, 0);
        for (int k = 1; 2 * k <= r; ++k) {
            // joining at iteration k is known up to depth r - 2k + 1, the
            // resulting state up to depth r - 2k
            std::fill(joins.begin(), joins.end(), 0);
            for (int x = 0; x < m; ++x) {
                if (ball.nodes[x].depth > r - 2 * k + 1 || state[x] != Undecided)
                    continue;
                auto px = priority(ball, x, k);
                bool best = true;
                for (int y : nb[x])
                    if (state[y] == Undecided && priority(ball, y, k) > px) {
                        best = false;
                        break;
                    }
                joins[x] = best;
            }
            std::vector<State> next = state;
            for (int x = 0; x < m; ++x) {
                if (ball.nodes[x].depth > r - 2 * k || state[x] != Undecided)
                    continue;
                if (joins[x])
                    next[x] = In;
                else
                    for (int y : nb[x])
                        if (joins[y]) {
                            next[x] = Out;
                            break;
                        }
            }
            state = std::move(next);
            if (state[0] == In)
                return std::vector<Label>(d, 0);
            if (state[0] == Out) {
                // point at the neighbor that joined in this iteration on the smallest port
                std::vector<Label> out(d, 2);
                for (int p = 0; p < d; ++p) {
                    int y = ball.nodes[0].ports[p].to;
                    if (y > 0 && joins[y]) {
                        out[p] = 1;
                        return out;
                    }
                }
                throw std::logic_error("luby: dominated vertex without joining neighbor");
            }
        }
        return std::nullopt;
    }

    // Ball radius needed to finish k iterations.
    static auto radius_for_iterations(int k) -> int { return 2 * k; }

private:
    static auto priority(const BallView & ball, int x, int k) -> std::pair<std::uint64_t, int>
    {
        return {ball.random_word(x, static_cast<std::uint64_t>(k)), ball.nodes[x].vertex};
    }
};

inline auto is_maximal_independent(const PortGraph & g, const std::vector<char> & in) -> bool
{
    for (int v = 0; v < g.size(); ++v) {
        bool dominated = in[v];
        for (int w : g.neighbors(v)) {
            if (w == v)
                continue;
            if (in[v] && in[w])
                return false;
            dominated |= in[w] != 0;
        }
        if (!dominated)
            return false;
    }
    return true;
}

// ---- Linial-style color reduction -------------------------------------------

struct ColorReductionStep
{
    long long from; // palette size before
    int q, k;       // polynomials of degree <= k over F_q; new palette q^2
};

inline auto is_prime(long long x) -> bool
{
    if (x < 2)
        return false;
    for (long long d = 2; d * d <= x; ++d)
        if (x % d == 0)
            return false;
    return true;
}

// Polynomial reduction schedule from m colors with max degree delta: pick
// k >= 1 and a prime q > delta*k with q^(k+1) >= m minimizing q^2, repeat
// while that strictly shrinks the palette.
inline auto linial_schedule(long long m, int delta) -> std::vector<ColorReductionStep>
{
    std::vector<ColorReductionStep> steps;
    while (true) {
        long long best_q = -1;
        int best_k = -1;
        for (int k = 1; k <= 64; ++k) {
            long long q = static_cast<long long>(delta) * k + 1;
            long double root = std::pow(static_cast<long double>(m), 1.0L / (k + 1));
            q = std::max<long long>(q, static_cast<long long>(std::floor(root)));
            for (;; ++q) {
                if (!is_prime(q))
                    continue;
                long double pw = std::pow(static_cast<long double>(q), k + 1);
                if (pw >= static_cast<long double>(m))
                    break;
            }
            if (best_q < 0 || q < best_q) {
                best_q = q;
                best_k = k;
            }
        }
        if (best_q * best_q >= m)
            break;
        steps.push_back({m, static_cast<int>(best_q), best_k});
        m = best_q * best_q;
    }
    return steps;
}

inline auto final_palette(long long m, int delta) -> long long
{
    auto s = linial_schedule(m, delta);
    return s.empty() ? m : static_cast<long long>(s.back().q) * s.back().q;
}


// Round-synchronous color reduction on an arbitrary graph given as adjacency
// lists. `limit[v]` is the last round whose value at v is needed (or
// computable); vertices past their limit keep stale colors that are never
// read. Returns the colors after all rounds. Also used centrally (limit = all
// rounds) by the edge-coloring application.
inline auto reduce_colors(const std::vector<std::vector<int>> & adj, std::vector<long long> color, long long m,
    int delta, int target, const std::vector<int> & limit) -> std::vector<long long>
{
    auto steps = linial_schedule(m, delta);
    int n = static_cast<int>(adj.size());
    int round = 0;
    for (auto & s : steps) {
        ++round;
        // coefficients (base-q digits) once per vertex, values by Horner on demand
        std::vector<std::vector<long long>> coef(n);
        for (int v = 0; v < n; ++v) {
            if (limit[v] < round - 1)
                continue;
            long long c = color[v];
            coef[v].resize(s.k + 1);
            for (int i = 0; i <= s.k; ++i) {
                coef[v][i] = c % s.q;
                c /= s.q;
            }
        }
        auto value = [&](int v, long long x) {
            long long acc = 0;
            for (int i = s.k; i >= 0; --i)
                acc = (acc * x + coef[v][i]) % s.q;
            return acc;
        };
        std::vector<long long> next = color;
        for (int v = 0; v < n; ++v) {
            if (limit[v] < round)
                continue;
            long long pick = -1;
            for (long long x = 0; x < s.q && pick < 0; ++x) {
                long long fx = value(v, x);
                bool clash = false;
                for (int w : adj[v])
                    if (color[w] != color[v] && value(w, x) == fx) {
                        clash = true;
                        break;
                    }
                if (!clash)
                    pick = x * s.q + fx;
            }
            if (pick < 0)
                throw std::logic_error("polynomial color reduction found no free point");
            next[v] = pick;
        }
        color = std::move(next);
        m = static_cast<long long>(s.q) * s.q;
    }
    for (long long c = m - 1; c >= target; --c) {
        ++round;
        std::vector<long long> next = color;
        for (int v = 0; v < n; ++v) {
            if (limit[v] < round || color[v] != c)
                continue;
            std::vector<char> used(target, 0);
            for (int w : adj[v])
                if (color[w] >= 0 && color[w] < target)
                    used[color[w]] = 1;
            long long pick = -1;
            for (int x = 0; x < target; ++x)
                if (!used[x]) {
                    pick = x;
                    break;
                }
            if (pick < 0)
                throw std::logic_error("class reduction needs target > max degree");
            next[v] = pick;
        }
        color = std::move(next);
    }
    return color;
}

inline auto reduction_rounds(long long m, int delta, int target) -> int
{
    auto steps = linial_schedule(m, delta);
    long long pal = steps.empty() ? m : static_cast<long long>(steps.back().q) * steps.back().q;
    return static_cast<int>(steps.size()) + static_cast<int>(std::max<long long>(0, pal - target));
}

// Centralized form: ids are the initial colors in [0, m).
inline auto color_graph(const std::vector<std::vector<int>> & adj, const std::vector<long long> & ids, long long m,
    int delta, int target) -> std::vector<long long>
{
    int rounds = reduction_rounds(m, delta, target);
    return reduce_colors(adj, ids, m, delta, target, std::vector<int>(adj.size(), rounds));
}

// Deterministic LOCAL vertex coloring with `target` colors (default delta+1)
// from identifiers in [1, n^exponent]; output uses proper_coloring(target)
// labels, the same color on every port.
class LinialColoring : public LocalAlgorithm
{
public:
    explicit LinialColoring(int delta, int target = -1, int exponent = kDefaultIdExponent) :
        delta_(delta), target_(target < 0 ? delta + 1 : target), exponent_(exponent)
    {
        if (target_ <= delta_)
            throw std::invalid_argument("target palette must exceed the max degree");
    }

    auto palette(long n) const -> long long
    {
        long double m = std::pow(static_cast<long double>(std::max<long>(n, 2)), exponent_) + 1;
        return m > 4e18L ? 4000000000000000001LL : static_cast<long long>(m);
    }

    auto radius(long n) const -> int override { return reduction_rounds(palette(n), delta_, target_); }

    auto evaluate(const BallView & ball) const -> std::vector<Label> override
    {
        int R = ball.radius;
        int m = static_cast<int>(ball.nodes.size());
        std::vector<std::vector<int>> adj(m);
        std::vector<long long> color(m);
        std::vector<int> limit(m);
        long long pal = palette(ball.n);
        for (int x = 0; x < m; ++x) {
            const auto & node = ball.nodes[x];
            if (node.id >= static_cast<std::uint64_t>(pal))
                throw std::invalid_argument("identifier outside [n^C]");
            color[x] = static_cast<long long>(node.id);
            limit[x] = R - node.depth;
            std::set<int> nb;
            for (auto & bp : node.ports)
                if (bp.to >= 0 && bp.to != x)
                    nb.insert(bp.to);
            adj[x].assign(nb.begin(), nb.end());
        }
        auto out = reduce_colors(adj, color, pal, delta_, target_, limit);
        return std::vector<Label>(ball.delta, static_cast<Label>(out[0]));
    }

private:
    int delta_, target_, exponent_;
};

} // namespace lcl
