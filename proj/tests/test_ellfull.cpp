#include "lcl/builtins.hpp"
#include "lcl/core.hpp"
#include "lcl/ellfull.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace lcl;
using namespace lcl::oracle;

namespace {

auto coloring(int k, int delta = 3) -> LclProblem { return make_builtin("proper_coloring", delta, {k, {}}); }

auto cfg(const LclProblem & p, std::initializer_list<const char *> names) -> Config
{
    Config c;
    for (auto n : names)
        c.push_back(p.label_id(n));
    return canonical(c);
}

auto random_small_tree(int n, int delta, Rng & rng) -> PortGraph
{
    std::vector<int> parent(n, -1), deg(n, 0);
    for (int v = 1; v < n; ++v) {
        std::vector<int> open;
        for (int u = 0; u < v; ++u)
            if (deg[u] < delta)
                open.push_back(u);
        int u = open[rng.uniform_below(open.size())];
        parent[v] = u;
        ++deg[u];
        ++deg[v];
    }
    return tree_from_parents(parent, delta);
}

// Same tree under a vertex relabeling and independent per-vertex port shuffles.
auto shuffle_tree(const PortGraph & t, const std::vector<int> & perm, Rng & rng) -> PortGraph
{
    int n = t.size(), d = t.delta();
    std::vector<std::vector<int>> port_perm(n, std::vector<int>(d));
    for (auto & pp : port_perm) {
        std::iota(pp.begin(), pp.end(), 0);
        for (int i = d - 1; i > 0; --i)
            std::swap(pp[i], pp[rng.uniform_below(i + 1)]);
    }
    PortGraph g(n, d);
    for (auto & e : t.edges())
        g.add_edge(perm[e.u], perm[e.v], port_perm[e.u][e.pu], port_perm[e.v][e.pv]);
    return g;
}

// Checks an HFunction against brute-force enumeration on every tuple.
auto agrees_with_brute(const LclProblem & p, const PortGraph & t, const std::vector<int> & poles, const HFunction & h)
    -> bool
{
    auto yes = brute_signature(p, t, poles);
    std::vector<std::vector<Config>> domains;
    for (int s : h.pole_sizes)
        domains.push_back(multisets(p.label_count(), s));
    std::vector<std::size_t> idx(domains.size(), 0);
    long seen = 0;
    while (true) {
        std::vector<Config> tuple;
        for (std::size_t i = 0; i < domains.size(); ++i)
            tuple.push_back(domains[i][idx[i]]);
        if (h.yes(tuple) != (yes.count(tuple) > 0))
            return false;
        ++seen;
        std::size_t i = domains.size();
        while (i > 0 && ++idx[i - 1] == domains[i - 1].size())
            idx[--i] = 0;
        if (i == 0)
            break;
    }
    return seen == static_cast<long>(h.bits.size());
}

auto single_vertex_chain(int k) -> std::vector<RootedTree>
{
    return std::vector<RootedTree>(k, RootedTree{PortGraph(1, 3), 0});
}

} // namespace

// ---- PathAutomaton -------------------------------------------------------------------

TEST(PathAutomaton, StatesAreConfigIncomingPairs)
{
    auto p = make_builtin("perfect_matching", 3);
    PathAutomaton a(p, {cfg(p, {"M", "U", "U"})});
    ASSERT_EQ(a.size(), 2);
    // incoming M leaves U,U: only U-U continues; incoming U leaves M,U
    for (int i = 0; i < a.size(); ++i) {
        auto [c, in] = a.state(i);
        std::set<Label> next;
        for (int j : a.successors(i))
            next.insert(a.state(j).second);
        if (p.name(in) == "M")
            EXPECT_EQ(next, (std::set<Label>{p.label_id("U")}));
        else
            EXPECT_EQ(next, (std::set<Label>{p.label_id("M"), p.label_id("U")}));
    }
}

TEST(PathAutomaton, MultiplicityRule)
{
    // with only {a,a} allowed, a middle vertex passes a straight through only
    // if its config holds a twice
    auto incoming_a_moves = [](Config c) {
        LclProblem p(3, {"a", "b", "c"}, {c}, {{{0, 0}}}, false);
        PathAutomaton aut(p, p.vertex_configs());
        for (int i = 0; i < aut.size(); ++i)
            if (aut.state(i).second == 0)
                return !aut.successors(i).empty();
        throw std::logic_error("no state with incoming a");
    };
    EXPECT_FALSE(incoming_a_moves({0, 1, 2}));
    EXPECT_TRUE(incoming_a_moves({0, 0, 1}));
}

// ---- is_ell_full ---------------------------------------------------------------------

TEST(IsEllFull, ThreeColoringIsThreeFull)
{
    auto p = coloring(3);
    auto c = is_ell_full(p, p.vertex_configs(), 3);
    EXPECT_TRUE(c.full);
    EXPECT_EQ(c.minimal_ell, 3);
    EXPECT_FALSE(c.counterexample);
}

TEST(IsEllFull, ThreeColoringIsNotTwoFull)
{
    auto p = coloring(3);
    auto c = is_ell_full(p, p.vertex_configs(), 2);
    EXPECT_FALSE(c.full);
    ASSERT_TRUE(c.counterexample);
    auto & x = *c.counterexample;
    EXPECT_EQ(x.k, 2);
    EXPECT_EQ(x.a1, x.a2);
    EXPECT_EQ(x.c1, x.c2);
    EXPECT_EQ(x.c1, (Config{x.a1, x.a1, x.a1}));
    EXPECT_FALSE(naive_path_ok(p, c.subset, x.a1, x.a2, x.k));
}

TEST(IsEllFull, PerfectMatchingSingleConfigIsFourFull)
{
    auto p = make_builtin("perfect_matching", 3);
    std::vector<Config> s{cfg(p, {"M", "U", "U"})};
    EXPECT_TRUE(is_ell_full(p, s, 4).full);
    Label m = p.label_id("M"), u = p.label_id("U");
    for (int k = 4; k <= 20; ++k)
        for (Label a1 : {m, u})
            for (Label a2 : {m, u})
                EXPECT_TRUE(naive_path_ok(p, s, a1, a2, k)) << k;
    for (int k = 4; k <= 8; ++k)
        for (Label a1 : {m, u})
            for (Label a2 : {m, u})
                EXPECT_TRUE(brute_path_ok(p, s, a1, a2, k)) << k;
    // k = 3 with both endpoints pointing M inward has no middle vertex that
    // accepts two matched edges
    auto c3 = is_ell_full(p, s, 3);
    EXPECT_FALSE(c3.full);
    EXPECT_EQ(c3.counterexample->k, 3);
    EXPECT_EQ(c3.minimal_ell, 4);
}

TEST(IsEllFull, TwoColoringNeverFull)
{
    auto p = coloring(2);
    for (int ell : {2, 5, 20, 50}) {
        auto c = is_ell_full(p, p.vertex_configs(), ell);
        EXPECT_FALSE(c.full);
        EXPECT_FALSE(c.minimal_ell);
        ASSERT_TRUE(c.counterexample);
        EXPECT_GE(c.counterexample->k, ell);
        auto & x = *c.counterexample;
        EXPECT_FALSE(naive_path_ok(p, c.subset, x.a1, x.a2, x.k));
    }
}

TEST(IsEllFull, RejectsBadInput)
{
    auto p = coloring(3);
    EXPECT_THROW(is_ell_full(p, {}, 3), std::invalid_argument);
    EXPECT_THROW(is_ell_full(p, p.vertex_configs(), 1), std::invalid_argument);
    EXPECT_THROW(is_ell_full(p, {Config{0, 0, 1}}, 3), std::invalid_argument);
    LclProblem ec(3, {"x"}, {{0, 0, 0}}, {{{0, 0}}, {{0, 0}}, {{0, 0}}}, true);
    EXPECT_THROW(is_ell_full(ec, ec.vertex_configs(), 3), std::invalid_argument);
    EXPECT_THROW(find_ell_full(ec, 5), std::invalid_argument);
}

TEST(IsEllFull, AgreesWithNaiveEnumeration)
{
    Rng rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto p = random_problem(rng);
        std::vector<Config> s;
        for (auto & c : p.vertex_configs())
            if (rng.uniform_below(3) != 0)
                s.push_back(c);
        if (s.empty())
            s.push_back(p.vertex_configs().front());
        for (int ell = 2; ell <= 12; ++ell) {
            auto c = is_ell_full(p, s, ell);
            ASSERT_EQ(c.full, naive_ell_full(p, s, ell)) << trial << " ell " << ell;
            ++checked;
            if (!c.full) {
                auto & x = *c.counterexample;
                EXPECT_GE(x.k, ell);
                EXPECT_FALSE(naive_path_ok(p, s, x.a1, x.a2, x.k));
                if (x.k <= 6) {
                    EXPECT_FALSE(brute_path_ok(p, s, x.a1, x.a2, x.k));
                }
            }
            // the minimal ell is consistent with the verdict at every ell
            EXPECT_EQ(c.full, c.minimal_ell && *c.minimal_ell <= ell);
            // matrix sequence entered its cycle with a positive period
            EXPECT_GE(c.period, 1);
            EXPECT_GE(c.preperiod, 0);
        }
    }
    EXPECT_EQ(checked, 300 * 11);
}

TEST(IsEllFull, NaiveOraclesAgreeOnShortPaths)
{
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = random_problem(rng);
        auto & s = p.vertex_configs();
        for (int k = 2; k <= 6; ++k)
            for (Label a1 = 0; a1 < p.label_count(); ++a1)
                for (Label a2 = 0; a2 < p.label_count(); ++a2)
                    ASSERT_EQ(naive_path_ok(p, s, a1, a2, k), brute_path_ok(p, s, a1, a2, k));
    }
}

// ---- find_ell_full -------------------------------------------------------------------

TEST(FindEllFull, ThreeColoring)
{
    auto p = coloring(3);
    auto r = find_ell_full(p, 8);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.best->ell, 3);
    EXPECT_EQ(r.best->subset, p.vertex_configs());
}

TEST(FindEllFull, TwoColoringNone)
{
    auto r = find_ell_full(coloring(2), 20);
    EXPECT_FALSE(r.best);
    EXPECT_EQ(r.ell_max, 20);
    EXPECT_EQ(r.inspected, 3); // both configs, then each alone
}

TEST(FindEllFull, EdgeGrabbing)
{
    auto p = make_builtin("edge_grabbing", 3);
    auto r = find_ell_full(p, 8);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.best->ell, 3);
    EXPECT_EQ(r.best->subset, (std::vector<Config>{cfg(p, {"g", "n", "n"})}));
    for (int k = 3; k <= 14; ++k)
        for (Label a1 = 0; a1 < 2; ++a1)
            for (Label a2 = 0; a2 < 2; ++a2)
                EXPECT_TRUE(naive_path_ok(p, r.best->subset, a1, a2, k));
}

TEST(FindEllFull, CapExceeded)
{
    auto p = coloring(3);
    EXPECT_THROW(find_ell_full(p, 8, 2), CapExceeded);
    EXPECT_THROW(find_ell_full(p, 1), std::invalid_argument);
}

TEST(FindEllFull, CertificatesReplay)
{
    Rng rng(77);
    int found = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto p = random_problem(rng);
        auto r = find_ell_full(p, 10);
        if (!r.best)
            continue;
        ++found;
        auto again = is_ell_full(p, r.best->subset, r.best->ell);
        EXPECT_TRUE(again.full);
        EXPECT_EQ(again.minimal_ell, r.best->ell);
        EXPECT_TRUE(naive_ell_full(p, r.best->subset, r.best->ell));
        if (r.best->ell > 2) {
            EXPECT_FALSE(naive_ell_full(p, r.best->subset, r.best->ell - 1));
        }
    }
    EXPECT_GT(found, 20);
}

TEST(Certificate, JsonRoundTrip)
{
    auto p = coloring(3);
    for (int ell : {2, 3}) {
        auto c = is_ell_full(p, p.vertex_configs(), ell);
        auto j = certificate_to_json(p, c);
        EXPECT_EQ(j["verdict"], ell == 3 ? "Full" : "NotFull");
        EXPECT_EQ(j.contains("counterexample"), ell == 2);
        auto back = certificate_from_json(p, j);
        EXPECT_EQ(back.subset, c.subset);
        EXPECT_EQ(back.ell, c.ell);
        EXPECT_EQ(back.full, c.full);
        EXPECT_EQ(back.minimal_ell, c.minimal_ell);
        EXPECT_EQ(is_ell_full(p, back.subset, back.ell).full, c.full);
    }
    EXPECT_THROW(certificate_from_json(p, json::parse(R"({"subset":[["x"]],"ell":3,"verdict":"Full"})")), InputError);
    EXPECT_THROW(certificate_from_json(p, json::parse(R"({"ell":3})")), InputError);
}

// ---- class_signature -------------------------------------------------------------------

TEST(ClassSignature, SingleVertexThreeColoring)
{
    auto p = coloring(3);
    auto h = class_signature(p, PortGraph(1, 3), {0});
    ASSERT_EQ(h.pole_sizes, std::vector<int>{3});
    EXPECT_EQ(h.count_yes(), 3);
    for (Label a = 0; a < 3; ++a)
        EXPECT_TRUE(h.yes({Config{a, a, a}}));
    EXPECT_FALSE(h.yes({Config{0, 0, 1}}));
}

TEST(ClassSignature, SingleVertexPerfectMatching)
{
    auto p = make_builtin("perfect_matching", 3);
    auto h = class_signature(p, PortGraph(1, 3), {0});
    for (auto & m : multisets(2, 3)) {
        int ms = static_cast<int>(std::count(m.begin(), m.end(), p.label_id("M")));
        EXPECT_EQ(h.yes({m}), ms == 1);
    }
}

TEST(ClassSignature, IsomorphismInvariant)
{
    Rng rng(9);
    auto p = coloring(3);
    auto q = make_builtin("perfect_matching", 3);
    for (int trial = 0; trial < 30; ++trial) {
        auto t = random_small_tree(4, 3, rng);
        std::vector<int> perm(4);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = 3; i > 0; --i)
            std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
        auto u = shuffle_tree(t, perm, rng);
        std::vector<int> poles{0, 2};
        std::vector<int> mapped{perm[0], perm[2]};
        EXPECT_EQ(class_signature(p, t, poles), class_signature(p, u, mapped));
        EXPECT_EQ(class_signature(q, t, poles), class_signature(q, u, mapped));
    }
}

TEST(ClassSignature, AgreesWithBruteForce)
{
    Rng rng(31);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto p = random_problem(rng);
        int n = 1 + static_cast<int>(rng.uniform_below(5));
        auto t = random_small_tree(n, p.delta(), rng);
        std::vector<int> poles;
        for (int v = 0; v < n; ++v)
            if (t.degree(v) < p.delta() && poles.size() < 3 && rng.uniform_below(2))
                poles.push_back(v);
        auto h = class_signature(p, t, poles);
        EXPECT_TRUE(agrees_with_brute(p, t, poles, h)) << trial;
        ++checked;
    }
    EXPECT_EQ(checked, 150);
}

TEST(ClassSignature, FixedLabelsRestrict)
{
    auto p = coloring(3);
    PortGraph t(2, 3);
    t.add_edge(0, 1, 0, 0);
    HalfEdgeLabeling fixed(2, 3, -1);
    fixed.set(0, 1, 2);
    auto h = class_signature(p, t, {0, 1}, &fixed);
    for (Label a = 0; a < 3; ++a)
        for (Label b = 0; b < 3; ++b)
            EXPECT_EQ(h.yes({Config{a, a}, Config{b, b}}), a == 2 && b != 2);
    auto free = class_signature(p, t, {0, 1});
    EXPECT_EQ(free.count_yes(), 6);
}

TEST(ClassSignature, Errors)
{
    auto p = coloring(3);
    EXPECT_THROW(class_signature(p, PortGraph(1, 3), {0, 0}), std::invalid_argument);
    EXPECT_THROW(class_signature(p, PortGraph(1, 3), {1}), std::invalid_argument);
    EXPECT_THROW(class_signature(p, PortGraph(1, 4), {0}), std::invalid_argument);
    EXPECT_THROW(class_signature(p, gen_tree(TreeKind::path(15), 3, 0), {0}), CapExceeded);
    EXPECT_THROW(class_signature(p, PortGraph(2, 3), {0}), std::invalid_argument); // not connected
}

// Replacing a pole-subtree by one with the same signature leaves the outer
// signature unchanged.
TEST(ClassSignature, SubtreeReplacement)
{
    Rng rng(404);
    for (auto p : {coloring(3), make_builtin("perfect_matching", 3), make_builtin("edge_grabbing", 3)}) {
        // bucket small rooted trees (root degree <= 2) by one-pole signature
        std::map<std::vector<char>, std::vector<RootedTree>> buckets;
        for (int trial = 0; trial < 200; ++trial) {
            int n = 1 + static_cast<int>(rng.uniform_below(5));
            auto t = random_small_tree(n, 3, rng);
            int root = static_cast<int>(rng.uniform_below(n));
            if (t.degree(root) > 2)
                continue;
            auto h = class_signature(p, t, {root});
            auto key = h.bits;
            key.push_back(static_cast<char>(h.pole_sizes[0]));
            buckets[key].push_back({t, root});
        }
        int replaced = 0;
        for (auto & [key, trees] : buckets) {
            if (trees.size() < 2)
                continue;
            for (int trial = 0; trial < 5; ++trial) {
                int m = 1 + static_cast<int>(rng.uniform_below(4));
                auto outer = random_small_tree(m, 3, rng);
                int attach = -1;
                for (int v = 0; v < m; ++v)
                    if (outer.degree(v) < 3)
                        attach = v;
                std::vector<int> poles;
                for (int v = 0; v < m; ++v)
                    if (outer.degree(v) + (v == attach) < 3 && poles.size() < 2)
                        poles.push_back(v);
                auto [g1, r1] = concatenate({{outer, attach}, trees[0]});
                auto [g2, r2] = concatenate({{outer, attach}, trees[1 + rng.uniform_below(trees.size() - 1)]});
                EXPECT_EQ(class_signature(p, g1, poles), class_signature(p, g2, poles));
                ++replaced;
            }
        }
        EXPECT_GT(replaced, 0);
    }
}

// ---- pump_split -----------------------------------------------------------------------

TEST(PumpSplit, SingleVertexChainRepeats)
{
    auto p = coloring(3);
    auto split = pump_split(p, single_vertex_chain(10));
    ASSERT_TRUE(split);
    auto [a, b] = *split;
    EXPECT_GE(a, 1);
    EXPECT_GE(b - a, 1);
    EXPECT_LE(b, 10);
    // earliest: no repetition among the prefixes before b
    std::vector<HFunction> sig;
    for (int i = 2; i < b; ++i) {
        auto [g, roots] = concatenate(single_vertex_chain(i));
        auto h = class_signature(p, g, {roots.front(), roots.back()});
        for (auto & s : sig)
            EXPECT_NE(s, h);
        sig.push_back(h);
    }
}

TEST(PumpSplit, ShortChains)
{
    auto p = coloring(3);
    EXPECT_FALSE(pump_split(p, single_vertex_chain(1)));
    EXPECT_FALSE(pump_split(p, {}));
}

TEST(PumpSplit, PumpingPreservesTheClass)
{
    Rng rng(12);
    for (auto p : {coloring(3), make_builtin("perfect_matching", 3)}) {
        std::vector<RootedTree> chain;
        for (int i = 0; i < 8; ++i) {
            auto t = random_small_tree(1 + static_cast<int>(rng.uniform_below(2)), 3, rng);
            int root = t.degree(0) <= 1 ? 0 : 1;
            chain.push_back({t, root});
        }
        auto split = pump_split(p, chain, 40);
        ASSERT_TRUE(split);
        auto [a, b] = *split;
        std::vector<RootedTree> x(chain.begin(), chain.begin() + a), y(chain.begin() + a, chain.begin() + b),
            z(chain.begin() + b, chain.end());
        std::optional<HFunction> ref;
        for (int i = 0; i <= 3; ++i) {
            auto pumped = x;
            for (int r = 0; r < i; ++r)
                pumped.insert(pumped.end(), y.begin(), y.end());
            pumped.insert(pumped.end(), z.begin(), z.end());
            auto [g, roots] = concatenate(pumped);
            std::vector<int> poles{roots.front(), roots.back()};
            auto h = class_signature(p, g, poles, nullptr, 64);
            if (g.size() <= 7) {
                EXPECT_TRUE(agrees_with_brute(p, g, poles, h));
            }
            if (ref) {
                EXPECT_EQ(h, *ref) << "i = " << i;
            }
            ref = h;
        }
    }
}
