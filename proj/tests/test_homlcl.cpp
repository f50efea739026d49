#include "lcl/builtins.hpp"
#include "lcl/core.hpp"
#include "lcl/homlcl.hpp"
#include "lcl/io.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace lcl;

namespace {

auto random_graph(int n, double p, Rng & rng) -> TargetGraph
{
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform01() < p)
                e.emplace_back(u, v);
    return TargetGraph::unnamed(n, e);
}

auto from_mask(int n, long mask) -> TargetGraph
{
    std::vector<std::pair<int, int>> e;
    int bit = 0;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v, ++bit)
            if (mask >> bit & 1)
                e.emplace_back(u, v);
    return TargetGraph::unnamed(n, e);
}

// Exhaustive proper k-coloring of the included vertices.
auto brute_colorable(const TargetGraph & g, int k, const std::vector<char> & include) -> bool
{
    int n = g.size();
    auto adj = g.adjacency();
    std::vector<int> col(n, -1);
    std::function<bool(int)> go = [&](int v) -> bool {
        if (v == n)
            return true;
        if (!include[v])
            return go(v + 1);
        for (int c = 0; c < k; ++c) {
            bool ok = true;
            for (int w = 0; w < v && ok; ++w)
                ok = !(include[w] && adj[v][w] && col[w] == c);
            if (!ok)
                continue;
            col[v] = c;
            if (go(v + 1))
                return true;
        }
        col[v] = -1;
        return false;
    };
    return go(0);
}

auto brute_chromatic(const TargetGraph & g) -> int
{
    std::vector<char> all(g.size(), 1);
    for (int k = 0;; ++k)
        if (brute_colorable(g, k, all))
            return k;
}

auto brute_hom(const TargetGraph & g, const TargetGraph & h) -> bool
{
    int n = g.size();
    auto ag = g.adjacency(), ah = h.adjacency();
    std::vector<int> m(n, -1);
    std::function<bool(int)> go = [&](int v) -> bool {
        if (v == n)
            return true;
        for (int x = 0; x < h.size(); ++x) {
            bool ok = true;
            for (int w = 0; w < v && ok; ++w)
                ok = !ag[v][w] || ah[x][m[w]];
            if (!ok)
                continue;
            m[v] = x;
            if (go(v + 1))
                return true;
        }
        return false;
    };
    return go(0);
}

// Direct reading of the definition over all pairs of subsets.
auto brute_delta_star(const TargetGraph & g, int delta) -> bool
{
    int n = g.size();
    auto adj = g.adjacency();
    for (long s0 = 0; s0 < 1L << n; ++s0) {
        std::vector<char> out0(n);
        for (int v = 0; v < n; ++v)
            out0[v] = !(s0 >> v & 1);
        if (!brute_colorable(g, delta - 1, out0))
            continue;
        for (long s1 = 0; s1 < 1L << n; ++s1) {
            bool sep = true;
            for (int u = 0; u < n && sep; ++u)
                for (int v = 0; v < n && sep; ++v)
                    if (adj[u][v] && (s0 >> u & 1) && (s1 >> v & 1))
                        sep = false;
            if (!sep)
                continue;
            std::vector<char> out1(n);
            for (int v = 0; v < n; ++v)
                out1[v] = !(s1 >> v & 1);
            if (brute_colorable(g, delta - 1, out1))
                return true;
        }
    }
    return false;
}

auto indices(const std::vector<int> & v) -> std::set<int> { return {v.begin(), v.end()}; }

} // namespace

// ---- Pi_G -------------------------------------------------------------------------------

TEST(HomProblem, K3IsEdgeColoredThreeColoring)
{
    auto p = make_homomorphism_problem(complete_graph(3), 3);
    EXPECT_TRUE(p.edge_colored());
    EXPECT_EQ(p.label_count(), 3);
    EXPECT_EQ(p.edge_color_count(), 3);
    EXPECT_EQ(p.vertex_configs().size(), 3u);
    for (int col = 0; col < 3; ++col)
        for (Label a = 0; a < 3; ++a)
            for (Label b = 0; b < 3; ++b)
                EXPECT_EQ(p.edge_allowed(a, b, col), a != b);
    // agrees with proper 3-coloring on edge-colored trees
    auto q = make_builtin("proper_coloring", 3, {3, {}});
    auto t = gen_tree(TreeKind::random(200), 3, 1);
    HalfEdgeLabeling lab(t.size(), 3);
    Rng rng(1);
    for (int v = 0; v < t.size(); ++v)
        lab.set_vertex(v, std::vector<Label>(3, static_cast<Label>(rng.uniform_below(3))));
    EXPECT_EQ(validate_labeling(p, t, lab).ok, validate_labeling(q, t, lab).ok);
}

TEST(HomProblem, Counts)
{
    auto c5 = make_homomorphism_problem(cycle_graph(5), 3);
    EXPECT_EQ(c5.label_count(), 5);
    for (int col = 0; col < 3; ++col)
        EXPECT_EQ(c5.edge_configs(col).size(), 5u);
    EXPECT_EQ(make_homomorphism_problem(build_H_delta(3), 3).label_count(), 9);
    EXPECT_THROW(make_homomorphism_problem(TargetGraph{}, 3), std::invalid_argument);
    EXPECT_THROW(TargetGraph::unnamed(2, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(TargetGraph::unnamed(2, {{0, 1}, {1, 0}}), std::invalid_argument);
}

// ---- chromatic number ---------------------------------------------------------------------

TEST(Chromatic, Examples)
{
    EXPECT_EQ(chromatic_number(complete_graph(4)), 4);
    EXPECT_EQ(chromatic_number(cycle_graph(5)), 3);
    EXPECT_EQ(chromatic_number(cycle_graph(6)), 2);
    EXPECT_EQ(chromatic_number(build_H_delta(3)), 4);
    EXPECT_EQ(chromatic_number(build_H_delta(4)), 6);
    EXPECT_EQ(chromatic_number(TargetGraph::unnamed(3, {})), 1);
    EXPECT_EQ(chromatic_number(TargetGraph{}), 0);
}

TEST(Chromatic, AgreesWithBruteForce)
{
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_below(8));
        auto g = random_graph(n, rng.uniform01(), rng);
        int chi = chromatic_number(g);
        ASSERT_EQ(chi, brute_chromatic(g)) << trial;
        auto col = k_coloring(g, chi);
        ASSERT_TRUE(col);
        for (auto [u, v] : g.edges)
            EXPECT_NE((*col)[u], (*col)[v]);
        if (chi > 0) {
            EXPECT_FALSE(k_coloring(g, chi - 1));
        }
    }
}

TEST(Chromatic, CapExceeded)
{
    EXPECT_THROW(chromatic_number(TargetGraph::unnamed(41, {})), CapExceeded);
}

// ---- Delta-(*) ------------------------------------------------------------------------------

TEST(DeltaStar, K3)
{
    auto g = complete_graph(3);
    auto w = has_delta_star(g, 3);
    ASSERT_TRUE(w);
    EXPECT_TRUE(validate_delta_star(g, *w, 3));
    // removing one vertex leaves an edge, which needs both of the two colors
    EXPECT_EQ(w->s0.size(), 1u);
    EXPECT_EQ(w->s0, w->s1);
}

TEST(DeltaStar, H3UsesTheConstructionSets)
{
    auto h = build_H_delta(3);
    HDeltaLayout L{2};
    DeltaStarWitness w;
    w.s0 = {L.v0(0), L.v0(1), L.dagger()};
    w.s1 = {L.v1(0), L.v1(1), L.dagger()};
    std::sort(w.s0.begin(), w.s0.end());
    std::sort(w.s1.begin(), w.s1.end());
    w.c0.assign(h.size(), -1);
    w.c1.assign(h.size(), -1);
    // outside S0 sit P and V1: V1 copy j sees exactly the P vertices whose
    // second coordinate differs, so color by the second coordinate
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            w.c0[L.p(i, j)] = j;
            w.c1[L.p(i, j)] = i;
        }
    for (int j = 0; j < 2; ++j)
        w.c0[L.v1(j)] = j;
    for (int i = 0; i < 2; ++i)
        w.c1[L.v0(i)] = i;
    EXPECT_TRUE(validate_delta_star(h, w, 3));
    auto found = has_delta_star(h, 3);
    ASSERT_TRUE(found);
    EXPECT_TRUE(validate_delta_star(h, *found, 3));
}

TEST(DeltaStar, K5HasNone)
{
    EXPECT_FALSE(has_delta_star(complete_graph(5), 3));
    EXPECT_FALSE(brute_delta_star(complete_graph(5), 3));
    // in a clique S0 and S1 can only share one vertex, so K_4 fails although
    // chi(K_4) = 4 = 2*3 - 2
    EXPECT_FALSE(has_delta_star(complete_graph(4), 3));
    EXPECT_FALSE(brute_delta_star(complete_graph(4), 3));
}

TEST(DeltaStar, ValidatorRejects)
{
    auto g = complete_graph(3);
    auto w = *has_delta_star(g, 3);
    auto bad = w;
    bad.s1 = {(w.s0[0] + 1) % 3}; // adjacent to S0
    EXPECT_FALSE(validate_delta_star(g, bad, 3));
    bad = w;
    for (auto & c : bad.c0)
        if (c >= 0)
            c = 0; // the remaining edge becomes monochromatic
    EXPECT_FALSE(validate_delta_star(g, bad, 3));
    bad = w;
    bad.c0.pop_back();
    EXPECT_FALSE(validate_delta_star(g, bad, 3));
}

TEST(DeltaStar, AgreesWithDefinition)
{
    Rng rng(44);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_below(7));
        auto g = random_graph(n, 0.3 + 0.6 * rng.uniform01(), rng);
        auto w = has_delta_star(g, 3);
        ASSERT_EQ(w.has_value(), brute_delta_star(g, 3)) << trial;
        if (w) {
            EXPECT_TRUE(validate_delta_star(g, *w, 3));
        }
    }
}

TEST(DeltaStar, ImpliesChromaticBound)
{
    Rng rng(45);
    int with = 0, small = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 1 + static_cast<int>(rng.uniform_below(12));
        auto g = random_graph(n, rng.uniform01(), rng);
        int chi = chromatic_number(g);
        auto w = has_delta_star(g, 3);
        if (w) {
            ++with;
            EXPECT_LE(chi, 4);
        }
        if (chi <= 3) {
            ++small;
            EXPECT_TRUE(w) << trial;
        }
    }
    EXPECT_GT(with, 50);
    EXPECT_GT(small, 50);
}

TEST(DeltaStar, HigherDelta)
{
    EXPECT_TRUE(has_delta_star(complete_graph(4), 4));
    EXPECT_FALSE(has_delta_star(complete_graph(5), 4));
    EXPECT_EQ(has_delta_star(complete_graph(5), 4).has_value(), brute_delta_star(complete_graph(5), 4));
    auto h4 = build_H_delta(4);
    auto w = has_delta_star(h4, 4);
    ASSERT_TRUE(w);
    EXPECT_TRUE(validate_delta_star(h4, *w, 4));
}

// ---- H_delta ---------------------------------------------------------------------------------

TEST(HDelta, Construction)
{
    for (int d : {3, 4, 5}) {
        auto h = build_H_delta(d);
        int k = d - 1;
        HDeltaLayout L{k};
        EXPECT_EQ(h.size(), k * k + 2 * k + 1);
        auto adj = h.adjacency();
        int dagger_deg = 0;
        for (int x = 0; x < h.size(); ++x)
            dagger_deg += adj[L.dagger()][x];
        EXPECT_EQ(dagger_deg, k * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                EXPECT_TRUE(adj[L.dagger()][L.p(i, j)]);
                for (int o = 0; o < k; ++o) {
                    EXPECT_EQ(adj[L.v0(i)][L.p(o, j)], o != i);
                    EXPECT_EQ(adj[L.v1(j)][L.p(i, o)], o != j);
                }
                for (int i2 = 0; i2 < k; ++i2)
                    for (int j2 = 0; j2 < k; ++j2)
                        EXPECT_EQ(adj[L.p(i, j)][L.p(i2, j2)], i != i2 && j != j2);
            }
        // no edges between V0 and V1, or from dagger to V0/V1
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                EXPECT_FALSE(adj[L.v0(i)][L.v1(j)]);
                EXPECT_FALSE(adj[L.dagger()][L.v0(i)]);
                EXPECT_FALSE(adj[L.dagger()][L.v1(j)]);
            }
        EXPECT_EQ(h.names[L.dagger()], "dagger");
    }
    EXPECT_THROW(build_H_delta(2), std::invalid_argument);
}

// ---- theta ----------------------------------------------------------------------------------

TEST(Theta, K3)
{
    auto g = complete_graph(3);
    auto w = *has_delta_star(g, 3);
    auto theta = theta_map(g, w, 3);
    HDeltaLayout L{2};
    int center = w.s0[0];
    EXPECT_EQ(theta[center], L.dagger());
    std::vector<std::pair<int, int>> coords;
    for (int v = 0; v < 3; ++v)
        if (v != center) {
            ASSERT_GE(theta[v], L.p(0, 0));
            ASSERT_LT(theta[v], L.dagger());
            int x = theta[v] - L.p(0, 0);
            coords.emplace_back(x / 2, x % 2);
        }
    EXPECT_NE(coords[0].first, coords[1].first);
    EXPECT_NE(coords[0].second, coords[1].second);
    EXPECT_TRUE(is_homomorphism(g, build_H_delta(3), theta));
}

TEST(Theta, H3ToItself)
{
    auto h = build_H_delta(3);
    auto w = *has_delta_star(h, 3);
    auto theta = theta_map(h, w, 3);
    EXPECT_TRUE(is_homomorphism(h, h, theta));
}

TEST(Theta, RandomWitnesses)
{
    Rng rng(46);
    auto h3 = build_H_delta(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = random_graph(1 + static_cast<int>(rng.uniform_below(10)), rng.uniform01(), rng);
        auto w = has_delta_star(g, 3);
        if (!w)
            continue;
        auto theta = theta_map(g, *w, 3);
        EXPECT_TRUE(is_homomorphism(g, h3, theta));
        auto both = indices(w->s0);
        for (int v : w->s1)
            if (both.count(v)) {
                EXPECT_EQ(theta[v], HDeltaLayout{2}.dagger());
            }
    }
}

TEST(Theta, RejectsInvalidWitness)
{
    auto g = complete_graph(3);
    auto w = *has_delta_star(g, 3);
    w.s1 = {(w.s0[0] + 1) % 3};
    EXPECT_THROW(theta_map(g, w, 3), std::invalid_argument);
}

// ---- homomorphisms ----------------------------------------------------------------------------

TEST(Homomorphism, OddCycleToK2)
{
    EXPECT_FALSE(has_homomorphism(cycle_graph(5), complete_graph(2)));
    auto m = has_homomorphism(cycle_graph(6), complete_graph(2));
    ASSERT_TRUE(m);
    EXPECT_TRUE(is_homomorphism(cycle_graph(6), complete_graph(2), *m));
    EXPECT_TRUE(has_homomorphism(cycle_graph(7), cycle_graph(5)));
    EXPECT_FALSE(has_homomorphism(cycle_graph(5), cycle_graph(7)));
}

TEST(Homomorphism, CompleteTargetsMatchChromaticNumber)
{
    // every graph on up to 5 vertices, and a sample on 6 and 7
    for (int n = 1; n <= 5; ++n)
        for (long mask = 0; mask < 1L << (n * (n - 1) / 2); ++mask) {
            auto g = from_mask(n, mask);
            int chi = chromatic_number(g);
            for (int k = 1; k <= 4; ++k)
                ASSERT_EQ(has_homomorphism(g, complete_graph(k)).has_value(), chi <= k) << n << " " << mask;
        }
    Rng rng(47);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 6 + static_cast<int>(rng.uniform_below(2));
        auto g = from_mask(n, static_cast<long>(rng.uniform_below(1ULL << (n * (n - 1) / 2))));
        int chi = chromatic_number(g);
        for (int k = 1; k <= 5; ++k)
            ASSERT_EQ(has_homomorphism(g, complete_graph(k)).has_value(), chi <= k);
    }
}

TEST(Homomorphism, AgreesWithBruteForce)
{
    Rng rng(48);
    for (int trial = 0; trial < 150; ++trial) {
        auto g = random_graph(1 + static_cast<int>(rng.uniform_below(7)), rng.uniform01(), rng);
        auto h = random_graph(1 + static_cast<int>(rng.uniform_below(6)), rng.uniform01(), rng);
        auto m = has_homomorphism(g, h);
        ASSERT_EQ(m.has_value(), brute_hom(g, h)) << trial;
        if (m) {
            EXPECT_TRUE(is_homomorphism(g, h, *m));
        }
    }
}

TEST(Homomorphism, EquivalentToDeltaStarForH3)
{
    Rng rng(49);
    auto h3 = build_H_delta(3);
    int yes = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto g = random_graph(1 + static_cast<int>(rng.uniform_below(10)), 0.2 + 0.7 * rng.uniform01(), rng);
        auto w = has_delta_star(g, 3);
        auto m = has_homomorphism(g, h3);
        ASSERT_EQ(w.has_value(), m.has_value()) << trial;
        if (m) {
            ++yes;
            EXPECT_TRUE(is_homomorphism(g, h3, *m));
        }
    }
    EXPECT_GT(yes, 30);
}

TEST(Homomorphism, CapExceeded)
{
    EXPECT_THROW(has_homomorphism(TargetGraph::unnamed(200, {}), TargetGraph::unnamed(60, {})), CapExceeded);
    EXPECT_FALSE(is_homomorphism(complete_graph(2), complete_graph(2), {0}));
    EXPECT_FALSE(is_homomorphism(complete_graph(2), complete_graph(2), {0, 2}));
}

TEST(TargetJson, RoundTrip)
{
    auto h = build_H_delta(3);
    auto back = target_from_json(target_to_json(h));
    EXPECT_EQ(back.names, h.names);
    EXPECT_EQ(back.edges, h.edges);
    EXPECT_THROW(target_from_json(json::parse(R"({"vertices":["a"],"edges":[["a","a"]]})")), InputError);
    EXPECT_THROW(target_from_json(json::parse(R"({"vertices":["a"],"edges":[["a","b"]]})")), InputError);
}
