#pragma once

#include "lcl/core.hpp"
#include "lcl/homlcl.hpp"
#include "lcl/io.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

using Subset = std::uint32_t; // bitmask over label ids

inline constexpr int kDefaultSubsetCap = 6;

inline auto subset_names(const LclProblem & p, Subset s) -> json
{
    json a = json::array();
    for (int x = 0; x < p.label_count(); ++x)
        if (s >> x & 1)
            a.push_back(p.name(x));
    return a;
}

// P_alpha for every color: S ~ T iff some a in S, b in T has {a,b} in E_alpha.
// Stored through the neighborhood masks N_alpha(S) = {b : some a in S, {a,b} in E_alpha},
// so S ~ T iff N_alpha(S) & T != 0.
class ConfigGraph
{
public:
    explicit ConfigGraph(const LclProblem & p, int cap = kDefaultSubsetCap) : labels_(p.label_count())
    {
        if (!p.edge_colored())
            throw std::invalid_argument("configuration graphs need an edge-colored problem");
        if (labels_ > cap)
            throw CapExceeded("|Sigma| = " + std::to_string(labels_) + " exceeds the subset cap " + std::to_string(cap));
        colors_ = p.edge_color_count();
        single_.assign(colors_, std::vector<Subset>(labels_, 0));
        for (int c = 0; c < colors_; ++c)
            for (int a = 0; a < labels_; ++a)
                for (int b = 0; b < labels_; ++b)
                    if (p.edge_allowed(a, b, c))
                        single_[c][a] |= Subset{1} << b;
        nbr_.assign(colors_, std::vector<Subset>(subset_count(), 0));
        for (int c = 0; c < colors_; ++c)
            for (Subset s = 1; s < subset_count(); ++s) {
                int low = __builtin_ctz(s);
                nbr_[c][s] = nbr_[c][s & (s - 1)] | single_[c][low];
            }
    }

    auto colors() const -> int { return colors_; }
    auto labels() const -> int { return labels_; }
    auto subset_count() const -> Subset { return Subset{1} << labels_; }
    auto full() const -> Subset { return subset_count() - 1; }
    auto neighborhood(int c, Subset s) const -> Subset { return nbr_[c][s]; }
    auto adjacent(int c, Subset s, Subset t) const -> bool { return (nbr_[c][s] & t) != 0; }
    auto loop(int c, Subset s) const -> bool { return adjacent(c, s, s); }

    auto identical_colors() const -> bool
    {
        for (int c = 1; c < colors_; ++c)
            if (nbr_[c] != nbr_[0])
                return false;
        return true;
    }

    auto to_dot(const LclProblem & p, int c) const -> std::string
    {
        std::ostringstream out;
        auto name = [&](Subset s) {
            std::string r = "{";
            for (int x = 0; x < labels_; ++x)
                if (s >> x & 1)
                    r += (r.size() > 1 ? "," : "") + p.name(x);
            return r + "}";
        };
        out << "graph P" << c << " {\n";
        for (Subset s = 0; s < subset_count(); ++s)
            out << "  s" << s << " [label=\"" << name(s) << "\"];\n";
        for (Subset s = 0; s < subset_count(); ++s)
            for (Subset t = s; t < subset_count(); ++t)
                if (adjacent(c, s, t))
                    out << "  s" << s << " -- s" << t << ";\n";
        out << "}\n";
        return out.str();
    }

private:
    int labels_ = 0, colors_ = 0;
    std::vector<std::vector<Subset>> single_;
    std::vector<std::vector<Subset>> nbr_;
};

inline auto config_graphs(const LclProblem & p, int cap = kDefaultSubsetCap) -> ConfigGraph { return ConfigGraph(p, cap); }

// Ordered label tuples (a_0..a_{delta-1}) whose multiset is in V.
inline auto realizations(const LclProblem & p) -> std::vector<std::vector<Label>>
{
    std::vector<std::vector<Label>> out;
    for (auto c : p.vertex_configs()) {
        do
            out.push_back(c);
        while (std::next_permutation(c.begin(), c.end()));
    }
    return out;
}

// Clause (A) for one tuple: does some realization avoid S_alpha in every color?
inline auto clause_a_holds(const std::vector<std::vector<Label>> & reals, const std::vector<Subset> & tuple) -> bool
{
    for (auto & r : reals) {
        bool ok = true;
        for (std::size_t c = 0; c < r.size() && ok; ++c)
            ok = !(tuple[c] >> r[c] & 1);
        if (ok)
            return true;
    }
    return false;
}

// ---- a small DPLL solver -------------------------------------------------------

class Dpll
{
public:
    struct Implied
    {
        int lit;
        int reason; // clause index, -1 for decisions
        int level;
    };

    explicit Dpll(int vars) : vars_(vars), value_(vars, -1), level_(vars, 0), watches_(2 * vars) {}

    static auto pos(int v) -> int { return 2 * v; }
    static auto neg(int v) -> int { return 2 * v + 1; }
    static auto var(int lit) -> int { return lit >> 1; }
    static auto negate(int lit) -> int { return lit ^ 1; }

    auto add_clause(std::vector<int> lits) -> int
    {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (std::size_t i = 0; i + 1 < lits.size(); ++i)
            if (lits[i] == negate(lits[i + 1]))
                return -1; // tautology
        int idx = static_cast<int>(clauses_.size());
        clauses_.push_back(lits);
        if (lits.empty())
            empty_ = true;
        else if (lits.size() == 1)
            units_.push_back(idx);
        else {
            watches_[lits[0]].push_back(idx);
            watches_[lits[1]].push_back(idx);
        }
        return idx;
    }

    auto clause(int i) const -> const std::vector<int> & { return clauses_[i]; }
    auto clause_count() const -> int { return static_cast<int>(clauses_.size()); }

    // Decisions try `first_value` first, variables in index order.
    auto solve(bool first_value = false, long decision_cap = 50000000) -> std::optional<std::vector<char>>
    {
        if (empty_)
            return std::nullopt;
        for (int u : units_) {
            int lit = clauses_[u][0];
            if (lit_value(lit) == 0) {
                root_conflict_ = u;
                root_trail_ = trail_;
                return std::nullopt;
            }
            if (lit_value(lit) < 0)
                assign(lit, u);
        }
        int conflict = propagate();
        if (conflict >= 0) {
            root_conflict_ = conflict;
            root_trail_ = trail_;
            return std::nullopt;
        }
        root_trail_ = trail_;
        std::vector<std::pair<int, bool>> decisions; // (trail position, flipped)
        int next_var = 0;
        while (true) {
            while (next_var < vars_ && value_[next_var] >= 0)
                ++next_var;
            if (next_var == vars_) {
                std::vector<char> model(vars_);
                for (int v = 0; v < vars_; ++v)
                    model[v] = static_cast<char>(value_[v]);
                return model;
            }
            if (++decisions_made_ > decision_cap)
                throw CapExceeded("DPLL decision cap exceeded");
            decisions.emplace_back(static_cast<int>(trail_.size()), false);
            ++level_now_;
            assign(first_value ? pos(next_var) : neg(next_var), -1);
            while ((conflict = propagate()) >= 0) {
                ++conflicts_;
                if (conflict_log_.size() < kConflictLogCap)
                    conflict_log_.push_back(conflict);
                // chronological backtracking to the last unflipped decision
                while (!decisions.empty() && decisions.back().second) {
                    undo_to(decisions.back().first);
                    decisions.pop_back();
                    --level_now_;
                }
                if (decisions.empty())
                    return std::nullopt;
                int at = decisions.back().first;
                int lit = trail_[at].lit;
                undo_to(at);
                decisions.back().second = true;
                assign(negate(lit), -1);
                next_var = 0;
            }
        }
    }

    auto root_trail() const -> const std::vector<Implied> & { return root_trail_; }
    auto root_conflict() const -> int { return root_conflict_; }
    auto conflict_log() const -> const std::vector<int> & { return conflict_log_; }
    auto decisions() const -> long { return decisions_made_; }
    auto conflicts() const -> long { return conflicts_; }

private:
    static constexpr std::size_t kConflictLogCap = 64;

    auto lit_value(int lit) const -> int
    {
        int v = value_[var(lit)];
        if (v < 0)
            return -1;
        return (lit & 1) ? 1 - v : v;
    }

    auto assign(int lit, int reason) -> void
    {
        value_[var(lit)] = (lit & 1) ? 0 : 1;
        level_[var(lit)] = level_now_;
        trail_.push_back({lit, reason, level_now_});
    }

    auto undo_to(int size) -> void
    {
        while (static_cast<int>(trail_.size()) > size) {
            value_[var(trail_.back().lit)] = -1;
            trail_.pop_back();
        }
        head_ = std::min<std::size_t>(head_, trail_.size());
    }

    // Returns a conflicting clause index or -1.
    auto propagate() -> int
    {
        while (head_ < trail_.size()) {
            int falsified = negate(trail_[head_++].lit);
            auto & ws = watches_[falsified];
            for (std::size_t i = 0; i < ws.size();) {
                int ci = ws[i];
                auto & c = clauses_[ci];
                if (c[0] == falsified)
                    std::swap(c[0], c[1]);
                if (lit_value(c[0]) == 1) {
                    ++i;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k)
                    if (lit_value(c[k]) != 0) {
                        std::swap(c[1], c[k]);
                        watches_[c[1]].push_back(ci);
                        ws[i] = ws.back();
                        ws.pop_back();
                        moved = true;
                        break;
                    }
                if (moved)
                    continue;
                if (lit_value(c[0]) == 0)
                    return ci;
                assign(c[0], ci);
                ++i;
            }
        }
        return -1;
    }

    int vars_;
    std::vector<int> value_, level_;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> units_;
    std::vector<Implied> trail_, root_trail_;
    std::size_t head_ = 0;
    int level_now_ = 0;
    bool empty_ = false;
    int root_conflict_ = -1;
    long decisions_made_ = 0, conflicts_ = 0;
    std::vector<int> conflict_log_;
};

// ---- playability -----------------------------------------------------------------

// Lambda_alpha as a Bob indicator over all subsets.
using LambdaFamily = std::vector<std::vector<char>>;

struct ClauseTag
{
    enum Kind { Upward, EdgeB, LoopB, VertexA } kind;
    int color = -1;
    std::vector<Subset> sets; // B: (S, T); A: the full tuple S_0..S_{delta-1}
};

struct PlayabilityResult
{
    bool playable = false;
    LambdaFamily lambda;                       // when playable (upward-closed Bob families)
    std::vector<std::string> trace;            // human-readable refutation
    bool refuted_by_propagation = false;       // contradiction found before any decision
    long decisions = 0, conflicts = 0;
    std::vector<std::pair<int, Subset>> forced_alice, forced_bob; // root-level implications
    std::optional<ClauseTag> final_clause;
};

// Bob families may be taken upward-closed without loss of generality: adding
// supersets to Bob keeps every Bob pair adjacent (adjacency is monotone) and
// shrinks the Alice side of (A). The clause encoding then only needs
//   upward closure        Bob(S) -> Bob(S + x)
//   (B)                   not Bob(S) or not Bob(V \ N(S)), and not Bob(S) for loopless S
//   (A), residual color   Bob(0,S_0) or ... or Bob(last, R(S_0..)), R the labels that would
//                         still complete a configuration, for the irredundant prefixes only.
class PlayabilityEncoding
{
public:
    PlayabilityEncoding(const LclProblem & p, int cap = kDefaultSubsetCap) : problem_(&p), g_(p, cap)
    {
        int colors = g_.colors();
        Subset count = g_.subset_count();
        if (static_cast<long>(colors - 1) * g_.labels() > 26)
            throw CapExceeded("(A) clause enumeration exceeds 2^26 prefixes");
        solver_ = std::make_unique<Dpll>(colors * static_cast<int>(count));
        for (int c = 0; c < colors; ++c)
            for (Subset s = 0; s < count; ++s) {
                for (int x = 0; x < g_.labels(); ++x)
                    if (!(s >> x & 1))
                        add({Dpll::neg(var(c, s)), Dpll::pos(var(c, s | Subset{1} << x))},
                            {ClauseTag::Upward, c, {s, s | Subset{1} << x}});
                Subset t = g_.full() & ~g_.neighborhood(c, s);
                if (!g_.loop(c, s))
                    add({Dpll::neg(var(c, s))}, {ClauseTag::LoopB, c, {s, s}});
                add({Dpll::neg(var(c, s)), Dpll::neg(var(c, t))}, {ClauseTag::EdgeB, c, {s, t}});
            }
        reals_ = realizations(p);
        int d = colors;
        std::vector<Subset> prefix(d - 1, 0);
        auto residual = [&](const std::vector<Subset> & pre) {
            Subset r = 0;
            for (auto & re : reals_) {
                bool ok = true;
                for (int c = 0; c < d - 1 && ok; ++c)
                    ok = !(pre[c] >> re[c] & 1);
                if (ok)
                    r |= Subset{1} << re[d - 1];
            }
            return r;
        };
        // odometer over all prefixes
        while (true) {
            Subset r = residual(prefix);
            bool redundant = false;
            for (int c = 0; c < d - 1 && !redundant; ++c)
                for (int x = 0; x < g_.labels() && !redundant; ++x)
                    if (prefix[c] >> x & 1) {
                        auto smaller = prefix;
                        smaller[c] &= ~(Subset{1} << x);
                        redundant = residual(smaller) == r;
                    }
            if (!redundant) {
                std::vector<int> lits;
                for (int c = 0; c < d - 1; ++c)
                    lits.push_back(Dpll::pos(var(c, prefix[c])));
                lits.push_back(Dpll::pos(var(d - 1, r)));
                auto tuple = prefix;
                tuple.push_back(r);
                add(lits, {ClauseTag::VertexA, -1, tuple});
            }
            int c = 0;
            while (c < d - 1 && prefix[c] == g_.full()) {
                prefix[c] = 0;
                ++c;
            }
            if (c == d - 1)
                break;
            ++prefix[c];
        }
    }

    auto var(int color, Subset s) const -> int { return color * static_cast<int>(g_.subset_count()) + static_cast<int>(s); }
    auto graph() const -> const ConfigGraph & { return g_; }
    auto solver() -> Dpll & { return *solver_; }
    auto tag(int clause) const -> const ClauseTag & { return tags_.at(clause); }
    auto has_clause(const ClauseTag & t) const -> bool
    {
        for (auto & x : tags_)
            if (x.kind == t.kind && x.color == t.color && x.sets == t.sets)
                return true;
        return false;
    }

    auto describe(const ClauseTag & t) const -> std::string
    {
        auto set = [&](Subset s) { return subset_names(*problem_, s).dump(); };
        switch (t.kind) {
        case ClauseTag::Upward:
            return "upward closure in color " + std::to_string(t.color) + ": " + set(t.sets[0]) + " -> " + set(t.sets[1]);
        case ClauseTag::LoopB:
            return "(B) color " + std::to_string(t.color) + ": " + set(t.sets[0]) + " has no loop";
        case ClauseTag::EdgeB:
            return "(B) color " + std::to_string(t.color) + ": " + set(t.sets[0]) + " and " + set(t.sets[1]) +
                " are not adjacent";
        case ClauseTag::VertexA: {
            std::string s = "(A) no configuration avoids (";
            for (std::size_t i = 0; i < t.sets.size(); ++i)
                s += (i ? ", " : "") + set(t.sets[i]);
            return s + ")";
        }
        }
        return {};
    }

private:
    auto add(std::vector<int> lits, ClauseTag tag) -> void
    {
        int idx = solver_->add_clause(std::move(lits));
        if (idx >= 0) {
            if (static_cast<int>(tags_.size()) <= idx)
                tags_.resize(idx + 1, ClauseTag{ClauseTag::Upward, -1, {}});
            tags_[idx] = std::move(tag);
        }
    }

    const LclProblem * problem_;
    ConfigGraph g_;
    std::unique_ptr<Dpll> solver_;
    std::vector<ClauseTag> tags_;
    std::vector<std::vector<Label>> reals_;
};

// Checks Def-4.1 directly on a candidate family: (B) on every Bob pair
// including S = T, and (A) on every tuple of inclusion-maximal Alice sets.
inline auto validate_playability_witness(const LclProblem & p, const LambdaFamily & bob, int cap = kDefaultSubsetCap)
    -> bool
{
    ConfigGraph g(p, cap);
    if (static_cast<int>(bob.size()) != g.colors())
        return false;
    Subset count = g.subset_count();
    std::vector<std::vector<Subset>> maximal_alice(g.colors());
    for (int c = 0; c < g.colors(); ++c) {
        if (bob[c].size() != count)
            return false;
        for (Subset s = 0; s < count; ++s) {
            if (!bob[c][s])
                continue;
            for (Subset t = s; t < count; ++t)
                if (bob[c][t] && !g.adjacent(c, s, t))
                    return false;
        }
        // (A) is monotone in each coordinate, so Alice sets with no Alice
        // superset suffice; the family itself need not be upward-closed
        for (Subset s = 0; s < count; ++s) {
            if (bob[c][s])
                continue;
            bool has_super = false;
            for (Subset t = 0; t < count && !has_super; ++t)
                has_super = t != s && (t & s) == s && !bob[c][t];
            if (!has_super)
                maximal_alice[c].push_back(s);
        }
        if (maximal_alice[c].empty())
            return true; // no Alice set in this color: (A) is vacuous
    }
    auto reals = realizations(p);
    std::vector<std::size_t> idx(g.colors(), 0);
    while (true) {
        std::vector<Subset> tuple(g.colors());
        for (int c = 0; c < g.colors(); ++c)
            tuple[c] = maximal_alice[c][idx[c]];
        if (!clause_a_holds(reals, tuple))
            return false;
        int c = 0;
        while (c < g.colors() && ++idx[c] == maximal_alice[c].size()) {
            idx[c] = 0;
            ++c;
        }
        if (c == g.colors())
            break;
    }
    return true;
}

inline auto decide_playability(const LclProblem & p, int cap = kDefaultSubsetCap) -> PlayabilityResult
{
    PlayabilityEncoding enc(p, cap);
    auto & solver = enc.solver();
    auto model = solver.solve(false);
    PlayabilityResult res;
    res.decisions = solver.decisions();
    res.conflicts = solver.conflicts();
    const auto & g = enc.graph();
    Subset count = g.subset_count();
    for (auto & step : solver.root_trail()) {
        int v = Dpll::var(step.lit);
        int c = v / static_cast<int>(count);
        Subset s = static_cast<Subset>(v % static_cast<int>(count));
        bool bob = !(step.lit & 1);
        (bob ? res.forced_bob : res.forced_alice).emplace_back(c, s);
    }
    if (model) {
        res.playable = true;
        res.lambda.assign(g.colors(), std::vector<char>(count, 0));
        for (int c = 0; c < g.colors(); ++c)
            for (Subset s = 0; s < count; ++s)
                res.lambda[c][s] = (*model)[enc.var(c, s)];
        if (!validate_playability_witness(p, res.lambda, cap))
            throw std::logic_error("playability witness failed re-validation");
        return res;
    }
    res.refuted_by_propagation = solver.decisions() == 0;
    auto name = [&](int c, Subset s) { return "color " + std::to_string(c) + " " + subset_names(p, s).dump(); };
    if (res.refuted_by_propagation) {
        for (auto & step : solver.root_trail()) {
            int v = Dpll::var(step.lit);
            int c = v / static_cast<int>(count);
            Subset s = static_cast<Subset>(v % static_cast<int>(count));
            res.trace.push_back(std::string(step.lit & 1 ? "Alice " : "Bob ") + name(c, s) + " by " +
                enc.describe(enc.tag(step.reason)));
        }
        if (solver.root_conflict() >= 0) {
            res.final_clause = enc.tag(solver.root_conflict());
            res.trace.push_back("contradiction: " + enc.describe(*res.final_clause));
        }
    }
    else {
        res.trace.push_back("search refutation after " + std::to_string(solver.decisions()) + " decisions, " +
            std::to_string(solver.conflicts()) + " conflicts; first conflicts:");
        for (int ci : solver.conflict_log())
            res.trace.push_back("violated: " + enc.describe(enc.tag(ci)));
    }
    return res;
}

// The non-playability argument for a Delta-(*) graph, checked against the
// clause database: the color classes of c0 and of c1 are loopless (Alice
// forced), the (A) clauses over those classes force S0 and S1 to Bob in the
// last color, and S1 avoids N(S0) there. `classes0/1` are the (delta-1) color
// classes (as label masks) of the complements of S0 and S1.
struct DeltaStarPattern
{
    bool ok = false;
    std::string explanation;
};

inline auto check_delta_star_pattern(const LclProblem & p, Subset s0, Subset s1, const std::vector<Subset> & classes0,
    const std::vector<Subset> & classes1, int cap) -> DeltaStarPattern
{
    PlayabilityEncoding enc(p, cap);
    const auto & g = enc.graph();
    int d = g.colors();
    DeltaStarPattern out;
    auto fail = [&](std::string why) {
        out.ok = false;
        out.explanation = std::move(why);
        return out;
    };
    if (static_cast<int>(classes0.size()) != d - 1 || static_cast<int>(classes1.size()) != d - 1)
        return fail("expected delta-1 color classes");
    for (int c = 0; c < d - 1; ++c) {
        if (!enc.has_clause({ClauseTag::LoopB, c, {classes0[c], classes0[c]}}))
            return fail("class of c0 in color " + std::to_string(c) + " is not forced to Alice");
        if (!enc.has_clause({ClauseTag::LoopB, c, {classes1[c], classes1[c]}}))
            return fail("class of c1 in color " + std::to_string(c) + " is not forced to Alice");
    }
    auto tuple0 = classes0, tuple1 = classes1;
    tuple0.push_back(s0);
    tuple1.push_back(s1);
    if (!enc.has_clause({ClauseTag::VertexA, -1, tuple0}))
        return fail("no (A) clause forcing S0 to Bob");
    if (!enc.has_clause({ClauseTag::VertexA, -1, tuple1}))
        return fail("no (A) clause forcing S1 to Bob");
    if (g.adjacent(d - 1, s0, s1))
        return fail("S0 and S1 are adjacent in the last configuration graph");
    auto & solver = enc.solver();
    if (solver.solve(false))
        return fail("the encoding is satisfiable");
    if (solver.decisions() != 0)
        return fail("refutation needed search");
    out.ok = true;
    out.explanation = "classes Alice-forced, S0 and S1 Bob-forced in color " + std::to_string(d - 1) +
        ", (B) violated by (S0, S1); refuted by propagation";
    return out;
}

inline auto check_delta_star_pattern(const LclProblem & p, const DeltaStarWitness & w, int cap) -> DeltaStarPattern
{
    int d = p.delta();
    auto mask = [](const std::vector<int> & vs) {
        Subset m = 0;
        for (int v : vs)
            m |= Subset{1} << v;
        return m;
    };
    auto classes = [&](const std::vector<int> & col) {
        std::vector<Subset> out(d - 1, 0);
        for (std::size_t v = 0; v < col.size(); ++v)
            if (col[v] >= 0)
                out.at(col[v]) |= Subset{1} << v;
        return out;
    };
    return check_delta_star_pattern(p, mask(w.s0), mask(w.s1), classes(w.c0), classes(w.c1), cap);
}

inline auto playability_to_json(const LclProblem & p, const PlayabilityResult & r) -> json
{
    json j;
    j["verdict"] = r.playable ? "Playable" : "NotPlayable";
    j["decisions"] = r.decisions;
    j["conflicts"] = r.conflicts;
    if (r.playable) {
        j["bob_minimal"] = json::array();
        for (std::size_t c = 0; c < r.lambda.size(); ++c) {
            json mins = json::array();
            for (Subset s = 0; s < r.lambda[c].size(); ++s) {
                if (!r.lambda[c][s])
                    continue;
                bool minimal = true;
                for (int x = 0; x < p.label_count() && minimal; ++x)
                    if ((s >> x & 1) && r.lambda[c][s & ~(Subset{1} << x)])
                        minimal = false;
                if (minimal)
                    mins.push_back(subset_names(p, s));
            }
            j["bob_minimal"].push_back(mins);
        }
    }
    else {
        j["refuted_by_propagation"] = r.refuted_by_propagation;
        j["trace"] = r.trace;
    }
    return j;
}

} // namespace lcl
