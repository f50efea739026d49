#include "lcl/builtins.hpp"
#include "lcl/core.hpp"
#include "lcl/ellfull.hpp"
#include "lcl/forest.hpp"
#include "lcl/homlcl.hpp"
#include "lcl/io.hpp"
#include "lcl/marksgame.hpp"
#include "lcl/playability.hpp"
#include "lcl/rcsolver.hpp"
#include "lcl/sim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace lcl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;

// Schema versions of every artifact the tool reads or writes.
const char * const kSchemas = "problem=1 graph=1 labeling=1 target=1 certificate=1 decomposition=1 playability=1 "
                              "idgraph=1 lookup-table=1 game=1 refutation=1 forest=1 matching=1 edge-coloring=1 "
                              "uniform-stats=1";

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

auto emit(const json & j, const std::string & out) -> void
{
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out, j);
}

auto write_text(const std::string & path, const std::string & text) -> void
{
    if (path.empty())
        return;
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot write '" + path + "'");
    f << text;
}

auto load_problem(const std::string & path) -> LclProblem { return problem_from_json(read_json_file(path)); }

auto load_graph(const std::string & path) -> PortGraph
{
    auto f = graph_from_json(read_json_file(path));
    try {
        return f.ports();
    }
    catch (const std::invalid_argument & e) {
        throw InputError("graph file '" + path + "': " + e.what());
    }
}

auto load_tree(const std::string & path) -> PortGraph
{
    auto g = load_graph(path);
    if (!is_tree(g))
        throw InputError("graph file '" + path + "' is not a tree");
    return g;
}

auto load_algorithm(const LclProblem & p, const std::string & path) -> LookupTableAlgorithm
{
    return LookupTableAlgorithm::from_json(p, read_json_file(path));
}

// Certificates stored in the file are recomputed rather than trusted.
auto load_id_graph(const std::string & path, int mis_cap = kMisVertexCap) -> IdGraph
{
    auto h = id_graph_from_json(read_json_file(path));
    auto c = certify_id_graph(h, mis_cap);
    if (!c.ok())
        std::cerr << "lcl: warning: ID graph '" << path << "' fails its " << c.failure << " certificate\n";
    return h;
}

auto parse_subset(const LclProblem & p, const std::string & text) -> Subset
{
    Subset s = 0;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            s |= Subset{1} << p.label_id(item);
    return s;
}

auto edge_pairs(const PortGraph & g, const std::vector<int> & edges) -> json
{
    json a = json::array();
    for (int e : edges)
        a.push_back(json::array({g.edges()[e].u, g.edges()[e].v}));
    return a;
}

auto require_seed(const std::optional<std::uint64_t> & seed, const std::string & what) -> std::uint64_t
{
    if (!seed)
        throw UsageError(what + " is randomized and needs --seed");
    return *seed;
}

// ---- subcommands -------------------------------------------------------------------

struct GenArgs
{
    std::string what, out, builtin, target, shape = "random", idgraph, problem, suite;
    int delta = 3, k = -1, size = 1, complete = 0;
    std::optional<std::uint64_t> seed;
    bool monochrome = false;
};

auto run_gen(const GenArgs & a) -> int
{
    if (a.what == "problem") {
        BuiltinParams bp{a.k, std::nullopt};
        if (!a.target.empty())
            bp.target = target_from_json(read_json_file(a.target));
        else if (a.complete > 0)
            bp.target = complete_graph(a.complete);
        emit(problem_to_json(make_builtin(a.builtin, a.delta, bp)), a.out);
        return kExitOk;
    }
    if (a.what == "tree") {
        TreeKind kind;
        if (a.shape == "random")
            kind = TreeKind::random(a.size);
        else if (a.shape == "path")
            kind = TreeKind::path(a.size);
        else if (a.shape == "complete")
            kind = TreeKind::complete(a.size);
        else
            throw UsageError("unknown tree shape '" + a.shape + "'");
        std::uint64_t seed = a.shape == "random" ? require_seed(a.seed, "a random tree") : a.seed.value_or(0);
        emit(graph_to_json(gen_tree(kind, a.delta, seed)), a.out);
        return kExitOk;
    }
    if (a.what == "graph") {
        auto m = gen_config_model(a.size, a.delta, require_seed(a.seed, "the configuration model"));
        emit(graph_to_json(m, a.delta), a.out);
        return kExitOk;
    }
    if (a.what == "alg") {
        if (a.idgraph.empty() || a.problem.empty())
            throw UsageError("gen alg needs --idgraph and --problem");
        auto h = load_id_graph(a.idgraph);
        auto p = load_problem(a.problem);
        if (!a.suite.empty()) {
            for (auto & [name, alg] : coloring_suite(h))
                if (name == a.suite) {
                    emit(alg.to_json(p), a.out);
                    return kExitOk;
                }
            throw UsageError("unknown suite algorithm '" + a.suite + "'");
        }
        auto alg = random_lookup_table(h, p.label_count(), p.delta(), require_seed(a.seed, "a random table"),
            a.monochrome);
        emit(alg.to_json(p), a.out);
        return kExitOk;
    }
    throw UsageError("gen --what must be problem, tree, graph or alg");
}

struct CheckArgs
{
    std::string problem, graph, labeling, out;
};

auto run_check(const CheckArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto g = load_graph(a.graph);
    auto lab = labeling_from_json(p, read_json_file(a.labeling));
    ValidityReport r;
    try {
        r = validate_labeling(p, g, lab);
    }
    catch (const std::invalid_argument & e) {
        throw InputError(e.what());
    }
    emit({{"valid", r.ok}, {"vertex_violations", r.vertex_violations},
             {"edge_violations", edge_pairs(g, r.edge_violations)}},
        a.out);
    return r.ok ? kExitOk : kExitNegative;
}

struct EllFullArgs
{
    std::string problem, out;
    int max_ell = 8, cap_subsets = kSubsetSearchCap;
};

auto run_ellfull(const EllFullArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto r = find_ell_full(p, a.max_ell, a.cap_subsets);
    if (r.best) {
        auto j = certificate_to_json(p, *r.best);
        j["inspected"] = r.inspected;
        emit(j, a.out);
        return kExitOk;
    }
    emit({{"verdict", "NotFull"}, {"max_ell", r.ell_max}, {"inspected", r.inspected}}, a.out);
    return kExitNegative;
}

struct SolveArgs
{
    std::string problem, graph, certificate, out, decomposition, dot;
    int max_ell = 8, cap_subsets = kSubsetSearchCap;
};

auto run_solve(const SolveArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto t = load_tree(a.graph);
    EllFullCertificate cert;
    if (!a.certificate.empty()) {
        // re-derive the verdict instead of trusting the file
        auto claimed = certificate_from_json(p, read_json_file(a.certificate));
        cert = is_ell_full(p, claimed.subset, claimed.ell);
    }
    else {
        auto r = find_ell_full(p, a.max_ell, a.cap_subsets);
        if (!r.best) {
            emit({{"verdict", "NotFull"}, {"max_ell", r.ell_max}, {"inspected", r.inspected}}, a.out);
            return kExitNegative;
        }
        cert = *r.best;
    }
    if (!cert.full) {
        emit({{"verdict", "NotFull"}, {"ell", cert.ell}}, a.out);
        return kExitNegative;
    }
    auto lab = solve_from_ell_full(p, cert, t);
    auto ok = validate_labeling(p, t, lab).ok;
    auto dec = decompose(t, std::max(1, cert.ell));
    if (!a.decomposition.empty())
        write_json_file(a.decomposition, decomposition_to_json(dec));
    write_text(a.dot, decomposition_dot(t, dec));
    auto j = labeling_to_json(p, lab);
    j["valid"] = ok;
    j["ell"] = cert.ell;
    j["layers"] = dec.L;
    emit(j, a.out);
    return ok ? kExitOk : kExitNegative;
}

struct PlayabilityArgs
{
    std::string problem, out;
    int cap_subsets = kDefaultSubsetCap;
};

auto run_playability(const PlayabilityArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto r = decide_playability(p, a.cap_subsets);
    emit(playability_to_json(p, r), a.out);
    return r.playable ? kExitOk : kExitNegative;
}

struct IdGraphArgs
{
    long n = 0;
    int t = 1, delta = 3, degree = 0, retries = 50, cap_mis = kMisVertexCap;
    double r = 0.5;
    std::optional<std::uint64_t> seed;
    std::string out;
};

auto run_idgraph(const IdGraphArgs & a) -> int
{
    IdGraphOptions o;
    if (a.degree > 0)
        o.degree = a.degree;
    o.retries = a.retries;
    o.mis_cap = a.cap_mis;
    try {
        auto h = build_id_graph(a.n, a.t, a.r, a.delta, require_seed(a.seed, "idgraph"), o);
        emit(id_graph_to_json(h), a.out);
        return kExitOk;
    }
    catch (const IdGraphError & e) {
        std::cerr << "lcl: " << e.what() << "\n";
        emit({{"verdict", "CapExceeded"}, {"failures", e.failures}}, a.out);
        return kExitCap;
    }
}

struct GameArgs
{
    std::string alg, problem, idgraph, subset, out;
    int alpha = 0, sigma = 0, t = 1, audit = 0;
    long cap_positions = kGameNodeCap;
};

auto run_game(const GameArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto alg = load_algorithm(p, a.alg);
    auto h = load_id_graph(a.idgraph);
    if (a.sigma < 0 || a.sigma >= h.size() || a.alpha < 0 || a.alpha >= h.delta)
        throw UsageError("--sigma or --alpha out of range for the ID graph");
    GameSpec spec{&alg, &h, a.alpha, a.sigma, parse_subset(p, a.subset), a.t, p.label_count(), 0};
    auto out = solve_game(spec, a.cap_positions);
    json strategy = json::object();
    for (auto & [k, v] : out.strategy)
        strategy[k] = v;
    json j{{"winner", player_name(out.winner)}, {"positions", out.positions}, {"strategy", strategy},
        {"S", subset_names(p, spec.S)}};
    if (a.audit > 0)
        j["audit"] = audit_strategy(spec, out, a.audit, 0);
    emit(j, a.out);
    return kExitOk;
}

struct RefuteArgs
{
    std::string alg, problem, idgraph, out;
    int t = 1, cap_subsets = kDefaultSubsetCap;
    double r = -1;
};

auto run_refute(const RefuteArgs & a) -> int
{
    auto p = load_problem(a.problem);
    auto alg = load_algorithm(p, a.alg);
    auto h = load_id_graph(a.idgraph);
    RefuteOptions o;
    o.r = a.r;
    o.subset_cap = a.cap_subsets;
    auto ref = refute_algorithm(alg, p, h, a.t, o);
    emit(refutation_to_json(p, ref), a.out);
    return ref.kind == Refutation::Kind::Inconclusive ? kExitNegative : kExitOk;
}

struct ForestArgs
{
    std::string graph, out, csv, dot, profile;
    std::optional<std::uint64_t> seed;
    int max_rounds = 16;
    bool no_finalize = false;
    std::vector<double> eps{0.1, 0.01, 0.001};
};

auto run_forest(const ForestArgs & a) -> int
{
    auto g = load_graph(a.graph);
    ForestOptions o;
    o.seed = require_seed(a.seed, "forest");
    o.max_rounds = a.max_rounds;
    o.finalize = !a.no_finalize;
    o.track_radius = !a.profile.empty();
    auto st = one_ended_forest(g, o);
    write_text(a.csv, round_stats_csv(st));
    write_text(a.dot, forest_dot(g, st));
    auto j = forest_to_json(g, st);
    if (!a.profile.empty()) {
        auto q = radius_quantiles(coding_radii(g, st), a.eps);
        write_text(a.profile, radius_profile_csv(q));
        j["loglog_slope"] = loglog_slope(q);
    }
    emit(j, a.out);
    return kExitOk;
}

struct Pm2Args
{
    std::string graph, out, labeling;
    std::optional<std::uint64_t> seed;
};

auto run_pm2(const Pm2Args & a) -> int
{
    auto g = load_graph(a.graph);
    ForestOptions o;
    o.seed = require_seed(a.seed, "pm2");
    auto m = pm2_from_forest(g, one_ended_forest(g, o));
    bool ok = validate_matching2(g, m);
    if (!a.labeling.empty())
        write_json_file(a.labeling, labeling_to_json(add_paths(make_pm_power2(g.delta())), encode_matching2(g, m)));
    auto j = matching_to_json(m);
    j["valid"] = ok;
    j["residue"] = m.residue();
    j["grafts"] = m.grafts;
    emit(j, a.out);
    return ok ? kExitOk : kExitNegative;
}

struct VizingArgs
{
    std::string graph, out;
    std::optional<std::uint64_t> seed;
};

auto run_vizing(const VizingArgs & a) -> int
{
    auto g = load_graph(a.graph);
    auto ec = vizing3_edge_color(g, require_seed(a.seed, "vizing3"));
    bool ok = edge_coloring_valid(g, ec.color, 4);
    json edges = json::array();
    for (int e = 0; e < g.edge_count(); ++e)
        edges.push_back(json::array({g.edges()[e].u, g.edges()[e].v, ec.color[e]}));
    emit({{"valid", ok}, {"edges", edges}, {"complement_edges", ec.complement_edges}, {"fallbacks", ec.fallbacks}},
        a.out);
    return ok ? kExitOk : kExitNegative;
}

struct UniformArgs
{
    std::string graph, out, csv, alg = "luby-mis";
    std::optional<std::uint64_t> seed;
    std::optional<int> radius_cap;
    int threads = 1;
};

auto run_uniform_stats(const UniformArgs & a) -> int
{
    if (a.alg != "luby-mis")
        throw UsageError("unknown uniform algorithm '" + a.alg + "'");
    if (a.threads < 1)
        throw UsageError("--threads must be positive");
    auto g = load_graph(a.graph);
    auto p = mis_problem(g.delta());
    UniformRunOptions o;
    o.seed = require_seed(a.seed, "uniform-stats");
    o.radius_cap = a.radius_cap;
    o.threads = a.threads;
    o.problem = &p;
    auto [lab, st] = run_uniform(LubyMis{}, g, o);
    write_text(a.csv, stats_csv(st));
    auto j = stats_summary_json(st);
    j["algorithm"] = a.alg;
    emit(j, a.out);
    return st.non_terminated.empty() && st.validity && st.validity->ok ? kExitOk : kExitNegative;
}

} // namespace

auto main(int argc, char ** argv) -> int
{
    CLI::App app{"Locally checkable labeling toolkit"};
    app.set_version_flag("--version", std::string("lcl ") + LCL_VERSION + "\nschemas: " + kSchemas);
    app.require_subcommand(1);

    GenArgs gen;
    auto * s_gen = app.add_subcommand("gen", "Generate problems, trees, graphs and lookup-table algorithms");
    s_gen->add_option("--what", gen.what, "problem | tree | graph | alg")->required();
    s_gen->add_option("--builtin", gen.builtin, "Builtin problem name")
        ->check(CLI::IsMember(builtin_names()));
    s_gen->add_option("--delta", gen.delta, "Degree")->check(CLI::Range(2, 16));
    s_gen->add_option("--k", gen.k, "Palette size for coloring problems");
    s_gen->add_option("--target", gen.target, "Target graph file for homomorphism problems");
    s_gen->add_option("--complete", gen.complete, "Use K_k as the homomorphism target");
    s_gen->add_option("--shape", gen.shape, "random | path | complete");
    s_gen->add_option("--size", gen.size, "Vertex count (depth for complete trees)")->check(CLI::PositiveNumber);
    s_gen->add_option("--idgraph", gen.idgraph, "ID graph for lookup tables");
    s_gen->add_option("--problem", gen.problem, "Problem naming the table's labels");
    s_gen->add_option("--suite", gen.suite, "Tabulate a named radius-1 coloring heuristic");
    s_gen->add_flag("--monochrome", gen.monochrome, "Random tables output one label on every port");
    s_gen->add_option("--seed", gen.seed, "Random seed");
    s_gen->add_option("--out", gen.out, "Output file (default stdout)");

    CheckArgs check;
    auto * s_check = app.add_subcommand("check", "Validate a labeling");
    s_check->add_option("--problem", check.problem)->required();
    s_check->add_option("--graph", check.graph)->required();
    s_check->add_option("--labeling", check.labeling)->required();
    s_check->add_option("--out", check.out);

    EllFullArgs ell;
    auto * s_ell = app.add_subcommand("ellfull", "Search for an l-full subset of vertex configurations");
    s_ell->add_option("--problem", ell.problem)->required();
    s_ell->add_option("--max-ell", ell.max_ell)->check(CLI::Range(2, 1 << 20));
    s_ell->add_option("--cap-subsets", ell.cap_subsets, "Largest |V| searched over subsets");
    s_ell->add_option("--out", ell.out);

    SolveArgs solve;
    auto * s_solve = app.add_subcommand("solve", "Solve on a tree by rake-and-compress");
    s_solve->add_option("--problem", solve.problem)->required();
    s_solve->add_option("--graph", solve.graph)->required();
    s_solve->add_option("--certificate", solve.certificate, "Use this l-full certificate instead of searching");
    s_solve->add_option("--max-ell", solve.max_ell)->check(CLI::Range(2, 1 << 20));
    s_solve->add_option("--cap-subsets", solve.cap_subsets);
    s_solve->add_option("--decomposition", solve.decomposition, "Write the decomposition JSON here");
    s_solve->add_option("--dot", solve.dot, "Write the decomposition DOT here");
    s_solve->add_option("--out", solve.out);

    PlayabilityArgs play;
    auto * s_play = app.add_subcommand("playability", "Decide playability of an edge-colored problem");
    s_play->add_option("--problem", play.problem)->required();
    s_play->add_option("--cap-subsets", play.cap_subsets, "Largest alphabet handled");
    s_play->add_option("--out", play.out);

    IdGraphArgs idg;
    auto * s_idg = app.add_subcommand("idgraph", "Build and certify an ID graph");
    s_idg->add_option("--n", idg.n)->required();
    s_idg->add_option("--t", idg.t)->required();
    s_idg->add_option("--r", idg.r)->required();
    s_idg->add_option("--delta", idg.delta);
    s_idg->add_option("--degree", idg.degree, "Per-color degree (default from r)");
    s_idg->add_option("--cap-retries", idg.retries, "Construction attempts");
    s_idg->add_option("--cap-mis", idg.cap_mis, "Largest color class solved exactly");
    s_idg->add_option("--seed", idg.seed);
    s_idg->add_option("--out", idg.out);

    GameArgs game;
    auto * s_game = app.add_subcommand("game", "Solve one game of an algorithm on an ID graph");
    s_game->add_option("--alg", game.alg)->required();
    s_game->add_option("--problem", game.problem)->required();
    s_game->add_option("--idgraph", game.idgraph)->required();
    s_game->add_option("--alpha", game.alpha)->required();
    s_game->add_option("--sigma", game.sigma)->required();
    s_game->add_option("--S", game.subset, "Comma-separated target labels")->required();
    s_game->add_option("--t", game.t);
    s_game->add_option("--audit", game.audit, "Replay the strategy against this many random opponents");
    s_game->add_option("--cap-positions", game.cap_positions);
    s_game->add_option("--out", game.out);

    RefuteArgs refute;
    auto * s_ref = app.add_subcommand("refute", "Build a failing instance for an algorithm");
    s_ref->add_option("--alg", refute.alg)->required();
    s_ref->add_option("--problem", refute.problem)->required();
    s_ref->add_option("--idgraph", refute.idgraph)->required();
    s_ref->add_option("--t", refute.t)->required();
    s_ref->add_option("--r", refute.r, "Pigeonhole threshold (default: the ID graph's r)");
    s_ref->add_option("--cap-subsets", refute.cap_subsets);
    s_ref->add_option("--out", refute.out);

    ForestArgs forest;
    auto * s_forest = app.add_subcommand("forest", "Run the one-ended forest algorithm");
    s_forest->add_option("--graph", forest.graph)->required();
    s_forest->add_option("--seed", forest.seed);
    s_forest->add_option("--max-rounds", forest.max_rounds)->check(CLI::NonNegativeNumber);
    s_forest->add_flag("--no-finalize", forest.no_finalize, "Leave unsettled vertices unoriented");
    s_forest->add_option("--csv", forest.csv, "Write per-round statistics here");
    s_forest->add_option("--dot", forest.dot, "Write the orientation DOT here");
    s_forest->add_option("--radius-profile", forest.profile, "Write coding-radius quantiles CSV here");
    s_forest->add_option("--eps", forest.eps, "Quantile grid for --radius-profile");
    s_forest->add_option("--out", forest.out);

    Pm2Args pm2;
    auto * s_pm2 = app.add_subcommand("pm2", "Power-2 perfect matching from the forest");
    s_pm2->add_option("--graph", pm2.graph)->required();
    s_pm2->add_option("--seed", pm2.seed);
    s_pm2->add_option("--labeling", pm2.labeling, "Write the half-edge encoding here");
    s_pm2->add_option("--out", pm2.out);

    VizingArgs viz;
    auto * s_viz = app.add_subcommand("vizing3", "Four-edge-color a subcubic graph");
    s_viz->add_option("--graph", viz.graph)->required();
    s_viz->add_option("--seed", viz.seed);
    s_viz->add_option("--out", viz.out);

    UniformArgs uni;
    auto * s_uni = app.add_subcommand("uniform-stats", "Coding-radius statistics of a uniform algorithm");
    s_uni->add_option("--graph", uni.graph)->required();
    s_uni->add_option("--alg", uni.alg, "luby-mis");
    s_uni->add_option("--seed", uni.seed);
    s_uni->add_option("--cap-radius", uni.radius_cap, "Give up on vertices beyond this radius");
    s_uni->add_option("--threads", uni.threads);
    s_uni->add_option("--csv", uni.csv, "Write per-vertex coding radii here");
    s_uni->add_option("--out", uni.out);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion & e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError & e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*s_gen)
            return run_gen(gen);
        if (*s_check)
            return run_check(check);
        if (*s_ell)
            return run_ellfull(ell);
        if (*s_solve)
            return run_solve(solve);
        if (*s_play)
            return run_playability(play);
        if (*s_idg)
            return run_idgraph(idg);
        if (*s_game)
            return run_game(game);
        if (*s_ref)
            return run_refute(refute);
        if (*s_forest)
            return run_forest(forest);
        if (*s_pm2)
            return run_pm2(pm2);
        if (*s_viz)
            return run_vizing(viz);
        if (*s_uni)
            return run_uniform_stats(uni);
    }
    catch (const CapExceeded & e) {
        std::cerr << "lcl: cap exceeded: " << e.what() << "\n";
        return kExitCap;
    }
    catch (const UsageError & e) {
        std::cerr << "lcl: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const InputError & e) {
        std::cerr << "lcl: bad input: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::invalid_argument & e) {
        std::cerr << "lcl: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::out_of_range & e) {
        std::cerr << "lcl: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
