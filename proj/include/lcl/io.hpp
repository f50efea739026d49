#pragma once

#include "lcl/core.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcl {

using json = nlohmann::json;

// Raised for malformed input files; the CLI maps it to exit code 2.
struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline auto read_json_file(const std::string & path) -> json
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    }
    catch (const json::exception & e) {
        throw InputError("'" + path + "': " + e.what());
    }
}

inline auto write_json_file(const std::string & path, const json & j) -> void
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

inline auto problem_to_json(const LclProblem & p) -> json
{
    json j;
    j["delta"] = p.delta();
    j["alphabet"] = p.alphabet();
    auto names = [&](const Config & c) {
        json a = json::array();
        for (auto x : c)
            a.push_back(p.name(x));
        return a;
    };
    j["vertex_configs"] = json::array();
    for (auto & c : p.vertex_configs())
        j["vertex_configs"].push_back(names(c));
    auto edges = [&](int col) {
        json a = json::array();
        for (auto [x, y] : p.edge_configs(col))
            a.push_back(json::array({p.name(x), p.name(y)}));
        return a;
    };
    if (p.edge_colored()) {
        j["edge_configs_by_color"] = json::array();
        for (int col = 0; col < p.edge_color_count(); ++col)
            j["edge_configs_by_color"].push_back(edges(col));
    }
    else
        j["edge_configs"] = edges(0);
    return j;
}

inline auto problem_from_json(const json & j) -> LclProblem
{
    try {
        int delta = j.at("delta").get<int>();
        auto alphabet = j.at("alphabet").get<std::vector<std::string>>();
        auto id = [&](const std::string & n) -> Label {
            for (std::size_t i = 0; i < alphabet.size(); ++i)
                if (alphabet[i] == n)
                    return static_cast<Label>(i);
            throw InputError("unknown label '" + n + "'");
        };
        std::vector<Config> vcs;
        for (auto & c : j.at("vertex_configs")) {
            Config cfg;
            for (auto & n : c)
                cfg.push_back(id(n.get<std::string>()));
            vcs.push_back(cfg);
        }
        auto read_edges = [&](const json & arr) {
            std::vector<std::pair<Label, Label>> es;
            for (auto & e : arr) {
                if (e.size() != 2)
                    throw InputError("edge configuration must have two labels");
                es.emplace_back(id(e[0].get<std::string>()), id(e[1].get<std::string>()));
            }
            return es;
        };
        if (j.contains("edge_configs_by_color")) {
            std::vector<std::vector<std::pair<Label, Label>>> per;
            for (auto & arr : j.at("edge_configs_by_color"))
                per.push_back(read_edges(arr));
            return LclProblem(delta, alphabet, vcs, per, true);
        }
        return LclProblem(delta, alphabet, vcs, {read_edges(j.at("edge_configs"))}, false);
    }
    catch (const json::exception & e) {
        throw InputError(std::string("problem file: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("problem file: ") + e.what());
    }
}

inline auto graph_to_json(const MultiGraph & g, int delta) -> json
{
    json j;
    j["delta"] = delta;
    j["vertices"] = g.n;
    j["edges"] = json::array();
    for (auto [u, v] : g.edges)
        j["edges"].push_back(json::array({u, v}));
    if (!g.colors.empty())
        j["edge_colors"] = g.colors;
    return j;
}

inline auto graph_to_json(const PortGraph & g) -> json { return graph_to_json(to_multigraph(g), g.delta()); }

struct GraphFile
{
    int delta = 0;
    MultiGraph graph;

    auto ports() const -> PortGraph { return graph.to_port_graph(delta); }
};

inline auto graph_from_json(const json & j) -> GraphFile
{
    try {
        GraphFile f;
        f.delta = j.at("delta").get<int>();
        f.graph.n = j.at("vertices").get<int>();
        for (auto & e : j.at("edges")) {
            if (e.size() != 2)
                throw InputError("edge must be a pair");
            f.graph.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        if (j.contains("edge_colors"))
            f.graph.colors = j.at("edge_colors").get<std::vector<int>>();
        f.graph.validate();
        if (f.delta < 1 || f.graph.n < 0)
            throw InputError("graph file: bad delta or vertex count");
        return f;
    }
    catch (const json::exception & e) {
        throw InputError(std::string("graph file: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("graph file: ") + e.what());
    }
}

inline auto labeling_to_json(const LclProblem & p, const HalfEdgeLabeling & lab) -> json
{
    json arr = json::array();
    for (int v = 0; v < lab.size(); ++v) {
        json row = json::array();
        for (int q = 0; q < lab.delta(); ++q)
            row.push_back(lab.at(v, q) < 0 ? std::string("?") : p.name(lab.at(v, q)));
        arr.push_back(row);
    }
    return json{{"labels", arr}};
}

inline auto labeling_from_json(const LclProblem & p, const json & j) -> HalfEdgeLabeling
{
    try {
        auto & rows = j.at("labels");
        HalfEdgeLabeling lab(static_cast<int>(rows.size()), p.delta());
        for (std::size_t v = 0; v < rows.size(); ++v) {
            if (static_cast<int>(rows[v].size()) != p.delta())
                throw InputError("labeling row " + std::to_string(v) + " has wrong arity");
            for (int q = 0; q < p.delta(); ++q)
                lab.set(static_cast<int>(v), q, p.label_id(rows[v][q].get<std::string>()));
        }
        return lab;
    }
    catch (const json::exception & e) {
        throw InputError(std::string("labeling file: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("labeling file: ") + e.what());
    }
}

inline auto target_to_json(const TargetGraph & g) -> json
{
    json j;
    j["vertices"] = g.names;
    j["edges"] = json::array();
    for (auto [u, v] : g.edges)
        j["edges"].push_back(json::array({g.names[u], g.names[v]}));
    return j;
}

// Accepts either {"vertices": [names], "edges": [[name, name]]} or an integer
// vertex count with index pairs.
inline auto target_from_json(const json & j) -> TargetGraph
{
    try {
        TargetGraph g;
        auto & vs = j.at("vertices");
        if (vs.is_number_integer()) {
            for (int i = 0; i < vs.get<int>(); ++i)
                g.names.push_back(std::to_string(i));
        }
        else
            g.names = vs.get<std::vector<std::string>>();
        auto idx = [&](const json & x) -> int {
            if (x.is_number_integer())
                return x.get<int>();
            auto n = x.get<std::string>();
            for (int i = 0; i < g.size(); ++i)
                if (g.names[i] == n)
                    return i;
            throw InputError("unknown vertex '" + n + "'");
        };
        for (auto & e : j.at("edges"))
            g.edges.emplace_back(idx(e.at(0)), idx(e.at(1)));
        g.validate();
        return g;
    }
    catch (const json::exception & e) {
        throw InputError(std::string("target graph file: ") + e.what());
    }
    catch (const std::invalid_argument & e) {
        throw InputError(std::string("target graph file: ") + e.what());
    }
}

inline auto to_dot(const MultiGraph & g, const std::vector<std::string> & vertex_labels = {}) -> std::string
{
    static const char * palette[] = {"red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"};
    std::ostringstream out;
    out << "graph G {\n";
    for (int v = 0; v < g.n; ++v) {
        out << "  " << v;
        if (v < static_cast<int>(vertex_labels.size()))
            out << " [label=\"" << v << ": " << vertex_labels[v] << "\"]";
        out << ";\n";
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        out << "  " << g.edges[i].first << " -- " << g.edges[i].second;
        if (!g.colors.empty())
            out << " [color=" << palette[g.colors[i] % 8] << ", label=\"" << g.colors[i] << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace lcl
