// Copyright 2026 The qaoalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qaoalab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "qaoalab/error.hpp"

namespace qaoalab {

std::string to_string(const KindTag& tag) {
    switch (tag.kind) {
    case GraphKind::UnweightedRegular: return "u" + std::to_string(tag.degree) + "R";
    case GraphKind::WeightedRegular: return "w" + std::to_string(tag.degree) + "R";
    case GraphKind::WeightedComplete: return "wK";
    case GraphKind::Arbitrary: break;
    }
    return "arbitrary";
}

KindTag kind_tag_from_string(const std::string& text) {
    if (text == "arbitrary") return {};
    if (text == "wK") return {GraphKind::WeightedComplete, 0};
    if (text.size() >= 3 && (text.front() == 'u' || text.front() == 'w') && text.back() == 'R') {
        const int d = std::stoi(text.substr(1, text.size() - 2));
        return {text.front() == 'u' ? GraphKind::UnweightedRegular : GraphKind::WeightedRegular, d};
    }
    throw ParameterError("unknown graph kind '" + text + "'");
}

Graph::Graph(int n_vertices, std::vector<Edge> edges, KindTag kind)
    : n_vertices_(n_vertices), edges_(std::move(edges)), kind_(kind) {
    if (n_vertices_ <= 0) throw ParameterError("graph needs at least one vertex");
    for (auto& e : edges_) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n_vertices_) throw ParameterError("edge endpoint out of range");
        if (e.i == e.j) throw ParameterError("self-loop at vertex " + std::to_string(e.i));
        if (!std::isfinite(e.w) || e.w < 0.0) throw ParameterError("edge weight must be finite and >= 0");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
        if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j)
            throw ParameterError("duplicate edge (" + std::to_string(edges_[k].i) + ", " +
                                 std::to_string(edges_[k].j) + ")");
    }

    switch (kind_.kind) {
    case GraphKind::UnweightedRegular:
    case GraphKind::WeightedRegular: {
        for (int deg : degrees())
            if (deg != kind_.degree) throw ParameterError("graph is not " + to_string(kind_));
        break;
    }
    case GraphKind::WeightedComplete:
        if (edges_.size() != static_cast<std::size_t>(n_vertices_) * (n_vertices_ - 1) / 2)
            throw ParameterError("graph is not complete");
        break;
    case GraphKind::Arbitrary: break;
    }
    for (const auto& e : edges_) {
        if (kind_.kind == GraphKind::UnweightedRegular && e.w != 1.0)
            throw ParameterError("unweighted graph with non-unit weight");
        if (kind_.weighted() && e.w > 1.0) throw ParameterError("weighted-kind edge weight above 1");
    }
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(n_vertices_, 0);
    for (const auto& e : edges_) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return deg;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(n_vertices_);
    for (const auto& e : edges_) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
}

double Graph::total_weight() const {
    double total = 0.0;
    for (const auto& e : edges_) total += e.w;
    return total;
}

bool CutResult::contains(Bitstring z) const {
    return std::binary_search(optimal_strings.begin(), optimal_strings.end(), z);
}

VertexNumbering::VertexNumbering(std::vector<int> new_index_of) : map_(std::move(new_index_of)) {
    std::vector<char> seen(map_.size(), 0);
    for (int target : map_) {
        if (target < 0 || target >= static_cast<int>(map_.size()) || seen[target])
            throw ParameterError("vertex numbering is not a bijection");
        seen[target] = 1;
    }
}

VertexNumbering VertexNumbering::identity(int n) {
    std::vector<int> map(n);
    std::iota(map.begin(), map.end(), 0);
    return VertexNumbering(std::move(map));
}

Graph generate_random_regular(int n, int d, std::uint64_t seed) {
    if (n <= 0 || d < 0) throw ParameterError("vertex count and degree must be positive");
    if (d >= n) throw ParameterError("degree must be smaller than the vertex count");
    if ((static_cast<long long>(n) * d) % 2 != 0) throw ParameterError("n * d must be even");

    std::mt19937_64 rng(seed);
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    constexpr int kMaxAttempts = 1000000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        stubs.clear();
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < d; ++k) stubs.push_back(v);
        std::shuffle(stubs.begin(), stubs.end(), rng);

        std::vector<Edge> edges;
        edges.reserve(stubs.size() / 2);
        bool simple = true;
        for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
            int a = stubs[k], b = stubs[k + 1];
            if (a == b) {
                simple = false;
                break;
            }
            edges.push_back({std::min(a, b), std::max(a, b), 1.0});
        }
        if (!simple) continue;
        std::sort(edges.begin(), edges.end(),
                  [](const Edge& x, const Edge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
        const bool has_multi = std::adjacent_find(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
                                   return x.i == y.i && x.j == y.j;
                               }) != edges.end();
        if (has_multi) continue;
        return Graph(n, std::move(edges), {GraphKind::UnweightedRegular, d});
    }
    throw NumericalError("configuration model failed to produce a simple graph");
}

Graph assign_random_weights(const Graph& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Edge> edges = g.edges();
    for (auto& e : edges) e.w = unit(rng);

    KindTag kind = g.kind();
    if (kind.kind == GraphKind::UnweightedRegular) kind.kind = GraphKind::WeightedRegular;
    // arbitrary and complete graphs keep their tag
    return Graph(g.n_vertices(), std::move(edges), kind);
}

Graph make_ring(int n) {
    if (n < 3) throw ParameterError("ring needs at least 3 vertices");
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n, 1.0});
    return Graph(n, std::move(edges), {GraphKind::UnweightedRegular, 2});
}

Bitstring flip(Bitstring z, int n) {
    const Bitstring mask = n >= 64 ? ~Bitstring{0} : ((Bitstring{1} << n) - 1);
    return ~z & mask;
}

Bitstring parse_bitstring(const std::string& text) {
    if (text.size() > 64) throw ParameterError("bitstring longer than 64");
    Bitstring z = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1')
            z |= Bitstring{1} << i;
        else if (text[i] != '0')
            throw ParameterError("bitstring must contain only 0 and 1");
    }
    return z;
}

std::string format_bitstring(Bitstring z, int n) {
    std::string out(n, '0');
    for (int i = 0; i < n; ++i)
        if ((z >> i) & 1U) out[i] = '1';
    return out;
}

double cut_value(const Graph& g, Bitstring z) {
    double value = 0.0;
    for (const auto& e : g.edges())
        if (((z >> e.i) ^ (z >> e.j)) & 1U) value += e.w;
    return value;
}

double cut_value(const Graph& g, const std::string& z) {
    if (static_cast<int>(z.size()) != g.n_vertices())
        throw ParameterError("bitstring length " + std::to_string(z.size()) + " does not match " +
                             std::to_string(g.n_vertices()) + " vertices");
    return cut_value(g, parse_bitstring(z));
}

CutResult brute_force_maxcut(const Graph& g, int cap) {
    const int n = g.n_vertices();
    if (n > cap) throw CapacityError("brute-force MaxCut limited to " + std::to_string(cap) + " vertices");

    // vertex 0 pinned to 0; the flip partner covers the other half
    const Bitstring half = Bitstring{1} << (n - 1);
    std::vector<double> values(half);
    double best = -std::numeric_limits<double>::infinity();
    for (Bitstring k = 0; k < half; ++k) {
        values[k] = cut_value(g, k << 1);
        best = std::max(best, values[k]);
    }
    const double threshold = best - 1e-12 * std::max(1.0, std::abs(best));
    CutResult result;
    result.c_max = best;
    for (Bitstring k = 0; k < half; ++k) {
        if (values[k] >= threshold) {
            result.optimal_strings.push_back(k << 1);
            result.optimal_strings.push_back(flip(k << 1, n));
        }
    }
    std::sort(result.optimal_strings.begin(), result.optimal_strings.end());
    return result;
}

int bandwidth(const Graph& g) {
    int width = 0;
    for (const auto& e : g.edges()) width = std::max(width, std::abs(e.j - e.i));
    return width;
}

Graph renumber(const Graph& g, const VertexNumbering& numbering) {
    if (numbering.size() != g.n_vertices()) throw ParameterError("numbering size does not match graph");
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const auto& e : g.edges()) edges.push_back({numbering[e.i], numbering[e.j], e.w});
    return Graph(g.n_vertices(), std::move(edges), g.kind());
}

namespace {

// BFS level structure of the component containing `root`.
std::vector<std::vector<int>> level_structure(const std::vector<std::vector<int>>& adj, int root) {
    std::vector<int> depth(adj.size(), -1);
    std::vector<std::vector<int>> levels{{root}};
    depth[root] = 0;
    while (true) {
        std::vector<int> next;
        for (int v : levels.back())
            for (int u : adj[v])
                if (depth[u] < 0) {
                    depth[u] = depth[v] + 1;
                    next.push_back(u);
                }
        if (next.empty()) break;
        levels.push_back(std::move(next));
    }
    return levels;
}

// George-Liu pseudo-peripheral vertex search.
int pseudo_peripheral(const std::vector<std::vector<int>>& adj, const std::vector<int>& deg, int start) {
    int root = start;
    auto levels = level_structure(adj, root);
    while (true) {
        const auto& last = levels.back();
        int candidate = *std::min_element(last.begin(), last.end(), [&](int a, int b) {
            return std::tie(deg[a], a) < std::tie(deg[b], b);
        });
        auto trial = level_structure(adj, candidate);
        if (trial.size() <= levels.size()) return root;
        root = candidate;
        levels = std::move(trial);
    }
}

}  // namespace

VertexNumbering cuthill_mckee(const Graph& g) {
    const int n = g.n_vertices();
    const auto adj = g.adjacency();
    const auto deg = g.degrees();

    std::vector<int> component(n, -1);
    std::vector<std::vector<int>> members;
    for (int v = 0; v < n; ++v) {
        if (component[v] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        std::queue<int> frontier;
        frontier.push(v);
        component[v] = id;
        while (!frontier.empty()) {
            int x = frontier.front();
            frontier.pop();
            members[id].push_back(x);
            for (int u : adj[x])
                if (component[u] < 0) {
                    component[u] = id;
                    frontier.push(u);
                }
        }
    }
    std::stable_sort(members.begin(), members.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });

    std::vector<int> order;
    order.reserve(n);
    std::vector<char> placed(n, 0);
    for (const auto& comp : members) {
        const int seed = *std::min_element(comp.begin(), comp.end(), [&](int a, int b) {
            return std::tie(deg[a], a) < std::tie(deg[b], b);
        });
        const int root = pseudo_peripheral(adj, deg, seed);
        std::size_t head = order.size();
        order.push_back(root);
        placed[root] = 1;
        while (head < order.size()) {
            const int v = order[head++];
            std::vector<int> fresh;
            for (int u : adj[v])
                if (!placed[u]) fresh.push_back(u);
            std::sort(fresh.begin(), fresh.end(),
                      [&](int a, int b) { return std::tie(deg[a], a) < std::tie(deg[b], b); });
            for (int u : fresh) {
                placed[u] = 1;
                order.push_back(u);
            }
        }
    }

    std::vector<int> new_index_of(n);
    for (int k = 0; k < n; ++k) new_index_of[order[k]] = k;
    VertexNumbering result(std::move(new_index_of));
    if (bandwidth(renumber(g, result)) <= bandwidth(g)) return result;
    return VertexNumbering::identity(n);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.n_vertices() << ' ' << g.edges().size() << '\n';
    out << std::setprecision(17);
    for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.w << '\n';
}

namespace {

KindTag infer_kind(int n, const std::vector<Edge>& edges) {
    if (edges.empty()) return {};
    std::vector<int> deg(n, 0);
    bool unit = true, in_unit_interval = true;
    for (const auto& e : edges) {
        ++deg[e.i];
        ++deg[e.j];
        unit = unit && e.w == 1.0;
        in_unit_interval = in_unit_interval && e.w >= 0.0 && e.w <= 1.0;
    }
    const bool regular = std::all_of(deg.begin(), deg.end(), [&](int x) { return x == deg[0]; });
    if (regular && unit) return {GraphKind::UnweightedRegular, deg[0]};
    if (regular && in_unit_interval) return {GraphKind::WeightedRegular, deg[0]};
    return {};
}

}  // namespace

Graph read_edge_list(std::istream& in, KindTag kind) {
    long long n = 0, m = 0;
    if (!(in >> n >> m) || n <= 0 || m < 0) throw FormatError("edge list: bad header, expected 'N M'");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long k = 0; k < m; ++k) {
        Edge e;
        if (!(in >> e.i >> e.j >> e.w)) throw FormatError("edge list: expected " + std::to_string(m) + " edges");
        edges.push_back(e);
    }
    if (kind.kind == GraphKind::Arbitrary) kind = infer_kind(static_cast<int>(n), edges);
    return Graph(static_cast<int>(n), std::move(edges), kind);
}

void save_graph(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_edge_list(out, g);
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

}  // namespace qaoalab
