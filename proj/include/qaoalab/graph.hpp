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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qaoalab {

/// Computational-basis string. Bit i holds the spin of vertex i.
using Bitstring = std::uint64_t;

struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

enum class GraphKind { UnweightedRegular, WeightedRegular, WeightedComplete, Arbitrary };

struct KindTag {
    GraphKind kind = GraphKind::Arbitrary;
    int degree = 0;  // meaningful for the regular kinds only

    bool weighted() const {
        return kind == GraphKind::WeightedRegular || kind == GraphKind::WeightedComplete;
    }
    friend bool operator==(const KindTag&, const KindTag&) = default;
};

std::string to_string(const KindTag& tag);
KindTag kind_tag_from_string(const std::string& text);

/// Weighted undirected simple graph, the MaxCut instance.
///
/// Edges are stored normalized (i < j) and sorted. The constructor validates
/// the invariants for the supplied kind tag and throws ParameterError.
class Graph {
public:
    Graph() = default;
    Graph(int n_vertices, std::vector<Edge> edges, KindTag kind = {});

    int n_vertices() const { return n_vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const KindTag& kind() const { return kind_; }

    std::vector<int> degrees() const;
    std::vector<std::vector<int>> adjacency() const;
    double total_weight() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    int n_vertices_ = 0;
    std::vector<Edge> edges_;
    KindTag kind_;
};

struct CutResult {
    double c_max = 0.0;
    /// Sorted, closed under global flip.
    std::vector<Bitstring> optimal_strings;

    bool contains(Bitstring z) const;
};

/// Bijection old vertex index -> new vertex index.
class VertexNumbering {
public:
    explicit VertexNumbering(std::vector<int> new_index_of);
    static VertexNumbering identity(int n);

    int size() const { return static_cast<int>(map_.size()); }
    int operator[](int old_index) const { return map_[old_index]; }
    const std::vector<int>& map() const { return map_; }

private:
    std::vector<int> map_;
};

inline constexpr int kBruteForceCap = 24;

Graph generate_random_regular(int n, int d, std::uint64_t seed);
Graph assign_random_weights(const Graph& g, std::uint64_t seed);

/// Unit-weight ring 0-1-...-(n-1)-0.
Graph make_ring(int n);

Bitstring flip(Bitstring z, int n);
Bitstring parse_bitstring(const std::string& text);
std::string format_bitstring(Bitstring z, int n);

double cut_value(const Graph& g, Bitstring z);
double cut_value(const Graph& g, const std::string& z);

CutResult brute_force_maxcut(const Graph& g, int cap = kBruteForceCap);

int bandwidth(const Graph& g);
Graph renumber(const Graph& g, const VertexNumbering& numbering);
VertexNumbering cuthill_mckee(const Graph& g);

// Edge-list text format: "N M" then M lines "i j w".
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in, KindTag kind = {});
void save_graph(const std::string& path, const Graph& g);
Graph load_graph(const std::string& path);

}  // namespace qaoalab
