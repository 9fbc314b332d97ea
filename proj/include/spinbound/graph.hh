#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spinbound
{
    using Vertex = unsigned;
    using Edge = std::pair<Vertex, Vertex>;

    /// Simple undirected graph on vertices 0..n-1. Edges are stored with
    /// u < v, sorted lexicographically; an edge's position in that order is
    /// its edge id.
    class Graph
    {
        public:
            Graph() = default;

            /// Throws PreconditionError on loops, duplicates or ids >= n.
            Graph(std::size_t n, std::vector<Edge> edges);

            auto size() const -> std::size_t { return _n; }
            auto edge_count() const -> std::size_t { return _edges.size(); }
            auto edges() const -> std::span<const Edge> { return _edges; }
            auto edge(std::size_t e) const -> const Edge & { return _edges[e]; }

            /// Neighbours of v in ascending id order.
            auto neighbours(Vertex v) const -> std::span<const Vertex> { return _adjacency[v]; }
            auto degree(Vertex v) const -> std::size_t { return _adjacency[v].size(); }

            auto has_edge(Vertex u, Vertex v) const -> bool { return _matrix[std::size_t(u) * _n + v] != 0; }
            auto edge_id(Vertex u, Vertex v) const -> std::optional<std::size_t>;

            auto is_connected() const -> bool;
            auto min_degree() const -> std::size_t;

            friend auto operator== (const Graph & a, const Graph & b) -> bool
            {
                return a._n == b._n && a._edges == b._edges;
            }

        private:
            std::size_t _n = 0;
            std::vector<Edge> _edges;
            std::vector<std::vector<Vertex>> _adjacency;
            std::vector<std::uint8_t> _matrix;
    };

    /// Reads the `p <n> <m>` / `e <u> <v>` text format.
    auto parse_graph(std::string_view text) -> Graph;

    /// Emits the same format, edges sorted; parse_graph(format_graph(g)) == g.
    auto format_graph(const Graph & g) -> std::string;

    auto complete_bipartite(unsigned p, unsigned q) -> Graph;
    auto cycle_graph(unsigned n) -> Graph;
    auto complete_graph(unsigned n) -> Graph;
    auto path_graph(unsigned n) -> Graph;
    auto hypercube_graph(unsigned dim) -> Graph;

    /// Two-colouring. side[v] is 0 for classE and 1 for classO.
    struct Bipartition
    {
        std::vector<Vertex> class_e;
        std::vector<Vertex> class_o;
        std::vector<std::uint8_t> side;
    };

    /// BFS per component from its lowest id vertex, which goes to classE.
    /// Throws NotBipartite carrying an odd closed walk.
    auto bipartition(const Graph & g) -> Bipartition;

    auto is_bipartite(const Graph & g) -> bool;

    /// Certificate that every classE vertex has degree a and every classO
    /// vertex degree b. neighbour_order[v] is n_1(v), ..., n_deg(v)(v).
    struct BiregularCert
    {
        unsigned a = 0;
        unsigned b = 0;
        std::vector<Vertex> class_e;
        std::vector<Vertex> class_o;
        std::vector<std::vector<Vertex>> neighbour_order;

        /// Roles of the two classes exchanged; only meaningful when a == b.
        auto swapped() const -> BiregularCert;

        /// One orientation when a != b, both when a == b.
        auto orientations() const -> std::vector<BiregularCert>;
    };

    /// When a != b, classE becomes the higher degree class in each component.
    /// Throws NotBiregular with two witnesses of differing degree in one class.
    auto certify_biregular(const Graph & g, const Bipartition & bp) -> BiregularCert;

    auto certify_biregular(const Graph & g) -> BiregularCert;

    /// Graph with vertex v renamed to perm[v].
    auto relabel(const Graph & g, std::span<const Vertex> perm) -> Graph;

    auto is_complete_bipartite(const Graph & g) -> bool;
}
