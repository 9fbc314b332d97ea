#pragma once

#include <spinbound/graph.hh>
#include <spinbound/value.hh>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spinbound
{
    /// Spins are 0-based internally and 1-based in text files.
    using Spin = unsigned;

    /// Vertex weights lambda_{i,v} and symmetric edge weights lambda_{ij,uv}
    /// for a fixed graph shape (vertex count, edge count) and spin count m.
    /// Edge e refers to the graph's e-th edge in sorted order.
    class WeightSystem
    {
        public:
            WeightSystem() = default;
            WeightSystem(std::size_t vertices, std::size_t edges, unsigned spins, const NonNegValue & fill = NonNegValue(1));

            /// Shape taken from g, every entry set to fill.
            WeightSystem(const Graph & g, unsigned spins, const NonNegValue & fill = NonNegValue(1)) :
                WeightSystem(g.size(), g.edge_count(), spins, fill)
            {
            }

            auto spins() const -> unsigned { return _spins; }
            auto vertex_count() const -> std::size_t { return _vertices; }
            auto edge_count() const -> std::size_t { return _edges; }

            auto vertex(Vertex v, Spin i) const -> const NonNegValue & { return _vertex[std::size_t(v) * _spins + i]; }
            auto edge(std::size_t e, Spin i, Spin j) const -> const NonNegValue & { return _edge[(e * _spins + i) * _spins + j]; }

            void set_vertex(Vertex v, Spin i, const NonNegValue & value);

            /// Writes both (i, j) and (j, i).
            void set_edge(std::size_t e, Spin i, Spin j, const NonNegValue & value);

            auto is_exact() const -> bool;
            auto to_log() const -> WeightSystem;

            /// True when every edge carries the same spin-pair table.
            auto uniform_edges() const -> bool;

            /// Throws PreconditionError when the shape does not match g.
            void check_shape(const Graph & g) const;

            friend auto operator== (const WeightSystem &, const WeightSystem &) -> bool = default;

        private:
            std::size_t _vertices = 0;
            std::size_t _edges = 0;
            unsigned _spins = 0;
            std::vector<NonNegValue> _vertex;
            std::vector<NonNegValue> _edge;
    };

    /// Hard-core system: spin 1 (index 0) is "occupied" with activity lam[v],
    /// spin 2 is "vacant", and two adjacent occupied vertices have weight 0.
    auto make_hardcore(const Graph & g, std::span<const NonNegValue> lam) -> WeightSystem;
    auto make_hardcore(const Graph & g, const NonNegValue & lam = NonNegValue(1)) -> WeightSystem;

    /// Ising system in the log domain. Spin index 0 is +1, index 1 is -1;
    /// w(sigma) = exp(-beta sum_uv sigma_u sigma_v + h sum_v sigma_v).
    auto make_ising(const Graph & g, double beta, double h) -> WeightSystem;

    /// Complete bipartite K_{a,b} with b vertices w_1..w_b of degree a
    /// (ids 0..b-1) and a vertices z_1..z_a of degree b (ids b..b+a-1),
    /// carrying a weight system.
    struct KabInstance
    {
        unsigned a = 0;
        unsigned b = 0;
        Graph graph;
        WeightSystem weights;

        static auto w_vertex(unsigned k) -> Vertex { return k - 1; }
        auto z_vertex(unsigned l) const -> Vertex { return b + l - 1; }
    };

    auto make_kab_graph(unsigned a, unsigned b) -> Graph;

    /// Weights W^v on K_{a,b} around v in classO: z-side copies lambda_{.,v},
    /// w_k copies lambda_{.,n_k(v)}, and edge w_k z_l copies edge n_k(v) v.
    auto restrict_to_kab(const Graph & g, const WeightSystem & w, const BiregularCert & cert, Vertex v) -> KabInstance;

    /// Weights W^{uv} on K_{d(u),d(v)} for edge id e = (u, v) with u < v.
    /// Requires uniform edge weights.
    auto restrict_to_edge(const Graph & g, const WeightSystem & w, std::size_t e) -> KabInstance;

    /// Text format: `m <spins>`, `vw <v> <i> <p/q>`, `ew <u> <v> <i> <j> <p/q>`;
    /// `vwl`/`ewl` carry the natural log instead (hex float, -inf for zero),
    /// with 1-based spins and i <= j; omitted entries are 1.
    auto parse_weights(std::string_view text, const Graph & g) -> WeightSystem;

    /// Every entry written explicitly, in a fixed order. Log-domain entries
    /// are written as `vwl`/`ewl` lines holding the log in hex float.
    auto format_weights(const Graph & g, const WeightSystem & w) -> std::string;
}
