#pragma once

#include <spinbound/count.hh>
#include <spinbound/graph.hh>
#include <spinbound/value.hh>
#include <spinbound/weights.hh>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spinbound
{
    /// Blow-up of G: every (spin i, vertex v) becomes a block S_{i,v} of
    /// C * lambda_{i,v} host vertices, and every cross pair x in S_{i,u},
    /// y in S_{j,v} over an edge uv is a host edge kept with probability
    /// lambda_{ij,uv}. The host graph itself is implicit.
    class BlowupHost
    {
        public:
            BlowupHost(const Graph & g, const WeightSystem & w, unsigned long c);

            auto graph() const -> const Graph & { return _g; }
            auto scale() const -> unsigned long { return _c; }
            auto spins() const -> unsigned { return _m; }

            auto block_size(Vertex v, Spin i) const -> std::uint64_t { return _size[std::size_t(v) * _m + i]; }
            /// Host id of the first vertex of S_{i,v}; blocks are laid out by vertex, then spin.
            auto block_offset(Vertex v, Spin i) const -> std::uint64_t { return _offset[std::size_t(v) * _m + i]; }
            auto host_vertices() const -> std::uint64_t { return _host_vertices; }
            auto host_edges() const -> std::uint64_t { return _host_edges; }

            auto probability(std::size_t e, Spin i, Spin j) const -> const Rational & { return _probability[table(e, i, j)]; }

            /// Index of the first host edge between S_{i,u} and S_{j,v} for edge e = uv;
            /// the pair (x, y) sits at that index + x * |S_{j,v}| + y.
            auto edge_offset(std::size_t e, Spin i, Spin j) const -> std::uint64_t { return _edge_offset[table(e, i, j)]; }

            /// Keep the host edge with counter value r iff r < threshold, or always.
            auto keeps(std::size_t e, Spin i, Spin j, std::uint64_t r) const -> bool
            {
                auto k = table(e, i, j);
                return _always[k] || r < _threshold[k];
            }

            /// Host vertex ids owned by v: the union of its blocks.
            auto list_of(Vertex v) const -> std::vector<Vertex>;

        private:
            auto table(std::size_t e, Spin i, Spin j) const -> std::size_t { return (e * _m + i) * _m + j; }

            Graph _g;
            unsigned long _c;
            unsigned _m;
            std::vector<std::uint64_t> _size, _offset;
            std::uint64_t _host_vertices = 0, _host_edges = 0;
            std::vector<Rational> _probability;
            std::vector<std::uint64_t> _edge_offset;
            std::vector<std::uint64_t> _threshold;
            std::vector<bool> _always;
    };

    /// Requires exact positive vertex weights with C * lambda integral and
    /// edge weights in (0, 1].
    auto build_blowup_host(const Graph & g, const WeightSystem & w, unsigned long c) -> BlowupHost;

    /// Random subgraph of the host: one 0/1 matrix per (edge, i, j), row x
    /// in S_{i,u}, column y in S_{j,v}. Only sampled pairs are present.
    struct TildeH
    {
        std::vector<std::vector<std::uint8_t>> kept;
        std::vector<bool> sampled;
        unsigned spins = 0;

        auto index(std::size_t e, Spin i, Spin j) const -> std::size_t { return (e * spins + i) * spins + j; }
        auto edge_count() const -> std::uint64_t;
    };

    /// Every host edge decided by the counter stream keyed by seed at its
    /// global edge index, so any subset of edges can be sampled consistently.
    auto sample_tilde_h(const BlowupHost & host, std::uint64_t seed) -> TildeH;

    /// Only the block pairs (cfg(u), cfg(v)) are sampled; they agree bit for
    /// bit with the full sample for the same seed.
    auto sample_tilde_h(const BlowupHost & host, std::uint64_t seed, const SpinConfig & cfg) -> TildeH;

    /// The sampled host as an explicit graph (every block pair must be sampled).
    auto to_graph(const BlowupHost & host, const TildeH & h) -> Graph;

    /// |H_cfg(G, H~)|: maps with f(v) in S_{cfg(v),v} sending every edge of G
    /// to a kept edge, by variable elimination. Budget bounds the largest
    /// intermediate table.
    auto count_block_homs(const BlowupHost & host, const TildeH & h, const SpinConfig & cfg,
            const EvalOptions & opts = {}) -> std::uint64_t;

    /// Edge weights divided by their maximum when it exceeds 1; returns the
    /// divisor (1 when nothing changed).
    auto scale_edge_weights(const WeightSystem & w, WeightSystem & scaled) -> Rational;

    struct BlowupStats
    {
        unsigned long c = 0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
        SpinConfig cfg;
        std::vector<std::uint64_t> samples;

        Rational mu;
        Rational edge_scale{ 1 };
        Rational emp_mean;
        Rational emp_var;
        Rational alpha;
        Rational cheb_budget;
        /// sqrt(alpha) / (sqrt(C) - sqrt(alpha)) when C > alpha.
        std::optional<double> delta;
        /// m^N + a N m^{a+b} / (a+b) when G is biregular.
        std::optional<Rational> threshold;

        auto var_ratio() const -> double;
    };

    auto concentration_experiment(const Graph & g, const WeightSystem & w, const SpinConfig & cfg, unsigned long c,
            std::size_t trials, std::uint64_t seed, const EvalOptions & opts = {}) -> BlowupStats;

    auto to_json(const BlowupStats & s, const std::optional<std::string> & samples_path) -> nlohmann::json;

    /// One decimal count per line.
    auto format_samples(const BlowupStats & s) -> std::string;
}
