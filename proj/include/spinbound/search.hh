#pragma once

#include <spinbound/bounds.hh>
#include <spinbound/count.hh>
#include <spinbound/graph.hh>
#include <spinbound/rng.hh>
#include <spinbound/weights.hh>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinbound
{
    /// Adjacency bits of g relabelled into its canonical form; two graphs
    /// are isomorphic iff their canonical strings agree.
    auto canonical_string(const Graph & g) -> std::string;

    /// g relabelled into its canonical form.
    auto canonical_graph(const Graph & g) -> Graph;

    struct GraphFilter
    {
        enum class Kind
        {
            all,
            bipartite,
            biregular
        };

        Kind kind = Kind::all;
        unsigned a = 0;
        unsigned b = 0;

        static auto biregular(unsigned a, unsigned b) -> GraphFilter { return { Kind::biregular, a, b }; }
    };

    inline constexpr std::size_t enumerate_ceiling_general = 10;
    inline constexpr std::size_t enumerate_ceiling_biregular = 12;

    /// One representative per isomorphism class, for 1..n_max vertices,
    /// ordered by vertex count and then canonical string. Graphs without
    /// edges are left out. For biregular(a,b) the classE side has degree a.
    auto enumerate_graphs(std::size_t n_max, GraphFilter filter, bool connected_only) -> std::vector<Graph>;

    /// hardcore draws one activity shared by every vertex, hardcore_vertex
    /// one per vertex.
    enum class WeightMode
    {
        general,
        uniform_edge,
        hardcore,
        hardcore_vertex
    };

    auto to_string(WeightMode m) -> std::string;
    auto parse_weight_mode(std::string_view s) -> WeightMode;

    struct WeightSampler
    {
        unsigned spins = 2;
        unsigned cap = 4;
        bool allow_zero = false;
        WeightMode mode = WeightMode::general;
    };

    /// p / q with p, q uniform in 1..cap, drawn from the stream at `counter`.
    auto sample_fraction(const CounterRng & rng, std::uint64_t & counter, unsigned cap) -> std::pair<unsigned, unsigned>;

    /// Vertex entries first (by vertex, then spin), then edge entries
    /// (by edge, then i <= j), each optionally zeroed with probability 1/8.
    /// Hard-core modes draw only the activities.
    auto sample_weights(const Graph & g, const WeightSampler & sampler, std::uint64_t seed) -> WeightSystem;

    /// Random target on 1..max_vertices vertices (each pair an edge with
    /// probability 1/2) and lists keeping each target vertex with probability 3/4.
    struct ListInstance
    {
        Graph h;
        ListAssignment lists;
    };

    auto sample_list_instance(const Graph & g, std::size_t max_vertices, std::uint64_t seed) -> ListInstance;

    struct CampaignConfig
    {
        enum class Source
        {
            biregular,
            bipartite,
            all,
            files
        };

        Source source = Source::biregular;
        std::size_t n_max = 8;
        /// a = b = 0 with source biregular: every pair a >= b up to max_degree.
        unsigned a = 0;
        unsigned b = 0;
        unsigned max_degree = 3;
        bool connected = true;
        std::vector<unsigned> spins{ 2 };
        unsigned cap = 4;
        bool allow_zero = false;
        WeightMode weights = WeightMode::general;
        std::vector<std::string> bounds{ "thm3" };
        std::size_t trials = 10;
        std::uint64_t seed = 1;
        /// Directory for witness files and the report; empty writes nothing.
        std::string out;
        std::size_t host_n = 4;
        std::vector<std::string> files;
        bool unit_first = false;
        unsigned threads = 0;
        double budget = 1e8;
    };

    /// `key = value` lines, `#` comments. Unknown keys are errors.
    auto parse_campaign_config(std::string_view text) -> CampaignConfig;
    auto to_json(const CampaignConfig & cfg) -> nlohmann::json;

    /// A serialised instance that can be re-evaluated on its own.
    struct InstanceRecord
    {
        std::string bound;
        std::size_t graph_index = 0;
        std::size_t trial = 0;
        std::string graph_text;
        /// Weight file, or for list bounds the target graph and list file.
        std::string weights_text;
        std::string host_text;
        std::string lists_text;
    };

    auto to_json(const InstanceRecord & r) -> nlohmann::json;

    /// Rebuilds the instance from its text and evaluates it exactly.
    auto recheck_instance(const InstanceRecord & r, const EvalOptions & opts = {}) -> BoundReport;

    struct BoundAggregate
    {
        std::string bound;
        std::size_t instances = 0;
        std::size_t holds = 0;
        std::size_t violated = 0;
        std::size_t inconclusive = 0;
        std::size_t skipped = 0;
        std::size_t errors = 0;
        std::optional<double> min_log_slack;
        std::optional<InstanceRecord> min_witness;
        /// Indices of graphs with at least one exactly tight instance.
        std::vector<std::size_t> tight_graphs;
        std::vector<std::pair<InstanceRecord, BoundReport>> violations;
        std::vector<std::string> error_messages;
    };

    struct CampaignReport
    {
        CampaignConfig config;
        std::vector<Graph> graphs;
        std::vector<BoundAggregate> bounds;
        double seconds = 0.0;
        /// Witness file paths, parallel to each aggregate's violations.
        std::vector<std::vector<std::vector<std::string>>> witness_files;
    };

    auto run_campaign(const CampaignConfig & cfg) -> CampaignReport;

    /// Timing is kept under the separate "timing" key.
    auto to_json(const CampaignReport & r) -> nlohmann::json;

    auto summary_table(const CampaignReport & r) -> std::string;
}
