#pragma once

#include <spinbound/graph.hh>
#include <spinbound/value.hh>
#include <spinbound/weights.hh>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spinbound
{
    /// Limits shared by every exponential routine. budget bounds the number
    /// of enumerated configurations (or DP table cells); exceeding it raises
    /// BudgetExceeded, never a truncated answer. threads = 0 means all cores.
    struct EvalOptions
    {
        double budget = 1e8;
        unsigned threads = 0;
    };

    /// f(v) for every vertex v, 0-based spins.
    using SpinConfig = std::vector<Spin>;

    auto weight_of(const Graph & g, const WeightSystem & w, const SpinConfig & f) -> NonNegValue;

    /// Z^W(G) by enumerating all m^n configurations in lexicographic order,
    /// split across workers by the spin of vertex 0. Exact when w is exact.
    auto partition_brute(const Graph & g, const WeightSystem & w, const EvalOptions & opts = {}) -> NonNegValue;

    /// Z^W(G) enumerating spins only on `enumerated`; every other vertex must
    /// have all its neighbours in `enumerated` and is summed out in closed form.
    auto partition_bipartite(const Graph & g, const WeightSystem & w, std::span<const Vertex> enumerated,
            const EvalOptions & opts = {}) -> NonNegValue;

    /// Z on K_{a,b}, enumerating the smaller side. Cost m^min(a,b).
    auto partition_kab(const KabInstance & inst, const EvalOptions & opts = {}) -> NonNegValue;

    /// Uses the smaller class of a bipartite graph when possible, else brute force.
    auto partition(const Graph & g, const WeightSystem & w, const EvalOptions & opts = {}) -> NonNegValue;

    /// L(v) subset of V(H) for every v in V(G); lists are kept sorted.
    struct ListAssignment
    {
        std::vector<std::vector<Vertex>> lists;

        static auto full(std::size_t g_size, std::size_t h_size) -> ListAssignment;

        /// Sorts, removes duplicates, and checks ids against H.
        void normalise(const Graph & g, const Graph & h);
    };

    /// |Hom^L(G,H)| by backtracking, always branching on the vertex with the
    /// fewest surviving candidates. Budget applies to prod_v |L(v)|.
    auto count_list_homs(const Graph & g, const Graph & h, const ListAssignment & lists, const EvalOptions & opts = {}) -> Integer;

    auto count_homs(const Graph & g, const Graph & h, const EvalOptions & opts = {}) -> Integer;

    /// |C^x(A,B)|: maps on B respecting lists and every A-B edge of G, given
    /// images x[k] of A[k]. Throws PreconditionError if x is not a partial
    /// list assignment on A or A and B meet.
    auto count_extensions(const Graph & g, const Graph & h, const ListAssignment & lists,
            std::span<const Vertex> a_set, std::span<const Vertex> b_set, std::span<const Vertex> x) -> Integer;

    /// Families (A_i, B_i) with cover multiplicities t1 (for the A side) and t2.
    struct CoverFamilyPair
    {
        std::vector<std::vector<Vertex>> a_sets;
        std::vector<std::vector<Vertex>> b_sets;
        unsigned t1 = 1;
        unsigned t2 = 1;
    };

    /// A = {N(v) : v in classO}, B = {{v} : v in classO}, t1 = a, t2 = 1.
    auto neighbourhood_families(const BiregularCert & cert) -> CoverFamilyPair;

    /// `l <v> <h...>` lines; vertices without a line get all of V(H).
    auto parse_lists(std::string_view text, const Graph & g, const Graph & h) -> ListAssignment;
    auto format_lists(const ListAssignment & lists) -> std::string;

    /// `t <t1> <t2>` then one `pair A <ids...> B <ids...>` line per i.
    auto parse_families(std::string_view text, const Graph & g) -> CoverFamilyPair;
    auto format_families(const CoverFamilyPair & fam) -> std::string;
}
