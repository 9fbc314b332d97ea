#pragma once

#include <spinbound/count.hh>
#include <spinbound/graph.hh>
#include <spinbound/value.hh>
#include <spinbound/weights.hh>

#include <json.hpp>

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spinbound
{
    /// Exact product of radicals, prod_k base_k^{1/root_k}. Factors are kept
    /// merged by root and sorted, so two equal expressions compare equal.
    class RootProduct
    {
        public:
            RootProduct() = default;
            RootProduct(Rational base, unsigned long root = 1);

            void multiply(const Rational & base, unsigned long root);
            void multiply(const RootProduct & other);

            auto factors() const -> const std::vector<std::pair<unsigned long, Rational>> & { return _factors; }
            auto is_zero() const -> bool;
            auto log() const -> double;

            /// Exact comparison: both sides raised to the lcm of every root.
            friend auto compare(const RootProduct & x, const RootProduct & y) -> std::strong_ordering;

        private:
            std::vector<std::pair<unsigned long, Rational>> _factors;
    };

    using BoundValue = std::variant<RootProduct, LogValue>;

    auto log_of(const BoundValue & v) -> double;
    auto backend_of(const BoundValue & v) -> Backend;

    enum class Verdict
    {
        holds,
        violated,
        inconclusive
    };

    auto to_string(Verdict v) -> std::string;

    struct BoundReport
    {
        std::string bound;
        BoundValue lhs;
        BoundValue rhs;
        /// log rhs - log lhs; +inf when lhs = 0 < rhs, 0 when both vanish.
        double log_slack = 0.0;
        Backend backend = Backend::exact;
        Verdict verdict = Verdict::holds;
        std::string graph_sha;
        std::string weights_sha;
        /// A log-domain verdict was re-decided exactly.
        bool rechecked = false;
        /// lhs = rhs exactly.
        bool tight = false;
    };

    /// lhs <= rhs decided exactly (both exact) or with relative tolerance
    /// 1e-9 in the log domain, where a failure is only ever INCONCLUSIVE.
    auto compare_sides(std::string bound, BoundValue lhs, BoundValue rhs) -> BoundReport;

    struct BoundOptions
    {
        Backend backend = Backend::exact;
        EvalOptions eval;
    };

    /// prod_{v in classO} Z^{W^v}(K_{a,b})^{1/a} for one orientation.
    auto theorem3_rhs(const Graph & g, const WeightSystem & w, const BiregularCert & cert, const BoundOptions & opts = {}) -> BoundValue;

    /// Z^W(G) against the K_{a,b} product bound; for a = b the smaller of
    /// the two orientations is used. LOG verdicts that fail are re-decided
    /// exactly when w is rational.
    auto theorem3_bound(const Graph & g, const WeightSystem & w, const BoundOptions & opts = {}) -> BoundReport;

    /// Lists on K_{a,b} around v in classO: z-side vertices get L(v),
    /// w_k gets L(n_k(v)).
    auto lists_around(const ListAssignment & lists, const BiregularCert & cert, Vertex v) -> ListAssignment;

    auto theorem4_rhs(const Graph & g, const Graph & h, const ListAssignment & lists, const BiregularCert & cert,
            const EvalOptions & opts = {}) -> BoundValue;

    /// |Hom^L(G,H)| against prod_{v in classO} |Hom^{L^v}(K_{a,b},H)|^{1/a}, exact.
    auto theorem4_bound(const Graph & g, const Graph & h, const ListAssignment & lists, const EvalOptions & opts = {}) -> BoundReport;

    /// prod_i (sum_x |C^x(A_i,B_i)|^{t1/t2})^{1/t1} with no check on the
    /// families. Exact when t2 divides t1, log domain otherwise.
    auto evaluate_cover_product(const Graph & g, const Graph & h, const ListAssignment & lists, const CoverFamilyPair & fam,
            const EvalOptions & opts = {}) -> BoundValue;

    /// As evaluate_cover_product, after checking that G is bipartite with
    /// every A_i on one side and B_i on the other, and that the families
    /// cover the classes t1 and t2 times.
    auto theorem5_bound(const Graph & g, const Graph & h, const ListAssignment & lists, const CoverFamilyPair & fam,
            const EvalOptions & opts = {}) -> BoundValue;

    /// Z^W(G) against prod_{uv} Z^{W^{uv}}(K_{d(u),d(v)})^{1/(d(u)d(v))}.
    auto conjecture1_bound(const Graph & g, const WeightSystem & w, const BoundOptions & opts = {}) -> BoundReport;

    /// Lists on K_{d(u),d(v)} for edge e = uv: w_j gets L(n_j(v)), z_j gets L(n_j(u)).
    auto lists_around_edge(const Graph & g, const ListAssignment & lists, std::size_t e) -> ListAssignment;

    auto conjecture2_bound(const Graph & g, const Graph & h, const ListAssignment & lists, const EvalOptions & opts = {}) -> BoundReport;

    /// |I(K_{p,q})| = 2^p + 2^q - 1.
    auto independent_sets_kpq(unsigned p, unsigned q) -> Integer;

    /// |I(G)| <= (2^{d+1} - 1)^{N/2d} for d-regular bipartite G.
    auto kahn_ind(const Graph & g, const EvalOptions & opts = {}) -> BoundReport;

    /// |I(G)| <= prod_{uv} (2^{d(u)} + 2^{d(v)} - 1)^{1/(d(u)d(v))}.
    auto kahn_ind_conj(const Graph & g, const EvalOptions & opts = {}) -> BoundReport;

    struct KahnReports
    {
        std::optional<BoundReport> ind;
        BoundReport ind_conj;
    };

    /// Both Kahn bounds; ind is left empty when G is not regular bipartite.
    auto kahn_bounds(const Graph & g, const EvalOptions & opts = {}) -> KahnReports;

    struct FreeEnergyReport
    {
        double free_energy = 0.0;
        double lower = 0.0;
        double upper = 0.0;
        std::size_t n = 0;
        unsigned d = 0;
        double beta = 0.0;
        bool in_bounds = false;
    };

    /// F = log Z_Ising(beta, h = 0) / N against beta d / 2 <= F <= beta d / 2 + ln 2.
    auto ising_free_energy_check(const Graph & g, double beta, const EvalOptions & opts = {}) -> FreeEnergyReport;

    /// Digest of H together with a list assignment, for report descriptors.
    auto lists_sha(const Graph & h, const ListAssignment & lists) -> std::string;

    auto to_json(const BoundValue & v) -> nlohmann::json;
    auto to_json(const BoundReport & r) -> nlohmann::json;
    auto to_json(const FreeEnergyReport & r) -> nlohmann::json;

    /// Doubles as JSON; infinities become the strings "inf" and "-inf".
    auto json_number(double x) -> nlohmann::json;
}
