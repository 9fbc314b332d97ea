#include <spinbound/bounds.hh>
#include <spinbound/errors.hh>

#include "oracles.hh"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spinbound;

namespace
{
    // Z of K_{a,b} around v, summed directly from the weights of G: the b
    // copies of the neighbours n_k(v) each take a spin, the a copies of v
    // each take a spin.
    auto kab_around(const Graph & g, const WeightSystem & w, Vertex v, unsigned a) -> Rational
    {
        auto nb = g.neighbours(v);
        std::size_t b = nb.size();
        auto m = w.spins();
        std::vector<Spin> f(a + b, 0);
        Rational total = 0;
        for (;;) {
            Rational term = 1;
            for (std::size_t k = 0 ; k < b ; ++k)
                term *= w.vertex(nb[k], f[k]).rational();
            for (std::size_t l = 0 ; l < a ; ++l)
                term *= w.vertex(v, f[b + l]).rational();
            for (std::size_t k = 0 ; k < b ; ++k) {
                auto e = *g.edge_id(nb[k], v);
                for (std::size_t l = 0 ; l < a ; ++l)
                    term *= w.edge(e, f[k], f[b + l]).rational();
            }
            total += term;

            std::size_t k = 0;
            while (k < f.size() && ++f[k] == m)
                f[k++] = 0;
            if (k == f.size())
                break;
        }
        return total;
    }

    // sum_v log Z^{W^v} / a over one class, the smaller of both when a = b
    auto theorem3_rhs_log(const Graph & g, const WeightSystem & w) -> double
    {
        auto bp = bipartition(g);
        auto side_log = [&](const std::vector<Vertex> & o, const std::vector<Vertex> & e) {
            auto a = unsigned(g.degree(e.front()));
            double s = 0;
            for (auto v : o)
                s += log_of(kab_around(g, w, v, a)) / a;
            return s;
        };
        auto d0 = g.degree(bp.class_e.front()), d1 = g.degree(bp.class_o.front());
        if (d0 == d1)
            return std::min(side_log(bp.class_o, bp.class_e), side_log(bp.class_e, bp.class_o));
        return d0 > d1 ? side_log(bp.class_o, bp.class_e) : side_log(bp.class_e, bp.class_o);
    }

    auto biregular_samples() -> std::vector<Graph>
    {
        // K_{3,3} minus a perfect matching, and two disjoint C_4
        Graph k33m(6, { { 0, 4 }, { 0, 5 }, { 1, 3 }, { 1, 5 }, { 2, 3 }, { 2, 4 } });
        Graph two_c4(8, { { 0, 1 }, { 1, 2 }, { 2, 3 }, { 0, 3 }, { 4, 5 }, { 5, 6 }, { 6, 7 }, { 4, 7 } });
        return { complete_bipartite(1, 1), complete_bipartite(1, 3), complete_bipartite(2, 3), cycle_graph(6),
            cycle_graph(8), hypercube_graph(3), k33m, two_c4, Graph(6, { { 0, 3 }, { 1, 4 }, { 2, 5 } }),
            // subdivided K_4, (3,2)-biregular
            Graph(10, { { 0, 4 }, { 0, 5 }, { 0, 6 }, { 1, 4 }, { 1, 7 }, { 1, 8 }, { 2, 5 }, { 2, 7 }, { 2, 9 },
                    { 3, 6 }, { 3, 8 }, { 3, 9 } }) };
    }

    auto exact(const BoundValue & v) -> const RootProduct & { return std::get<RootProduct>(v); }
}

TEST_CASE("radical products compare exactly")
{
    auto cmp = [](RootProduct x, RootProduct y) { return compare(x, y); };
    CHECK(cmp(RootProduct(Rational(2), 2), RootProduct(Rational(3), 3)) < 0);
    CHECK(cmp(RootProduct(Rational(4), 2), RootProduct(Rational(2))) == 0);
    CHECK(cmp(RootProduct(Rational(8), 3), RootProduct(Rational(4), 2)) == 0);

    RootProduct x(Rational(7), 4);
    x.multiply(Rational(7), 4);
    x.multiply(Rational(7), 4);
    CHECK(cmp(x, RootProduct(Rational(343), 4)) == 0);
    CHECK(oracle::close(x.log(), 0.75 * std::log(7.0), 1e-14));
    CHECK(cmp(RootProduct(Rational(4)), x) < 0);
    CHECK(cmp(RootProduct(Rational(5)), x) > 0);

    // values whose doubles coincide
    Integer big = 1;
    big <<= 200;
    RootProduct p(Rational(big), 3), q(Rational(big + 1), 3);
    CHECK(p.log() == q.log());
    CHECK(cmp(p, q) < 0);

    RootProduct zero(Rational(0), 2);
    CHECK(zero.is_zero());
    CHECK(cmp(zero, RootProduct(Rational(1, 1000), 5)) < 0);
    zero.multiply(Rational(5), 2);
    CHECK(zero.is_zero());
    CHECK(cmp(zero, RootProduct(Rational(0))) == 0);
}

TEST_CASE("comparison outcomes")
{
    auto r = compare_sides("t", RootProduct(Rational(0)), RootProduct(Rational(2)));
    CHECK(r.verdict == Verdict::holds);
    CHECK(std::isinf(r.log_slack));
    CHECK(to_json(r)["log_slack"] == "inf");

    auto both_zero = compare_sides("t", RootProduct(Rational(0)), RootProduct(Rational(0)));
    CHECK(both_zero.tight);
    CHECK(both_zero.log_slack == 0.0);

    auto bad = compare_sides("t", RootProduct(Rational(3)), RootProduct(Rational(8), 2));
    CHECK(bad.verdict == Verdict::violated);
    CHECK(bad.log_slack < 0);

    // log domain never claims a violation
    auto fuzzy = compare_sides("t", LogValue::from_log(1.0 + 1e-12), LogValue::from_log(1.0));
    CHECK(fuzzy.verdict == Verdict::holds);
    auto over = compare_sides("t", LogValue::from_log(1.1), LogValue::from_log(1.0));
    CHECK(over.verdict == Verdict::inconclusive);
    CHECK(over.backend == Backend::log);
}

TEST_CASE("thm3 holds and matches the direct evaluation")
{
    std::mt19937_64 rng(31);
    for (auto & g : biregular_samples())
        for (unsigned m = 1 ; m <= 3 ; ++m)
            for (int t = 0 ; t < (g.size() > 8 && m == 3 ? 1 : 4) ; ++t) {
                auto w = oracle::random_weights(g, m, rng, 5, t == 3 ? 0.2 : 0.0);
                auto r = theorem3_bound(g, w);
                REQUIRE(r.verdict == Verdict::holds);
                CHECK(r.backend == Backend::exact);
                CHECK(compare(exact(r.lhs), RootProduct(oracle::partition(g, w))) == 0);
                CHECK(oracle::close_log(log_of(r.rhs), theorem3_rhs_log(g, w)));
                CHECK(r.log_slack >= 0);
                CHECK(r.graph_sha.size() == 64);
            }
}

TEST_CASE("thm3 in the log domain agrees with the exact evaluation")
{
    std::mt19937_64 rng(32);
    auto g = cycle_graph(6);
    for (int t = 0 ; t < 10 ; ++t) {
        auto w = oracle::random_weights(g, 2, rng);
        auto e = theorem3_bound(g, w);
        auto l = theorem3_bound(g, w, { .backend = Backend::log, .eval = {} });
        CHECK(l.verdict == Verdict::holds);
        CHECK(oracle::close_log(l.log_slack, e.log_slack, 1e-9));
    }
}

TEST_CASE("thm3 specialises to the regular homomorphism bound")
{
    // vertex weights lambda on classE, mu on classO and 0/1 edge weights
    // from the adjacency of H give Z <= Z(K_{d,d})^{N/2d}
    std::mt19937_64 rng(33);
    for (auto g : { cycle_graph(4), cycle_graph(6), cycle_graph(8), hypercube_graph(3) }) {
        auto d = unsigned(g.degree(0));
        auto bp = bipartition(g);
        for (int t = 0 ; t < 5 ; ++t) {
            auto h = oracle::random_graph(3, rng, 0.6);
            std::vector<Rational> lam(3), mu(3);
            for (unsigned x = 0 ; x < 3 ; ++x) {
                lam[x] = oracle::random_fraction(rng, 4);
                mu[x] = oracle::random_fraction(rng, 4);
            }
            auto weigh = [&](const Graph & gg, const std::vector<std::uint8_t> & side) {
                WeightSystem w(gg, 3);
                for (Vertex v = 0 ; v < gg.size() ; ++v)
                    for (Spin i = 0 ; i < 3 ; ++i)
                        w.set_vertex(v, i, side[v] == 0 ? lam[i] : mu[i]);
                for (std::size_t e = 0 ; e < gg.edge_count() ; ++e)
                    for (Spin i = 0 ; i < 3 ; ++i)
                        for (Spin j = i ; j < 3 ; ++j)
                            w.set_edge(e, i, j, Rational(h.has_edge(i, j) ? 1 : 0));
                return w;
            };
            auto r = theorem3_bound(g, weigh(g, bp.side));
            CHECK(r.verdict == Verdict::holds);

            auto kdd = complete_bipartite(d, d);
            auto zk = oracle::partition(kdd, weigh(kdd, bipartition(kdd).side));
            CHECK(oracle::close_log(log_of(r.rhs), double(g.size()) / (2 * d) * log_of(zk)));
        }
    }
}

TEST_CASE("thm3 is tight on K_{a,b} when every restriction coincides")
{
    std::mt19937_64 rng(34);
    for (unsigned a = 1 ; a <= 3 ; ++a)
        for (unsigned b = 1 ; b <= 3 ; ++b) {
            auto g = complete_bipartite(a, b);
            auto cert = certify_biregular(g);
            for (unsigned m = 1 ; m <= 3 ; ++m) {
                auto w = oracle::random_weights(g, m, rng, 6);
                // one vertex row shared by classO, edge tables depending on the classE end only
                for (auto v : cert.class_o)
                    for (Spin i = 0 ; i < m ; ++i)
                        w.set_vertex(v, i, w.vertex(cert.class_o[0], i));
                for (auto u : cert.class_e)
                    for (auto v : cert.class_o)
                        for (Spin i = 0 ; i < m ; ++i)
                            for (Spin j = 0 ; j < m ; ++j)
                                w.set_edge(*g.edge_id(u, v), i, j, w.edge(*g.edge_id(u, cert.class_o[0]), i, j));
                auto r = theorem3_bound(g, w);
                CHECK(r.tight);
                CHECK(r.log_slack == 0.0);
            }
        }

    // arbitrary weights: K_{1,2} is Cauchy-Schwarz and strict
    auto g = complete_bipartite(1, 2);
    WeightSystem w(g, 2);
    w.set_edge(0, 0, 0, Rational(2));
    w.set_edge(1, 0, 0, Rational(3));
    w.set_edge(1, 1, 1, Rational(5));
    auto r = theorem3_bound(g, w);
    CHECK(r.verdict == Verdict::holds);
    CHECK_FALSE(r.tight);
}

TEST_CASE("thm3 rejects graphs it does not cover")
{
    CHECK_THROWS_AS(theorem3_bound(complete_graph(3), make_hardcore(complete_graph(3))), NotBipartite);
    CHECK_THROWS_AS(theorem3_bound(path_graph(4), make_hardcore(path_graph(4))), NotBiregular);
    CHECK_THROWS_AS(theorem3_bound(cycle_graph(4), make_hardcore(cycle_graph(6))), PreconditionError);
}

TEST_CASE("thm4 against the odometer")
{
    std::mt19937_64 rng(35);
    for (auto & g : biregular_samples()) {
        if (g.size() > 8)
            continue;
        for (int t = 0 ; t < 6 ; ++t) {
            auto h = oracle::random_graph(2 + t % 3, rng, 0.6);
            auto lists = oracle::random_lists(g.size(), h.size(), rng, 0.8);
            auto r = theorem4_bound(g, h, lists);
            REQUIRE(r.verdict == Verdict::holds);
            CHECK(compare(exact(r.lhs), RootProduct(Rational(oracle::list_homs(g, h, lists)))) == 0);

            // direct product over one orientation; the bound takes the smaller
            auto cert = certify_biregular(g);
            auto kab = complete_bipartite(cert.a, cert.b);
            RootProduct direct;
            for (auto v : cert.class_o) {
                ListAssignment around;
                // complete_bipartite(a, b) puts the a-side first: 0..a-1 are the z copies of v
                for (unsigned l = 0 ; l < cert.a ; ++l)
                    around.lists.push_back(lists.lists[v]);
                for (auto u : cert.neighbour_order[v])
                    around.lists.push_back(lists.lists[u]);
                direct.multiply(Rational(oracle::list_homs(kab, h, around)), cert.a);
            }
            CHECK(compare(exact(r.rhs), direct) <= 0);
            if (cert.a != cert.b) {
                CHECK(compare(exact(r.rhs), direct) == 0);
            }
        }
    }
}

TEST_CASE("thm4 is tight on K_{a,b} with one list across classO")
{
    std::mt19937_64 rng(36);
    for (unsigned a = 1 ; a <= 3 ; ++a)
        for (unsigned b = 1 ; b <= 3 ; ++b) {
            auto g = complete_bipartite(a, b);
            auto cert = certify_biregular(g);
            for (int t = 0 ; t < 5 ; ++t) {
                auto h = oracle::random_graph(3, rng, 0.6);
                auto lists = oracle::random_lists(g.size(), 3, rng, 0.8);
                for (auto v : cert.class_o)
                    lists.lists[v] = lists.lists[cert.class_o[0]];
                auto r = theorem4_bound(g, h, lists);
                CHECK(r.tight);
            }
        }
}

TEST_CASE("thm5 with neighbourhood families is thm4")
{
    std::mt19937_64 rng(37);
    for (auto & g : biregular_samples()) {
        if (g.size() > 8)
            continue;
        auto cert = certify_biregular(g);
        for (int t = 0 ; t < 4 ; ++t) {
            auto h = oracle::random_graph(1 + t, rng, 0.6);
            auto lists = oracle::random_lists(g.size(), h.size(), rng, 0.8);
            for (auto & c : cert.orientations()) {
                auto fam = neighbourhood_families(c);
                auto t5 = theorem5_bound(g, h, lists, fam);
                auto t4 = theorem4_rhs(g, h, lists, c);
                CHECK(compare(exact(t5), exact(t4)) == 0);
            }
        }
    }
}

TEST_CASE("thm5 with whole classes is exact")
{
    // A = classE, B = classO, t1 = t2 = 1: the sum of extension counts is the count itself
    std::mt19937_64 rng(38);
    for (int t = 0 ; t < 30 ; ++t) {
        auto g = oracle::random_graph(2 + t % 6, rng, 0.4);
        if (! is_bipartite(g) || g.edge_count() == 0)
            continue;
        auto bp = bipartition(g);
        auto h = oracle::random_graph(3, rng, 0.6);
        auto lists = oracle::random_lists(g.size(), 3, rng, 0.8);
        CoverFamilyPair fam{ { bp.class_e }, { bp.class_o }, 1, 1 };
        auto v = theorem5_bound(g, h, lists, fam);
        CHECK(compare(exact(v), RootProduct(Rational(oracle::list_homs(g, h, lists)))) == 0);
    }
}

TEST_CASE("thm5 with empty B sets is the trivial list bound")
{
    // C_6 into K_3, lists of size 2 on even vertices and 3 on odd ones;
    // A = {0, 2, 4} twice, B empty: every x has exactly one (empty) extension
    auto g = cycle_graph(6);
    auto h = complete_graph(3);
    auto lists = ListAssignment::full(6, 3);
    for (Vertex v : { 0u, 2u, 4u })
        lists.lists[v] = { 0, 1 };
    CoverFamilyPair fam{ { { 0, 2, 4 }, { 0, 2, 4 } }, { {}, {} }, 2, 1 };
    auto v = evaluate_cover_product(g, h, lists, fam);
    // (8^2)^{1/2}
    CHECK(compare(exact(v), RootProduct(Rational(8))) == 0);
    CHECK_THROWS_AS(theorem5_bound(g, h, lists, fam), PreconditionError);
}

TEST_CASE("thm5 reports an uncovered vertex by name")
{
    auto g = cycle_graph(6);
    auto h = complete_graph(3);
    auto lists = ListAssignment::full(6, 3);
    CoverFamilyPair fam{ { { 1, 5 }, { 1, 3 } }, { { 0 }, { 2 } }, 1, 1 };
    try {
        theorem5_bound(g, h, lists, fam);
        FAIL("accepted");
    }
    catch (const PreconditionError & e) {
        CHECK(std::string(e.what()).find("vertex 4") != std::string::npos);
    }

    CoverFamilyPair both{ { { 1 } }, { { 1 } }, 1, 1 };
    CHECK_THROWS_AS(theorem5_bound(g, h, lists, both), PreconditionError);
    CHECK_THROWS_AS(theorem5_bound(complete_graph(3), h, ListAssignment::full(3, 3), fam), NotBipartite);
}

TEST_CASE("thm5 with fractional exponent uses the log domain")
{
    auto g = cycle_graph(4);
    auto h = complete_graph(3);
    auto lists = ListAssignment::full(4, 3);
    // classE = {0, 2}, classO = {1, 3}; A covers classE 3 times, B covers classO twice
    CoverFamilyPair fam{ { { 0, 2 }, { 0 }, { 2 }, { 0, 2 } }, { { 1, 3 }, { 1 }, { 3 }, {} }, 3, 2 };
    auto v = theorem5_bound(g, h, lists, fam);
    REQUIRE(std::holds_alternative<LogValue>(v));
    CHECK(log_of(v) >= std::log(18.0) - 1e-9);

    // direct evaluation of the same product
    auto ext = [&](std::vector<Vertex> a, std::vector<Vertex> b) {
        double s = 0;
        std::vector<Vertex> x(a.size(), 0);
        for (;;) {
            double c = 1;
            for (auto u : b) {
                int k = 0;
                for (Vertex y = 0 ; y < 3 ; ++y) {
                    bool ok = true;
                    for (std::size_t i = 0 ; i < a.size() ; ++i)
                        if (g.has_edge(a[i], u) && ! h.has_edge(x[i], y))
                            ok = false;
                    k += ok;
                }
                c *= k;
            }
            s += std::pow(c, 1.5);
            std::size_t i = 0;
            while (i < x.size() && ++x[i] == 3)
                x[i++] = 0;
            if (i == x.size())
                break;
        }
        return std::log(s) / 3;
    };
    double expected = ext({ 0, 2 }, { 1, 3 }) + ext({ 0 }, { 1 }) + ext({ 2 }, { 3 }) + ext({ 0, 2 }, {});
    CHECK(oracle::close_log(log_of(v), expected));
}

TEST_CASE("conj1 on bipartite graphs and its tight case")
{
    std::mt19937_64 rng(39);
    for (auto & g : biregular_samples())
        for (int t = 0 ; t < 3 ; ++t) {
            auto r = conjecture1_bound(g, make_hardcore(g, NonNegValue(oracle::random_fraction(rng, 4))));
            CHECK(r.verdict == Verdict::holds);
        }

    for (unsigned a = 1 ; a <= 3 ; ++a)
        for (unsigned b = 1 ; b <= 3 ; ++b) {
            auto g = complete_bipartite(a, b);
            auto r = conjecture1_bound(g, make_hardcore(g, NonNegValue(Rational(3, 2))));
            CHECK(r.tight);
        }

    // for biregular G with uniform weights it coincides with thm3
    auto g = cycle_graph(6);
    auto w = make_hardcore(g, NonNegValue(Rational(2)));
    CHECK(compare(exact(conjecture1_bound(g, w).rhs), exact(theorem3_bound(g, w).rhs)) == 0);
}

TEST_CASE("conj1 fails for per-vertex hard-core activities on P_4")
{
    // activities 4, 1/5, 1/4, 1 along the path: Z = 233/20, and the edge
    // factors are Z(K_{1,2}) = 129/20, Z(K_{2,2}) = 153/20, Z(K_{2,1}) = 53/20
    auto g = path_graph(4);
    std::vector<NonNegValue> lam{ Rational(4), Rational(1, 5), Rational(1, 4), Rational(1) };
    auto r = conjecture1_bound(g, make_hardcore(g, lam));
    RootProduct rhs(Rational(129, 20), 2);
    rhs.multiply(Rational(153, 20), 4);
    rhs.multiply(Rational(53, 20), 2);
    CHECK(compare(exact(r.lhs), RootProduct(Rational(233, 20))) == 0);
    CHECK(compare(exact(r.rhs), rhs) == 0);
    CHECK(r.verdict == Verdict::violated);
    CHECK(r.log_slack < -0.5);
}

TEST_CASE("conj1 fails on the triangle")
{
    auto g = complete_graph(3);
    WeightSystem w(g, 2);
    for (std::size_t e = 0 ; e < 3 ; ++e)
        w.set_edge(e, 0, 1, Rational(0));
    auto r = conjecture1_bound(g, w);
    CHECK(r.verdict == Verdict::violated);
    CHECK(compare(exact(r.lhs), RootProduct(Rational(2))) == 0);
    CHECK(compare(exact(r.rhs), RootProduct(Rational(8), 4)) == 0);

    WeightSystem mixed(g, 2);
    mixed.set_edge(0, 0, 0, Rational(2));
    CHECK_THROWS_AS(conjecture1_bound(g, mixed), PreconditionError);
    CHECK_THROWS_AS(conjecture1_bound(Graph(3, { { 0, 1 } }), WeightSystem(Graph(3, { { 0, 1 } }), 2)), PreconditionError);
}

TEST_CASE("conj2 lists around an edge")
{
    // path 0-1-2-3, edge (1, 2): w_j gets L(n_j(2)) = L(1), L(3); z_j gets L(n_j(1)) = L(0), L(2)
    auto g = path_graph(4);
    ListAssignment lists{ { { 0 }, { 1 }, { 2 }, { 0, 1, 2 } } };
    auto around = lists_around_edge(g, lists, *g.edge_id(1, 2));
    REQUIRE(around.lists.size() == 4);
    CHECK(around.lists[0] == std::vector<Vertex>{ 1 });
    CHECK(around.lists[1] == std::vector<Vertex>{ 0, 1, 2 });
    CHECK(around.lists[2] == std::vector<Vertex>{ 0 });
    CHECK(around.lists[3] == std::vector<Vertex>{ 2 });

    for (unsigned a = 1 ; a <= 3 ; ++a)
        for (unsigned b = 1 ; b <= 3 ; ++b) {
            auto k = complete_bipartite(a, b);
            auto r = conjecture2_bound(k, complete_graph(3), ListAssignment::full(k.size(), 3));
            CHECK(r.tight);
        }
}

TEST_CASE("independent set bounds")
{
    CHECK(independent_sets_kpq(2, 2) == 7);
    CHECK(independent_sets_kpq(1, 3) == 9);

    auto c6 = kahn_ind(cycle_graph(6));
    CHECK(compare(exact(c6.lhs), RootProduct(Rational(18))) == 0);
    CHECK(oracle::close(std::exp(log_of(c6.rhs)), 18.5203, 1e-5));
    CHECK(oracle::close(std::exp(log_of(c6.rhs)), std::pow(7.0, 1.5), 1e-12));
    CHECK(c6.verdict == Verdict::holds);

    auto k3 = kahn_ind_conj(complete_graph(3));
    CHECK(compare(exact(k3.lhs), RootProduct(Rational(4))) == 0);
    CHECK(oracle::close(std::exp(log_of(k3.rhs)), std::pow(7.0, 0.75), 1e-12));
    CHECK(k3.verdict == Verdict::holds);

    auto both = kahn_bounds(complete_graph(3));
    CHECK_FALSE(both.ind.has_value());
    CHECK_THROWS_AS(kahn_ind(complete_bipartite(1, 2)), PreconditionError);

    // equality for complete bipartite graphs
    for (unsigned d = 1 ; d <= 3 ; ++d)
        CHECK(kahn_ind(complete_bipartite(d, d)).tight);
    CHECK(kahn_ind_conj(complete_bipartite(2, 3)).tight);

    std::mt19937_64 rng(40);
    for (int t = 0 ; t < 40 ; ++t) {
        auto g = oracle::random_graph(3 + t % 6, rng, 0.5);
        if (g.min_degree() == 0)
            continue;
        auto r = kahn_ind_conj(g);
        CHECK(compare(exact(r.lhs), RootProduct(Rational(oracle::independent_sets(g)))) == 0);
    }
}

TEST_CASE("Ising free energy sandwich")
{
    auto r = ising_free_energy_check(cycle_graph(4), 1.0);
    CHECK(oracle::close(r.free_energy, std::log(oracle::ising_cycle(4, 1.0)) / 4, 1e-12));
    CHECK(oracle::close(r.free_energy, 1.19943, 1e-5));
    CHECK(r.lower == 1.0);
    CHECK(oracle::close(r.upper, 1.0 + std::log(2.0), 1e-15));
    CHECK(r.in_bounds);
    CHECK_THROWS_AS(ising_free_energy_check(path_graph(3), 1.0), Error);
}

TEST_CASE("bound reports serialise")
{
    auto r = theorem3_bound(cycle_graph(4), make_hardcore(cycle_graph(4)));
    auto j = to_json(r);
    CHECK(j["bound"] == "thm3");
    CHECK(j["verdict"] == "HOLDS");
    CHECK(j["backend"] == "exact");
    CHECK(j["tight"] == true);
    CHECK(j["lhs_exact"][0]["num"] == "7");
    CHECK(j.contains("graph_sha"));
}
