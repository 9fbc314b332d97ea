#include <spinbound/errors.hh>
#include <spinbound/graph.hh>

#include "oracles.hh"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace spinbound;

namespace
{
    auto parse_error_of(std::string_view text) -> ParseError
    {
        try {
            parse_graph(text);
        }
        catch (const ParseError & e) {
            return e;
        }
        FAIL("no parse error for: " << text);
        return ParseError(ParseErrorKind::malformed, 0, "");
    }
}

TEST_CASE("parse single edge and four-cycle")
{
    auto g = parse_graph("p 2 1\ne 0 1\n");
    CHECK(g.size() == 2);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edge(0) == Edge{ 0, 1 });

    auto c4 = parse_graph("# a square\np 4 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\n");
    CHECK(c4 == cycle_graph(4));
    for (Vertex v = 0 ; v < 4 ; ++v)
        CHECK(c4.degree(v) == 2);
    CHECK(c4.has_edge(0, 3));
    CHECK(c4.has_edge(3, 0));
    CHECK_FALSE(c4.has_edge(0, 2));
    CHECK(c4.edge_id(3, 0) == 1);
}

TEST_CASE("parse errors name the line and kind")
{
    auto loop = parse_error_of("p 2 1\ne 0 0\n");
    CHECK(loop.kind() == ParseErrorKind::loop);
    CHECK(loop.line() == 2);

    auto dup = parse_error_of("p 3 2\ne 0 1\n# c\ne 1 0\n");
    CHECK(dup.kind() == ParseErrorKind::duplicate_edge);
    CHECK(dup.line() == 4);

    auto range = parse_error_of("p 3 1\ne 0 3\n");
    CHECK(range.kind() == ParseErrorKind::out_of_range);
    CHECK(range.line() == 2);

    CHECK(parse_error_of("p 3 1\nx 0 1\n").kind() == ParseErrorKind::malformed);
    CHECK(parse_error_of("p 3 1\ne 0\n").line() == 2);
    CHECK(parse_error_of("p 3 1\ne 0 -1\n").kind() == ParseErrorKind::malformed);
    CHECK(parse_error_of("e 0 1\n").kind() == ParseErrorKind::malformed);
    CHECK(parse_error_of("p 3 2\ne 0 1\n").kind() == ParseErrorKind::malformed);
    CHECK(parse_error_of("").kind() == ParseErrorKind::malformed);
}

TEST_CASE("format round trip is bit exact")
{
    std::mt19937_64 rng(3);
    for (int t = 0 ; t < 50 ; ++t) {
        auto g = oracle::random_graph(1 + t % 9, rng);
        auto text = format_graph(g);
        auto back = parse_graph(text);
        CHECK(back == g);
        CHECK(format_graph(back) == text);
    }
    CHECK(format_graph(parse_graph("p 3 2\ne 1 2\ne 0 2\n")) == "p 3 2\ne 0 2\ne 1 2\n");
}

TEST_CASE("constructors")
{
    auto k23 = complete_bipartite(2, 3);
    CHECK(k23.size() == 5);
    CHECK(k23.edge_count() == 6);
    CHECK(is_complete_bipartite(k23));
    CHECK_FALSE(is_complete_bipartite(cycle_graph(6)));
    CHECK(is_complete_bipartite(cycle_graph(4)));

    auto q3 = hypercube_graph(3);
    CHECK(q3.size() == 8);
    CHECK(q3.edge_count() == 12);
    CHECK(complete_graph(5).edge_count() == 10);
    CHECK(path_graph(4).edge_count() == 3);

    CHECK_THROWS_AS(Graph(2, { { 0, 0 } }), PreconditionError);
    CHECK_THROWS_AS(Graph(2, { { 0, 1 }, { 1, 0 } }), PreconditionError);
    CHECK_THROWS_AS(Graph(2, { { 0, 2 } }), PreconditionError);
}

TEST_CASE("bipartition splits every edge and is deterministic")
{
    std::mt19937_64 rng(5);
    int seen = 0;
    for (int t = 0 ; t < 200 ; ++t) {
        auto g = oracle::random_graph(2 + t % 8, rng, 0.3);
        if (! is_bipartite(g))
            continue;
        ++seen;
        auto bp = bipartition(g);
        CHECK(bp.class_e.size() + bp.class_o.size() == g.size());
        for (auto [u, v] : g.edges())
            CHECK(bp.side[u] != bp.side[v]);
        for (auto v : bp.class_e)
            CHECK(bp.side[v] == 0);
        auto again = bipartition(parse_graph(format_graph(g)));
        CHECK(again.class_e == bp.class_e);
        CHECK(again.class_o == bp.class_o);
    }
    CHECK(seen > 20);
}

TEST_CASE("odd cycles carry an odd closed walk")
{
    for (unsigned n : { 3u, 5u, 7u }) {
        try {
            bipartition(cycle_graph(n));
            FAIL("C_" << n << " accepted");
        }
        catch (const NotBipartite & e) {
            auto & walk = e.odd_walk();
            REQUIRE(walk.size() >= 2);
            CHECK(walk.front() == walk.back());
            CHECK((walk.size() - 1) % 2 == 1);
            for (std::size_t k = 0 ; k + 1 < walk.size() ; ++k)
                CHECK(cycle_graph(n).has_edge(walk[k], walk[k + 1]));
        }
    }
}

TEST_CASE("biregular certificate")
{
    auto g = complete_bipartite(2, 3);
    auto cert = certify_biregular(g);
    CHECK(cert.a == 3);
    CHECK(cert.b == 2);
    CHECK(cert.a * cert.class_e.size() == g.edge_count());
    CHECK(cert.b * cert.class_o.size() == g.edge_count());
    CHECK(cert.orientations().size() == 1);

    auto n = g.size();
    CHECK(cert.class_e.size() == cert.b * n / (cert.a + cert.b));
    CHECK(cert.class_o.size() == cert.a * n / (cert.a + cert.b));

    for (Vertex v = 0 ; v < n ; ++v) {
        auto order = cert.neighbour_order[v];
        CHECK(order.size() == g.degree(v));
        CHECK(std::is_sorted(order.begin(), order.end()));
        auto adj = g.neighbours(v);
        CHECK(std::equal(order.begin(), order.end(), adj.begin(), adj.end()));
    }

    auto c6 = certify_biregular(cycle_graph(6));
    CHECK(c6.a == 2);
    CHECK(c6.b == 2);
    REQUIRE(c6.orientations().size() == 2);
    CHECK(c6.swapped().class_e == c6.class_o);

    CHECK_THROWS_AS(certify_biregular(path_graph(4)), NotBiregular);
    CHECK_THROWS_AS(certify_biregular(Graph(3, { { 0, 1 } })), NotBiregular);
    CHECK_THROWS_AS(certify_biregular(complete_graph(3)), NotBipartite);
}

TEST_CASE("biregular degrees survive relabelling")
{
    std::mt19937_64 rng(9);
    for (auto g : { complete_bipartite(2, 3), complete_bipartite(1, 3), cycle_graph(8), hypercube_graph(3) }) {
        auto cert = certify_biregular(g);
        for (int t = 0 ; t < 10 ; ++t) {
            std::vector<Vertex> perm(g.size());
            std::iota(perm.begin(), perm.end(), 0u);
            std::shuffle(perm.begin(), perm.end(), rng);
            auto other = certify_biregular(relabel(g, perm));
            CHECK(other.a == cert.a);
            CHECK(other.b == cert.b);
        }
    }
}

TEST_CASE("disconnected biregular graphs are accepted")
{
    // two copies of K_{1,2}, the second with its centre at a higher id
    Graph g(6, { { 0, 1 }, { 0, 2 }, { 3, 5 }, { 4, 5 } });
    auto cert = certify_biregular(g);
    CHECK(cert.a == 2);
    CHECK(cert.b == 1);
    CHECK(cert.class_e == std::vector<Vertex>{ 0, 5 });
}
