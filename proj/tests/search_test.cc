#include <spinbound/errors.hh>
#include <spinbound/search.hh>

#include "oracles.hh"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace spinbound;

namespace
{
    // Smallest adjacency bitmask over every relabelling.
    auto brute_canonical(const Graph & g) -> std::uint64_t
    {
        std::vector<Vertex> perm(g.size());
        std::iota(perm.begin(), perm.end(), 0u);
        auto best = ~std::uint64_t(0);
        do {
            std::uint64_t mask = 0;
            for (auto [u, v] : g.edges()) {
                auto a = std::min(perm[u], perm[v]), b = std::max(perm[u], perm[v]);
                mask |= std::uint64_t(1) << (a * g.size() + b);
            }
            best = std::min(best, mask);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    auto all_labelled(unsigned n) -> std::vector<Graph>
    {
        std::vector<Edge> all;
        for (Vertex u = 0 ; u < n ; ++u)
            for (Vertex v = u + 1 ; v < n ; ++v)
                all.emplace_back(u, v);
        std::vector<Graph> out;
        for (unsigned mask = 0 ; mask < (1u << all.size()) ; ++mask) {
            std::vector<Edge> edges;
            for (std::size_t k = 0 ; k < all.size() ; ++k)
                if (mask >> k & 1)
                    edges.push_back(all[k]);
            out.emplace_back(n, edges);
        }
        return out;
    }

    // Isomorphism classes of connected (a,b)-biregular graphs on exactly n
    // vertices, from every biadjacency matrix with row sums a and column sums b.
    auto biregular_classes(unsigned a, unsigned b, unsigned n) -> std::set<std::string>
    {
        std::set<std::string> classes;
        if (n * b % (a + b) != 0)
            return classes;
        unsigned p = n * b / (a + b), q = n - p;
        if (p == 0 || q == 0 || a > q || b > p)
            return classes;
        std::vector<unsigned> rows;
        for (unsigned s = 0 ; s < (1u << q) ; ++s)
            if (unsigned(__builtin_popcount(s)) == a)
                rows.push_back(s);
        std::vector<std::size_t> pick(p, 0);
        for (;;) {
            std::vector<unsigned> col(q, 0);
            std::vector<Edge> edges;
            for (unsigned i = 0 ; i < p ; ++i)
                for (unsigned j = 0 ; j < q ; ++j)
                    if (rows[pick[i]] >> j & 1) {
                        ++col[j];
                        edges.emplace_back(i, p + j);
                    }
            if (std::all_of(col.begin(), col.end(), [&](unsigned c) { return c == b; })) {
                Graph g(n, edges);
                if (g.is_connected())
                    classes.insert(canonical_string(g));
            }
            std::size_t k = 0;
            while (k < p && ++pick[k] == rows.size())
                pick[k++] = 0;
            if (k == p)
                break;
        }
        return classes;
    }

    auto read(const std::string & path) -> std::string
    {
        std::ifstream in(path);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }
}

TEST_CASE("canonical form separates exactly the isomorphism classes")
{
    for (unsigned n : { 4u, 5u }) {
        std::map<std::string, std::uint64_t> by_canonical;
        std::map<std::uint64_t, std::string> by_brute;
        for (auto & g : all_labelled(n)) {
            auto c = canonical_string(g);
            auto b = brute_canonical(g);
            auto [it, fresh] = by_canonical.emplace(c, b);
            CHECK(it->second == b);
            auto [jt, fresh2] = by_brute.emplace(b, c);
            CHECK(jt->second == c);
            (void) fresh;
            (void) fresh2;
        }
        CHECK(by_canonical.size() == (n == 4 ? 11u : 34u));
    }

    std::mt19937_64 rng(1);
    for (int t = 0 ; t < 30 ; ++t) {
        auto g = oracle::random_graph(7 + t % 4, rng);
        std::vector<Vertex> perm(g.size());
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto h = relabel(g, perm);
        CHECK(canonical_string(h) == canonical_string(g));
        CHECK(canonical_graph(h) == canonical_graph(g));
    }
    // same degree sequence, not isomorphic
    Graph two_triangles(6, { { 0, 1 }, { 1, 2 }, { 0, 2 }, { 3, 4 }, { 4, 5 }, { 3, 5 } });
    CHECK(canonical_string(two_triangles) != canonical_string(cycle_graph(6)));
}

TEST_CASE("graph enumeration counts")
{
    auto connected4 = enumerate_graphs(4, {}, true);
    CHECK(connected4.size() == 9);
    CHECK(std::count_if(connected4.begin(), connected4.end(), [](const Graph & g) { return g.size() == 4; }) == 6);

    // connected graphs on 2..6 vertices: 1, 2, 6, 21, 112
    CHECK(enumerate_graphs(6, {}, true).size() == 142);
    // graphs with at least one edge: 1, 3, 10, 33, 155
    CHECK(enumerate_graphs(6, {}, false).size() == 202);
    // connected bipartite: 1, 1, 3, 5, 17
    auto bip = enumerate_graphs(6, { GraphFilter::Kind::bipartite }, true);
    CHECK(bip.size() == 27);
    for (auto & g : bip)
        CHECK(is_bipartite(g));

    auto all = enumerate_graphs(6, {}, false);
    CHECK(std::is_sorted(all.begin(), all.end(), [](const Graph & x, const Graph & y) {
        return std::pair(x.size(), canonical_string(x)) < std::pair(y.size(), canonical_string(y));
    }));
    std::set<std::string> distinct;
    for (auto & g : all)
        distinct.insert(canonical_string(g));
    CHECK(distinct.size() == all.size());

    CHECK_THROWS_AS(enumerate_graphs(11, {}, true), PreconditionError);
    CHECK_THROWS_AS(enumerate_graphs(13, GraphFilter::biregular(2, 2), true), PreconditionError);
}

TEST_CASE("2-regular bipartite connected graphs are even cycles")
{
    auto cycles = enumerate_graphs(8, GraphFilter::biregular(2, 2), true);
    REQUIRE(cycles.size() == 3);
    for (std::size_t k = 0 ; k < 3 ; ++k)
        CHECK(canonical_string(cycles[k]) == canonical_string(cycle_graph(4 + 2 * unsigned(k))));

    auto any = enumerate_graphs(8, GraphFilter::biregular(2, 2), false);
    CHECK(any.size() == 4);
}

TEST_CASE("biregular enumeration against biadjacency matrices")
{
    for (unsigned a = 1 ; a <= 3 ; ++a)
        for (unsigned b = 1 ; b <= 3 ; ++b) {
            std::set<std::string> expected;
            for (unsigned n = 2 ; n <= 10 ; ++n)
                for (auto & c : biregular_classes(a, b, n))
                    expected.insert(c);
            std::set<std::string> got;
            for (auto & g : enumerate_graphs(10, GraphFilter::biregular(a, b), true)) {
                auto cert = certify_biregular(g);
                CHECK(std::set{ cert.a, cert.b } == std::set{ a, b });
                got.insert(canonical_string(g));
            }
            CHECK_MESSAGE(got == expected, "a = " << a << ", b = " << b);
        }
}

TEST_CASE("fraction sampling is uniform")
{
    CounterRng rng(42);
    std::uint64_t counter = 0;
    std::vector<int> seen(17, 0);
    double sum = 0;
    int n = 20000;
    for (int k = 0 ; k < n ; ++k) {
        auto [p, q] = sample_fraction(rng, counter, 16);
        REQUIRE(p >= 1);
        REQUIRE(p <= 16);
        REQUIRE(q >= 1);
        REQUIRE(q <= 16);
        sum += p;
        ++seen[p];
    }
    // mean 8.5, sd of one draw sqrt(255/12)
    CHECK(std::abs(sum / n - 8.5) < 5 * std::sqrt(255.0 / 12 / n));
    double chi = 0;
    for (int v = 1 ; v <= 16 ; ++v)
        chi += (seen[v] - n / 16.0) * (seen[v] - n / 16.0) / (n / 16.0);
    // 15 degrees of freedom; 40 is far in the tail
    CHECK(chi < 40);
    CHECK(counter == std::uint64_t(2 * n));
}

TEST_CASE("weight sampling modes")
{
    auto g = cycle_graph(6);
    WeightSampler s{ 3, 5, false, WeightMode::general };
    auto w = sample_weights(g, s, 7);
    CHECK(w == sample_weights(g, s, 7));
    CHECK_FALSE(w == sample_weights(g, s, 8));
    CHECK(w.spins() == 3);
    CHECK(w.is_exact());

    s.mode = WeightMode::uniform_edge;
    CHECK(sample_weights(g, s, 7).uniform_edges());

    s.mode = WeightMode::hardcore;
    s.cap = 50;
    auto hc = sample_weights(g, s, 7);
    CHECK(hc.spins() == 2);
    CHECK(hc.edge(0, 0, 0).is_zero());
    CHECK(hc.vertex(0, 1).rational() == 1);
    for (Vertex v = 1 ; v < 6 ; ++v)
        CHECK(hc.vertex(v, 0) == hc.vertex(0, 0));

    s.mode = WeightMode::hardcore_vertex;
    auto hv = sample_weights(g, s, 7);
    CHECK(hv.edge(0, 0, 0).is_zero());
    std::set<Rational> activities;
    for (Vertex v = 0 ; v < 6 ; ++v)
        activities.insert(hv.vertex(v, 0).rational());
    CHECK(activities.size() > 1);
    s.cap = 5;

    s.mode = WeightMode::general;
    s.allow_zero = true;
    int zeros = 0, total = 0;
    for (std::uint64_t seed = 0 ; seed < 200 ; ++seed) {
        auto z = sample_weights(g, s, seed);
        for (Vertex v = 0 ; v < 6 ; ++v)
            for (Spin i = 0 ; i < 3 ; ++i, ++total)
                zeros += z.vertex(v, i).is_zero();
    }
    CHECK(std::abs(double(zeros) / total - 0.125) < 0.02);

    CHECK(parse_weight_mode("uniform-edge") == WeightMode::uniform_edge);
    CHECK(to_string(WeightMode::hardcore) == "hardcore");
    CHECK(parse_weight_mode(to_string(WeightMode::hardcore_vertex)) == WeightMode::hardcore_vertex);
    CHECK_THROWS_AS(parse_weight_mode("ising"), PreconditionError);
}

TEST_CASE("list instance sampling")
{
    auto g = cycle_graph(5);
    for (std::uint64_t seed = 0 ; seed < 50 ; ++seed) {
        auto inst = sample_list_instance(g, 4, seed);
        CHECK(inst.h.size() >= 1);
        CHECK(inst.h.size() <= 4);
        REQUIRE(inst.lists.lists.size() == 5);
        for (auto & l : inst.lists.lists) {
            CHECK(std::is_sorted(l.begin(), l.end()));
            for (auto x : l)
                CHECK(x < inst.h.size());
        }
        auto again = sample_list_instance(g, 4, seed);
        CHECK(again.h == inst.h);
        CHECK(again.lists.lists == inst.lists.lists);
    }
}

TEST_CASE("campaign configuration")
{
    auto cfg = parse_campaign_config(read(SPINBOUND_DATA "/thm3_campaign.conf"));
    CHECK(cfg.source == CampaignConfig::Source::biregular);
    CHECK(cfg.a == 2);
    CHECK(cfg.spins == std::vector<unsigned>{ 2, 3 });
    CHECK(cfg.bounds == std::vector<std::string>{ "thm3" });
    CHECK(cfg.seed == 7);

    auto conj = parse_campaign_config(read(SPINBOUND_DATA "/conj1_campaign.conf"));
    CHECK(conj.weights == WeightMode::hardcore);
    CHECK(conj.unit_first);
    CHECK(conj.bounds == std::vector<std::string>{ "conj1", "indconj" });

    CHECK_THROWS_AS(parse_campaign_config("colour = red\n"), ParseError);
    CHECK_THROWS_AS(parse_campaign_config("bounds = thm9\n"), ParseError);
    CHECK_THROWS_AS(parse_campaign_config("trials = many\n"), ParseError);
    CHECK_THROWS_AS(parse_campaign_config("trials = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_campaign_config("spins = 0\n"), ParseError);
    CHECK_THROWS_AS(parse_campaign_config("just words\n"), ParseError);
}

TEST_CASE("campaign over even cycles")
{
    auto cfg = parse_campaign_config("source = biregular\na = 2\nb = 2\nn_max = 8\nspins = 2,3\ntrials = 6\n"
                                     "bounds = thm3,thm4,ind\nseed = 3\nunit_first = true\n");
    cfg.threads = 1;
    auto r = run_campaign(cfg);
    CHECK(r.graphs.size() == 3);
    REQUIRE(r.bounds.size() == 3);
    CHECK(r.bounds[0].instances == 18);
    CHECK(r.bounds[0].holds == 18);
    CHECK(r.bounds[1].holds == 18);
    CHECK(r.bounds[2].instances == 3);
    CHECK(r.bounds[2].holds == 3);
    for (auto & agg : r.bounds) {
        CHECK(agg.violated == 0);
        CHECK(agg.errors == 0);
        REQUIRE(agg.min_log_slack.has_value());
        CHECK(*agg.min_log_slack >= 0);
    }
    // C_4 = K_{2,2} is tight for the independent set bound
    CHECK(r.bounds[2].tight_graphs == std::vector<std::size_t>{ 0 });

    auto j = to_json(r);
    CHECK(j.contains("timing"));
    CHECK(j["bounds"]["thm3"]["holds"] == 18);
    CHECK(summary_table(r).find("thm3") != std::string::npos);

    cfg.threads = 3;
    auto again = to_json(run_campaign(cfg));
    j.erase("timing");
    again.erase("timing");
    CHECK(j.dump() == again.dump());
}

TEST_CASE("campaign skips graphs a bound does not cover")
{
    auto cfg = parse_campaign_config("source = all\nn_max = 4\ntrials = 2\nbounds = thm3,indconj\n");
    auto r = run_campaign(cfg);
    CHECK(r.graphs.size() == 9);
    // thm3 applies to K_2, P_3, C_4, K_{1,3}
    CHECK(r.bounds[0].instances == 8);
    CHECK(r.bounds[0].skipped == 10);
    CHECK(r.bounds[1].instances == 9);
}

TEST_CASE("violations are written and re-checked")
{
    auto dir = std::filesystem::temp_directory_path() / "spinbound_search_test";
    std::filesystem::remove_all(dir);

    CampaignConfig cfg;
    cfg.source = CampaignConfig::Source::files;
    cfg.files = { SPINBOUND_DATA "/k3.graph" };
    cfg.bounds = { "conj1" };
    cfg.weights = WeightMode::uniform_edge;
    cfg.spins = { 2 };
    cfg.cap = 1;
    cfg.allow_zero = true;
    cfg.trials = 200;
    cfg.seed = 5;
    cfg.out = dir.string();
    auto r = run_campaign(cfg);
    auto & agg = r.bounds[0];
    REQUIRE(agg.violated > 0);
    CHECK(agg.violated == agg.violations.size());
    REQUIRE(r.witness_files[0].size() == agg.violations.size());

    for (std::size_t k = 0 ; k < agg.violations.size() ; ++k) {
        auto & [record, report] = agg.violations[k];
        CHECK(report.verdict == Verdict::violated);
        CHECK(recheck_instance(record).verdict == Verdict::violated);

        // rebuild from the files alone
        InstanceRecord from_disk;
        from_disk.bound = "conj1";
        for (auto & path : r.witness_files[0][k]) {
            if (path.ends_with(".graph"))
                from_disk.graph_text = read(path);
            else if (path.ends_with(".weights"))
                from_disk.weights_text = read(path);
            else if (path.ends_with(".json"))
                CHECK(nlohmann::json::parse(read(path))["verdict"] == "VIOLATED");
        }
        auto again = recheck_instance(from_disk);
        CHECK(again.verdict == Verdict::violated);
        CHECK(again.weights_sha == report.weights_sha);
    }
    std::filesystem::remove_all(dir);

    InstanceRecord identity{ "conj1", 0, 0, read(SPINBOUND_DATA "/k3.graph"), read(SPINBOUND_DATA "/k3_identity.weights"), "", "" };
    CHECK(recheck_instance(identity).verdict == Verdict::violated);
    identity.bound = "nope";
    CHECK_THROWS_AS(recheck_instance(identity), PreconditionError);
}
