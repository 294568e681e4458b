#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "entrank/error.hpp"
#include "entrank/eval.hpp"
#include "entrank/trec_io.hpp"
#include "support/fixtures.hpp"

using namespace entrank;
using doctest::Approx;
using fixtures::doc;
using fixtures::query;

namespace {

std::vector<int> G(std::initializer_list<int> g) { return g; }

}  // namespace

TEST_CASE("ndcg") {
  CHECK(ndcg_at_k(G({3, 0}), 2) == 1.0);
  CHECK(ndcg_at_k(G({0, 3}), 2) == Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
  CHECK(ndcg_at_k(G({0, 3}), 2) == Approx(0.6309).epsilon(1e-4));
  CHECK(ndcg_at_k(G({0, 0, 0}), 3) == 0.0);
  CHECK(ndcg_at_k(G({}), 5) == 0.0);
  // A relevant document the run never returned lowers the ideal.
  CHECK(ndcg_at_k(G({2}), G({3, 2}), 1) == Approx(2.0 / 3.0));
  CHECK_THROWS_AS(ndcg_at_k(G({1}), 0), Error);
}

TEST_CASE("precision") {
  CHECK(precision_at_k(G({3, 2, 0, 1, 2}), 5) == Approx(0.6));
  CHECK(precision_at_k(G({1, 1}), 5) == 0.0);
  CHECK(precision_at_k(G({3}), 5) == Approx(0.2));
  CHECK(precision_at_k(G({3, 0, 0, 0, 0, 3, 3}), 5) == Approx(0.2));
  CHECK_THROWS_AS(precision_at_k(G({1}), 0), Error);
}

TEST_CASE("metric names") {
  CHECK(Metric::parse("ndcg@5")->name() == "ndcg@5");
  CHECK(Metric::parse("ndcg@all")->name() == "ndcg@all");
  CHECK(Metric::parse("p@10")->name() == "p@10");
  CHECK_FALSE(Metric::parse("map").has_value());
  CHECK_FALSE(Metric::parse("p@0").has_value());
  std::vector<std::string> names;
  for (const auto& m : default_metrics()) names.push_back(m.name());
  CHECK(names == std::vector<std::string>{"ndcg@5", "ndcg@10", "ndcg@all", "p@5", "p@10"});
}

TEST_CASE("random grade lists: bounds, ideal order and prefix") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> grade(0, 3), len(0, 12), cut(1, 15);
  for (int i = 0; i < 2000; ++i) {
    std::vector<int> g(static_cast<std::size_t>(len(rng)));
    for (auto& x : g) x = grade(rng);
    const auto k = static_cast<std::size_t>(cut(rng));
    const double n = ndcg_at_k(g, k);
    const double p = precision_at_k(g, k);
    REQUIRE(n >= 0.0);
    REQUIRE(n <= 1.0 + 1e-12);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    auto sorted = g;
    std::sort(sorted.rbegin(), sorted.rend());
    if (std::any_of(g.begin(), g.end(), [](int x) { return x > 0; })) {
      REQUIRE(ndcg_at_k(sorted, k) == Approx(1.0).epsilon(1e-12));
      if (std::is_sorted(g.rbegin(), g.rend())) REQUIRE(n == Approx(1.0).epsilon(1e-12));
    }
    auto longer = g;
    longer.push_back(3);
    if (g.size() >= k) REQUIRE(precision_at_k(longer, k) == p);
  }
}

TEST_CASE("qrels") {
  Qrels q;
  q.set("q1", "d1", 3);
  q.set("q1", "d2", 0);
  CHECK(q.grade("q1", "d1") == 3);
  CHECK(q.grade("q1", "nope") == 0);
  CHECK(q.grade("q9", "d1") == 0);
  CHECK(q.has_query("q1"));
  CHECK(q.size() == 2);
  CHECK_THROWS_AS(q.set("q1", "d3", 4), Error);
  CHECK_THROWS_AS(q.set("q1", "d3", -1), Error);
}

TEST_CASE("random baseline") {
  Qrels qrels;
  qrels.set("q", "a", 3);
  qrels.set("q", "b", 0);
  qrels.set("q", "c", 2);
  const auto metrics = default_metrics();

  SUBCASE("one document is deterministic") {
    const std::vector<std::string> one{"a"};
    const auto x = random_baseline("q", one, qrels, metrics, 10, 1);
    const auto y = random_baseline("q", one, qrels, metrics, 10, 999);
    CHECK(x.values == y.values);
    const auto direct = evaluate_ranking("q", one, qrels, metrics).values;
    for (std::size_t m = 0; m < direct.size(); ++m) CHECK(x.values[m] == Approx(direct[m]).epsilon(1e-15));
  }
  SUBCASE("all zero grades") {
    const std::vector<std::string> docs{"b", "x", "y"};
    for (double v : random_baseline("q0", docs, qrels, metrics, 10, 3).values) CHECK(v == 0.0);
  }
  SUBCASE("fixed seed repeats") {
    const std::vector<std::string> docs{"a", "b", "c", "d", "e"};
    CHECK(random_baseline("q", docs, qrels, metrics, 10, 5).values ==
          random_baseline("q", docs, qrels, metrics, 10, 5).values);
    CHECK(random_permutation(docs, 5, "q", 0) == random_permutation(docs, 5, "q", 0));
    CHECK(random_permutation(docs, 5, "q", 0) != random_permutation(docs, 5, "q", 1));
  }
  SUBCASE("zero trials") {
    const std::vector<std::string> docs{"a"};
    CHECK_THROWS_AS(random_baseline("q", docs, qrels, metrics, 0, 0), Error);
  }
}

TEST_CASE("paired t-test") {
  SUBCASE("identical samples") {
    const std::vector<double> a{0.1, 0.5, 0.9};
    const auto r = paired_t_test(a, a);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
    CHECK(r.degenerate);
  }
  SUBCASE("constant positive difference") {
    const std::vector<double> a{2, 3, 4, 5}, b{1, 2, 3, 4};
    const auto r = paired_t_test(a, b);
    CHECK(r.degenerate);
    CHECK(std::isinf(r.t));
    CHECK(r.t > 0);
    CHECK(r.p == 0.0);
  }
  SUBCASE("reference values") {
    // scipy.stats.ttest_rel on these differences: t = sqrt(2), p = 0.23019964108049873
    const std::vector<double> a{0.1, -0.1, 0.2, 0.0, 0.3}, b(5, 0.0);
    const auto r = paired_t_test(a, b);
    CHECK_FALSE(r.degenerate);
    CHECK(r.n == 5);
    CHECK(r.t == Approx(1.4142135623730951).epsilon(1e-12));
    CHECK(r.p == Approx(0.23019964108049873).epsilon(1e-9));
    const auto flipped = paired_t_test(b, a);
    CHECK(flipped.t == Approx(-r.t));
    CHECK(flipped.p == Approx(r.p));
  }
  SUBCASE("bad input") {
    const std::vector<double> a{1, 2}, b{1}, one{1};
    CHECK_THROWS_AS(paired_t_test(a, b), Error);
    CHECK_THROWS_AS(paired_t_test(one, one), Error);
  }
}

TEST_CASE("sweep emits the full grid and agrees with direct ranking") {
  const auto idx = build_index({doc("d1", "2000-01-01", {{"a", 2}, {"x", 1}}), doc("d2", "2000-01-02", {{"a", 1}, {"y", 2}}),
                                doc("d3", "2000-01-02", {{"a", 1}, {"b", 1}, {"x", 1}}), doc("d4", "2000-01-03", {{"b", 3}})});
  auto q1 = query({"a"});
  q1.id = "q1";
  auto q2 = query({"a", "b"}, false);
  q2.id = "q2";
  std::vector<JudgedQuery> judged{{match(idx, q1), QueryType::single}, {match(idx, q2), QueryType::or_}};
  Qrels qrels;
  qrels.set("q1", "d2", 3);
  qrels.set("q1", "d3", 1);
  qrels.set("q2", "d4", 2);
  qrels.set("q2", "d1", 1);
  const auto metrics = default_metrics();
  const auto table = sweep(judged, idx, qrels, SweepGrid{}, metrics);
  CHECK(table.cells.size() == 30);
  CHECK(table.groups == std::vector<std::string>{"single", "or", "all"});

  const auto& cell = table.cells[7];  // restart 0.2, p1 0.2
  CHECK(cell.restart == 0.2);
  CHECK(cell.p1 == 0.2);
  RwrParams p;
  p.restart = 0.2;
  p.p1 = 0.2;
  for (std::size_t i = 0; i < judged.size(); ++i) {
    const auto ranked = rank_stochastic(judged[i].result, idx, p);
    std::vector<std::string> ids;
    for (const auto& s : ranked) ids.push_back(s.doc_id);
    const auto direct = evaluate_ranking(judged[i].result.query.id, ids, qrels, metrics);
    CHECK(cell.report.queries[i].values == direct.values);
  }
  const auto all = cell.group_means.at("all");
  for (std::size_t m = 0; m < metrics.size(); ++m)
    CHECK(all[m] == Approx((cell.report.queries[0].values[m] + cell.report.queries[1].values[m]) / 2.0));
}

// ---------------------------------------------------------------------------
// run and qrels files

TEST_CASE("qrels file") {
  std::istringstream in("# judged\nq1 0 d1 3\n\nq1 0 d2 0\nq2 0 d1 2\n");
  const auto q = read_qrels(in);
  CHECK(q.grade("q1", "d1") == 3);
  CHECK(q.grade("q2", "d1") == 2);
  std::istringstream bad("q1 0 d1 7\n");
  CHECK_THROWS_AS(read_qrels(bad), ParseError);
  std::istringstream short_line("q1 0 d1\n");
  CHECK_THROWS_AS(read_qrels(short_line), ParseError);
}

TEST_CASE("run file round trip") {
  std::vector<ScoredDoc> ranked{{"d2", 1, 0.5, {0.25, 0.5, 0.0}}, {"d1", 0, 0.125, {}}};
  std::ostringstream out;
  write_run(out, "q1", ranked, "tag", true);
  const auto text = out.str();
  CHECK(text.find("# q1 d2") != std::string::npos);
  std::istringstream in(text);
  const auto run = read_run(in);
  CHECK(run.queries == std::vector<std::string>{"q1"});
  CHECK(run.tag == "tag");
  CHECK(run.ranked_docs("q1") == std::vector<std::string>{"d2", "d1"});
  CHECK(run.entries.at("q1")[1].score == 0.125);
}

TEST_CASE("run file errors") {
  std::istringstream dup("q Q0 d 1 1 t\nq Q0 d 2 0.5 t\n");
  CHECK_THROWS_AS(read_run(dup), ParseError);
  std::istringstream cols("q Q0 d 1 1\n");
  CHECK_THROWS_AS(read_run(cols), ParseError);
  std::istringstream rank("q Q0 d zero 1 t\n");
  CHECK_THROWS_AS(read_run(rank), ParseError);
}

TEST_CASE("run entries sort by rank") {
  std::istringstream in("q Q0 b 2 0.5 t\nq Q0 a 1 0.9 t\n");
  CHECK(read_run(in).ranked_docs("q") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("numbers round trip") {
  CHECK(std::stod(format_number(0.1)) == 0.1);
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
