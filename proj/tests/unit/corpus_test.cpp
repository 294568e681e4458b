#include <doctest.h>

#include <random>
#include <sstream>

#include "entrank/corpus.hpp"
#include "entrank/error.hpp"
#include "entrank/snapshot.hpp"
#include "entrank/triples.hpp"
#include "support/fixtures.hpp"

using namespace entrank;
using fixtures::doc;
using fixtures::E;

TEST_CASE("dates parse strictly") {
  CHECK(parse_date("2012-02-29").has_value());
  CHECK_FALSE(parse_date("2011-02-29").has_value());
  CHECK_FALSE(parse_date("2011-2-01").has_value());
  CHECK_FALSE(parse_date("2011-02-01T00:00").has_value());
  CHECK_FALSE(parse_date("").has_value());
  CHECK(parse_date("1999-12-31")->to_string() == "1999-12-31");
  CHECK(*parse_date("1999-12-31") < *parse_date("2000-01-01"));
}

TEST_CASE("bucketize truncates to the granularity") {
  const Date d = *parse_date("2004-07-09");
  CHECK(bucketize(d).key == "2004-07-09");
  CHECK(bucketize(d, Granularity::month).key == "2004-07");
  CHECK(bucketize(d, Granularity::year).key == "2004");
  CHECK(parse_granularity("month") == Granularity::month);
  CHECK_FALSE(parse_granularity("week").has_value());
}

TEST_CASE("index exposes docs(e), docs(t) and counts") {
  const auto idx = build_index({doc("d1", "2000-01-01", {{"a", 2}, {"b", 1}}),
                                doc("d2", "2000-01-02", {{"a", 1}}),
                                doc("d3", "2000-01-01", {{"c", 4}})});
  CHECK(idx.document_count() == 3);
  CHECK(idx.entity_count() == 3);
  CHECK(idx.doc_ids_for_entity(E("a")) == std::vector<std::string>{"d1", "d2"});
  CHECK(idx.doc_ids_for_entity(E("zzz")).empty());
  CHECK(idx.doc_ids_for_bucket(TimeBucket{Granularity::day, "2000-01-01"}) ==
        std::vector<std::string>{"d1", "d3"});
  CHECK(idx.doc_ids_for_bucket(TimeBucket{Granularity::day, "1999-01-01"}).empty());
  CHECK(idx.total_mentions(*idx.find_document("d1")) == 3);
  CHECK(idx.total_mentions(*idx.find_document("d3")) == 4);
}

TEST_CASE("monthly buckets group documents") {
  const auto idx = build_index({doc("d1", "2000-01-01", {{"a", 1}}), doc("d2", "2000-01-31", {{"a", 1}}),
                                doc("d3", "2000-02-01", {{"a", 1}})},
                               Granularity::month);
  CHECK(idx.bucket_count() == 2);
  CHECK(idx.bucket_of(0) == idx.bucket_of(1));
  CHECK(idx.bucket_of(1) != idx.bucket_of(2));
}

TEST_CASE("duplicate ids are rejected when building") {
  CHECK_THROWS_AS(build_index({doc("d1", "2000-01-01", {{"a", 1}}), doc("d1", "2000-01-02", {{"b", 1}})}),
                  Error);
}

TEST_CASE("empty corpus yields an empty index") {
  const auto idx = build_index({});
  CHECK(idx.document_count() == 0);
  CHECK(idx.entity_count() == 0);
  CHECK(idx.bucket_count() == 0);
}

// ---------------------------------------------------------------------------
// records

TEST_CASE("record lines parse") {
  std::istringstream in(
      R"({"id":"d1","date":"2001-05-06","title":"T","mentions":[{"entity":"a","count":2},{"entity":"b","count":1}]})"
      "\n\n"
      R"({"id":"d2","date":"2001-05-07","mentions":[{"entity":"a","count":1},{"entity":"a","count":3}]})"
      "\n");
  const auto docs = read_records(in, "x.jsonl");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].title == std::optional<std::string>("T"));
  CHECK(docs[0].mentions.at(E("a")) == 2);
  CHECK(docs[1].mentions.at(E("a")) == 4);
  CHECK_FALSE(docs[1].title.has_value());
}

TEST_CASE("record errors name the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_records(in, "x");
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string ok = R"({"id":"d1","date":"2001-05-06","mentions":[]})" "\n";
  CHECK(line_of(ok + R"({"id":"d2","date":"2001-13-06","mentions":[]})") == 2);
  CHECK(line_of(ok + ok) == 2);  // duplicate id
  CHECK(line_of(R"({"id":"d1","mentions":[]})") == 1);
  CHECK(line_of(R"({"id":"d1","date":"2001-01-01","mentions":[{"entity":"a","count":0}]})") == 1);
  CHECK(line_of("not json") == 1);
  CHECK(line_of(ok + "\n[1,2]") == 3);
}

TEST_CASE("unparseable date message names the document") {
  std::istringstream in(R"({"id":"doc-9","date":"May 5","mentions":[]})");
  try {
    read_records(in, "x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("doc-9") != std::string::npos);
  }
}

TEST_CASE("records round trip") {
  std::vector<Document> docs{doc("d1", "2000-01-01", {{"a", 2}, {"b", 1}}), doc("d2", "2000-03-01", {})};
  docs[0].title = "quote \" and \\ slash";
  std::stringstream buf;
  write_records(buf, docs);
  CHECK(read_records(buf) == docs);
}

// ---------------------------------------------------------------------------
// triples

TEST_CASE("triple lines parse terms") {
  std::map<std::string, std::string> prefixes{{"ex", "http://ex.org/"}};
  CHECK_FALSE(parse_triple_line("", prefixes).has_value());
  CHECK_FALSE(parse_triple_line("   # note", prefixes).has_value());
  CHECK_FALSE(parse_triple_line("@prefix dbr: <http://dbpedia.org/resource/> .", prefixes).has_value());
  CHECK(prefixes.at("dbr") == "http://dbpedia.org/resource/");

  auto t = parse_triple_line(R"(ex:s <http://p> "a\"bé"@en .)", prefixes);
  REQUIRE(t.has_value());
  CHECK(t->subject.value == "http://ex.org/s");
  CHECK(t->object.kind == Term::Kind::literal);
  CHECK(t->object.value == "a\"b\xC3\xA9");
  CHECK(t->object.language == "en");

  t = parse_triple_line(R"(_:b1 <http://p> "2001-01-01"^^<http://www.w3.org/2001/XMLSchema#date> .)", prefixes);
  REQUIRE(t.has_value());
  CHECK(t->subject.kind == Term::Kind::blank);
  CHECK(t->subject.value == "b1");
  CHECK(t->object.datatype == "http://www.w3.org/2001/XMLSchema#date");
  CHECK_THROWS_AS(parse_triple_line(R"(_:b1 <http://p> "x"^^xsd:date .)", prefixes), std::invalid_argument);

  CHECK_THROWS_AS(parse_triple_line("<http://s> <http://p> .", prefixes), std::invalid_argument);
  CHECK_THROWS_AS(parse_triple_line("<http://s> <http://p> <http://o>", prefixes), std::invalid_argument);
  CHECK_THROWS_AS(parse_triple_line("nope:s <http://p> <http://o> .", prefixes), std::invalid_argument);
}

TEST_CASE("triples resolve mention nodes to entity counts") {
  std::istringstream in(R"(
@prefix ex: <http://ex.org/> .
ex:d1 dc:date "2010-04-01"^^xsd:date .
ex:d1 dc:title "First" .
ex:d1 schema:mentions _:m1 .
ex:d1 schema:mentions _:m2 .
ex:d1 oae:mentions _:m3 .
_:m1 oae:hasMatchedURI dbr:Athens .
_:m2 oae:hasMatchedURI dbr:Athens .
_:m3 oae:hasMatchedURI dbr:Greece .
ex:d2 <http://purl.org/dc/elements/1.1/date> "2010-04-02" .
ex:d2 schema:mentions _:m4 .
)");
  const auto docs = read_triples(in, "t.nt");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "http://ex.org/d1");
  CHECK(docs[0].title == std::optional<std::string>("First"));
  CHECK(docs[0].mentions.at(E("http://dbpedia.org/resource/Athens")) == 2);
  CHECK(docs[0].mentions.at(E("http://dbpedia.org/resource/Greece")) == 1);
  CHECK(docs[1].mentions.empty());  // unresolved node is dropped
}

TEST_CASE("triple errors") {
  std::istringstream missing_date("<http://d1> <http://schema.org/mentions> _:m .\n");
  CHECK_THROWS_AS(read_triples(missing_date), ParseError);
  std::istringstream bad_date("<http://d1> <http://purl.org/dc/terms/date> \"2010-02-30\" .\n");
  CHECK_THROWS_AS(read_triples(bad_date), ParseError);
  std::istringstream bad_syntax("<http://d1> <http://purl.org/dc/terms/date> \"2010-02-03 .\n");
  try {
    read_triples(bad_syntax, "f");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("triples round trip over random documents") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    std::vector<Document> docs;
    const int n = std::uniform_int_distribution<int>(0, 5)(rng);
    for (int i = 0; i < n; ++i) {
      Document d;
      d.id = "http://ex.org/doc/" + std::to_string(i);
      d.date = Date{1990 + static_cast<int>(rng() % 30), 1 + static_cast<unsigned>(rng() % 12),
                    1 + static_cast<unsigned>(rng() % 28)};
      if (rng() % 2) d.title = "title \"" + std::to_string(rng() % 100) + "\"\n\tend";
      const int m = static_cast<int>(rng() % 5);
      for (int k = 0; k < m; ++k)
        d.mentions[E("http://dbpedia.org/resource/E" + std::to_string(rng() % 6))] +=
            1 + static_cast<std::uint32_t>(rng() % 3);
      docs.push_back(std::move(d));
    }
    std::stringstream buf;
    write_triples(buf, docs);
    REQUIRE(read_triples(buf) == docs);
  }
}

TEST_CASE("triples refuse ids that are not IRIs") {
  std::stringstream buf;
  std::vector<Document> docs{doc("has space", "2000-01-01", {{"a", 1}})};
  CHECK_THROWS_AS(write_triples(buf, docs), Error);
}

// ---------------------------------------------------------------------------
// snapshot

TEST_CASE("snapshot round trip keeps the index") {
  const auto idx = build_index({doc("d1", "2000-01-01", {{"a", 2}, {"b", 1}}), doc("d2", "2000-02-01", {{"a", 1}})},
                               Granularity::month);
  std::stringstream buf;
  save_index(buf, idx);
  const auto back = load_index(buf, "snap");
  CHECK(back.granularity() == Granularity::month);
  REQUIRE(back.document_count() == 2);
  for (DocIndex d = 0; d < 2; ++d) CHECK(back.document(d) == idx.document(d));
  REQUIRE(back.entity_count() == idx.entity_count());
  for (EntityIndex e = 0; e < idx.entity_count(); ++e) {
    CHECK(back.entity(e) == idx.entity(e));
    CHECK(std::vector<DocIndex>(back.docs_of(e).begin(), back.docs_of(e).end()) ==
          std::vector<DocIndex>(idx.docs_of(e).begin(), idx.docs_of(e).end()));
  }
  CHECK(back.bucket_count() == idx.bucket_count());
}

TEST_CASE("snapshot granularity can be overridden") {
  const auto idx = build_index({doc("d1", "2000-01-01", {{"a", 1}}), doc("d2", "2000-01-02", {{"a", 1}})});
  std::stringstream buf;
  save_index(buf, idx);
  CHECK(load_index(buf, "s", Granularity::year).bucket_count() == 1);
}

TEST_CASE("empty corpus snapshot loads") {
  std::stringstream buf;
  save_index(buf, build_index({}));
  CHECK(load_index(buf).document_count() == 0);
}

TEST_CASE("snapshot version mismatch is refused") {
  std::stringstream buf(R"({"format":"entrank-index","version":99,"granularity":"day","documents":0})" "\n");
  try {
    load_index(buf, "old");
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.kind() == "version");
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }
  std::stringstream other(R"({"format":"something","version":1})" "\n");
  CHECK_THROWS_AS(load_index(other), Error);
}
