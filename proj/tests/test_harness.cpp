#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "degiorgi/suite.hpp"

using namespace degiorgi;

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());

  RunConfig bad = c;
  bad.ellipticity = {{10, 1}};  // lambda > Lambda
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = c;
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = c;
  bad.h = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = c;
  bad.kinds = {"perlin"};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = c;
  bad.trees_delta = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config json round trip") {
  RunConfig c;
  c.h = 1.0 / 32;
  c.seed = 42;
  c.groups = "energy,shadow";
  c.ellipticity = {{1, 10}};
  c.sobolev_s = 0.5;
  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.h == c.h);
  CHECK(back.seed == c.seed);
  CHECK(back.groups == c.groups);
  CHECK(back.ellipticity == c.ellipticity);
  CHECK(back.sobolev_s == c.sobolev_s);
}

TEST_CASE("group selection") {
  RunConfig c;
  c.groups = "energy,shadow";
  CHECK(c.group_enabled("energy"));
  CHECK(c.group_enabled("shadow"));
  CHECK_FALSE(c.group_enabled("degiorgi"));
  c.groups = "all";
  CHECK(c.group_enabled("oscillation"));
}

TEST_CASE("suite reports are byte-identical across runs") {
  RunConfig c;
  c.h = 1.0 / 32;
  c.groups = "solver";
  c.determinism_check = false;
  const std::string a = run_suite(c).report.to_json().dump();
  const std::string b = run_suite(c).report.to_json().dump();
  CHECK(a == b);
}

TEST_CASE("overall pass is the conjunction of non-skipped reports") {
  SuiteReport R;
  LemmaReport ok;
  ok.lemma_id = "x";
  ok.pass = true;
  R.add(ok);
  CHECK(R.overall_pass);
  LemmaReport skipped;
  skipped.lemma_id = "y";
  skipped.pass = false;
  skipped.skipped = true;
  R.add(skipped);
  CHECK(R.overall_pass);
  LemmaReport bad;
  bad.lemma_id = "z";
  bad.pass = false;
  R.add(bad);
  CHECK_FALSE(R.overall_pass);
}

TEST_CASE("corpus covers kinds, ratios, and derivations") {
  DomainPtr domain = BallDomain::make(2, 2.0, 1.0 / 32);
  CorpusConfig cc = CorpusConfig::defaults(7);
  cc.cert_subsolution_threshold = 10.0 / 32;
  const Corpus corpus = generate_corpus(domain, cc);
  CHECK(corpus.members.size() >= 50);
  CHECK(corpus.all_certified());

  bool has_sol = false, has_pos = false, has_trunc = false;
  std::set<std::string> kinds;
  std::set<double> ratios;
  for (const auto& m : corpus.members) {
    has_sol = has_sol || m.derivation == "solve";
    has_pos = has_pos || m.derivation == "positive-part";
    has_trunc = has_trunc || m.derivation == "truncate-shift";
    kinds.insert(m.kind);
    ratios.insert(m.Lambda / m.lambda);
  }
  CHECK(has_sol);
  CHECK(has_pos);
  CHECK(has_trunc);
  CHECK(kinds.size() == 3);
  CHECK(ratios.count(1.0) == 1);
  CHECK(ratios.count(10.0) == 1);
  CHECK(ratios.count(100.0) == 1);

  const Json manifest = corpus.manifest();
  REQUIRE(manifest.is_array());
  CHECK(manifest.size() == corpus.members.size());
  for (const char* key : {"id", "kind", "lambda", "Lambda", "seed", "boundary", "shift",
                          "mode", "residual"})
    CHECK(manifest[0].contains(key));
}
