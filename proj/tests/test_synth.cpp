#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "salecast/synth.hpp"

using namespace salecast;

TEST_CASE("generator output matches the canonical schemas") {
  SynthConfig sc;
  sc.n_rows = 500;
  sc.seed = 1;
  const SynthResult r = generate_synth(sc);
  CHECK(r.market.n_rows() == 500);
  CHECK(r.market.n_cols() == 22);
  for (const auto& spec : Schema::market().columns) {
    REQUIRE(r.market.has_column(spec.name));
    CHECK(r.market.column(spec.name).kind == spec.kind);
  }
  CHECK(r.socio_frame.n_rows() == 120);
  CHECK(r.socio.rows.size() == 120);
}

TEST_CASE("every sale month is covered by the socio table") {
  SynthConfig sc;
  sc.n_rows = 400;
  sc.seed = 2;
  const SynthResult r = generate_synth(sc);
  const Frame joined = join_socio(derive_target(r.market), r.socio);
  CHECK(joined.n_rows() == 400);
  CHECK(prepare(joined).feature_names().size() == 26);
}

TEST_CASE("prevalence is near one half and matches the derived target") {
  SynthConfig sc;
  sc.n_rows = 4000;
  sc.seed = 3;
  const SynthResult r = generate_synth(sc);
  CHECK(r.prevalence == doctest::Approx(0.5).epsilon(0.06));
  const Frame d = derive_target(r.market);
  double mean = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i)
    mean += d.value("price_high_low", i);
  mean /= double(d.n_rows());
  CHECK(mean == doctest::Approx(r.prevalence).epsilon(1e-12));
}

TEST_CASE("generation is deterministic in the seed") {
  SynthConfig sc;
  sc.n_rows = 300;
  sc.seed = 4;
  const SynthResult a = generate_synth(sc);
  const SynthResult b = generate_synth(sc);
  CHECK(a.bayes_accuracy == b.bayes_accuracy);
  CHECK(a.prevalence == b.prevalence);
  for (const auto& name : a.market.column_names())
    CHECK(a.market.column(name).values == b.market.column(name).values);
  sc.seed = 5;
  const SynthResult c = generate_synth(sc);
  CHECK(a.market.column("price").values != c.market.column("price").values);
}

TEST_CASE("zero signal strength drives the best achievable accuracy to half") {
  SynthConfig sc;
  sc.n_rows = 2000;
  sc.seed = 6;
  sc.signal_strength = 0.0;
  const SynthResult r = generate_synth(sc);
  CHECK(r.bayes_accuracy == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("default signal lands the planted problem in the target band") {
  SynthConfig sc;
  sc.n_rows = 10000;
  sc.seed = 7;
  const SynthResult r = generate_synth(sc);
  CHECK(r.bayes_accuracy >= 0.90);
  CHECK(r.bayes_accuracy <= 0.95);
}

TEST_CASE("empty generation is rejected") {
  SynthConfig sc;
  sc.n_rows = 0;
  CHECK_THROWS_AS(generate_synth(sc), DataError);
}
