// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace conefan;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Lighter search settings for the sampled 3D paths.
TubeSearchOptions quick() {
  TubeSearchOptions o;
  o.samples = 2000;
  o.restarts = 8;
  return o;
}

}  // namespace

TEST_CASE("inflate_d", "[embeddings]") {
  const Fan f = fixtures::fan("coordinate2d");
  SECTION("coordinate fan") {
    const DeltaVec d = inflate_d(f, DeltaVec::unchecked(make_vec({0.5, 1.0})));
    CHECK_THAT(d.d(0), WithinAbs(std::sqrt(2.0), 1e-9));
    CHECK_THAT(d.d(1), WithinAbs(1.0, 1e-15));
    CHECK_THAT(d.certificate.alpha, WithinAbs(std::sqrt(2.0), 1e-9));
    CHECK(d.certificate.lambda == 1.0);
    CHECK(d.certificate.certified());
  }
  SECTION("a constructed vector is a fixed point up to scale") {
    const DeltaVec once = inflate_d(f, DeltaVec::unchecked(make_vec({0.5, 1.0})));
    const DeltaVec twice = inflate_d(f, once);
    CHECK((once.d / once.max() - twice.d / twice.max()).norm() < 1e-12);
    CHECK(twice.d(1) == once.max());
  }
  SECTION("narrow fan") {
    const Fan nf = fixtures::fan("narrow10");
    const DeltaVec d = inflate_d(nf, DeltaVec::unchecked(make_vec({1.0, 1.0})));
    const double alpha = 1.0 / std::sin(5 * std::numbers::pi / 180);
    CHECK_THAT(d.certificate.alpha, WithinRel(alpha, 1e-9));
    CHECK_THAT(d.d(0), WithinRel(alpha, 1e-9));
    CHECK(d.d(1) == 1.0);
    CHECK(check_well_defined(nf, d).certified());
  }
  SECTION("construction satisfies d_k = lambda alpha d_(k+1)") {
    const Fan tf = fixtures::fan("two-planes-3d");
    const DeltaVec d = inflate_d(tf, DeltaVec::unchecked(make_vec({0.3, 0.2, 0.7})), quick());
    const double la = d.certificate.lambda * d.certificate.alpha;
    CHECK(d.certificate.lambda >= 1.0);
    CHECK(la >= 1.0);
    CHECK(d.d(2) == 0.7);
    CHECK_THAT(d.d(1), WithinRel(la * d.d(2), 1e-12));
    CHECK_THAT(d.d(0), WithinRel(la * d.d(1), 1e-12));
    CHECK(d.certificate.method == "sampled");
  }
  SECTION("length mismatch") {
    CHECK_THROWS_AS(inflate_d(f, DeltaVec::unchecked(make_vec({1.0}))), InputError);
  }
}

TEST_CASE("embed_tdi_in_qtdi", "[embeddings]") {
  const Fan f = fixtures::fan("coordinate2d");
  const DeltaVec d1 = embed_tdi_in_qtdi(f, 1.0);
  CHECK_THAT(d1.d(0), WithinAbs(std::sqrt(2.0), 1e-9));
  CHECK(d1.d(1) == 1.0);
  const DeltaVec d2 = embed_tdi_in_qtdi(f, 2.0);
  CHECK_THAT(d2.d(0), WithinAbs(2 * std::sqrt(2.0), 1e-9));
  CHECK(d2.d(1) == 2.0);
  CHECK_THROWS_AS(embed_tdi_in_qtdi(f, -1.0), InputError);
}

TEST_CASE("embed_qtdi_in_tdi", "[embeddings]") {
  CHECK(embed_qtdi_in_tdi(DeltaVec::unchecked(make_vec({std::sqrt(2.0), 1.0}))) == std::sqrt(2.0));
  CHECK(embed_qtdi_in_tdi(DeltaVec::unchecked(make_vec({2.0, 1.0}))) == 2.0);
  CHECK(embed_qtdi_in_tdi(DeltaVec::unchecked(make_vec({0.7, 0.7, 0.7}))) == 0.7);
}

TEST_CASE("round trip only grows thresholds", "[embeddings][property]") {
  for (const auto& name : {"coordinate2d", "narrow10", "three-lines", "three-rays"}) {
    const Fan f = fixtures::fan(name);
    for (double delta : {0.1, 1.0, 3.5}) {
      const DeltaVec d = embed_tdi_in_qtdi(f, delta);
      CHECK(embed_qtdi_in_tdi(d) >= delta);
      CHECK(check_well_defined(f, d).certified());
    }
  }
}

TEST_CASE("verify_embedding", "[embeddings]") {
  const Fan f = fixtures::fan("coordinate2d");
  VerifyOptions o;
  o.samples = 10000;
  o.radius = 20.0;
  const auto tdi = InclusionSpec::tdi(1.0);
  const auto qtdi = InclusionSpec::qtdi(DeltaVec::unchecked(make_vec({std::sqrt(2.0), 1.0})));
  SECTION("TDI inside QTDI") {
    const auto r = verify_embedding(f, tdi, qtdi, o);
    CHECK(r.violations == 0);
    CHECK(r.points_checked > 10000);
  }
  SECTION("QTDI inside TDI") {
    CHECK(verify_embedding(f, qtdi, InclusionSpec::tdi(std::sqrt(2.0)), o).ok());
  }
  SECTION("reflexive") {
    CHECK(verify_embedding(f, tdi, tdi, o).ok());
    CHECK(verify_embedding(f, qtdi, qtdi, o).ok());
  }
  SECTION("tiny thresholds do not contain the TDI") {
    const auto tiny = InclusionSpec::qtdi(DeltaVec::unchecked(make_vec({0.01, 0.01})));
    const auto r = verify_embedding(f, tdi, tiny, o);
    CHECK(r.violations > 0);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK(r.witnesses.size() <= o.max_witnesses);
  }
  SECTION("ambiguities count as violations") {
    const Fan nf = fixtures::fan("narrow10");
    const auto bad = InclusionSpec::qtdi(DeltaVec::unchecked(make_vec({1.0, 1.0})));
    const auto r = verify_embedding(nf, tdi, bad, o);
    CHECK(r.violations > 0);
  }
  SECTION("same seed, same report") {
    const auto a = verify_embedding(f, tdi, InclusionSpec::qtdi(DeltaVec::unchecked(make_vec({0.5, 0.5}))), o);
    const auto b = verify_embedding(f, tdi, InclusionSpec::qtdi(DeltaVec::unchecked(make_vec({0.5, 0.5}))), o);
    CHECK(a.violations == b.violations);
    CHECK(a.points_checked == b.points_checked);
  }
}

TEST_CASE("both containments hold on bundled fans", "[embeddings][property]") {
  for (const auto& name : fixtures::bundled_fans()) {
    const Fan f = fixtures::fan(name);
    const DeltaVec d = embed_tdi_in_qtdi(f, 1.0, quick());
    VerifyOptions o;
    o.samples = 3000;
    o.seed = 3;
    INFO(name << " d = " << d.d.transpose());
    CHECK(verify_embedding(f, InclusionSpec::tdi(1.0), InclusionSpec::qtdi(d), o).violations == 0);
    CHECK(verify_embedding(f, InclusionSpec::qtdi(d), InclusionSpec::tdi(embed_qtdi_in_tdi(d)), o).violations == 0);
  }
}

TEST_CASE("parse_inclusion_spec", "[embeddings]") {
  const auto t = parse_inclusion_spec("tdi:1.5");
  CHECK(t.kind == InclusionSpec::Kind::tdi);
  CHECK(t.delta == 1.5);
  const auto q = parse_inclusion_spec("qtdi:1.414, 1.0");
  CHECK(q.kind == InclusionSpec::Kind::qtdi);
  CHECK(q.d.d.size() == 2);
  CHECK_THROWS_AS(parse_inclusion_spec("tdi"), InputError);
  CHECK_THROWS_AS(parse_inclusion_spec("tdi:1,2"), InputError);
  CHECK_THROWS_AS(parse_inclusion_spec("qtdi:1,x"), InputError);
  CHECK_THROWS_AS(parse_inclusion_spec("qtdi:1,-1"), InputError);
  CHECK_THROWS_AS(parse_inclusion_spec("foo:1"), InputError);
}
