// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace conefan;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Cone cone2(std::vector<Vec> g) { return Cone::from_generators(g, 2); }
const Cone halfplane_left = cone2({make_vec({-1, 0}), make_vec({0, 1}), make_vec({0, -1})});
const Cone nonpositive = cone2({make_vec({-1, 0}), make_vec({0, -1})});

DeltaVec certified(const Fan& f, Vec d) {
  DeltaVec out = DeltaVec::unchecked(std::move(d));
  out.certificate = check_well_defined(f, out);
  REQUIRE(out.certificate.certified());
  return out;
}

}  // namespace

TEST_CASE("eval_tdi on the coordinate fan", "[inclusions]") {
  const Fan f = fixtures::fan("coordinate2d");
  SECTION("deep inside the first quadrant") {
    const auto r = eval_tdi(f, 1.0, make_vec({10, 10}));
    CHECK(cone_equal(r.cone, nonpositive));
    CHECK(r.step == 3);
  }
  SECTION("near the positive x axis") {
    const auto r = eval_tdi(f, 1.0, make_vec({10, 0.5}));
    CHECK(cone_equal(r.cone, halfplane_left));
    CHECK(cone_equal(f.cone(r.source_cone_index), cone2({make_vec({1, 0})})));
  }
  SECTION("near the origin every quadrant qualifies") {
    const auto r = eval_tdi(f, 1.0, make_vec({0.5, 0.5}));
    CHECK(r.cone.dim() == 2);
    CHECK(r.cone.halfspaces().empty());
    CHECK(f.cone(r.source_cone_index).is_zero());
  }
  SECTION("errors") {
    CHECK_THROWS_AS(eval_tdi(f, 0.0, make_vec({1, 1})), InputError);
    CHECK_THROWS_AS(eval_tdi(f, 1.0, make_vec({1, 1, 1})), InputError);
    const Fan unknown = Fan::trusted(2, f.cones(), Completeness::unknown);
    CHECK_THROWS_AS(eval_tdi(unknown, 1.0, make_vec({1, 1})), PreconditionError);
  }
}

TEST_CASE("eval_qtdi on the coordinate fan", "[inclusions]") {
  const Fan f = fixtures::fan("coordinate2d");
  const DeltaVec d = certified(f, make_vec({std::sqrt(2.0), 1.0}));
  SECTION("step 0 near the origin") {
    const auto r = eval_qtdi(f, d, make_vec({0.5, 0.5}));
    CHECK(r.step == 0);
    CHECK(r.cone.halfspaces().empty());
    CHECK(r.cone.dim() == 2);
  }
  SECTION("step 1 near an axis") {
    const auto r = eval_qtdi(f, d, make_vec({10, 0.5}));
    CHECK(r.step == 1);
    CHECK(cone_equal(r.cone, halfplane_left));
  }
  SECTION("step 2 deep inside a quadrant") {
    const auto r = eval_qtdi(f, d, make_vec({10, 10}));
    CHECK(r.step == 2);
    CHECK(cone_equal(r.cone, nonpositive));
  }
  SECTION("uncertified thresholds need an explicit opt-in") {
    const DeltaVec raw = DeltaVec::unchecked(make_vec({std::sqrt(2.0), 1.0}));
    CHECK_THROWS_AS(eval_qtdi(f, raw, make_vec({1, 1})), PreconditionError);
    CHECK(eval_qtdi(f, raw, make_vec({10, 10}), true).step == 2);
  }
  SECTION("bad threshold vectors") {
    CHECK_THROWS_AS(DeltaVec::unchecked(make_vec({1.0, 0.0})), InputError);
    CHECK_THROWS_AS(eval_qtdi(f, DeltaVec::unchecked(make_vec({1.0})), make_vec({1, 1}), true), InputError);
  }
}

TEST_CASE("eval_qtdi reports ambiguity on the narrow fan", "[inclusions]") {
  const Fan f = fixtures::fan("narrow10");
  const DeltaVec d = DeltaVec::unchecked(make_vec({1.0, 1.0}));
  const Vec x = make_vec({6, 0.5});
  try {
    eval_qtdi(f, d, x, true);
    FAIL("expected an ambiguity");
  } catch (const AmbiguityError& e) {
    CHECK(e.step() == 1);
    CHECK(f.cone(e.first()).dim() == 1);
    CHECK(f.cone(e.second()).dim() == 1);
    CHECK((e.point() - x).norm() == 0.0);
  }
}

TEST_CASE("estimate_alpha", "[inclusions]") {
  const Fan f = fixtures::fan("coordinate2d");
  const ConeIndex rx = fixtures::index_of(f, {make_vec({1, 0})});
  const ConeIndex ry = fixtures::index_of(f, {make_vec({0, 1})});
  const ConeIndex q1 = fixtures::index_of(f, {make_vec({1, 0}), make_vec({0, 1})});
  const ConeIndex q4 = fixtures::index_of(f, {make_vec({1, 0}), make_vec({0, -1})});
  SECTION("two axis rays") {
    const auto a = estimate_alpha(f, {rx, ry});
    CHECK_THAT(a.alpha, WithinAbs(std::sqrt(2.0), 1e-9));
    CHECK(a.exact);
    CHECK(a.method() == "exact-low-dim");
    CHECK(f.cone(a.intersection_index).is_zero());
    CHECK_THAT(a.witness.norm(), WithinAbs(std::sqrt(2.0), 1e-9));
  }
  SECTION("two adjacent quadrants") {
    CHECK_THAT(estimate_alpha(f, {q1, q4}).alpha, WithinAbs(1.0, 1e-9));
  }
  SECTION("single cone") {
    CHECK_THAT(estimate_alpha(f, {q1}).alpha, WithinAbs(1.0, 1e-9));
  }
  SECTION("narrow wedge") {
    const Fan nf = fixtures::fan("narrow10");
    const ConeIndex a = fixtures::index_of(nf, {make_vec({1, 0})});
    const double t = 10 * std::numbers::pi / 180;
    const ConeIndex b = fixtures::index_of(nf, {make_vec({std::cos(t), std::sin(t)})});
    CHECK_THAT(estimate_alpha(nf, {a, b}).alpha, WithinRel(1.0 / std::sin(t / 2), 1e-9));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(estimate_alpha(f, std::vector<ConeIndex>{}), InputError);
    CHECK_THROWS_AS(estimate_alpha(f, {99}), InputError);
  }
}

TEST_CASE("exact 2D alpha agrees with a dense scan", "[inclusions][oracle]") {
  for (const auto& name : {"coordinate2d", "narrow10", "three-lines", "three-rays"}) {
    const Fan f = fixtures::fan(name);
    for (ConeIndex i = 0; i < f.size(); ++i) {
      for (ConeIndex j = i + 1; j < f.size(); ++j) {
        if (f.is_subcone(i, j) || f.is_subcone(j, i)) continue;
        const auto a = estimate_alpha(f, {i, j});
        const double dense = oracle::dense_tube_sup_2d(
            f.cone(a.intersection_index).generators(),
            {{f.cone(i).generators(), 1.0}, {f.cone(j).generators(), 1.0}}, 20000);
        INFO(name << " pair " << i << "," << j);
        CHECK(a.alpha >= dense - 1e-9);
        CHECK(a.alpha <= dense * (1 + 1e-3) + 1e-9);
      }
    }
  }
}

TEST_CASE("alpha bounds every sampled feasible point", "[inclusions][property]") {
  const Fan f = fixtures::fan("three-lines");
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> box(-4.0, 4.0);
  const double delta = 1.0;
  std::size_t violations = 0, feasible = 0;
  for (ConeIndex i = 0; i < f.size(); ++i) {
    for (ConeIndex j = i + 1; j < f.size(); ++j) {
      if (f.is_subcone(i, j) || f.is_subcone(j, i)) continue;
      const auto a = estimate_alpha(f, {i, j});
      const Cone& meet = f.cone(a.intersection_index);
      for (int s = 0; s < 2000; ++s) {
        const Vec x = make_vec({box(rng), box(rng)});
        if (oracle::subset_distance(f.cone(i).generators(), x) > delta) continue;
        if (oracle::subset_distance(f.cone(j).generators(), x) > delta) continue;
        ++feasible;
        if (oracle::subset_distance(meet.generators(), x) > a.alpha * delta * (1 + 1e-6)) ++violations;
      }
    }
  }
  CHECK(feasible > 1000);
  CHECK(violations == 0);
}

TEST_CASE("alpha is invariant under rescaled generators", "[inclusions][property]") {
  const Fan a = hyperplane_fan({make_vec({1, 0}), make_vec({1, 2})});
  const Fan b = hyperplane_fan({make_vec({7, 0}), make_vec({-0.5, -1})});
  REQUIRE(a.size() == b.size());
  const ConeIndex ai = fixtures::index_of(a, {make_vec({0, 1})});
  const ConeIndex aj = fixtures::index_of(a, {make_vec({2, -1})});
  const ConeIndex bi = fixtures::index_of(b, {make_vec({0, 3})});
  const ConeIndex bj = fixtures::index_of(b, {make_vec({4, -2})});
  CHECK_THAT(estimate_alpha(a, {ai, aj}).alpha, WithinRel(estimate_alpha(b, {bi, bj}).alpha, 1e-12));
}

TEST_CASE("check_well_defined", "[inclusions]") {
  SECTION("coordinate fan with (sqrt2, 1)") {
    const auto w = check_well_defined(fixtures::fan("coordinate2d"), DeltaVec::unchecked(make_vec({std::sqrt(2.0), 1.0})));
    CHECK(w.certified());
    CHECK(w.method == "exact-low-dim");
  }
  SECTION("coordinate fan slightly below sqrt2 is refuted") {
    const auto w = check_well_defined(fixtures::fan("coordinate2d"), DeltaVec::unchecked(make_vec({1.414, 1.0})));
    CHECK(w.refuted());
  }
  SECTION("narrow fan with (1, 1) is refuted with a checkable witness") {
    const Fan f = fixtures::fan("narrow10");
    const DeltaVec d = DeltaVec::unchecked(make_vec({1.0, 1.0}));
    const auto w = check_well_defined(f, d);
    REQUIRE(w.refuted());
    REQUIRE(w.cone_pair);
    const auto [i, j] = *w.cone_pair;
    const Cone& a = f.cone(i);
    const Cone& b = f.cone(j);
    const double ra = a.dim() < 2 ? d.d(a.dim()) : 0.0;
    const double rb = b.dim() < 2 ? d.d(b.dim()) : 0.0;
    CHECK(oracle::subset_distance(a.generators(), w.witness) <= ra + 1e-9);
    CHECK(oracle::subset_distance(b.generators(), w.witness) <= rb + 1e-9);
    const Cone meet = intersect(a, b);
    CHECK(oracle::subset_distance(meet.generators(), w.witness) > d.d(meet.dim()));
  }
  SECTION("the figure scenario point is a witness too") {
    const Fan f = fixtures::fan("narrow10");
    const Vec x = make_vec({6, 0.5});
    const double t = 10 * std::numbers::pi / 180;
    CHECK(oracle::subset_distance({make_vec({1, 0})}, x) <= 1.0);
    CHECK(oracle::subset_distance({make_vec({std::cos(t), std::sin(t)})}, x) <= 1.0);
    CHECK(x.norm() > 1.0);
  }
}

TEST_CASE("TDI grows with delta", "[inclusions][property]") {
  const Fan f = fixtures::fan("three-lines");
  std::mt19937_64 rng(31);
  for (int s = 0; s < 500; ++s) {
    const Vec x = oracle::random_point(rng, 2, 3.0);
    const auto small = eval_tdi(f, 0.5, x);
    const auto large = eval_tdi(f, 2.0, x);
    CHECK(cone_contains_cone(large.cone, small.cone));
  }
}

TEST_CASE("far from other cones both evaluators agree", "[inclusions][property]") {
  const Fan f = fixtures::fan("coordinate2d");
  const DeltaVec d = certified(f, make_vec({std::sqrt(2.0), 1.0}));
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(2.0, 50.0);
  for (int s = 0; s < 300; ++s) {
    const Vec x = make_vec({(s % 2 ? 1 : -1) * u(rng), (s % 3 ? 1 : -1) * u(rng)});
    const auto a = eval_tdi(f, 1.0, x);
    const auto b = eval_qtdi(f, d, x);
    CHECK(a.source_cone_index == b.source_cone_index);
    CHECK(f.cone(a.source_cone_index).dim() == 2);
  }
}

TEST_CASE("QTDI answers do not depend on cone order", "[inclusions][property]") {
  const Fan f = fixtures::fan("three-lines");
  const DeltaVec d = certified(f, make_vec({3.0, 1.0}));
  std::mt19937_64 rng(41);
  std::vector<ConeIndex> perm(f.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int p = 0; p < 5; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const Fan g = f.reordered(perm);
    for (int s = 0; s < 200; ++s) {
      const Vec x = oracle::random_point(rng, 2, 4.0);
      const auto a = eval_qtdi(f, d, x);
      const auto b = eval_qtdi(g, d, x);
      CHECK(a.step == b.step);
      CHECK(perm[b.source_cone_index] == a.source_cone_index);
    }
  }
}
