#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "zinorm/errors.hpp"
#include "zinorm/indicators.hpp"

using namespace zinorm;

namespace {

struct Pair {
  CountProfile group;
  CountProfile world;
};

/// Random nested (group, world) profiles with integer counts. Every cell
/// is positive so all four indicators and their intervals are defined.
Pair random_pair(std::mt19937_64& rng, int max_strata = 8, int max_cell = 60) {
  std::uniform_int_distribution<int> strata(1, max_strata);
  std::uniform_int_distribution<int> cell(2, max_cell);
  Pair p;
  p.group.label = "g";
  p.world.label = kWorldLabel;
  const int k = strata(rng);
  for (int f = 0; f < k; ++f) {
    const StratumKey key{"f" + std::to_string(f), 2000 + f % 3};
    const int wm = cell(rng), wn = cell(rng);
    const int gm = std::uniform_int_distribution<int>(1, wm - 1)(rng);
    const int gn = std::uniform_int_distribution<int>(1, wn - 1)(rng);
    p.world.cells[key] = {double(wm), double(wn)};
    p.group.cells[key] = {double(gm), double(gn)};
  }
  return p;
}

constexpr int kTrials = 1000;

}  // namespace

TEST_CASE("world-vs-world identity") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < kTrials; ++t) {
    const auto w = random_pair(rng).world;
    CHECK(mhq(w, w).value == 1.0);
    CHECK(emnpc(w, w).value == 1.0);
    CHECK(mnpc(w, w).value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single-stratum MHq equals the odds ratio") {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> cell(1, 500);
  for (int t = 0; t < kTrials; ++t) {
    const double a = cell(rng), b = cell(rng), c = a + cell(rng), d = b + cell(rng);
    CountProfile g, w;
    g.cells[{"f", 2010}] = {a, b};
    w.cells[{"f", 2010}] = {c, d};
    CHECK(mhq(g, w).value == doctest::Approx(a * d / (b * c)).epsilon(1e-14));
  }
}

TEST_CASE("stratum replication keeps MHq and shrinks its interval") {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 200; ++t) {
    const auto base = random_pair(rng);
    const auto r1 = mhq(base.group, base.world);
    for (int k = 2; k <= 4; ++k) {
      Pair rep;
      for (int copy = 0; copy < k; ++copy) {
        for (const auto& [key, cell] : base.world.cells) {
          const StratumKey dup{key.field_id + "#" + std::to_string(copy), key.year};
          rep.world.cells[dup] = cell;
          rep.group.cells[dup] = base.group.cells.at(key);
        }
      }
      const auto rk = mhq(rep.group, rep.world);
      CHECK(rk.value == doctest::Approx(r1.value).epsilon(1e-12));
      CHECK(rk.ci_upper - rk.ci_lower < r1.ci_upper - r1.ci_lower);
    }
  }
}

TEST_CASE("scaling stratum cells by a common factor keeps MHq") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> factor(0.1, 20.0);
  for (int t = 0; t < kTrials; ++t) {
    auto p = random_pair(rng);
    const double before = mhq(p.group, p.world).value;
    const double k = factor(rng);
    for (auto& [key, cell] : p.world.cells) {
      cell = {cell.mentioned * k, cell.not_mentioned * k};
      auto& g = p.group.cells.at(key);
      g = {g.mentioned * k, g.not_mentioned * k};
    }
    CHECK(mhq(p.group, p.world).value == doctest::Approx(before).epsilon(1e-12));

    // A lone stratum may be rescaled freely.
    auto one = p;
    one.world.cells.erase(std::next(one.world.cells.begin()), one.world.cells.end());
    one.group.cells.erase(std::next(one.group.cells.begin()), one.group.cells.end());
    const double lone = mhq(one.group, one.world).value;
    const double k2 = factor(rng);
    auto& wc = one.world.cells.begin()->second;
    auto& gc = one.group.cells.begin()->second;
    wc = {wc.mentioned * k2, wc.not_mentioned * k2};
    gc = {gc.mentioned * k2, gc.not_mentioned * k2};
    CHECK(mhq(one.group, one.world).value == doctest::Approx(lone).epsilon(1e-12));
  }
}

TEST_CASE("intervals bracket the value; EMNPC and MHq are log-symmetric") {
  std::mt19937_64 rng(105);
  for (int t = 0; t < kTrials; ++t) {
    const auto p = random_pair(rng);
    for (const auto& r : {emnpc(p.group, p.world), mnpc(p.group, p.world),
                          mhq(p.group, p.world), mhq_prime(p.group, p.world)}) {
      CHECK(0.0 < r.ci_lower);
      CHECK(r.ci_lower <= r.value);
      CHECK(r.value <= r.ci_upper);
    }
    for (const auto& r : {emnpc(p.group, p.world), mhq(p.group, p.world)}) {
      const double up = std::log(r.ci_upper) - std::log(r.value);
      const double down = std::log(r.value) - std::log(r.ci_lower);
      CHECK(std::abs(up - down) <= 1e-12);
    }
  }
}

TEST_CASE("MNPC per-stratum and per-paper formulations agree") {
  std::mt19937_64 rng(106);
  for (int t = 0; t < 1500; ++t) {
    const auto p = random_pair(rng, 10, 40);
    CHECK(mnpc(p.group, p.world).value ==
          doctest::Approx(oracle::mnpc_per_paper(p.group, p.world)).epsilon(1e-12));
  }
}
