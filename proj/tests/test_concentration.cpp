// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <memory>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ocrslab/concentration.hpp"
#include "ocrslab/graphs.hpp"

using namespace ocrslab;

TEST_CASE("BernoulliVector validation and scaling") {
  auto p = BernoulliVector::uniform(4, 0.3);
  REQUIRE(p.iid());
  p.p[2] = 0.5;
  REQUIRE_FALSE(p.iid());
  REQUIRE_NOTHROW(p.validate());
  p.p[0] = 1.2;
  REQUIRE_THROWS_AS(p.validate(), InputError);
  REQUIRE_THROWS_AS(BernoulliVector{}.validate(), InputError);

  auto q = BernoulliVector::uniform(3, 0.8);
  auto two_step = q.scaled(0.4).scaled(0.7);
  auto one_step = q.scaled(1.1);
  for (int e = 0; e < 3; ++e)
    REQUIRE(two_step.p[e] == Catch::Approx(one_step.p[e]).margin(1e-15));
  REQUIRE(q.scaled(0.0).p == q.p);
  REQUIRE_THROWS_AS(q.scaled(-0.1), InputError);
}

TEST_CASE("function builders expose the advertised shapes") {
  SECTION("capped_sum") {
    auto f = MonotoneLipschitzFunction::capped_sum(10, 4);
    REQUIRE(f.dimension == 10);
    REQUIRE(f.range == 4.0);
    REQUIRE(f.has_count_form());
    REQUIRE(f.count_form(3) == 3.0);
    REQUIRE(f.count_form(9) == 4.0);
    REQUIRE(f(ElementSubset(10, {0, 1})) == 2.0);
    REQUIRE_THROWS_AS(MonotoneLipschitzFunction::capped_sum(0, 1), InputError);
  }
  SECTION("coordinate_max") {
    auto f = MonotoneLipschitzFunction::coordinate_max(6);
    REQUIRE(f.range == 1.0);
    REQUIRE(f(ElementSubset(6)) == 0.0);
    REQUIRE(f(ElementSubset(6, {5})) == 1.0);
  }
  SECTION("uniform_occupancy") {
    auto f = MonotoneLipschitzFunction::uniform_occupancy(3, 2);
    REQUIRE(f.dimension == 12);
    REQUIRE(f.range == 2.0);
    // knee at kn - k = 4
    REQUIRE(f.count_form(4) == 0.0);
    REQUIRE(f.count_form(5) == 1.0);
    REQUIRE(f.count_form(6) == 2.0);
    REQUIRE(f.count_form(12) == 2.0);
  }
  SECTION("matroid_rank") {
    auto f = MonotoneLipschitzFunction::matroid_rank(
        std::make_shared<GraphicMatroid>(3, complete_graph(3).edges));
    REQUIRE(f.range == 2.0);
    REQUIRE_FALSE(f.has_count_form());
    REQUIRE(f(ElementSubset::full(3)) == 2.0);
  }
  SECTION("occupancy") {
    auto mk = extend_kfold(std::make_shared<UniformMatroid>(2, 1), 2);
    auto f = MonotoneLipschitzFunction::occupancy(mk, 0, ElementSubset(4));
    REQUIRE(f.dimension == 4);
    REQUIRE(f.range == 2.0);
    REQUIRE(f(ElementSubset(4)) == 0.0);
    REQUIRE(f(ElementSubset::full(4)) == 2.0);
    REQUIRE_THROWS_AS(
        MonotoneLipschitzFunction::occupancy(mk, 5, ElementSubset(4)),
        InputError);
  }
}

TEST_CASE("spot check finds no monotonicity or Lipschitz violations") {
  SubstreamRng rng(3, "conc-test", 0, "spot");
  auto mk = extend_kfold(
      std::make_shared<GraphicMatroid>(3, complete_graph(3).edges), 2);
  for (const auto& f :
       {MonotoneLipschitzFunction::capped_sum(12, 5),
        MonotoneLipschitzFunction::coordinate_max(9),
        MonotoneLipschitzFunction::uniform_occupancy(4, 2),
        MonotoneLipschitzFunction::matroid_rank(
            std::make_shared<GraphicMatroid>(4, complete_graph(4).edges)),
        MonotoneLipschitzFunction::occupancy(mk, 1, ElementSubset(6, {0}))}) {
    REQUIRE(spot_check_monotone_lipschitz(f, 300, rng) == 0);
  }
}

TEST_CASE("analytic bounds") {
  REQUIRE(bound_new(0.2, 30.0) == Catch::Approx(std::exp(-6.0)));
  // The pinned pair (sqrt(ln k / k), sqrt(k ln k)) multiplies to ln k.
  double k = 100.0;
  double s = std::sqrt(std::log(k) / k);
  double t = std::sqrt(k * std::log(k));
  REQUIRE(bound_new(s, t) == Catch::Approx(1.0 / k));
  REQUIRE(bound_mcdiarmid(1000, 30.0) == Catch::Approx(std::exp(-1.8)));
  REQUIRE(bound_chernoff(10.0, 1.0) == Catch::Approx(std::exp(-10.0 / 3.0)));
  REQUIRE_THROWS_AS(bound_new(0.0, 1.0), InputError);
  REQUIRE_THROWS_AS(bound_new(0.5, 0.0), InputError);
  REQUIRE_THROWS_AS(bound_mcdiarmid(0, 1.0), InputError);
}

TEST_CASE("empirical_tail respects the bound on both sampling paths") {
  auto f = MonotoneLipschitzFunction::capped_sum(50, 20);
  auto p = BernoulliVector::uniform(50, 0.3);
  TailConfig cfg;
  cfg.trials = 20000;
  cfg.master_seed = 44;
  for (bool fast : {true, false}) {
    cfg.allow_count_fast_path = fast;
    auto est = empirical_tail(f, p, 0.5, 5.0, cfg);
    REQUIRE(est.threshold == Catch::Approx(est.mean + 5.0));
    REQUIRE(std::fabs(est.mean - 15.0) < 5 * est.mean_half_width + 0.1);
    REQUIRE(est.bound == Catch::Approx(std::exp(-2.5)));
    REQUIRE(est.tail <= est.bound + 3 * est.tail_ci.half_width());
  }
  REQUIRE_THROWS_AS(
      empirical_tail(f, BernoulliVector::uniform(10, 0.3), 0.5, 5.0, cfg),
      InputError);
}

TEST_CASE("empirical_tail is independent of the thread count") {
  auto f = MonotoneLipschitzFunction::coordinate_max(20);
  BernoulliVector p;
  for (int e = 0; e < 20; ++e) p.p.push_back(0.01 + 0.002 * e);  // not iid
  TailConfig cfg;
  cfg.trials = 8000;
  cfg.chunk_size = 512;
  cfg.master_seed = 17;
  cfg.threads = 1;
  auto one = empirical_tail(f, p, 0.3, 0.5, cfg);
  cfg.threads = 4;
  auto four = empirical_tail(f, p, 0.3, 0.5, cfg);
  REQUIRE(one.mean == four.mean);
  REQUIRE(one.exceed_count == four.exceed_count);
}

TEST_CASE("counterexample_unscaled guards and small-scale behavior") {
  TailConfig cfg;
  cfg.trials = 20000;
  cfg.master_seed = 8;
  REQUIRE_THROWS_AS(counterexample_unscaled(100, 3, cfg), InputError);
  REQUIRE_THROWS_AS(counterexample_unscaled(10, 0, cfg), InputError);

  auto rep = counterexample_unscaled(50, 1, cfg);
  REQUIRE(rep.p == Catch::Approx(0.49));
  REQUIRE(rep.mean_bound == 0.5);
  // With k = 1, f is the indicator of |X| >= kn, so the mean equals the
  // full-occupancy probability and both track the exact binomial tail.
  // Mean and tail phases use independent substreams, so the two estimates of
  // the same indicator probability agree only statistically.
  REQUIRE(rep.mean == Catch::Approx(rep.full_prob).margin(0.02));
  REQUIRE(rep.mean <= rep.mean_bound + 5 * rep.mean_half_width);
  REQUIRE(std::fabs(rep.full_prob - rep.exact_full_prob) <= 0.02);
  REQUIRE(rep.exact_full_prob ==
          Catch::Approx(binomial_upper_tail(100, 50, 0.49)));
}
