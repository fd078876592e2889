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
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ocrslab/brute.hpp"
#include "ocrslab/errors.hpp"
#include "ocrslab/estimator.hpp"
#include "ocrslab/parallel.hpp"
#include "ocrslab/report.hpp"
#include "ocrslab/rng.hpp"
#include "ocrslab/stats.hpp"
#include "ocrslab/subset.hpp"

using namespace ocrslab;

TEST_CASE("ElementSubset basic operations") {
  ElementSubset s(100);
  REQUIRE(s.empty());
  s.insert(0);
  s.insert(63);
  s.insert(64);
  s.insert(99);
  REQUIRE(s.count() == 4);
  REQUIRE(s.contains(63));
  REQUIRE(s.contains(64));
  REQUIRE_FALSE(s.contains(50));
  s.erase(63);
  REQUIRE_FALSE(s.contains(63));
  s.flip(63);
  REQUIRE(s.contains(63));

  std::vector<int> seen;
  s.for_each([&](int e) { seen.push_back(e); });
  REQUIRE(seen == std::vector<int>{0, 63, 64, 99});
  REQUIRE(seen == s.to_indices());

  REQUIRE_THROWS_AS(s.contains(100), InputError);
  REQUIRE_THROWS_AS(s.insert(-1), InputError);
}

TEST_CASE("ElementSubset set algebra and ordering helpers") {
  ElementSubset a(10, {1, 3, 5});
  ElementSubset b(10, {3, 5, 7});
  REQUIRE((a | b).to_indices() == std::vector<int>{1, 3, 5, 7});
  REQUIRE((a & b).to_indices() == std::vector<int>{3, 5});
  REQUIRE((a - b).to_indices() == std::vector<int>{1});
  REQUIRE((a & b).is_subset_of(a));
  REQUIRE_FALSE(a.is_subset_of(b));

  REQUIRE(ElementSubset::full(70).count() == 70);
  REQUIRE(ElementSubset::full(0).empty());
  REQUIRE(ElementSubset::from_mask(5, 0b10110).to_indices() ==
          std::vector<int>{1, 2, 4});
  REQUIRE(ElementSubset::from_mask(5, 0b10110).low_mask() == 0b10110);
  REQUIRE_THROWS_AS(ElementSubset::from_mask(65, 1), InputError);

  ElementSubset c(5, {1, 2});
  REQUIRE_THROWS_AS(a |= c, InputError);
}

TEST_CASE("ElementSubset hash distinguishes content, not identity") {
  ElementSubset a(80, {0, 79});
  ElementSubset b(80, {0, 79});
  ElementSubset c(80, {0, 78});
  REQUIRE(a.hash() == b.hash());
  REQUIRE(a.hash() != c.hash());  // not guaranteed in general, holds here
}

TEST_CASE("SubstreamRng is reproducible and key-sensitive") {
  SubstreamRng a(42, "module", 7, "draws");
  SubstreamRng b(42, "module", 7, "draws");
  SubstreamRng c(42, "module", 8, "draws");
  SubstreamRng d(42, "module", 7, "other");
  bool all_equal = true, trial_differs = false, sub_differs = false;
  for (int i = 0; i < 64; ++i) {
    double va = a.uniform01();
    if (va != b.uniform01()) all_equal = false;
    if (va != c.uniform01()) trial_differs = true;
    if (va != d.uniform01()) sub_differs = true;
  }
  REQUIRE(all_equal);
  REQUIRE(trial_differs);
  REQUIRE(sub_differs);
}

TEST_CASE("SubstreamRng shuffle is a deterministic permutation") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  SubstreamRng r1(1, "t", 0, "s");
  SubstreamRng r2(1, "t", 0, "s");
  auto w = v;
  r1.shuffle(v);
  r2.shuffle(w);
  REQUIRE(v == w);
  std::sort(v.begin(), v.end());
  REQUIRE(v == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("Wilson interval brackets the point estimate") {
  auto wi = wilson_interval(80, 100);
  REQUIRE(wi.lo < 0.8);
  REQUIRE(wi.hi > 0.8);
  REQUIRE(wi.lo > 0.70);
  REQUIRE(wi.hi < 0.88);
  REQUIRE(wilson_interval(0, 10).lo == 0.0);
  REQUIRE(wilson_interval(10, 10).hi >= 1.0 - 1e-9);
  REQUIRE_THROWS_AS(wilson_interval(1, 0), InputError);
}

TEST_CASE("Hoeffding half-width scales like range over sqrt(n)") {
  double hw1 = hoeffding_half_width(1.0, 1000, 0.05);
  double hw2 = hoeffding_half_width(2.0, 1000, 0.05);
  double hw3 = hoeffding_half_width(1.0, 4000, 0.05);
  REQUIRE(hw2 == Catch::Approx(2.0 * hw1));
  REQUIRE(hw3 == Catch::Approx(hw1 / 2.0));
  REQUIRE_THROWS_AS(hoeffding_half_width(1.0, 0, 0.05), InputError);
}

TEST_CASE("RunningMean merge equals serial accumulation") {
  std::vector<double> xs{1.5, -2.0, 3.25, 0.0, 7.5, -1.25, 2.0};
  RunningMean serial;
  for (double x : xs) serial.add(x);
  RunningMean a, b, merged;
  for (size_t i = 0; i < xs.size(); ++i) (i < 3 ? a : b).add(xs[i]);
  merged.merge(a);
  merged.merge(b);
  REQUIRE(merged.n == serial.n);
  REQUIRE(merged.mean() == Catch::Approx(serial.mean()));
  REQUIRE(merged.variance() == Catch::Approx(serial.variance()));
}

TEST_CASE("Binomial tails match the brute-force recurrence") {
  for (auto [n, k, p] : {std::tuple<int64_t, int64_t, double>{10, 5, 0.5},
                         {100, 60, 0.3},
                         {1000, 490, 0.5},
                         {5000, 2500, 0.4995}}) {
    REQUIRE(binomial_upper_tail(n, k, p) ==
            Catch::Approx(brute_binomial_upper_tail(n, k, p)).margin(1e-10));
  }
  REQUIRE(binomial_upper_tail(10, 0, 0.5) == 1.0);
  REQUIRE(binomial_upper_tail(10, 11, 0.5) == 0.0);
  REQUIRE(binomial_lower_tail(10, 10, 0.5) == 1.0);
}

TEST_CASE("format_double is locale-free and round-trips") {
  REQUIRE(format_double(0.5) == "0.5");
  REQUIRE(format_double(-3.0) == "-3");
  double v = 0.1 + 0.2;
  REQUIRE(std::stod(format_double(v)) == v);
}

TEST_CASE("CsvWriter escapes separators and quotes") {
  CsvWriter csv({"a", "b"});
  csv.add_row({"plain", "with,comma"});
  csv.add_row({"with\"quote", "x"});
  REQUIRE(csv.str() ==
          "a,b\nplain,\"with,comma\"\n\"with\"\"quote\",x\n");
  REQUIRE_THROWS_AS(csv.add_row({"only-one"}), InputError);
}

TEST_CASE("content_digest is stable and content-sensitive") {
  REQUIRE(content_digest("abc") == content_digest("abc"));
  REQUIRE(content_digest("abc") != content_digest("abd"));
  REQUIRE(content_digest("").size() == 16);
}

TEST_CASE("parallel_chunks covers every chunk exactly once") {
  std::vector<int> hits(37, 0);
  parallel_chunks(37, 4, [&](int64_t c, int) { ++hits[c]; });
  for (int h : hits) REQUIRE(h == 1);
}

TEST_CASE("Exact estimator enumerates the support") {
  ExpectationEstimator est({ExpectationEstimator::Mode::kExact});
  std::vector<double> x{0.5, 0.25, 0.0};
  auto g = [](const ElementSubset& s) { return static_cast<double>(s.count()); };
  SubstreamRng rng(0, "est", 0, "x");
  Estimate e = est.estimate(x, g, 3.0, rng);
  REQUIRE(e.exact);
  REQUIRE(e.value == Catch::Approx(0.75));

  // min(1, |S|): 1 - (1-0.5)(1-0.25) = 0.625.
  auto cap = [](const ElementSubset& s) { return s.empty() ? 0.0 : 1.0; };
  REQUIRE(est.estimate(x, cap, 1.0, rng).value == Catch::Approx(0.625));
}

TEST_CASE("Exact estimator refuses oversized supports") {
  ExpectationEstimator est({ExpectationEstimator::Mode::kExact});
  std::vector<double> x(21, 0.5);
  auto g = [](const ElementSubset&) { return 0.0; };
  SubstreamRng rng(0, "est", 0, "x");
  REQUIRE_THROWS_AS(est.estimate(x, g, 1.0, rng), CapabilityError);
}

TEST_CASE("Monte Carlo estimator converges and reports its half-width") {
  ExpectationEstimator::Config cfg;
  cfg.mode = ExpectationEstimator::Mode::kMonteCarlo;
  cfg.samples = 20000;
  ExpectationEstimator est(cfg);
  std::vector<double> x{0.5, 0.25};
  auto g = [](const ElementSubset& s) { return static_cast<double>(s.count()); };
  SubstreamRng rng(7, "est", 0, "mc");
  Estimate e = est.estimate(x, g, 2.0, rng);
  REQUIRE_FALSE(e.exact);
  REQUIRE(e.half_width > 0.0);
  REQUIRE(std::fabs(e.value - 0.75) < e.half_width);
}

TEST_CASE("decide_exceeds resolves clear margins in both modes") {
  SubstreamRng rng(3, "est", 0, "dec");
  std::vector<double> x{0.5, 0.5};
  auto g = [](const ElementSubset& s) { return s.empty() ? 0.0 : 1.0; };
  // E[g] = 0.75.
  ExpectationEstimator exact({ExpectationEstimator::Mode::kExact});
  REQUIRE(exact.decide_exceeds(x, g, 1.0, 0.5, rng).exceeds);
  REQUIRE_FALSE(exact.decide_exceeds(x, g, 1.0, 0.75, rng).exceeds);

  ExpectationEstimator::Config mc;
  mc.mode = ExpectationEstimator::Mode::kMonteCarlo;
  mc.samples = 5000;
  ExpectationEstimator loose(mc);
  REQUIRE(loose.decide_exceeds(x, g, 1.0, 0.5, rng).exceeds);
  REQUIRE_FALSE(loose.decide_exceeds(x, g, 1.0, 0.95, rng).exceeds);
}

TEST_CASE("decide_exceeds raises a typed error on a knife-edge threshold") {
  ExpectationEstimator::Config mc;
  mc.mode = ExpectationEstimator::Mode::kMonteCarlo;
  mc.samples = 200;
  mc.max_escalations = 1;
  ExpectationEstimator est(mc);
  std::vector<double> x{0.5, 0.5};
  auto g = [](const ElementSubset& s) { return s.empty() ? 0.0 : 1.0; };
  SubstreamRng rng(11, "est", 0, "edge");
  // Threshold exactly at E[g] = 0.75: the interval cannot clear it.
  try {
    est.decide_exceeds(x, g, 1.0, 0.75, rng);
    FAIL("expected IndeterminateComparisonError");
  } catch (const IndeterminateComparisonError& e) {
    REQUIRE(e.threshold == 0.75);
    REQUIRE(e.half_width > 0.0);
    REQUIRE(std::fabs(e.estimate - 0.75) <= e.half_width);
  }
}
