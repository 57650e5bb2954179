#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_nets.hpp"
#include "support/stats_util.hpp"
#include "tinfer/tasks.hpp"

using tinfer::Assignment;
using tinfer::LabeledTensor;
using tinfer::MarginalTable;
using tinfer::MpeSolution;
using tinfer::SampleBatch;
using tinfer::ScaledReal;
using tinfer::TensorNetwork;
using tinfer::VarId;

namespace {

Assignment ev(std::initializer_list<std::pair<VarId, std::int64_t>> items) {
  Assignment a;
  for (const auto& [v, val] : items) a.set(v, val);
  return a;
}

}  // namespace

TEST_CASE("probability of evidence on the chain fixture") {
  TensorNetwork net = fixtures::n1();
  CHECK(tinfer::compute_pr(net, {}).value() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tinfer::compute_pr(net, ev({{1, 1}})).value() ==
        doctest::Approx(0.48).epsilon(1e-14));
  CHECK(tinfer::compute_pr(net, ev({{0, 1}, {1, 0}})).value() ==
        doctest::Approx(0.10).epsilon(1e-14));
  CHECK(tinfer::compute_pr(net, ev({{1, 1}})).log10() ==
        doctest::Approx(-0.3187587626244128).epsilon(1e-12));
}

TEST_CASE("probability of evidence survives mass far below double range") {
  // 300 independent coins each observed heads with bias 2^-6: p(e) = 2^-1800.
  TensorNetwork net;
  net.num_vars = 300;
  net.cards.assign(300, 2);
  Assignment evidence;
  const double bias = std::ldexp(1.0, -6);
  for (VarId v = 0; v < 300; ++v) {
    net.tensors.push_back(LabeledTensor({v}, {2}, {bias, 1.0 - bias}));
    evidence.set(v, 0);
  }
  ScaledReal p = tinfer::compute_pr(net, evidence);
  CHECK(p.value() == 0.0);  // saturates as a plain double
  CHECK(p.log10() == doctest::Approx(-1800 * 0.30102999566398120).epsilon(1e-9));
}

TEST_CASE("marginals on the chain fixture") {
  TensorNetwork net = fixtures::n1();

  MarginalTable all = tinfer::compute_mar(net, {});
  REQUIRE(all.queries.size() == 2);
  CHECK(all.probs[0].data[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(all.probs[1].data[0] == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(all.probs[1].data[1] == doctest::Approx(0.48).epsilon(1e-12));

  MarginalTable given_b1 = tinfer::compute_mar(net, ev({{1, 1}}));
  REQUIRE(given_b1.queries == std::vector<std::vector<VarId>>{{0}});
  CHECK(given_b1.probs[0].data[0] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(given_b1.probs[0].data[1] == doctest::Approx(0.625).epsilon(1e-12));

  MarginalTable given_a0 = tinfer::compute_mar(net, ev({{0, 0}}), {{1}});
  CHECK(given_a0.probs[0].data[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(given_a0.probs[0].data[1] == doctest::Approx(0.3).epsilon(1e-12));

  // Joint pairwise query in one pass.
  MarginalTable joint = tinfer::compute_mar(net, {}, {{0, 1}});
  REQUIRE(joint.probs[0].size() == 4);
  CHECK(joint.probs[0].data[0] == doctest::Approx(0.42).epsilon(1e-12));
  CHECK(joint.probs[0].data[3] == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("marginal errors") {
  TensorNetwork net = fixtures::n1();
  CHECK_THROWS_AS(tinfer::compute_mar(net, ev({{1, 1}}), {{1}}), tinfer::ShapeError);
  CHECK_THROWS_AS(tinfer::compute_mar(net, {}, {{0, 0}}), tinfer::ShapeError);
  CHECK_THROWS_AS(tinfer::compute_mar(net, {}, {{9}}), tinfer::ShapeError);

  TensorNetwork dead = fixtures::n1();
  dead.tensors[0].data = {0.0, 0.0};
  CHECK_THROWS_AS(tinfer::compute_mar(dead, {}), tinfer::EvidenceError);
}

TEST_CASE("marginals match brute force on random networks") {
  std::mt19937_64 rng(616);
  for (int trial = 0; trial < 25; ++trial) {
    TensorNetwork net = testgen::random_network(rng);
    Assignment evidence = testgen::random_evidence(rng, net);
    MarginalTable table = tinfer::compute_mar(net, evidence);
    for (std::size_t q = 0; q < table.queries.size(); ++q) {
      std::vector<long double> expect =
          oracle::marginal(net, evidence, table.queries[q][0]);
      double sum = 0.0;
      for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(table.probs[q].data[i] ==
              doctest::Approx(static_cast<double>(expect[i])).epsilon(1e-9));
        sum += table.probs[q].data[i];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("most probable explanation on the chain fixture") {
  TensorNetwork net = fixtures::n1();

  MpeSolution best = tinfer::compute_mpe(net, {});
  CHECK(*best.assignment.find(0) == 0);
  CHECK(*best.assignment.find(1) == 0);
  CHECK(best.log_prob == doctest::Approx(std::log(0.42)).epsilon(1e-12));

  MpeSolution given_b1 = tinfer::compute_mpe(net, ev({{1, 1}}));
  CHECK(given_b1.assignment.size() == 1);
  CHECK(*given_b1.assignment.find(0) == 1);
  CHECK(given_b1.log_prob == doctest::Approx(std::log(0.30)).epsilon(1e-12));

  TensorNetwork uniform;
  uniform.num_vars = 1;
  uniform.cards = {2};
  uniform.tensors.push_back(LabeledTensor({0}, {2}, {0.5, 0.5}));
  MpeSolution u = tinfer::compute_mpe(uniform, {});
  CHECK(*u.assignment.find(0) == 0);  // tie resolves row-major first
  CHECK(u.log_prob == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("mpe matches brute force on random networks") {
  std::mt19937_64 rng(272);
  for (int trial = 0; trial < 25; ++trial) {
    TensorNetwork net = testgen::random_network(rng);
    Assignment evidence = testgen::random_evidence(rng, net);
    MpeSolution got = tinfer::compute_mpe(net, evidence);
    oracle::MaxState expect = oracle::best_explanation(net, evidence);
    CHECK(got.log_prob ==
          doctest::Approx(static_cast<double>(std::log(expect.value))).epsilon(1e-10));

    // The returned assignment must itself attain the reported mass.
    Assignment full = evidence;
    for (const auto& [v, val] : got.assignment) full.set(v, val);
    long double attained = oracle::eval_config(net, full);
    CHECK(static_cast<double>(attained) ==
          doctest::Approx(static_cast<double>(expect.value)).epsilon(1e-10));
  }
}

TEST_CASE("marginal map on the chain fixture") {
  TensorNetwork net = fixtures::n1();

  MpeSolution b = tinfer::compute_mmap(net, {}, {1});
  CHECK(b.assignment.size() == 1);
  CHECK(*b.assignment.find(1) == 0);  // p(B=0) = 0.52 beats 0.48
  CHECK(b.log_prob == doctest::Approx(std::log(0.52)).epsilon(1e-12));

  MpeSolution both = tinfer::compute_mmap(net, {}, {0, 1});
  MpeSolution mpe = tinfer::compute_mpe(net, {});
  CHECK(both.log_prob == doctest::Approx(mpe.log_prob).epsilon(1e-12));
  CHECK(*both.assignment.find(0) == *mpe.assignment.find(0));
  CHECK(*both.assignment.find(1) == *mpe.assignment.find(1));

  MpeSolution a_given_b1 = tinfer::compute_mmap(net, ev({{1, 1}}), {0});
  CHECK(*a_given_b1.assignment.find(0) == 1);
  CHECK(a_given_b1.log_prob == doctest::Approx(std::log(0.30)).epsilon(1e-12));

  CHECK_THROWS_AS(tinfer::compute_mmap(net, {}, {}), tinfer::ShapeError);
  CHECK_THROWS_AS(tinfer::compute_mmap(net, ev({{1, 1}}), {1}), tinfer::ShapeError);
  CHECK_THROWS_AS(tinfer::compute_mmap(net, {}, {0, 0}), tinfer::ShapeError);
}

TEST_CASE("marginal map matches brute force on random networks") {
  std::mt19937_64 rng(848);
  for (int trial = 0; trial < 25; ++trial) {
    TensorNetwork net = testgen::random_network(rng);
    Assignment evidence = testgen::random_evidence(rng, net);
    // Query: a random nonempty subset of the unobserved variables.
    std::vector<VarId> unobserved;
    for (VarId v = 0; v < net.num_vars; ++v)
      if (!evidence.find(v)) unobserved.push_back(v);
    if (unobserved.empty()) continue;
    std::shuffle(unobserved.begin(), unobserved.end(), rng);
    std::size_t take = 1 + std::uniform_int_distribution<std::size_t>(
                               0, unobserved.size() - 1)(rng);
    std::vector<VarId> query(unobserved.begin(), unobserved.begin() + take);

    MpeSolution got = tinfer::compute_mmap(net, evidence, query);
    oracle::MaxState expect = oracle::best_marginal_map(net, evidence, query);
    CHECK(got.log_prob ==
          doctest::Approx(static_cast<double>(std::log(expect.value))).epsilon(1e-10));
  }
}

TEST_CASE("sampling reproduces the joint distribution") {
  TensorNetwork net = fixtures::n1();
  const std::int64_t n = 100000;
  SampleBatch batch = tinfer::draw_samples(net, {}, n, 42);
  CHECK(batch.vars == std::vector<VarId>{0, 1});
  CHECK(batch.rng == "mt19937_64");
  REQUIRE(batch.rows.size() == static_cast<std::size_t>(n));

  std::map<std::pair<std::int64_t, std::int64_t>, double> freq;
  for (const auto& row : batch.rows)
    freq[{row[0], row[1]}] += 1.0 / static_cast<double>(n);
  const double expect[2][2] = {{0.42, 0.18}, {0.10, 0.30}};
  double l1 = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) l1 += std::fabs(freq[{a, b}] - expect[a][b]);
  CHECK(l1 <= 0.02);
}

TEST_CASE("sampling respects evidence") {
  TensorNetwork net = fixtures::n1();
  SampleBatch batch = tinfer::draw_samples(net, ev({{1, 1}}), 100000, 7);
  CHECK(batch.vars == std::vector<VarId>{0});  // observed variable excluded
  double a1 = 0.0;
  for (const auto& row : batch.rows) a1 += row[0] == 1 ? 1.0 : 0.0;
  a1 /= static_cast<double>(batch.rows.size());
  CHECK(a1 == doctest::Approx(0.625).epsilon(0.016));  // p(A=1 | B=1)
}

TEST_CASE("sampling is deterministic in the seed and stream-indexed") {
  TensorNetwork net = fixtures::n1();
  SampleBatch a = tinfer::draw_samples(net, {}, 50, 9);
  SampleBatch b = tinfer::draw_samples(net, {}, 50, 9);
  CHECK(a.rows == b.rows);

  SampleBatch c = tinfer::draw_samples(net, {}, 60, 9);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(a.rows[i] == c.rows[i]);  // prefix stability: one stream per index

  SampleBatch d = tinfer::draw_samples(net, {}, 50, 10);
  CHECK(a.rows != d.rows);
}

TEST_CASE("a deterministic model yields identical samples") {
  TensorNetwork net;
  net.num_vars = 2;
  net.cards = {2, 2};
  net.tensors.push_back(LabeledTensor({0}, {2}, {0.0, 1.0}));
  net.tensors.push_back(LabeledTensor({0, 1}, {2, 2}, {1.0, 0.0, 0.0, 1.0}));
  SampleBatch batch = tinfer::draw_samples(net, {}, 200, 3);
  for (const auto& row : batch.rows) {
    CHECK(row[0] == 1);
    CHECK(row[1] == 1);
  }
}

TEST_CASE("sampling a model with an isolated variable") {
  TensorNetwork net;
  net.num_vars = 2;
  net.cards = {2, 3};
  net.tensors.push_back(LabeledTensor({0}, {2}, {0.25, 0.75}));
  // Variable 1 appears in no factor: it samples uniformly over 3 values.
  SampleBatch batch = tinfer::draw_samples(net, {}, 60000, 12);
  CHECK(batch.vars == std::vector<VarId>{0, 1});
  double counts[3] = {0, 0, 0};
  for (const auto& row : batch.rows) counts[row[1]] += 1.0;
  for (double c : counts)
    CHECK(c / 60000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("sampling errors") {
  TensorNetwork net = fixtures::n1();
  CHECK_THROWS_AS(tinfer::draw_samples(net, {}, 0, 1), tinfer::ShapeError);

  TensorNetwork dead = fixtures::n1();
  dead.tensors[0].data = {0.0, 0.0};
  CHECK_THROWS_AS(tinfer::draw_samples(dead, {}, 10, 1), tinfer::EvidenceError);
}

TEST_CASE("inconsistent evidence is reported for zero-probability observations") {
  TensorNetwork net;
  net.num_vars = 2;
  net.cards = {2, 2};
  net.tensors.push_back(LabeledTensor({0}, {2}, {1.0, 0.0}));
  net.tensors.push_back(LabeledTensor({0, 1}, {2, 2}, {0.5, 0.5, 0.5, 0.5}));
  // Observing the impossible value zeroes the whole network.
  CHECK(tinfer::compute_pr(net, ev({{0, 1}})).is_zero());
  CHECK_THROWS_AS(tinfer::compute_mar(net, ev({{0, 1}})), tinfer::EvidenceError);
  CHECK_THROWS_AS(tinfer::compute_mpe(net, ev({{0, 1}})), tinfer::EvidenceError);
  CHECK_THROWS_AS(tinfer::draw_samples(net, ev({{0, 1}}), 5, 0), tinfer::EvidenceError);
}

TEST_CASE("exhaustive ordering gives the same task answers") {
  std::mt19937_64 rng(31415);
  tinfer::TaskOptions exhaustive;
  exhaustive.order = tinfer::OrderStrategy::exhaustive;
  // Unity insertion adds one leaf per unobserved variable, so keep the
  // instances small enough that the planner's subset search stays within cap.
  exhaustive.exhaustive_max_tensors = 12;
  for (int trial = 0; trial < 10; ++trial) {
    testgen::NetOptions opt;
    opt.max_vars = 4;
    opt.max_factors = 4;
    TensorNetwork net = testgen::random_network(rng, opt);
    Assignment evidence = testgen::random_evidence(rng, net);
    double pg = tinfer::compute_pr(net, evidence).log10();
    double pe = tinfer::compute_pr(net, evidence, exhaustive).log10();
    CHECK(pg == doctest::Approx(pe).epsilon(1e-10));

    MpeSolution mg = tinfer::compute_mpe(net, evidence);
    MpeSolution me = tinfer::compute_mpe(net, evidence, exhaustive);
    CHECK(mg.log_prob == doctest::Approx(me.log_prob).epsilon(1e-10));
  }
}

TEST_CASE("space cap rejects oversized plans") {
  std::mt19937_64 rng(11);
  TensorNetwork net = testgen::random_network(rng);
  tinfer::TaskOptions strangled;
  strangled.space_cap = 0.0;
  CHECK_THROWS_AS(tinfer::compute_pr(net, {}, strangled), tinfer::CapacityError);
}

TEST_CASE("chi-square p-value sanity") {
  // Exact references: P(chi2_2 > x) = exp(-x/2).
  CHECK(teststat::chi_square_pvalue(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(teststat::chi_square_pvalue(10.0, 2) == doctest::Approx(std::exp(-5.0)).epsilon(1e-12));
  CHECK(teststat::chi_square_pvalue(0.0, 5) == 1.0);
  CHECK(teststat::chi_square_pvalue(3.84, 1) == doctest::Approx(0.05).epsilon(2e-3));
}
