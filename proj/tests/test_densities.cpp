#include "quadcircle/densities.hpp"
#include "quadcircle/expsums.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qc;

namespace {

QuadricPair load(const char* name) { return load_pair(std::string(QC_DATA_DIR) + "/" + name + ".pair"); }

template <class Fn>
void for_each_residue(int n, i64 N, Fn&& fn) {
  std::vector<i64> k(static_cast<std::size_t>(n), 0);
  for (;;) {
    fn(k);
    int i = n - 1;
    while (i >= 0 && ++k[static_cast<std::size_t>(i)] == N) k[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

i64 brute_two_adic(const QuadricPair& pair, int k) {
  const i64 N = ipow(2, k);
  i64 c = 0;
  for_each_residue(pair.n(), N, [&](const std::vector<i64>& x) { c += pair.Q1().eval_mod(x, 4) == 1 && pair.Q2().eval_mod(x, N) == 0; });
  return c;
}

// p^{-kn} #{(x, u, v) mod p^k : Q1(x) = u^2 + v^2, Q2(x) = 0}
double density_from_definition(const QuadricPair& pair, i64 p, int k) {
  const i64 N = ipow(p, k);
  double total = 0.0;
  for_each_residue(pair.n(), N, [&](const std::vector<i64>& x) {
    if (pair.Q2().eval_mod(x, N) == 0) total += static_cast<double>(two_squares_count(pair.Q1().eval_mod(x, N), p, k));
  });
  return total / std::pow(static_cast<double>(N), pair.n());
}

}  // namespace

TEST(TwoSquares, Examples) {
  EXPECT_EQ(two_squares_count(1, 5, 1), 4);
  EXPECT_EQ(two_squares_closed_form(1, 5, 1), 4);
  EXPECT_EQ(two_squares_count(1, 3, 1), 4);
  EXPECT_EQ(two_squares_closed_form(1, 3, 1), 4);
  EXPECT_EQ(two_squares_count(1, 2, 3), 16);
  EXPECT_EQ(two_squares_closed_form(1, 2, 3), 16);
  EXPECT_THROW(two_squares_closed_form(2, 2, 3), DomainError);
  EXPECT_THROW(two_squares_closed_form(1, 2, 1), DomainError);
}

TEST(TwoSquares, ClosedFormsMatchEnumeration) {
  for (i64 p : {2, 3, 5, 7, 13})
    for (int k = 1; k <= 3; ++k) {
      if (p == 2 && k < 2) continue;
      const i64 q = ipow(p, k);
      for (i64 A = 0; A < q; ++A) {
        if (p == 2 && A % 2 == 0) continue;
        ASSERT_EQ(two_squares_closed_form(A, p, k), two_squares_count(A, p, k)) << "A=" << A << " p=" << p << " k=" << k;
      }
    }
}

TEST(Ntilde, Conventions) {
  const auto pair = load("tern3");
  EXPECT_EQ(Ntilde(pair, 3, 0, 0), 1);
  EXPECT_EQ(Ntilde_lifted(pair, 3, 0, 0), 1);
  for (i64 p : {3, 5, 7}) {
    i64 on_q2 = 0;
    for_each_residue(3, p, [&](const std::vector<i64>& x) { on_q2 += pair.Q2().eval_mod(x, p) == 0; });
    EXPECT_EQ(Ntilde(pair, p, 1, 0), on_q2);
  }
  EXPECT_THROW(Ntilde(pair, 3, 2, 3), InvalidArgument);
}

TEST(Ntilde, ToyPairAtNine) {
  const auto pair = load("toy2");
  i64 brute = 0;
  for_each_residue(2, 9, [&](const std::vector<i64>& x) { brute += pair.Q1().eval_mod(x, 3) == 0 && pair.Q2().eval_mod(x, 9) == 0; });
  EXPECT_EQ(Ntilde(pair, 3, 2, 1), brute);
  EXPECT_EQ(Ntilde_lifted(pair, 3, 2, 1), brute);
}

TEST(Ntilde, LiftingTreeMatchesEnumeration) {
  for (const char* name : {"toy2", "tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    for (i64 p : {3, 5, 7, 11})
      for (int k = 1; k <= 4; ++k) {
        if (std::pow(static_cast<double>(p), k * pair.n()) > 3e6) continue;
        for (int e = 0; e <= k; ++e) ASSERT_EQ(Ntilde_lifted(pair, p, k, e), Ntilde(pair, p, k, e)) << name << " p=" << p << " k=" << k << " e=" << e;
      }
  }
}

TEST(Ntilde, RhoThroughTree) {
  const auto pair = load("main5");
  for (auto [p, r] : {std::pair<i64, int>{3, 1}, {3, 2}, {5, 1}, {7, 1}, {3, 3}}) {
    const auto q = PrimePower::make(p, r);
    EXPECT_EQ(rho_lifted(pair, q), rho(pair, q.value)) << p << "^" << r;
  }
}

TEST(GaussCounts, MatchEnumeration) {
  for (const char* name : {"toy2", "tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    for (i64 p : {3, 5, 7, 11, 13}) {
      if (std::pow(static_cast<double>(p), pair.n()) > 1e6) continue;
      const auto c = cone_counts_gauss(pair, p);
      EXPECT_EQ(c.on_both, count_cone_points_mod_p(pair, p)) << name << " " << p;
      EXPECT_EQ(c.on_Q2, Ntilde(pair, p, 1, 0)) << name << " " << p;
    }
  }
  const QuadricPair cross(QuadraticForm(IntegerMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 2}}), QuadraticForm(IntegerMatrix{{0, 0, 1}, {0, 3, 0}, {1, 0, 1}}));
  for (i64 p : {3, 5, 7, 11}) EXPECT_EQ(cone_counts_gauss(cross, p).on_both, count_cone_points_mod_p(cross, p));
}

TEST(SigmaP, HenselStableAtGoodPrimes) {
  for (const char* name : {"tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    for (i64 p : primes_up_to(23)) {
      if (p == 2 || !certified_good(pair, p)) continue;
      EXPECT_EQ(sigma_p_stabilized(pair, p, 1), sigma_p_stabilized(pair, p, 2)) << name << " p=" << p;
    }
  }
}

TEST(SigmaP, LiteralTruncationConverges) {
  const auto pair = load("quat4");
  for (i64 p : {3, 5, 11}) {
    const double target = static_cast<double>(sigma_p_stabilized(pair, p, 5));
    const double far = static_cast<double>(sigma_p_literal(pair, p, 6));
    const double near = static_cast<double>(sigma_p_literal(pair, p, 2));
    EXPECT_LT(std::abs(far - target), std::abs(near - target)) << p;
    EXPECT_LT(std::abs(far - target), 0.01) << p;
  }
}

TEST(SigmaP, AgreesWithTwoSquaresDefinition) {
  const auto pair = load("tern3");
  // the finite-level counts approach the limit slowly, most of all at p = 5
  for (auto [p, k] : {std::pair<i64, int>{3, 4}, {5, 3}, {7, 3}}) {
    const double stab = static_cast<double>(sigma_p_stabilized(pair, p, 4));
    const double first = std::abs(density_from_definition(pair, p, 1) - stab);
    const double last = std::abs(density_from_definition(pair, p, k) - stab);
    EXPECT_LT(last, first) << p;
    EXPECT_LT(last, 0.2) << p;
  }
}

TEST(SigmaP, PositiveOnShippedPairs) {
  for (const char* name : {"tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    for (i64 p : primes_up_to(23)) {
      if (p == 2) continue;
      const auto d = sigma_p(pair, p, 4);
      EXPECT_GT(d.value, 0) << name << " " << p;
      EXPECT_TRUE(d.converged) << name << " " << p;
    }
  }
}

TEST(SigmaP, ToyPairUsesLiteralTruncation) {
  const auto pair = load("toy2");
  const auto d = sigma_p(pair, 3, 2);
  EXPECT_TRUE(d.literal);
  EXPECT_EQ(d.value, sigma_p_literal(pair, 3, 2));
  // (1 + 1/3) 3^{-2} (Ntilde_2(0) - Ntilde_2(1) + Ntilde_2(2))
  const i64 a = Ntilde(pair, 3, 2, 0), b = Ntilde(pair, 3, 2, 1), c = Ntilde(pair, 3, 2, 2);
  EXPECT_EQ(d.value, rational(4, 3) * rational(a - b + c, 9));
  EXPECT_THROW(sigma_p(pair, 2, 3), InvalidArgument);
}

TEST(Sigma2, CountsMatchEnumeration) {
  for (const char* name : {"toy2", "tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    for (int k = 2; k <= 4; ++k) {
      if (std::pow(2.0, k * pair.n()) > 2e6) continue;
      ASSERT_EQ(two_adic_count(pair, k), brute_two_adic(pair, k)) << name << " k=" << k;
    }
  }
}

TEST(Sigma2, ToyPairStableAndEvenQ1Vanishes) {
  const auto toy = load("toy2");
  EXPECT_EQ(sigma_2_at(toy, 3), sigma_2_at(toy, 4));
  const QuadricPair even(QuadraticForm::diagonal({2, 2, 4}), QuadraticForm::diagonal({1, 1, -1}));
  const auto d = sigma_2(even, 4);
  EXPECT_EQ(d.value, 0);
  EXPECT_THROW(sigma_2(toy, 2), InvalidArgument);
}

TEST(Sigma2, ShippedPairSettles) {
  const auto pair = load("main5");
  const auto d = sigma_2(pair, 6);
  EXPECT_TRUE(d.converged);
  EXPECT_GT(d.value, 0);
}

TEST(TauInfinity, SupportAwayFromConeGivesZero) {
  const auto Q2 = QuadraticForm::diagonal({1, -1});
  const WeightFunction W{{1.0, 0.0}, 0.3};
  const auto t = tau_infinity(Q2, W);
  EXPECT_EQ(t.slab, 0.0);
  EXPECT_EQ(t.coarea, 0.0);
  EXPECT_EQ(sigma_infinity(t), 0.0);
}

TEST(TauInfinity, EstimatorsAgreeAcrossTheCone) {
  const auto Q2 = QuadraticForm::diagonal({1, -1});
  const WeightFunction W{{0.75, 0.7}, 0.3};
  const auto t = tau_infinity(Q2, W);
  ASSERT_GT(t.coarea, 0.0);
  EXPECT_LT(t.spread, 0.05);
  EXPECT_LT(t.halving_change, 0.10);
  EXPECT_DOUBLE_EQ(sigma_infinity(t) / t.slab, std::numbers::pi);
}

TEST(TauInfinity, SlabShrinksLinearlyWithEps) {
  const auto Q2 = QuadraticForm::diagonal({1, -1});
  const WeightFunction W{{0.75, 0.7}, 0.3};
  const auto t = tau_infinity(Q2, W);
  ASSERT_EQ(t.ladder.size(), 4u);
  // the slab volume is 2 eps tau(eps); halving eps halves it
  for (std::size_t i = 2; i + 1 < t.ladder.size(); ++i) {
    const double v0 = 2 * t.ladder[i].first * t.ladder[i].second;
    const double v1 = 2 * t.ladder[i + 1].first * t.ladder[i + 1].second;
    EXPECT_NEAR(v1 / v0, 0.5, 0.05);
  }
}

TEST(TauInfinity, ShippedPairs) {
  for (const char* name : {"toy2", "tern3", "quat4", "main5"}) {
    const auto pair = load(name);
    const auto t = tau_infinity(pair.Q2(), default_weight(pair));
    EXPECT_GT(t.slab, 0.0) << name;
    EXPECT_LT(t.spread, 0.05) << name;
    EXPECT_LT(t.halving_change, 0.02) << name;
  }
}

TEST(TauInfinity, Errors) {
  const auto Q2 = QuadraticForm::diagonal({1, -1});
  EXPECT_THROW(tau_infinity(Q2, WeightFunction{{0.1, 0.1}, 0.3}), DomainError);
  EXPECT_THROW(tau_infinity(Q2, WeightFunction{{1.0, 1.0}, 0.0}), InvalidArgument);
  EXPECT_THROW(tau_infinity(Q2, WeightFunction{{1.0, 1.0, 1.0}, 0.2}), InvalidArgument);
}

TEST(SingularConstant, ShippedPairReport) {
  const auto pair = load("main5");
  const auto W = default_weight(pair);
  const auto r = singular_constant(pair, W, 13, 6);
  EXPECT_GT(r.c_truncated, 0.0);
  double prod = static_cast<double>(r.sigma2.value) * r.sigma_inf;
  for (const auto& d : r.primes) prod *= d.as_double();
  EXPECT_NEAR(r.c_truncated, prod, 1e-15);
  ASSERT_EQ(r.primes.size(), 5u);
  EXPECT_EQ(r.primes.front().p, 3);
  EXPECT_FALSE(r.primes.front().good);
  EXPECT_TRUE(r.primes.back().good);
  EXPECT_GT(r.tail_bound, 0.0);

  std::ostringstream os;
  write_json(os, to_json(r));
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["pair"], "main5");
  EXPECT_EQ(j["primes"].size(), 5u);
  EXPECT_NEAR(j["c_truncated"].get<double>(), r.c_truncated, 1e-11 * r.c_truncated);
}

TEST(SingularConstant, NoTwoAdicPointsGivesZero) {
  const QuadricPair even(QuadraticForm::diagonal({2, 2, 2, 2}), QuadraticForm::diagonal({1, 1, -1, -2}));
  const auto r = singular_constant(even, default_weight(even), 7, 3);
  EXPECT_EQ(r.sigma2.value, 0);
  EXPECT_EQ(r.c_truncated, 0.0);
}

TEST(WriteJson, TwelveSignificantDigits) {
  nlohmann::ordered_json j;
  j["a"] = 1.1091779396500001;
  j["b"] = {1, 2.5};
  j["c"] = "x";
  std::ostringstream os;
  write_json(os, j);
  EXPECT_EQ(os.str(), "{\n  \"a\": 1.10917793965,\n  \"b\": [\n    1,\n    2.5\n  ],\n  \"c\": \"x\"\n}");
}

TEST(Experiment, RowsAndCsvRoundTrip) {
  const auto pair = load("main5");
  const auto W = default_weight(pair);
  const auto rows = experiment(pair, W, {1, 12}, 8e-4);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].S, 0.0);
  EXPECT_EQ(rows[0].ratio, 0.0);
  EXPECT_GT(rows[1].S, 0.0);
  std::stringstream ss;
  write_experiment_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "B,S_B,S_over_Bn2,c_trunc,ratio");
  const auto back = read_experiment_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_NEAR(back[1].ratio, rows[1].ratio, 1e-11 * rows[1].ratio);
  EXPECT_THROW(experiment(pair, W, {}, 1.0), InvalidArgument);
  std::stringstream bad("B,S\n1,2\n");
  EXPECT_THROW(read_experiment_csv(bad), ParseError);
}
