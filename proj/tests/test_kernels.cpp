#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cmf/errors.hpp"
#include "cmf/kernels.hpp"
#include "cmf/rng.hpp"
#include "doctest.h"

using cmf::EdgeChainLaw;
using cmf::KernelSpec;
using cmf::TrajView;

namespace {

// Oracle: marginal P(a(s) = 1) by summing path_prob over all 2^(s+1) paths.
// Deliberately independent of the b_hat recursion.
double enumerated_marginal(const EdgeChainLaw& law, int s) {
  double total = 0.0;
  std::vector<std::uint8_t> path(static_cast<std::size_t>(s) + 1);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (s + 1)); ++mask) {
    for (int t = 0; t <= s; ++t) path[t] = (mask >> t) & 1u;
    if (path[s] == 1) total += law.path_prob(path);
  }
  return total;
}

double all_paths_total(const EdgeChainLaw& law, int t) {
  double total = 0.0;
  std::vector<std::uint8_t> path(static_cast<std::size_t>(t) + 1);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (t + 1)); ++mask) {
    for (int s = 0; s <= t; ++s) path[s] = (mask >> s) & 1u;
    total += law.path_prob(path);
  }
  return total;
}

std::vector<double> random_path(const cmf::KeyedRng& rng, std::uint64_t id, int len, int d) {
  std::vector<double> out(static_cast<std::size_t>(len) * d);
  for (int t = 0; t < len; ++t)
    for (int c = 0; c < d; ++c)
      out[static_cast<std::size_t>(t) * d + c] =
          rng.normal(cmf::Stream::kAux, id, static_cast<std::uint64_t>(t),
                     static_cast<std::uint64_t>(c), 0);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("euclidean distance") {
    const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
    CHECK(cmf::euclidean_distance(a, b) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(cmf::euclidean_distance(a, a) == 0.0);
  }

  TEST_CASE("logistic kernel pinned values") {
    const KernelSpec k = KernelSpec::logistic(1.0, 0.5, 1.0);
    const std::vector<double> z{0.0, 0.0};
    CHECK(k.b(0, z, z) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    CHECK(k.b(1, z, z) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
    CHECK(k.b0(z, z) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    // Distance 2 cancels the intercept: sigmoid(0) = 1/2.
    const std::vector<double> far{2.0, 0.0};
    CHECK(k.b(0, z, far) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k.b0(z, far) == doctest::Approx(0.5).epsilon(1e-15));
    // Symmetry in the two states.
    const std::vector<double> y{0.3, -1.2};
    CHECK(k.b(1, z, y) == k.b(1, y, z));
    CHECK(k.b0(z, y) == k.b0(y, z));
  }

  TEST_CASE("bounded confidence is an inclusive indicator without persistence") {
    const KernelSpec k = KernelSpec::bounded_confidence(1.0);
    const std::vector<double> z{0.0}, edge{1.0}, out{1.0 + 1e-12};
    CHECK(k.b0(z, edge) == 1.0);  // boundary included
    CHECK(k.b0(z, out) == 0.0);
    CHECK(k.b(0, z, edge) == k.b(1, z, edge));
    CHECK(k.b(0, z, out) == k.b(1, z, out));
    CHECK(k.regime() == cmf::InteractionRegime::kFiniteRange);
  }

  TEST_CASE("constant kernel ignores states and edge status") {
    const KernelSpec k = KernelSpec::constant(0.37);
    const std::vector<double> z{0.0}, y{100.0};
    CHECK(k.b0(z, y) == 0.37);
    CHECK(k.b(0, z, y) == 0.37);
    CHECK(k.b(1, z, y) == 0.37);
    CHECK(k.regime() == cmf::InteractionRegime::kExpDecay);
    CHECK_THROWS_AS(KernelSpec::constant(1.5), std::invalid_argument);
  }

  TEST_CASE("custom kernel evaluations are clamped") {
    cmf::CustomKernel raw;
    raw.b0 = [](std::span<const double>, std::span<const double>) { return 1.7; };
    raw.b = [](int a, std::span<const double>, std::span<const double>) {
      return a == 1 ? -0.5 : 0.25;
    };
    const KernelSpec k = KernelSpec::custom(raw);
    const std::vector<double> z{0.0};
    CHECK(k.b0(z, z) == 1.0);
    CHECK(k.b(1, z, z) == 0.0);
    CHECK(k.b(0, z, z) == 0.25);
  }

  TEST_CASE("validate_on_grid accepts clamped kernels and rejects non-finite ones") {
    cmf::CustomKernel raw;
    raw.b0 = [](std::span<const double>, std::span<const double>) { return 0.5; };
    raw.b = [](int, std::span<const double>, std::span<const double>) { return 2.0; };
    const KernelSpec clamped = KernelSpec::custom(raw);
    CHECK_NOTHROW(clamped.validate_on_grid({{0.0}, {1.0}}));
    CHECK(clamped.b(0, std::vector<double>{0.0}, std::vector<double>{0.0}) == 1.0);

    cmf::CustomKernel bad;
    bad.b0 = [](std::span<const double>, std::span<const double>) { return 0.5; };
    bad.b = [](int, std::span<const double>, std::span<const double>) {
      return std::nan("");  // clamping keeps NaN, the grid check must catch it
    };
    const KernelSpec nan_kernel = KernelSpec::custom(bad);
    CHECK_THROWS_AS(nan_kernel.validate_on_grid({{0.0}}), cmf::NumericError);
  }

  TEST_CASE("one-step averaged transition probability") {
    cmf::CustomKernel raw;
    raw.b0 = [](std::span<const double>, std::span<const double>) { return 0.5; };
    raw.b = [](int a, std::span<const double>, std::span<const double>) {
      return a == 1 ? 0.9 : 0.2;
    };
    const KernelSpec k = KernelSpec::custom(raw);
    const std::vector<double> z{0.0};
    CHECK(cmf::b_hat(k, 0.3, z, z) == doctest::Approx(0.3 * 0.9 + 0.7 * 0.2).epsilon(1e-15));
    CHECK(cmf::b_hat(k, 0.0, z, z) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(cmf::b_hat(k, 1.0, z, z) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK_THROWS_AS(cmf::b_hat(k, 1.5, z, z), std::invalid_argument);
  }

  TEST_CASE("conditional edge probability matches path enumeration") {
    const cmf::KeyedRng rng(314);
    const KernelSpec k = KernelSpec::logistic(0.8, 0.6, 1.2);
    const int d = 2;
    for (int rep = 0; rep < 40; ++rep) {
      const int s = rep % 7;  // horizons 0..6
      const auto p1 = random_path(rng, 2 * rep, s + 1, d);
      const auto p2 = random_path(rng, 2 * rep + 1, s + 1, d);
      const TrajView t1(p1.data(), s + 1, d), t2(p2.data(), s + 1, d);
      const EdgeChainLaw law = cmf::edge_chain_law(k, t1, t2, s);
      const double direct = cmf::b_s(k, t1, t2);
      CHECK(std::abs(direct - enumerated_marginal(law, s)) <= 1e-12);
      CHECK(std::abs(direct - law.marginal_p(s)) <= 1e-12);
    }
  }

  TEST_CASE("edge chain path probabilities sum to one") {
    const cmf::KeyedRng rng(99);
    const KernelSpec k = KernelSpec::logistic(1.0, 0.5, 1.0);
    for (int t : {0, 1, 4, 9, 12}) {
      const auto p1 = random_path(rng, 1000 + t, t + 1, 1);
      const auto p2 = random_path(rng, 2000 + t, t + 1, 1);
      const EdgeChainLaw law =
          cmf::edge_chain_law(k, TrajView(p1.data(), t + 1, 1), TrajView(p2.data(), t + 1, 1), t);
      CHECK(std::abs(all_paths_total(law, t) - 1.0) <= 1e-12);
      const auto marg = law.marginals();
      REQUIRE(static_cast<int>(marg.size()) == t + 1);
      for (int s = 0; s <= t; ++s) {
        CHECK(marg[s] == law.marginal_p(s));
        const std::array<int, 1> times{s};
        CHECK(law.prob_all_one(times) == doctest::Approx(marg[s]).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("prob_all_one of the full time range equals the all-one path") {
    const cmf::KeyedRng rng(7);
    const KernelSpec k = KernelSpec::logistic(0.5, 0.4, 0.9);
    const int t = 5;
    const auto p1 = random_path(rng, 1, t + 1, 2);
    const auto p2 = random_path(rng, 2, t + 1, 2);
    const EdgeChainLaw law =
        cmf::edge_chain_law(k, TrajView(p1.data(), t + 1, 2), TrajView(p2.data(), t + 1, 2), t);
    std::vector<int> all(t + 1);
    for (int s = 0; s <= t; ++s) all[s] = s;
    const std::vector<std::uint8_t> ones(static_cast<std::size_t>(t) + 1, 1);
    CHECK(law.prob_all_one(all) == doctest::Approx(law.path_prob(ones)).epsilon(1e-14));
  }

  TEST_CASE("sample_step uses the strict u-below-p rule") {
    EdgeChainLaw law;
    law.initial_p = 0.5;
    law.transition_p = {{0.25, 0.75}};
    CHECK(law.sample_step(0, 0, 0.49999) == 1);
    CHECK(law.sample_step(0, 0, 0.5) == 0);  // tie goes to absence
    CHECK(law.sample_step(1, 0, 0.24) == 1);
    CHECK(law.sample_step(1, 0, 0.25) == 0);
    CHECK(law.sample_step(1, 1, 0.74) == 1);
    CHECK(law.sample_step(1, 1, 0.75) == 0);
  }

  TEST_CASE("marginal recursion for a hand-built chain") {
    // p0 = 0.5; p1 = 0.5*0.75 + 0.5*0.25 = 0.5; p2 = 0.5*0.9 + 0.5*0.1 = 0.5.
    EdgeChainLaw law;
    law.initial_p = 0.5;
    law.transition_p = {{0.25, 0.75}, {0.1, 0.9}};
    CHECK(law.marginal_p(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.marginal_p(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.marginal_p(2) == doctest::Approx(0.5).epsilon(1e-15));
    // P(all of {0,1,2} = 1) = 0.5 * 0.75 * 0.9.
    const std::array<int, 3> times{0, 1, 2};
    CHECK(law.prob_all_one(times) == doctest::Approx(0.5 * 0.75 * 0.9).epsilon(1e-15));
    // P(a(0)=1, a(2)=1) sums over a(1): 0.5*(0.75*0.9 + 0.25*0.1).
    const std::array<int, 2> skip{0, 2};
    CHECK(law.prob_all_one(skip) ==
          doctest::Approx(0.5 * (0.75 * 0.9 + 0.25 * 0.1)).epsilon(1e-15));
  }
}
