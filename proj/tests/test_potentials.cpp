#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "altchain/numerics.hpp"
#include "altchain/potentials.hpp"

using namespace altchain;

namespace {

std::vector<Potential> catalog() {
  return {Potential::power_law(1.0, 1.0),  Potential::power_law(-2.5, 3.0), Potential::power_law(0.7, 0.5),
          Potential::gaussian(1.0, 1.0),   Potential::gaussian(-0.5, 0.3),  Potential::morse(1.0, 1.0, 1.0),
          Potential::morse(-0.4, 2.0, 0.8), Potential::zero()};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("eval examples") {
  CHECK(Potential::power_law(1.0, 3.0).eval(2.0, 0) == 0.125);
  CHECK(Potential::power_law(1.0, 1.0).eval(1.0, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(Potential::gaussian(1.0, 1.0).eval(0.0, 0) == 1.0);
  CHECK(Potential::zero().eval(3.0, 1) == 0.0);
  CHECK_THROWS_AS(Potential::power_law(1.0, 2.0).eval(0.0, 0), DomainError);
  CHECK_THROWS_AS(Potential::power_law(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(Potential::gaussian(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(Potential::morse(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("values are mirror symmetric") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (const auto& f : catalog()) {
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      CAPTURE(f.kind_name());
      CHECK(f.eval(x, 0) == f.eval(-x, 0));
      CHECK(f.eval(x, 1) == -f.eval(-x, 1));
      CHECK(f.eval(x, 2) == f.eval(-x, 2));
    }
  }
}

TEST_CASE("analytic derivatives match finite differences") {
  for (const auto& f : catalog()) {
    if (f.is_zero()) {
      continue;
    }
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(f.kind_name());
      CAPTURE(x);
      const double h = 1e-5 * x;
      const double second = f.eval(x, 2);
      const double fd2 = numerics::finite_diff_2nd([&](double t) { return f(t); }, x, h);
      // rounding floor of the difference quotient: 4 eps |f| / h^2
      const double floor = 4.0 * 2.2e-16 * std::abs(f(x)) / (h * h);
      CHECK(std::abs(fd2 - second) <= std::max(1e-6 * std::abs(second), floor));
      const double fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
      CHECK(std::abs(fd1 - f.eval(x, 1)) <= 1e-5 * std::abs(f.eval(x, 1)) + 1e-10 * std::abs(f(x)));
    }
  }
}

TEST_CASE("delta is the cancellation-free difference") {
  for (const auto& f : catalog()) {
    for (double x : {0.3, 1.0, 4.0}) {
      for (double h : {1e-3, -1e-2, 0.5}) {
        CAPTURE(f.kind_name());
        CAPTURE(x);
        CAPTURE(h);
        const double naive = f(x + h) - f(x);
        CHECK(std::abs(f.delta(x, h) - naive) <= 1e-12 * std::abs(f(x)) + 1e-300);
      }
    }
    // tiny steps: delta ~ f'(x) h without losing digits
    if (!f.is_zero()) {
      const double x = 1.3;
      const double h = 1e-13;
      CHECK(rel_err(f.delta(x, h), f.eval(x, 1) * h) < 1e-6);
    }
  }
}

TEST_CASE("decay certificates are sound") {
  for (const auto& f : catalog()) {
    const auto cert = f.decay();
    if (!cert) {
      const auto* pl = std::get_if<PowerLaw>(&f.kind());
      REQUIRE(pl != nullptr);
      CHECK(pl->p <= 1.0);
      continue;
    }
    for (double x : {2.0 * cert->r0, 10.0 * cert->r0, 100.0 * cert->r0}) {
      CAPTURE(f.kind_name());
      CAPTURE(x);
      CHECK(std::abs(f(x)) <= cert->C * std::pow(x, -1.0 - cert->eta) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("envelopes dominate derivatives beyond their monotone point") {
  for (const auto& f : catalog()) {
    for (int order = 0; order <= 2; ++order) {
      const double start = std::max(f.monotone_from(order), 0.05);
      for (double r = start; r < 60.0; r *= 1.13) {
        CAPTURE(f.kind_name());
        CAPTURE(order);
        CAPTURE(r);
        for (double y : {r, 1.5 * r, 3.0 * r}) {
          CHECK(std::abs(f.eval(y, order)) <= f.envelope(r, order) * (1.0 + 1e-12));
        }
        CHECK(f.envelope(1.2 * r, order) <= f.envelope(r, order));
      }
    }
  }
}

TEST_CASE("integrability flags") {
  CHECK_FALSE(Potential::power_law(1.0, 3.0).absolutely_integrable());
  CHECK(Potential::gaussian(1.0, 1.0).absolutely_integrable());
  CHECK(Potential::morse(1.0, 1.0, 1.0).absolutely_integrable());
  CHECK(Potential::zero().absolutely_integrable());
}

TEST_CASE("riesz_triple wiring") {
  const auto t = riesz_triple(1.0);
  CHECK(t.f12(2.0) == 0.5);
  CHECK(t.f11(2.0) == -0.5);
  CHECK(t.f22(2.0) == -0.5);
  for (double x : {0.2, 1.0, 7.5}) {
    CHECK(t.f12(x) + t.f11(x) == 0.0);
  }
  CHECK(&t.between(1, 2) == &t.f12);
  CHECK(&t.between(2, 1) == &t.f12);
  CHECK(&t.between(1, 1) == &t.f11);
  CHECK(&t.between(2, 2) == &t.f22);
}

TEST_CASE("powerlaw_triple") {
  const auto r3 = riesz_triple(3.0);
  const auto m1 = powerlaw_triple(3.0, 1.0);
  for (double x : {0.5, 1.0, 3.0}) {
    CHECK(m1.f12(x) == r3.f12(x));
    CHECK(m1.f11(x) == r3.f11(x));
    CHECK(m1.f22(x) == r3.f22(x));
  }
  const auto m2 = powerlaw_triple(3.0, 2.0);
  CHECK(std::get<PowerLaw>(m2.f22.kind()).c == -4.0);
  for (double m : {0.5, 2.0, 3.0}) {
    const auto t = powerlaw_triple(3.0, m);
    CHECK(t.f12(1.0) * t.f11(1.0) * t.f22(1.0) == doctest::Approx(m * m * m));
  }
  CHECK_THROWS_AS(powerlaw_triple(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(powerlaw_triple(3.0, 0.0), DomainError);
}

TEST_CASE("flip and scale") {
  const auto t = powerlaw_triple(2.0, 3.0);
  const auto f = flip_sign(t);
  const auto s = scale_triple(t, 2.5);
  for (double x : {0.7, 2.0}) {
    CHECK(f.f12(x) == -t.f12(x));
    CHECK(f.f22(x) == -t.f22(x));
    CHECK(s.f11(x) == doctest::Approx(2.5 * t.f11(x)));
  }
}

TEST_CASE("decompose power laws") {
  const double m = 2.0;
  const auto d = decompose(powerlaw_triple(3.0, m));
  for (double r : {0.5, 1.0, 4.0}) {
    CHECK(d.s12.plus.eval(r) == doctest::Approx(m * std::pow(r, -3.0)));
    CHECK(d.s11.minus.eval(r) == doctest::Approx(std::pow(r, -3.0)));
    CHECK(d.s22.minus.eval(r) == doctest::Approx(m * m * std::pow(r, -3.0)));
  }
  CHECK(d.s12.minus.is_zero());
  CHECK(d.s11.plus.is_zero());
  CHECK(d.s22.plus.is_zero());
  const auto z = decompose(zero_triple());
  CHECK(z.s11.plus.is_zero());
  CHECK(z.s12.minus.is_zero());
  CHECK_THROWS_AS(decompose(Potential::gaussian(1.0, 1.0)), DecompositionError);
}

TEST_CASE("decompose Morse") {
  const auto split = decompose(Potential::morse(1.0, 1.0, 1.0));
  for (double r = 0.05; r <= 10.0; r += 0.05) {
    CHECK(split.plus.eval(r) == doctest::Approx(std::exp(2.0 * (1.0 - r))).epsilon(1e-13));
    CHECK(split.minus.eval(r) == doctest::Approx(2.0 * std::exp(1.0 - r)).epsilon(1e-13));
    const double h = 1e-3;
    CHECK(numerics::finite_diff_2nd([&](double t) { return split.plus.eval(t); }, r, h) >= 0.0);
    CHECK(numerics::finite_diff_2nd([&](double t) { return split.minus.eval(t); }, r, h) >= 0.0);
  }
}

TEST_CASE("decompositions reassemble the potential") {
  std::vector<Potential> splittable = {Potential::power_law(1.0, 1.0), Potential::power_law(-2.5, 3.0),
                                       Potential::morse(1.0, 1.0, 1.0), Potential::morse(-0.4, 2.0, 0.8),
                                       Potential::zero()};
  for (const auto& f : splittable) {
    const auto split = decompose(f);
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(f.kind_name());
      CAPTURE(x);
      const double assembled = split.plus.eval(x) - split.minus.eval(x);
      const double scale = split.plus.eval(x) + split.minus.eval(x);
      CHECK(std::abs(assembled - f(x)) <= 1e-12 * std::max(scale, 1e-300));
      CHECK(std::abs(split.plus.eval(std::abs(-x)) - split.minus.eval(std::abs(-x)) - f(-x)) <= 1e-12 * std::max(scale, 1e-300));
    }
  }
}

TEST_CASE("strong temperedness of convex parts") {
  CHECK(decompose(Potential::power_law(1.0, 3.0)).plus.strongly_tempered());
  CHECK_FALSE(decompose(Potential::power_law(1.0, 1.0)).plus.strongly_tempered());
  CHECK(decompose(Potential::morse(1.0, 1.0, 1.0)).minus.strongly_tempered());
}
