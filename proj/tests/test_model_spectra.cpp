#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "btlab/model_spectra.hpp"
#include "btlab/special_functions.hpp"

using namespace btlab;
using cd = std::complex<double>;

TEST_SUITE("model_spectra") {
  TEST_CASE("mu_n at pinned points") {
    ModelParams p;
    p.h = 0.05;
    p.alpha = 0.3 * M_PI;
    p.kappa0 = 1.0;
    const cd v = mu_n(p, 1, 2);
    CHECK(v.real() == doctest::Approx(0.35123087387793545).epsilon(1e-13));
    CHECK(v.imag() == doctest::Approx(0.23467485662120935).epsilon(1e-13));
    p.h = 0.07;
    p.alpha = 0.55 * M_PI;
    p.kappa0 = 1.5;
    const cd w = mu_n(p, 2, 1);
    CHECK(w.real() == doctest::Approx(0.32178336519899400).epsilon(1e-13));
    CHECK(w.imag() == doctest::Approx(0.68040640321762890).epsilon(1e-13));
  }

  TEST_CASE("ladder structure: oscillator rungs and airy gaps") {
    ModelParams p;
    p.h = 0.04;
    p.alpha = 1.1;
    p.kappa0 = 2.3;
    const cd rung = mu_n(p, 1, 2) - mu_n(p, 1, 1);
    const cd rung2 = mu_n(p, 2, 5) - mu_n(p, 2, 4);
    CHECK(std::abs(rung - rung2) < 1e-15);
    CHECK(std::abs(rung) == doctest::Approx(2.0 * p.h * std::sqrt(p.kappa0 / 2.0)).epsilon(1e-14));
    CHECK(std::arg(rung) == doctest::Approx(p.alpha / 2.0).epsilon(1e-14));
    const cd gap = mu_n(p, 2, 3) - mu_n(p, 1, 3);
    CHECK(std::abs(gap) == doctest::Approx((airy_zero(2) - airy_zero(1)) *
                                           std::pow(p.h, 2.0 / 3.0)).epsilon(1e-13));
    CHECK(std::arg(gap) == doctest::Approx(2.0 * p.alpha / 3.0).epsilon(1e-13));
  }

  TEST_CASE("selfadjoint case is real") {
    ModelParams p;
    p.alpha = 0.0;
    p.h = 0.1;
    p.kappa0 = 1.7;
    for (int m = 1; m <= 3; ++m)
      for (int n = 1; n <= 3; ++n) {
        const cd v = mu_n(p, m, n);
        CHECK(v.imag() == 0.0);
        CHECK(v.real() == doctest::Approx(airy_zero(m) * std::pow(p.h, 2.0 / 3.0) +
                                          (2 * n - 1) * p.h * std::sqrt(p.kappa0 / 2.0))
                              .epsilon(1e-14));
      }
  }

  TEST_CASE("mirrored ladder at a pinned point and its reflection identity") {
    ModelParams p;
    p.h = 0.03;
    p.alpha = 0.55 * M_PI;
    p.kappa1 = 1.5;
    p.x1_max = 3.0;
    const cd v = mirrored_mu_n(p, 1);
    CHECK(v.real() == doctest::Approx(-0.31685977452013790).epsilon(1e-12));
    CHECK(v.imag() == doctest::Approx(2.76356292331034000).epsilon(1e-12));
    CHECK(std::abs(mirrored_mu_n(p, 1) - mirrored_mu_n(p, 1, 1)) == 0.0);
    // mirrored ladder = shift plus the conjugated direct ladder of the
    // reflected data (alpha -> pi - alpha, kappa0 -> kappa1)
    ModelParams q;
    q.h = p.h;
    q.alpha = M_PI - p.alpha;
    q.kappa0 = p.kappa1;
    for (int n = 1; n <= 3; ++n) {
      const cd expect = std::polar(p.x1_max, p.alpha) + std::conj(mu_n(q, 1, n));
      CHECK(std::abs(mirrored_mu_n(p, n) - expect) < 1e-14);
    }
  }

  TEST_CASE("lower bound leading term") {
    ModelParams p;
    p.h = 0.1;
    p.alpha = 0.45 * M_PI;
    CHECK(lower_bound(p) == doctest::Approx(0.29608504833339694).epsilon(1e-13));
    p.alpha = 0.0;
    CHECK(lower_bound(p) ==
          doctest::Approx(airy_zero(1) * std::pow(0.1, 2.0 / 3.0)).epsilon(1e-14));
  }

  TEST_CASE("half-plane bound: model values satisfy it with zero slack") {
    for (double alpha : {0.5 * M_PI, 0.55 * M_PI}) {
      const double beta = admissible_beta(alpha);
      ModelParams p;
      p.h = 0.05;
      p.alpha = alpha;
      p.kappa0 = 1.5;
      const HalfPlane hp = halfplane_bound(p, beta);
      CHECK(std::abs(hp.normal - std::polar(1.0, beta)) < 1e-15);
      CHECK(hp.offset == doctest::Approx(airy_zero(1) * std::pow(p.h, 2.0 / 3.0) *
                                         std::cos(2.0 * alpha / 3.0 - beta)).epsilon(1e-14));
      for (const ModeLabel& ml : model_spectrum(p, 2, 3)) {
        const double margin = std::cos(beta) * ml.value.real() +
                              std::sin(beta) * ml.value.imag() - hp.offset;
        CHECK(margin >= -1e-15);
      }
    }
  }

  TEST_CASE("admissibility window") {
    CHECK(admissible_pair(0.0, 0.0));
    CHECK(admissible_pair(0.55 * M_PI, M_PI / 10.0));
    CHECK(!admissible_pair(0.55 * M_PI, -M_PI / 3.0));
    CHECK(!admissible_pair(0.9 * M_PI, 0.0));
    CHECK(admissible_beta(0.3) == 0.0);
    CHECK(admissible_beta(0.5 * M_PI) == doctest::Approx(M_PI / 10.0));
    CHECK_THROWS_AS(admissible_beta(3.0 * M_PI / 5.0), std::invalid_argument);
    for (double alpha : {0.0, 0.4, 1.2, 0.5 * M_PI, 0.58 * M_PI})
      CHECK(admissible_pair(alpha, admissible_beta(alpha)));
  }

  TEST_CASE("lattice counting and the excluded set") {
    CHECK(lattice_count(2.5, 1.0) == 2);  // rungs at 0.707 and 2.121
    CHECK(lattice_count(2.5 * std::sqrt(0.5), 1.0) == 1);
    CHECK(lattice_count(0.5, 1.0) == 0);
    CHECK(lattice_count(3.5, 2.0) == 2);  // rungs at 1 and 3, next at 5
    CHECK_THROWS_AS(lattice_count(3.0 / std::sqrt(2.0), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(lattice_count(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(lattice_count(1.0, 0.0), std::invalid_argument);
    CHECK(lattice_distance(2.5, 1.0) == doctest::Approx(0.3786796564403576).epsilon(1e-13));
    CHECK(lattice_distance(3.0 / std::sqrt(2.0), 1.0) == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("model_spectrum sorts by real part and labels honestly") {
    ModelParams p;
    p.h = 0.08;
    p.alpha = 1.3;
    p.kappa0 = 0.9;
    const auto spec = model_spectrum(p, 3, 4);
    REQUIRE(spec.size() == 12);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      CHECK(std::abs(spec[i].value - mu_n(p, spec[i].m, spec[i].n)) < 1e-15);
      if (i > 0) CHECK(spec[i].value.real() >= spec[i - 1].value.real());
    }
  }
}
