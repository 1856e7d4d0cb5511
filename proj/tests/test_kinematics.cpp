#include <doctest.h>

#include <cmath>

#include <avmarket/errors.hpp>
#include <avmarket/kinematics.hpp>
#include <avmarket/types.hpp>

using namespace avmarket;

TEST_CASE("smoothed power point values") {
  SmoothedPower f{-1.0, 1e-3};

  SUBCASE("power branch") {
    CHECK(f.eval(4.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(f.eval(1e-3) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(f.deriv(1e-3) == doctest::Approx(-1e6).epsilon(1e-12));
  }

  SUBCASE("tangent branch") {
    CHECK(f.eval(0.0) == doctest::Approx(2000.0).epsilon(1e-12));
    CHECK(f.deriv(0.0) == doctest::Approx(-1e6).epsilon(1e-12));
    CHECK(f.eval(-1.0) == doctest::Approx(1000.0 + 1e6 * 1.001).epsilon(1e-12));
  }
}

TEST_CASE("smoothed power is C1 at the switch point") {
  for (SmoothedPower f : {SmoothedPower{-1.0, 1e-3}, SmoothedPower{-0.5, 1.0},
                          SmoothedPower{-1.7, 0.2}}) {
    const double eps = f.epsilon;
    // Both branch formulas at the switch point itself.
    const double power = std::pow(eps, f.exponent);
    const double tangent = std::pow(eps, f.exponent) +
                           f.exponent * std::pow(eps, f.exponent - 1.0) * (eps - eps);
    CHECK(std::abs(power - tangent) <= 1e-9 * std::abs(power));
    // Library values straddling the point by one part in 1e12.
    const double d = eps * 1e-12;
    CHECK(std::abs(f.eval(eps + d) - f.eval(eps - d)) <=
          3.0 * d * std::abs(f.deriv(eps)) + 1e-9 * std::abs(power));
    CHECK(std::abs(f.deriv(eps + d) - f.deriv(eps - d)) <= 1e-6 * std::abs(f.deriv(eps)));
  }
}

TEST_CASE("smoothed power derivative matches finite differences") {
  for (SmoothedPower f : {SmoothedPower{-1.0, 1e-3}, SmoothedPower{-0.5, 1.0}}) {
    for (int k = 0; k < 20; ++k) {
      // Geometric grid from well below to well above the switch point.
      const double x = f.epsilon * std::pow(10.0, -2.0 + 4.0 * k / 19.0);
      const double step = 1e-5 * std::max(x, f.epsilon);
      const double fd = (f.eval(x + step) - f.eval(x - step)) / (2.0 * step);
      CHECK(f.deriv(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("smoothed power is positive and decreasing") {
  SmoothedPower f{-0.5, 1.0};
  double prev = f.eval(-2.0);
  CHECK(prev > 0.0);
  for (double x = -1.8; x < 40.0; x += 0.37) {
    const double cur = f.eval(x);
    CHECK(cur > 0.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("customer search time") {
  CityParams city;  // A = 1.5, alpha1 = alpha2 = 0.7

  SUBCASE("calibration point") {
    const double wc = customer_wait(1000.0, 0.1, city);
    CHECK(std::abs(wc - 0.10818) < 1e-4);
    const double expected = std::pow(1000.0, (1.0 - 1.4) / 0.7) * std::pow(1.5, -1.0 / 0.7) *
                            xi1(city).eval(0.1);
    CHECK(wc == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("unit elasticities collapse the formula") {
    CityParams c2 = city;
    c2.matching_A = 1.0;
    c2.matching_alpha1 = 0.5;
    c2.matching_alpha2 = 0.5;
    CHECK(customer_wait(123456.0, 1.0, c2) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("idle time below the threshold uses the tangent") {
    const double wt = 0.5 * city.xi1_epsilon;
    const double scale = std::pow(500.0, (1.0 - 1.4) / 0.7) * std::pow(1.5, -1.0 / 0.7);
    const double eps = city.xi1_epsilon;
    const double tangent = std::pow(eps, -1.0) - std::pow(eps, -2.0) * (wt - eps);
    CHECK(customer_wait(500.0, wt, city) == doctest::Approx(scale * tangent).epsilon(1e-12));
  }

  SUBCASE("demands a positive request rate") {
    CHECK_THROWS_AS(customer_wait(0.0, 0.1, city), ContractViolation);
    CHECK_THROWS_AS(customer_wait(-5.0, 0.1, city), ContractViolation);
  }

  SUBCASE("more idle supply means less searching") {
    double prev = customer_wait(1000.0, 0.01, city);
    for (double wt = 0.02; wt < 0.5; wt += 0.02) {
      const double cur = customer_wait(1000.0, wt, city);
      CHECK(cur < prev);
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("deadheading pick-up time") {
  CityParams city;  // theta = 0.63

  SUBCASE("calibration point") {
    CHECK(pickup_time(0.1, 1000.0, 0.6, city) == doctest::Approx(0.0378).epsilon(1e-12));
  }

  SUBCASE("zero trip time gives zero pick-up") {
    CHECK(pickup_time(0.1, 1000.0, 0.0, city) == 0.0);
  }

  SUBCASE("switch point equals theta times trip time") {
    CHECK(pickup_time(1e-3, 1000.0, 0.6, city) == doctest::Approx(0.63 * 0.6).epsilon(1e-12));
  }
}

TEST_CASE("congested trip time") {
  CityParams city;  // a = 0.5, b = 2.67e-12, alpha = 0.7

  SUBCASE("empty roads run at the base time") {
    CHECK(trip_time(0.0, 0.0, 0.0, 0.0, city) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("mixed traffic point") {
    const double tr = trip_time(1e5, 1.5e5, 5e4, 0.1, city);
    CHECK(std::abs(tr - 0.6126) < 1e-4);
    const double x = 1e5 + 0.7 * (1.5e5 - 5e4) + 0.7 * 5e4 * (1.0 + 0.63 / std::sqrt(5000.0));
    CHECK(effective_flow(1e5, 1.5e5, 5e4, 0.1, city) == doctest::Approx(x).epsilon(1e-12));
    CHECK(tr == doctest::Approx(0.5 + 2.67e-12 * x * x).epsilon(1e-12));
  }

  SUBCASE("crowdsourced trips cannot exceed AV trips") {
    CHECK_THROWS_AS(effective_flow(0.0, 100.0, 200.0, 0.1, city), ContractViolation);
  }

  SUBCASE("never below the free-flow time") {
    for (double qm : {0.0, 5e4, 2e5})
      for (double qo : {0.0, 1e4}) CHECK(trip_time(qm, 2e4 + qo, qo, 0.05, city) >= 0.5);
  }
}
