#include "ewtls/chi_square.hpp"
#include "ewtls/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

using namespace ewtls;

TEST(ChiSquare, PublishedTableValues) {
  EXPECT_NEAR(chi_square_quantile(0.95, 1), 3.8415, 5e-5);
  EXPECT_NEAR(chi_square_quantile(0.95, 2), 5.9915, 5e-5);
  EXPECT_NEAR(chi_square_quantile(0.99, 10), 23.2093, 5e-5);
  EXPECT_NEAR(chi_square_quantile(0.5, 1), 0.4549, 5e-5);
}

TEST(ChiSquare, MatchesBoostQuantiles) {
  for (double dof : {0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 50.0, 200.0}) {
    const boost::math::chi_squared_distribution<double> dist(dof);
    for (double p : {1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999999}) {
      const double expect = boost::math::quantile(dist, p);
      EXPECT_NEAR(chi_square_quantile(p, dof), expect, 1e-10 * std::max(1.0, expect)) << dof << " " << p;
      EXPECT_NEAR(chi_square_cdf(expect, dof), p, 1e-12) << dof << " " << p;
    }
  }
}

TEST(ChiSquare, IncompleteGammaMatchesBoost) {
  for (double a : {0.1, 0.5, 1.0, 3.7, 25.0, 150.0})
    for (double x : {0.0, 1e-3, 0.5, 1.0, 4.0, 30.0, 200.0})
      EXPECT_NEAR(regularized_gamma_p(a, x), boost::math::gamma_p(a, x), 1e-13) << a << " " << x;
}

TEST(ChiSquare, Errors) {
  EXPECT_THROW(chi_square_quantile(0.0, 1), InputError);
  EXPECT_THROW(chi_square_quantile(1.0, 1), InputError);
  EXPECT_THROW(chi_square_quantile(0.5, 0), InputError);
  EXPECT_THROW(regularized_gamma_p(-1.0, 1.0), InputError);
  EXPECT_EQ(chi_square_cdf(0.0, 3), 0.0);
}
