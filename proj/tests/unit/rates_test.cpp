// Copyright 2026 The smpsde Authors.
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

#include <gtest/gtest.h>

#include <cmath>

#include "smpsde/catalog.hpp"
#include "smpsde/rates.hpp"
#include "test_support.hpp"

namespace smpsde {
namespace {

using testing::catalog;
using testing::constant_callable;
using testing::constant_table;

TEST(Validate, ConstantTwoStatePassesWithRowBoundMax) {
  const auto m = catalog("ctmc2");
  const auto report = validate(m, 10.0, 1.0);
  EXPECT_TRUE(report.passed());
  // c_i are the row sums of sup norms: c_1 = 2, c_2 = 3.
  ASSERT_EQ(report.row_bounds.size(), 2u);
  EXPECT_DOUBLE_EQ(report.row_bounds[0], 2.0);
  EXPECT_DOUBLE_EQ(report.row_bounds[1], 3.0);
  EXPECT_DOUBLE_EQ(report.bound, 3.0);
}

TEST(Validate, ZeroExitRowViolatesDivergence) {
  const auto m = constant_table({{0, 0}, {3, 0}});
  const auto report = validate(m, 10.0, 1.0);
  ASSERT_FALSE(report.passed());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.assumption == "A2" && v.from == 1) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Validate, CappedRampHasSupTwo) {
  const auto m = catalog("age_linear");
  EXPECT_DOUBLE_EQ(m.sup_norm(1, 2), 2.0);
  EXPECT_DOUBLE_EQ(m.row_bound(1), 2.0);
  EXPECT_TRUE(validate(m, 10.0, 1.0).passed());
}

TEST(Validate, RateAboveDeclaredSupIsReported) {
  PairMatrix low(2);
  low(1, 2) = 1.0;
  low(2, 1) = 3.0;
  const auto m = catalog("ctmc2").with_sup_norms(low);
  const auto report = validate(m);
  ASSERT_FALSE(report.passed());
  EXPECT_EQ(report.violations.front().assumption, "A1");
}

TEST(Gamma, ClosedForms) {
  const auto ctmc = catalog("ctmc2");
  EXPECT_NEAR(gamma(ctmc, 1, 0.5, 0), 1.0, 1e-12);
  EXPECT_EQ(gamma(ctmc, 1, 0.0, 0), 0.0);
  const auto ramp = catalog("age_linear");
  // y^2 / 2 below the cap.
  EXPECT_NEAR(gamma(ramp, 1, 1.0, 0), 0.5, 1e-10);
  // 2 + 2 (y - 2) past the knee at y = 2.
  EXPECT_NEAR(gamma(ramp, 1, 3.0, 0), 4.0, 1e-10);
}

TEST(Gamma, QuadratureMatchesCatalogClosedForms) {
  for (const auto& name : catalog_names()) {
    const auto e = make_catalog_model(name);
    ASSERT_TRUE(e.closed_form_gamma.has_value()) << name;
    for (State i = 1; i <= e.model.num_states(); ++i) {
      for (Count n : {0, 1, 4}) {
        for (double y : {0.0, 0.1, 0.7, 1.3, 2.0, 3.7, 9.0}) {
          EXPECT_NEAR(gamma(e.model, i, y, n), (*e.closed_form_gamma)(i, y, n), 1e-9)
              << name << " i=" << i << " y=" << y << " n=" << n;
        }
      }
    }
  }
}

TEST(Gamma, TableIsExactAndAgreesWithCallable) {
  const auto t = constant_table({{0, 2, 1}, {3, 0, 1}, {0.5, 1.5, 0}});
  const auto c = constant_callable({{0, 2, 1}, {3, 0, 1}, {0.5, 1.5, 0}});
  for (State i = 1; i <= 3; ++i) {
    EXPECT_EQ(*t.exact_exit_integral(i, 0.0, 2.5, 0), gamma(t, i, 2.5, 0));
    EXPECT_NEAR(gamma(t, i, 2.5, 0), gamma(c, i, 2.5, 0), 1e-12);
  }
  EXPECT_FALSE(c.exact_exit_integral(1, 0.0, 1.0, 0).has_value());
}

TEST(Gamma, StepTableSumsRectangles) {
  StepTable t;
  t.class_starts = {0, 2};
  t.entries.resize(4);
  t.entries[1] = {{0.0, 1.0, 3.0}, {{0.5, 2.0, 1.0}, {4.0, 4.0, 4.0}}};
  t.entries[2] = {{0.0}, {{1.0}, {1.0}}};
  const auto m = RateModel::from_table("steps", 2, t);
  // 0.5 * 1 + 2 * 2 + 1 * 1.5 on [0, 4.5] for counts 0 and 1.
  EXPECT_DOUBLE_EQ(gamma(m, 1, 4.5, 0), 6.0);
  EXPECT_DOUBLE_EQ(gamma(m, 1, 4.5, 1), 6.0);
  EXPECT_DOUBLE_EQ(gamma(m, 1, 4.5, 2), 18.0);
  EXPECT_TRUE(m.n_dependent());
  EXPECT_DOUBLE_EQ(m.sup_norm(1, 2), 4.0);
  // Right-continuous lookup at a break.
  EXPECT_DOUBLE_EQ(m.rate(1, 2, 1.0, 0), 2.0);
  EXPECT_DOUBLE_EQ(m.rate(1, 2, 0.999, 0), 0.5);
}

TEST(Gamma, NonConvergenceNamesTheState) {
  PairMatrix sup(2, 1.0);
  const auto m = RateModel::from_function(
      "nan", 2, [](State, State, double y, Count) { return y > 0.5 ? std::nan("") : 1.0; },
      sup, false);
  try {
    gamma(m, 2, 1.0, 3);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_EQ(e.state(), 2);
    EXPECT_EQ(e.count(), 3);
  }
}

TEST(HoldingLaw, CdfAndPdf) {
  const auto ctmc = catalog("ctmc2");
  EXPECT_NEAR(holding_cdf(ctmc, 1, 0.5, 0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(holding_cdf(ctmc, 1, 0.5, 0), 0.6321206, 1e-7);
  EXPECT_EQ(holding_cdf(ctmc, 1, 0.0, 0), 0.0);
  EXPECT_NEAR(holding_pdf(ctmc, 1, 0.5, 0), 2.0 * std::exp(-1.0), 1e-12);
  const auto ramp = catalog("age_linear");
  EXPECT_NEAR(holding_cdf(ramp, 1, 1.0, 0), 0.3934693, 1e-7);
  EXPECT_NEAR(holding_pdf(ramp, 1, 1.0, 0), std::exp(-0.5), 1e-10);
}

TEST(HoldingLaw, CdfIsMonotoneAndBelowOne) {
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name.c_str());
    for (State i = 1; i <= m.num_states(); ++i) {
      double prev = 0.0;
      for (int q = 0; q <= 100; ++q) {
        const double f = holding_cdf(m, i, 0.1 * q, 0);
        EXPECT_GE(f, prev) << name;
        EXPECT_LE(f, 1.0) << name;
        prev = f;
      }
    }
  }
}

TEST(EmbeddedProbs, RatiosAndDegenerateRows) {
  const auto m = catalog("ctmc3");
  const auto p = embedded_probs(m, 1, 0.3, 0);
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_NEAR(p[1], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[2], 1.0 / 3.0, 1e-15);
  // min(y, 2) vanishes at y = 0: all mass stays on the current state.
  const auto ramp = catalog("age_linear");
  const auto q = embedded_probs(ramp, 1, 0.0, 0);
  EXPECT_EQ(q, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(embedded_probs(ramp, 1, 0.4, 0), (std::vector<double>{0.0, 1.0}));
}

TEST(EmbeddedProbs, RowsSumToOne) {
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name.c_str());
    for (State i = 1; i <= m.num_states(); ++i) {
      for (double y : {0.0, 0.2, 1.0, 5.0}) {
        double s = 0.0;
        for (double v : embedded_probs(m, i, y, 2)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12) << name;
      }
    }
  }
}

TEST(Kernel, ConstantRateClosedForms) {
  const auto ctmc2 = catalog("ctmc2");
  EXPECT_NEAR(kernel(ctmc2, 1, 2, 0.5, 0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_EQ(kernel(ctmc2, 1, 2, 0.0, 0), 0.0);
  const auto ctmc3 = catalog("ctmc3");
  for (double y : {0.1, 1.0, 4.0}) {
    EXPECT_NEAR(kernel(ctmc3, 1, 2, y, 0), 2.0 / 3.0 * (1.0 - std::exp(-3.0 * y)), 1e-12);
  }
  // The limit y -> infinity goes through quadrature at its 1e-10 tolerance.
  EXPECT_NEAR(jump_distribution(ctmc3, 1, 0)[1], 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(jump_distribution(ctmc3, 1, 0)[2], 1.0 / 3.0, 1e-9);
  const auto callable = constant_callable({{0, 2, 1}, {3, 0, 1}, {0.5, 1.5, 0}});
  EXPECT_NEAR(kernel(callable, 1, 2, 1.0, 0), 2.0 / 3.0 * (1.0 - std::exp(-3.0)), 1e-9);
}

TEST(Kernel, RowSumsEqualCdf) {
  for (const auto& name : catalog_names()) {
    const auto m = catalog(name.c_str());
    for (State i = 1; i <= m.num_states(); ++i) {
      for (double y : {0.3, 1.5, 10.0}) {
        double s = 0.0;
        for (State j = 1; j <= m.num_states(); ++j) {
          if (j != i) s += kernel(m, i, j, y, 1);
        }
        EXPECT_NEAR(s, holding_cdf(m, i, y, 1), 1e-8) << name << " i=" << i << " y=" << y;
      }
    }
  }
}

TEST(Kernel, RampTwoStateMatchesCdf) {
  // A single exit makes Q_12 the holding cdf: 1 - exp(-y^2 / 2) below the knee.
  const auto ramp = catalog("age_linear");
  for (double y : {0.25, 0.5, 1.0, 1.9}) {
    EXPECT_NEAR(kernel(ramp, 1, 2, y, 0), -std::expm1(-0.5 * y * y), 1e-9);
  }
}

TEST(RateIdentity, ResidualVanishes) {
  const auto ctmc = catalog("ctmc3");
  for (double y : {0.0, 0.5, 3.0}) {
    EXPECT_LT(std::abs(rate_identity_residual(ctmc, 1, 3, y, 0)), 1e-9);
  }
  EXPECT_EQ(rate_identity_residual(ctmc, 2, 2, 1.0, 0), 0.0);
  const auto ramp = catalog("age_linear");
  EXPECT_LT(std::abs(rate_identity_residual(ramp, 1, 2, 1.0, 0)), 1e-9);
}

TEST(Saturation, DoublingFindsTarget) {
  const auto ctmc = catalog("ctmc2");
  // gamma_1 = 2y reaches 40 first at the power of two 32.
  EXPECT_EQ(saturation_age(ctmc, 1, 0), 32.0);
  const auto dead = constant_table({{0, 0}, {1, 0}});
  EXPECT_THROW(saturation_age(dead, 1, 0), std::domain_error);
}

}  // namespace
}  // namespace smpsde
