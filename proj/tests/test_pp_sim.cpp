#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "psloc/errors.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/rng.hpp"
#include "psloc/stats.hpp"
#include "support.hpp"

namespace psloc {
namespace {

TEST(SamplePaths, SameSeedSamePaths) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model = test::reference_model();
  const ObservationSet a = sample_paths(net, model, test::kTheta0, 50.0, 123);
  const ObservationSet b = sample_paths(net, model, test::kTheta0, 50.0, 123);
  const ObservationSet c = sample_paths(net, model, test::kTheta0, 50.0, 124);
  EXPECT_EQ(a.events, b.events);
  EXPECT_NE(a.events, c.events);
  EXPECT_EQ(a.n, 50.0);
  EXPECT_EQ(a.T, net.T);
  EXPECT_EQ(a.retention, 1.0);
}

TEST(SamplePaths, SortedInsideHorizon) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model = test::reference_model();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ObservationSet obs = sample_paths(net, model, {0.9, 0.1}, 20.0, seed);
    ASSERT_EQ(obs.detectors(), net.size());
    EXPECT_NO_THROW(validate(obs));
    for (const auto& e : obs.events) {
      EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
      if (!e.empty()) {
        EXPECT_GE(e.front(), 0.0);
        EXPECT_LE(e.back(), net.T);
      }
    }
  }
}

TEST(SamplePaths, NoiseOnlyCountsArePoisson) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model(SignalShape(PowerLaw(0.0, 2.0)));
  const double n = 10.0, mean = n * net.lambda0 * net.T;
  const int m = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < m; ++r) {
    const ObservationSet obs = sample_paths(net, model, test::kTheta0, n, 1000 + r);
    const double c = static_cast<double>(obs.events[0].size());
    sum += c;
    sum2 += c * c;
  }
  const double emp = sum / m;
  const double var = sum2 / m - emp * emp;
  EXPECT_NEAR(emp, mean, 3.0 * std::sqrt(mean / m));
  EXPECT_NEAR(var / mean, 1.0, 0.05);
}

TEST(SamplePaths, SignalCountsMatchCompensator) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model = test::reference_model();
  const double n = 1.0;
  const int m = 10000;
  std::vector<double> sums(net.size(), 0.0);
  for (int r = 0; r < m; ++r) {
    const ObservationSet obs = sample_paths(net, model, test::kTheta0, n, 5000 + r);
    for (std::size_t j = 0; j < net.size(); ++j) sums[j] += static_cast<double>(obs.events[j].size());
  }
  for (std::size_t j = 0; j < net.size(); ++j) {
    const double tau = travel_time(net, j, test::kTheta0);
    const double expected =
        n * test::simpson_oracle(
                [&](double t) { return (t > tau ? 3.0 * (t - tau) * (t - tau) : 0.0) + net.lambda0; },
                0.0, net.T);
    EXPECT_NEAR(sums[j] / m, expected, 3.0 * std::sqrt(expected / m)) << "detector " << j;
  }
}

TEST(SamplePaths, EventTimesFollowNormalizedIntensity) {
  // Given the count, event times are iid with density proportional to the
  // intensity; pooled times are compared with that CDF by Kolmogorov-Smirnov.
  const SignalShape shape(PowerLaw(3.0, 2.0));
  const double lambda0 = 1.0, T = 6.0, tau = 2.2;
  std::vector<double> pooled;
  for (int r = 0; r < 200; ++r) {
    const auto e = sample_path(shape, lambda0, T, tau, 2.0, derive_seed(77, r, 0, StreamPurpose::Test));
    pooled.insert(pooled.end(), e.begin(), e.end());
  }
  std::sort(pooled.begin(), pooled.end());
  auto cumulative = [&](double t) { return lambda0 * t + shape.integral(t - tau); };
  const double total = cumulative(T);
  double ks = 0.0;
  const double m = static_cast<double>(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double f = cumulative(pooled[i]) / total;
    ks = std::max({ks, (i + 1) / m - f, f - i / m});
  }
  EXPECT_GT(kolmogorov_p_value(ks, pooled.size()), 1e-3) << "KS " << ks << " on " << m;
}

TEST(SamplePaths, UnboundedOnsetRejected) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model(SignalShape(PowerLaw(1.0, -0.25)));
  try {
    sample_paths(net, model, test::kTheta0, 10.0, 1);
    FAIL() << "expected UnboundedIntensity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundedIntensity);
  }
}

TEST(Thin, ProbabilityMustBeInterior) {
  ObservationSet obs{10.0, 1.0, 1.0, {{0.1, 0.2}}};
  EXPECT_THROW(thin(obs, 0.0, 1), Error);
  EXPECT_THROW(thin(obs, 1.0, 1), Error);
  EXPECT_NO_THROW(thin(obs, 0.5, 1));
}

TEST(Thin, PartitionsEveryPath) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model = test::reference_model();
  const ObservationSet obs = sample_paths(net, model, test::kTheta0, 200.0, 9);
  const ThinnedPair pair = thin(obs, 0.3, 4);
  EXPECT_EQ(pair.p, 0.3);
  EXPECT_DOUBLE_EQ(pair.y.retention, 0.3);
  EXPECT_DOUBLE_EQ(pair.x_tilde.retention, 0.7);
  EXPECT_DOUBLE_EQ(pair.y.scale(), 60.0);
  for (std::size_t j = 0; j < obs.detectors(); ++j) {
    std::vector<double> merged;
    std::merge(pair.y.events[j].begin(), pair.y.events[j].end(), pair.x_tilde.events[j].begin(),
               pair.x_tilde.events[j].end(), std::back_inserter(merged));
    EXPECT_EQ(merged, obs.events[j]);
  }
  EXPECT_EQ(thin(obs, 0.3, 4).y.events, pair.y.events);
}

TEST(Thin, SplitFractionAndIndependence) {
  const SensorNetwork net = test::reference_network();
  const IntensityModel model = test::reference_model();
  const double p = 0.3, n = 0.2;
  const int m = 10000;
  const double tau = travel_time(net, 0, test::kTheta0);
  const double mean_y = p * n * (net.lambda0 * net.T + 3.0 * std::pow(net.T - tau, 3) / 3.0);

  std::map<int, int> hist;
  double kept = 0, total = 0, sy = 0, sx = 0, syy = 0, sxx = 0, sxy = 0;
  for (int r = 0; r < m; ++r) {
    const ObservationSet obs = sample_paths(net, model, test::kTheta0, n, 20000 + r);
    const ThinnedPair pair = thin(obs, p, 40000 + r);
    const double y = static_cast<double>(pair.y.events[0].size());
    const double x = static_cast<double>(pair.x_tilde.events[0].size());
    ++hist[static_cast<int>(y)];
    kept += y;
    total += x + y;
    sy += y;
    sx += x;
    syy += y * y;
    sxx += x * x;
    sxy += x * y;
  }
  const double frac = kept / total;
  EXPECT_NEAR(frac, p, 3.0 * std::sqrt(p * (1 - p) / total));

  const double cov = sxy / m - (sx / m) * (sy / m);
  const double corr = cov / std::sqrt((sxx / m - sx * sx / m / m) * (syy / m - sy * sy / m / m));
  EXPECT_LT(std::abs(corr), 0.05);

  // Poisson goodness of fit of the kept counts, tail bins merged to >= 5 expected.
  double chi2 = 0.0, pmf = std::exp(-mean_y), cdf = 0.0;
  int dof = -1, observed_acc = 0;
  double expected_acc = 0.0;
  for (int c = 0;; ++c) {
    if (c > 0) pmf *= mean_y / c;
    cdf += pmf;
    expected_acc += m * pmf;
    observed_acc += hist.count(c) ? hist[c] : 0;
    const double tail = m * (1.0 - cdf);
    if (expected_acc >= 5.0 && tail >= 5.0) {
      chi2 += (observed_acc - expected_acc) * (observed_acc - expected_acc) / expected_acc;
      ++dof;
      expected_acc = 0.0;
      observed_acc = 0;
    } else if (tail < 5.0) {
      int rest = 0;
      for (const auto& [k, v] : hist) {
        if (k > c) rest += v;
      }
      expected_acc += tail;
      observed_acc += rest;
      chi2 += (observed_acc - expected_acc) * (observed_acc - expected_acc) / expected_acc;
      ++dof;
      break;
    }
  }
  ASSERT_GT(dof, 3);
  EXPECT_GT(test::chi2_survival(chi2, dof), 1e-3) << "chi2 " << chi2 << " dof " << dof;
}

TEST(ThinningProbability, Examples) {
  EXPECT_DOUBLE_EQ(thinning_probability(16.0, 0.25), 0.5);
  EXPECT_NEAR(thinning_probability(1e4, 0.4), 0.025118864315095794, 1e-15);
  EXPECT_THROW(thinning_probability(1e4, 0.5), Error);
  EXPECT_THROW(thinning_probability(1e4, 0.0), Error);
  EXPECT_THROW(thinning_probability(1.0, 0.25), Error);
}

}  // namespace
}  // namespace psloc
