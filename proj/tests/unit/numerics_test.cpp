#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "miwave/csv.hpp"
#include "miwave/errors.hpp"
#include "miwave/fourier.hpp"
#include "miwave/optimizer.hpp"
#include "miwave/parallel.hpp"

namespace miwave {
namespace {

using std::numbers::pi;

TEST(Bfgs, Rosenbrock) {
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    if (g != nullptr) {
      g->resize(2);
      (*g)[0] = -2.0 * a - 400.0 * x[0] * b;
      (*g)[1] = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
  };
  MinimizerOptions o;
  o.max_iterations = 2000;
  o.relative_tolerance = 0.0;
  o.absolute_floor = 1e-20;
  const auto r = minimize_bfgs(f, Eigen::Vector2d(-1.2, 1.0), o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
  EXPECT_TRUE(r.converged);
}

TEST(Bfgs, QuadraticInFewSteps) {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::Vector3d b(1, -2, 0.5);
  const SmoothObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g != nullptr) *g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  const auto r = minimize_bfgs(f, Eigen::Vector3d::Zero());
  const Eigen::Vector3d exact = a.ldlt().solve(b);
  EXPECT_LT((r.x - exact).norm(), 1e-6);
  EXPECT_LT(r.iterations, 30);
}

TEST(Bfgs, NonFiniteStartReturnsImmediately) {
  const SmoothObjective f = [](const Eigen::VectorXd&, Eigen::VectorXd* g) {
    if (g != nullptr) *g = Eigen::VectorXd::Zero(1);
    return std::numeric_limits<double>::infinity();
  };
  const auto r = minimize_bfgs(f, Eigen::VectorXd::Zero(1));
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Bfgs, BacktracksFromInfiniteRegion) {
  // Barrier at |x| >= 2 reported as +inf; minimum at x = 1.5.
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (std::abs(x[0]) >= 2.0) {
      if (g != nullptr) *g = Eigen::VectorXd::Zero(1);
      return std::numeric_limits<double>::infinity();
    }
    if (g != nullptr) *g = Eigen::VectorXd::Constant(1, 200.0 * (x[0] - 1.5));
    return 100.0 * (x[0] - 1.5) * (x[0] - 1.5);
  };
  const auto r = minimize_bfgs(f, Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(r.x[0], 1.5, 1e-6);
}

TEST(CentralDifference, Cubic) {
  const auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0] + 2.0 * x[0] * x[1]; };
  const auto g = central_difference_gradient(f, Eigen::Vector2d(1.5, -0.5));
  EXPECT_NEAR(g[0], 3.0 * 2.25 - 1.0, 1e-8);
  EXPECT_NEAR(g[1], 3.0, 1e-8);
}

TEST(PeriodicCoefficients, MatchesNaiveSum) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> u;
  for (std::size_t n : {8u, 17u, 64u, 100u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {u(rng), u(rng)};
    const int bound = static_cast<int>((n - 1) / 2);
    const auto c = periodic_coefficients(x, bound);
    for (int m = -bound; m <= bound; ++m) {
      std::complex<double> acc{};
      for (std::size_t k = 0; k < n; ++k) {
        const double t = -0.5 + static_cast<double>(k) / static_cast<double>(n);
        acc += x[k] * std::polar(1.0, -2.0 * pi * m * t);
      }
      acc /= static_cast<double>(n);
      EXPECT_NEAR(std::abs(c[static_cast<std::size_t>(m + bound)] - acc), 0.0, 1e-12);
    }
  }
  std::vector<std::complex<double>> four(4);
  EXPECT_THROW(periodic_coefficients(four, 2), InvalidArgument);
  EXPECT_THROW(periodic_coefficients(four, -1), InvalidArgument);
}

TEST(NextPow2, Values) {
  EXPECT_EQ(next_pow2(0), 1u);
  EXPECT_EQ(next_pow2(1), 1u);
  EXPECT_EQ(next_pow2(5), 8u);
  EXPECT_EQ(next_pow2(1024), 1024u);
  EXPECT_EQ(next_pow2(1025), 2048u);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (unsigned workers : {0u, 1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, PropagatesException) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t i) {
                              if (i == 37) throw ConvergenceError("boom");
                            }),
               ConvergenceError);
}

TEST(MixSeed, DistinctStreams) {
  static_assert(mix_seed(1, 0) != mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(-2.5e-20), "-2.5e-20");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(OpenOutput, CreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "miwave_open_output" / "a" / "b";
  std::filesystem::remove_all(dir.parent_path().parent_path());
  {
    auto out = open_output(dir / "x.csv");
    out << "hello\n";
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "x.csv"));
  std::filesystem::remove_all(dir.parent_path().parent_path());
}

}  // namespace
}  // namespace miwave
