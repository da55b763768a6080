#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "hdepth/geometry.hpp"
#include "hdepth/io.hpp"
#include "hdepth/population_depth.hpp"
#include "hdepth/sample_depth.hpp"
#include "support.hpp"

using namespace hdepth;
using namespace hdepth::testing;

namespace {

Sample values(std::initializer_list<double> v) { return Sample::from_values(std::vector<double>(v)); }

Sample cross() { return Sample::from_points({Point{{1.0, 0.0}}, Point{{-1.0, 0.0}}, Point{{0.0, 1.0}}, Point{{0.0, -1.0}}}); }

Sample triangle() { return Sample::from_points({Point{{0.0, 0.0}}, Point{{4.0, 0.0}}, Point{{1.0, 3.0}}}); }

}  // namespace

TEST(Depth1d, ClosedHalflinesCountTies) {
  EXPECT_EQ(depth_1d(2.0, values({1.0, 2.0, 3.0})), (DepthValue{2, 3}));
  EXPECT_NEAR(depth_1d(2.0, values({1.0, 2.0, 3.0})).value(), 2.0 / 3.0, 1e-15);
}

TEST(Depth1d, OutsideTheDataRange) { EXPECT_EQ(depth_1d(0.0, values({1.0, 2.0, 3.0})).count, 0u); }

TEST(Depth1d, NinePoints) {
  EXPECT_EQ(depth_1d(5.0, values({1, 2, 3, 4, 5, 6, 7, 8, 9})), (DepthValue{5, 9}));
}

TEST(Depth1d, AgreesWithBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> u(-5, 5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + static_cast<std::size_t>(t % 9));
    for (double& x : v) x = u(rng);
    const Sample s = Sample::from_values(v);
    const double q = u(rng);
    EXPECT_EQ(depth_1d(q, s), depth_brute(Point{{q}}, s));
  }
}

TEST(DepthBrute, TriangleVertex) {
  EXPECT_EQ(depth_brute(Point{{4.0, 0.0}}, triangle()), (DepthValue{1, 3}));
  EXPECT_EQ(depth_brute(Point{{0.0, 0.0}}, triangle()), (DepthValue{1, 3}));
}

TEST(DepthBrute, CrossCenterIsTwoOfFour) { EXPECT_EQ(depth_brute(Point{{0.0, 0.0}}, cross()), (DepthValue{2, 4})); }

TEST(DepthBrute, CrossCenterMatchesDenseScan) {
  EXPECT_EQ(scan_depth_count(Point{{0.0, 0.0}}, cross(), circle_directions(1000000, 1e-3)), 2u);
}

TEST(DepthBrute, FarOutsideTheHullIsZero) {
  EXPECT_EQ(depth_brute(Point{{100.0, -50.0}}, triangle()).count, 0u);
  std::mt19937_64 rng(22);
  EXPECT_EQ(depth_brute(Point{{9.0, 9.0, 9.0}}, gaussian_sample(10, 3, rng)).count, 0u);
}

TEST(DepthBrute, DegenerateInputsDoNotFail) {
  const Sample collinear = Sample::from_points({Point{{0.0, 0.0}}, Point{{1.0, 1.0}}, Point{{2.0, 2.0}}});
  EXPECT_EQ(depth_brute(Point{{1.0, 1.0}}, collinear), (DepthValue{2, 3}));
  EXPECT_EQ(depth_brute(Point{{1.0, 0.0}}, collinear).count, 0u);
  const Sample same = Sample::from_points({Point{{1.0, 2.0, 3.0}}, Point{{1.0, 2.0, 3.0}}});
  EXPECT_EQ(depth_brute(Point{{1.0, 2.0, 3.0}}, same), (DepthValue{2, 2}));
  const Sample planar3 = Sample::from_points(
      {Point{{1.0, 0.0, 0.0}}, Point{{-1.0, 0.0, 0.0}}, Point{{0.0, 1.0, 0.0}}, Point{{0.0, -1.0, 0.0}}});
  EXPECT_EQ(depth_brute(Point{{0.0, 0.0, 0.0}}, planar3), (DepthValue{2, 4}));
}

TEST(DepthBrute, DirectionDenseValidationPlanar) {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd dirs = circle_directions(1000000, 0.123);
  for (int t = 0; t < 12; ++t) {
    const auto pts = random_grid_sample(rng, 3 + static_cast<std::size_t>(t % 8), 8);
    const Sample s = to_sample(pts);
    const Point q = to_point(random_grid_point(rng, 6));
    const DepthValue brute = depth_brute(q, s);
    const std::size_t scanned = scan_depth_count(q, s, dirs);
    EXPECT_GE(scanned, brute.count);
    EXPECT_EQ(scanned, depth_exact_2d(q, s).count);
    EXPECT_EQ(brute, depth_exact_2d(q, s));
  }
}

TEST(DepthBrute, DirectionDenseValidationSpatial) {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXd dirs = random_directions(3, 1000000, rng);
  for (int t = 0; t < 8; ++t) {
    const std::size_t n = 4 + static_cast<std::size_t>(t % 7);
    const Sample s = gaussian_sample(n, 3, rng);
    const Point q = 0.3 * gaussian_sample(1, 3, rng).point(0);
    const DepthValue brute = depth_brute(q, s);
    const std::size_t scanned = scan_depth_count(q, s, dirs);
    EXPECT_GE(scanned, brute.count);
    // Minimizing cells of random Gaussian arrangements are wide enough to be hit.
    EXPECT_EQ(scanned, brute.count);
  }
}

TEST(DepthExact2d, Examples) {
  EXPECT_EQ(depth_exact_2d(Point{{0.0, 0.0}}, cross()), (DepthValue{2, 4}));
  EXPECT_EQ(depth_exact_2d(Point{{1.0, 3.0}}, triangle()), (DepthValue{1, 3}));
  EXPECT_EQ(depth_exact_2d(Point{{0.5, 0.5}}, Sample::from_points({Point{{0.5, 0.5}}})), (DepthValue{1, 1}));
}

TEST(DepthExact2d, DuplicatesAndCoincidentPoints) {
  const Sample s = Sample::from_points(
      {Point{{0.0, 0.0}}, Point{{0.0, 0.0}}, Point{{1.0, 0.0}}, Point{{1.0, 0.0}}, Point{{0.0, 1.0}}});
  for (const Point& q : {Point{{0.0, 0.0}}, Point{{1.0, 0.0}}, Point{{0.25, 0.25}}, Point{{0.5, 0.0}}}) {
    EXPECT_EQ(depth_exact_2d(q, s), depth_brute(q, s));
  }
}

TEST(DepthExact2d, OracleEquivalenceOnGridInstances) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 400; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 12);
    const auto pts = random_grid_sample(rng, n, t % 2 == 0 ? 4 : 16);
    const Sample s = to_sample(pts);
    const Point q = t % 5 == 0 ? to_point(pts[0]) : to_point(random_grid_point(rng, 12));
    ASSERT_EQ(depth_exact_2d(q, s), depth_brute(q, s)) << "instance " << t;
  }
}

TEST(DepthExact2d, RemovalCharacterization) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 10);
    const auto pts = random_grid_sample(rng, n, t % 3 == 0 ? 3 : 10);
    const GridPoint q = random_grid_point(rng, 6);
    EXPECT_EQ(depth_exact_2d(to_point(q), to_sample(pts)).count, removal_count(q, pts)) << "instance " << t;
  }
}

TEST(DepthExact2d, AffineInvariance) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const Sample s = gaussian_sample(30 + static_cast<std::size_t>(t), 2, rng);
    const Point q = 0.5 * gaussian_sample(1, 2, rng).point(0);
    Eigen::Matrix2d a;
    do {
      a << u(rng), u(rng), u(rng), u(rng);
    } while (std::abs(a.determinant()) < 0.2);
    const Eigen::Vector2d b(u(rng), u(rng));
    const Eigen::MatrixXd moved = (s.rows() * a.transpose()).rowwise() + b.transpose();
    EXPECT_EQ(depth_exact_2d(a * q + b, Sample(moved)), depth_exact_2d(q, s));
  }
}

TEST(DepthExact2d, ValuesAreMultiplesOfOneOverN) {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 100; ++t) {
    const Sample s = gaussian_sample(1 + static_cast<std::size_t>(t), 2, rng);
    const DepthValue v = depth_exact_2d(gaussian_sample(1, 2, rng).point(0), s);
    EXPECT_EQ(v.n, s.size());
    EXPECT_LE(v.count, v.n);
    EXPECT_GE(v.value(), 0.0);
    EXPECT_LE(v.value(), 1.0);
    EXPECT_DOUBLE_EQ(v.value() * static_cast<double>(v.n), static_cast<double>(v.count));
  }
}

TEST(DepthExact2d, RequiresPlanarData) {
  EXPECT_THROW(depth_exact_2d(Point{{0.0, 0.0, 0.0}}, cross()), std::invalid_argument);
}

TEST(DepthApprox, CoverContainingTheMinimizerIsExact) {
  // The minimizing halfplane for the cross center has normal (1,1)/sqrt(2).
  const SphericalCover c(2, 2.0, {Direction::normalized(Point{{1.0, 1.0}})});
  EXPECT_EQ(depth_approx(Point{{0.0, 0.0}}, cross(), c), (DepthValue{2, 4}));
}

TEST(DepthApprox, SeparatingDirectionGivesZero) {
  const SphericalCover c(2, 2.0, {Direction::normalized(Point{{-1.0, 0.0}})});
  EXPECT_EQ(depth_approx(Point{{10.0, 0.0}}, triangle(), c).count, 0u);
  EXPECT_EQ(depth_approx(Point{{10.0, 0.0}}, triangle(), build_cover(2, 0.3)).count, 0u);
}

TEST(DepthApprox, DenseCoverIsCloseToExact) {
  std::mt19937_64 rng(29);
  const SphericalCover c = build_cover(2, 0.01);
  for (int t = 0; t < 50; ++t) {
    const Sample s = gaussian_sample(50, 2, rng);
    const Point q = 0.7 * gaussian_sample(1, 2, rng).point(0);
    const DepthValue exact = depth_exact_2d(q, s);
    const DepthValue approx = depth_approx(q, s, c);
    EXPECT_GE(approx.count, exact.count);
    EXPECT_LE(approx.value() - exact.value(), 2.0 / 50.0 + 1e-15);
  }
}

TEST(DepthApprox, SupersetCoverNeverIncreasesDepth) {
  std::mt19937_64 rng(30);
  for (int t = 0; t < 50; ++t) {
    const Sample s = gaussian_sample(40, 3, rng);
    const Point q = 0.5 * gaussian_sample(1, 3, rng).point(0);
    std::vector<Direction> small;
    for (int k = 0; k < 20; ++k) small.push_back(Direction::random(3, rng));
    std::vector<Direction> big = small;
    for (int k = 0; k < 200; ++k) big.push_back(Direction::random(3, rng));
    const SphericalCover b(3, 1.0, small);
    const SphericalCover a(3, 1.0, big);
    EXPECT_LE(depth_approx(q, s, a).count, depth_approx(q, s, b).count);
  }
}

TEST(DepthCertified, ContainsExactDepth) {
  std::mt19937_64 rng(31);
  const SphericalCover c = build_cover(2, 0.05);
  for (int t = 0; t < 200; ++t) {
    const Sample s = gaussian_sample(100, 2, rng);
    const Point q = gaussian_sample(1, 2, rng).point(0);
    const DepthInterval iv = depth_certified(q, s, c);
    const double exact = depth_exact_2d(q, s).value();
    EXPECT_LE(iv.lower, exact);
    EXPECT_GE(iv.upper, exact);
    EXPECT_GE(iv.lower, 0.0);
    EXPECT_LE(iv.upper, 1.0);
    EXPECT_EQ(iv.psi, 0.05);
  }
}

TEST(DepthCertified, ContainsBruteDepthInThreeDimensions) {
  std::mt19937_64 rng(32);
  const SphericalCover c = build_cover(3, 0.1);
  for (int t = 0; t < 30; ++t) {
    const Sample s = gaussian_sample(9, 3, rng);
    const Point q = 0.4 * gaussian_sample(1, 3, rng).point(0);
    const DepthInterval iv = depth_certified(q, s, c);
    const double exact = depth_brute(q, s).value();
    EXPECT_LE(iv.lower, exact);
    EXPECT_GE(iv.upper, exact);
  }
}

TEST(DepthCertified, CollapsesAsCoverRadiusShrinks) {
  std::mt19937_64 rng(33);
  const Sample s = to_sample(random_grid_sample(rng, 15, 8));
  const Point q = Point{{0.0625, -0.125}};
  const double exact = depth_exact_2d(q, s).value();
  const DepthInterval fine = depth_certified(q, s, build_cover(2, 1e-5));
  EXPECT_EQ(fine.lower, exact);
  EXPECT_EQ(fine.upper, exact);
}

TEST(DepthCertified, SampleAtTheQuery) {
  const Sample s = Sample::from_points({Point{{1.0, 1.0}}, Point{{1.0, 1.0}}, Point{{1.0, 1.0}}});
  const DepthInterval iv = depth_certified(Point{{1.0, 1.0}}, s, build_cover(2, 0.2));
  EXPECT_EQ(iv.lower, 1.0);
  EXPECT_EQ(iv.upper, 1.0);
  EXPECT_EQ(iv.radius, 0.0);
}

TEST(DepthCertified, RadiusIsMeasuredFromTheQuery) {
  const DepthInterval iv = depth_certified(Point{{1.0, 3.0}}, triangle(), build_cover(2, 0.2));
  EXPECT_NEAR(iv.radius, std::sqrt(18.0), 1e-12);
}

TEST(KsStatistic, SinglePointAtTheMedian) {
  const std::vector<double> x{0.0};
  EXPECT_DOUBLE_EQ(ks_statistic(x, normal_cdf), 0.5);
  EXPECT_DOUBLE_EQ(sup_deviation(values({0.0}), DistributionSpec::standard_normal(1), line_cover()), 0.5);
}

TEST(KsStatistic, MatchesAFineGridOfThresholds) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> g;
  std::vector<double> x(40);
  for (double& v : x) v = g(rng);
  std::sort(x.begin(), x.end());
  double grid = 0.0;
  for (double v : x) {
    for (double t : {v - 1e-9, v}) {
      const double fn =
          static_cast<double>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) / static_cast<double>(x.size());
      grid = std::max(grid, std::abs(normal_cdf(t) - fn));
    }
  }
  EXPECT_NEAR(ks_statistic(x, normal_cdf), grid, 1e-8);
}

TEST(SupDeviation, DecaysLikeInverseRootN) {
  std::mt19937_64 rng(35);
  const DistributionSpec dist = DistributionSpec::standard_normal(1);
  auto mean_sup = [&](std::size_t n) {
    double sum = 0.0;
    for (int t = 0; t < 200; ++t) sum += sup_deviation(gaussian_sample(n, 1, rng), dist, line_cover());
    return sum / 200.0;
  };
  const double small = mean_sup(100);
  const double large = mean_sup(1600);
  EXPECT_GT(small, large);
  EXPECT_NEAR(small / large, 4.0, 1.2);
}

TEST(SupDeviation, CoarseCoverNeverExceedsFinerNestedCover) {
  std::mt19937_64 rng(36);
  const DistributionSpec dist = DistributionSpec::standard_normal(2);
  // Equally spaced covers with 5k+1 and 25k+1 style counts are not nested, so
  // build the fine cover as a superset of the coarse one.
  const SphericalCover coarse = build_cover(2, 0.05);
  std::vector<Direction> fine_centers = coarse.centers();
  const SphericalCover extra = build_cover(2, 0.01);
  fine_centers.insert(fine_centers.end(), extra.centers().begin(), extra.centers().end());
  const SphericalCover fine(2, 0.01, fine_centers);
  for (int t = 0; t < 20; ++t) {
    const Sample s = gaussian_sample(200, 2, rng);
    EXPECT_LE(sup_deviation(s, dist, coarse), sup_deviation(s, dist, fine));
  }
}

TEST(SampleType, ValidatesInput) {
  EXPECT_THROW(Sample(Eigen::MatrixXd(0, 2)), std::invalid_argument);
  EXPECT_THROW(Sample::from_points({Point{{1.0, 2.0}}, Point{{1.0}}}), std::invalid_argument);
  Eigen::MatrixXd bad(1, 1);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(Sample(std::move(bad)), std::invalid_argument);
  const Sample s = cross();
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.dimension(), 2u);
}

TEST(SampleIo, CsvAndJsonAgree) {
  std::istringstream csv("1,0\n-1,0\n\n0,1\n0,-1\n");
  const Sample a = parse_sample_csv(csv);
  const Sample b = parse_sample_json(nlohmann::json::parse(R"({"points":[[1,0],[-1,0],[0,1],[0,-1]]})"));
  EXPECT_EQ(a.rows(), b.rows());
  EXPECT_EQ(a.rows(), cross().rows());
}

TEST(SampleIo, CsvErrorsNameRowAndColumn) {
  std::istringstream bad("1,2\n3,x\n");
  try {
    parse_sample_csv(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos) << e.what();
  }
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(parse_sample_csv(ragged), InputError);
  std::istringstream empty_field("1,\n");
  EXPECT_THROW(parse_sample_csv(empty_field), InputError);
}

TEST(DepthJson, Shapes) {
  const auto j = to_json(DepthValue{2, 3});
  EXPECT_EQ(j["count"], 2);
  EXPECT_EQ(j["n"], 3);
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), 2.0 / 3.0);
  const auto k = to_json(DepthInterval{0.1, 0.2, 0.05, 3.0});
  EXPECT_EQ(k["R"], 3.0);
  EXPECT_EQ(k["psi"], 0.05);
}
