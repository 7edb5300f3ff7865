#include <doctest.h>

#include <cmath>
#include <random>

#include "swidel/matrix.hpp"

using namespace swidel;

namespace {

Mat random_mat(std::mt19937_64& rng, std::size_t n, std::size_t m, double span = 2.0) {
  std::uniform_real_distribution<double> U(-span, span);
  Mat out(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = U(rng);
  return out;
}

// Independent oracle: plain jki-order triple loop.
Mat naive_mul(const Mat& a, const Mat& b) {
  Mat out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * b(k, j);
  return out;
}

// Independent oracle: ||M^(2^j)||^(1/2^j) with renormalized squaring,
// using the Frobenius norm so it shares nothing with op_norm.
double gelfand_oracle(const Mat& m, int squarings) {
  auto frob = [](const Mat& a) {
    double acc = 0.0;
    for (double x : a.data()) acc += x * x;
    return std::sqrt(acc);
  };
  Mat a = m;
  double log_root = 0.0;
  double pow2 = 1.0;
  for (int j = 0; j < squarings; ++j) {
    const double nm = frob(a);
    if (nm == 0.0) return 0.0;
    log_root += std::log(nm) / pow2;
    a = (1.0 / nm) * a;
    a = a * a;
    pow2 *= 2.0;
  }
  return std::exp(log_root + std::log(frob(a)) / pow2);
}

}  // namespace

TEST_CASE("matrix product basics") {
  Mat m = Mat::from_rows({{1.5, -2.0}, {0.25, 3.0}});
  CHECK(Mat::identity(2) * m == m);
  CHECK(m * Mat::identity(2) == m);

  Mat sw = Mat::from_rows({{0, 2}, {2, 0}});
  Mat sq = sw * sw;
  CHECK(sq == Mat::from_rows({{4, 0}, {0, 4}}));
}

TEST_CASE("matrix product matches the naive triple loop") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Mat a = random_mat(rng, 3, 3);
    Mat b = random_mat(rng, 3, 3);
    CHECK(max_abs_diff(a * b, naive_mul(a, b)) < 1e-12);
  }
}

TEST_CASE("matrix shape and finiteness errors") {
  Mat a(2, 3), b(2, 3);
  CHECK_THROWS_AS(a * b, ShapeError);
  CHECK_THROWS_AS(a + Mat(3, 3), ShapeError);
  CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Mat(1, 2, {1.0, std::nan("")}), NumericError);
  CHECK_THROWS_AS(Mat(1, 1, {1e308}) * Mat(1, 1, {1e308}), NumericError);
}

TEST_CASE("operator norm on closed-form cases") {
  CHECK(op_norm(Mat(3, 3)) == 0.0);
  CHECK(op_norm(Mat::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(op_norm(-2.5 * Mat::identity(3)) == doctest::Approx(2.5).epsilon(1e-12));
  // singular values of [[0,2],[2,0]] from MᵀM = 4I
  CHECK(op_norm(Mat::from_rows({{0, 2}, {2, 0}})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("operator norm homogeneity and submultiplicativity") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    Mat a = random_mat(rng, 4, 4);
    Mat b = random_mat(rng, 4, 4);
    const double na = op_norm(a);
    const double nb = op_norm(b);
    CHECK(op_norm(a * b) <= na * nb + 1e-9);
    const double c = 3.7;
    CHECK(op_norm(c * a) == doctest::Approx(c * na).epsilon(1e-10));
  }
}

TEST_CASE("spectral radius on closed-form cases") {
  CHECK(spectral_radius(Mat::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  // characteristic polynomial x^2 - 4 has roots +-2
  CHECK(spectral_radius(Mat::from_rows({{0, 2}, {2, 0}})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral_radius(Mat::from_rows({{0, 1}, {0, 0}})) == 0.0);
  // rotation: complex pair on the unit circle
  CHECK(spectral_radius(Mat::from_rows({{0, -1}, {1, 0}})) == doctest::Approx(1.0).epsilon(1e-12));
  // defective Jordan block
  CHECK(spectral_radius(Mat::from_rows({{1, 1}, {0, 1}})) == doctest::Approx(1.0).epsilon(1e-12));
  // companion matrix of (x-0.9)(x+0.8)(x^2 - x + 0.5): dominant root 0.9
  // poly = x^4 - 1.1 x^3 - 0.12 x^2 + 0.67 x - 0.36
  Mat comp = Mat::from_rows({{1.1, 0.12, -0.67, 0.36},
                             {1, 0, 0, 0},
                             {0, 1, 0, 0},
                             {0, 0, 1, 0}});
  CHECK(spectral_radius(comp) == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("spectral radius matches the norm-of-powers oracle") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 15; ++rep) {
    Mat m = random_mat(rng, 4, 4);
    const double rho = spectral_radius(m);
    const double limit = gelfand_oracle(m, 40);
    CHECK(rho == doctest::Approx(limit).epsilon(1e-6));
  }
}

TEST_CASE("spectral radius properties") {
  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 15; ++rep) {
    Mat m = random_mat(rng, 3, 3, 1.5);
    const double rho = spectral_radius(m);

    const double rho3 = spectral_radius(mat_pow(m, 3));
    CHECK(rho3 == doctest::Approx(rho * rho * rho).epsilon(1e-6));

    Mat p = random_mat(rng, 3, 3, 1.5);
    CHECK(spectral_radius(m * p) == doctest::Approx(spectral_radius(p * m)).epsilon(1e-8));

    CHECK(rho <= op_norm(m) + 1e-9);
  }
}

TEST_CASE("spectral radius of scaled problems stays accurate") {
  Mat m = Mat::from_rows({{1e6, 1.0}, {0.0, 1e6 - 1.0}});
  CHECK(spectral_radius(m) == doctest::Approx(1e6).epsilon(1e-12));
}
