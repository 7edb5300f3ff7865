#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace swidel {

using Vec = std::vector<double>;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative scheme ran out of budget; carries the best bracket found.
struct ConvergenceError : std::runtime_error {
  double best_lower;
  double best_upper;
  ConvergenceError(const std::string& msg, double lo, double hi)
      : std::runtime_error(msg), best_lower(lo), best_upper(hi) {}
};

/// Dense row-major matrix of doubles. Stored entries are always finite:
/// construction from data and every arithmetic result are checked.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);  // zero-filled
  Mat(std::size_t rows, std::size_t cols, Vec entries);

  static Mat identity(std::size_t n);
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  const Vec& data() const { return data_; }

  /// Copies `block` into this matrix with its top-left corner at (i, j).
  void set_block(std::size_t i, std::size_t j, const Mat& block);
  /// Adds `block` entrywise into this matrix at (i, j).
  void add_block(std::size_t i, std::size_t j, const Mat& block);
  Mat block(std::size_t i, std::size_t j, std::size_t height, std::size_t width) const;

  void check_finite(const char* context) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

bool operator==(const Mat& a, const Mat& b);

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double c, const Mat& m);
Vec operator*(const Mat& m, const Vec& v);

Mat transpose(const Mat& m);
Mat mat_pow(const Mat& m, unsigned k);
Mat hconcat(const Mat& left, const Mat& right);

double trace(const Mat& m);
double max_abs(const Mat& m);
double max_abs_diff(const Mat& a, const Mat& b);

double norm2(const Vec& v);
double max_abs_diff(const Vec& a, const Vec& b);

/// Induced 2-norm (largest singular value), computed by power iteration
/// on MᵀM with Rayleigh-quotient stopping.
double op_norm(const Mat& m);

/// Largest eigenvalue magnitude. Shifted QR on the Hessenberg form; falls
/// back to a norm-of-powers limit if QR stalls.
double spectral_radius(const Mat& m);

}  // namespace swidel
