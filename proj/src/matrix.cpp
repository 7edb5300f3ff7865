#include "swidel/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace swidel {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

double sign_of(double magnitude, double carrier) {
  return carrier >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, Vec entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw ShapeError("Mat: entry count does not match rows*cols");
  check_finite("Mat construction");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Mat m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Mat::from_rows: ragged rows");
    std::size_t j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  m.check_finite("Mat::from_rows");
  return m;
}

void Mat::set_block(std::size_t i, std::size_t j, const Mat& block) {
  require(i + block.rows() <= rows_ && j + block.cols() <= cols_,
          "Mat::set_block: block exceeds bounds");
  for (std::size_t r = 0; r < block.rows(); ++r)
    for (std::size_t c = 0; c < block.cols(); ++c) (*this)(i + r, j + c) = block(r, c);
}

void Mat::add_block(std::size_t i, std::size_t j, const Mat& block) {
  require(i + block.rows() <= rows_ && j + block.cols() <= cols_,
          "Mat::add_block: block exceeds bounds");
  for (std::size_t r = 0; r < block.rows(); ++r)
    for (std::size_t c = 0; c < block.cols(); ++c) (*this)(i + r, j + c) += block(r, c);
}

Mat Mat::block(std::size_t i, std::size_t j, std::size_t height, std::size_t width) const {
  require(i + height <= rows_ && j + width <= cols_, "Mat::block: range exceeds bounds");
  Mat out(height, width);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) out(r, c) = (*this)(i + r, j + c);
  return out;
}

void Mat::check_finite(const char* context) const {
  for (double x : data_)
    if (!std::isfinite(x))
      throw NumericError(std::string(context) + ": non-finite entry");
}

bool operator==(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.data() == b.data();
}

Mat operator+(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "Mat add: shape mismatch");
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  out.check_finite("Mat add");
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "Mat sub: shape mismatch");
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  out.check_finite("Mat sub");
  return out;
}

Mat operator*(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), "Mat mul: inner dimensions differ");
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  out.check_finite("Mat mul");
  return out;
}

Mat operator*(double c, const Mat& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = c * m(i, j);
  out.check_finite("Mat scale");
  return out;
}

Vec operator*(const Mat& m, const Vec& v) {
  require(m.cols() == v.size(), "Mat-vec: dimension mismatch");
  Vec out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Mat transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Mat mat_pow(const Mat& m, unsigned k) {
  require(m.is_square(), "mat_pow: matrix must be square");
  Mat acc = Mat::identity(m.rows());
  for (unsigned i = 0; i < k; ++i) acc = acc * m;
  return acc;
}

Mat hconcat(const Mat& left, const Mat& right) {
  require(left.rows() == right.rows(), "hconcat: row counts differ");
  Mat out(left.rows(), left.cols() + right.cols());
  out.set_block(0, 0, left);
  out.set_block(0, left.cols(), right);
  return out;
}

double trace(const Mat& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) acc += m(i, i);
  return acc;
}

double max_abs(const Mat& m) {
  double best = 0.0;
  for (double x : m.data()) best = std::max(best, std::fabs(x));
  return best;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    best = std::max(best, std::fabs(a.data()[i] - b.data()[i]));
  return best;
}

double norm2(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("max_abs_diff: vector sizes differ");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

namespace {

// Deterministic start vector so repeated calls give identical results.
Vec seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  Vec v(n);
  std::uint64_t s = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  for (std::size_t i = 0; i < n; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    v[i] = static_cast<double>((s >> 11) & 0xFFFFF) / double(0xFFFFF) - 0.5;
  }
  double nm = norm2(v);
  if (nm == 0.0) {
    v.assign(n, 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= nm;
  return v;
}

}  // namespace

double op_norm(const Mat& m) {
  m.check_finite("op_norm");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (max_abs(m) == 0.0) return 0.0;

  const Mat mt = transpose(m);
  double best = 0.0;
  for (std::uint64_t attempt = 0; attempt < 4; ++attempt) {
    Vec v = seeded_unit_vector(m.cols(), 0x5d1f3 + attempt);
    double q_prev = -1.0;
    double change_prev = -1.0;
    double q = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Vec w = m * v;       // q = vᵀMᵀMv = ‖Mv‖² for unit v
      q = 0.0;
      for (double x : w) q += x * x;
      if (q == 0.0) break;  // v in the null space; restart
      Vec u = mt * w;
      double nu = norm2(u);
      if (nu == 0.0) break;
      for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] / nu;
      if (q_prev >= 0.0) {
        const double change = std::fabs(q - q_prev);
        if (change <= 1e-12 * q) {
          // Accept only if the tail decayed geometrically; a flat tail
          // means clustered singular values and a stalled iterate.
          if (change == 0.0 || (change_prev > 0.0 && change <= 0.9 * change_prev))
            return std::sqrt(q);
          if (change_prev > 0.0) break;
          // No decay history yet; take one more pass to confirm.
        }
        change_prev = change;
      }
      q_prev = q;
    }
    if (q > 0.0) {
      best = std::sqrt(q);
      break;
    }
  }
  // Stalled or capped: settle through the eigensolver on MᵀM.
  const Mat g = m.rows() <= m.cols() ? m * mt : mt * m;
  return std::max(best, std::sqrt(spectral_radius(g)));
}

namespace {

// Householder reduction of a (row-major, n×n) to upper Hessenberg form.
void to_hessenberg(std::vector<double>& a, std::size_t n) {
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  if (n < 3) return;
  std::vector<double> v(n), work(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += A(i, k) * A(i, k);
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    double alpha = A(k + 1, k) >= 0.0 ? -xnorm : xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = A(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    // A ← (I − 2vvᵀ) A, applied to rows k+1..n-1
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * A(i, j);
      dot = 2.0 * dot / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) A(i, j) -= dot * v[i];
    }
    // A ← A (I − 2vvᵀ), applied to columns k+1..n-1
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += A(i, j) * v[j];
      dot = 2.0 * dot / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= dot * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) A(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix. Eigenvalues land
// in (wr, wi). Returns false if an eigenvalue fails to deflate in 30 sweeps.
bool hqr_eigenvalues(std::vector<double>& a, int n, std::vector<double>& wr,
                     std::vector<double>& wi) {
  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(A(i, j));
  if (anorm == 0.0) anorm = 1.0;

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(A(l - 1, l - 1)) + std::fabs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(A(l, l - 1)) + s == s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      double x = A(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = A(nn - 1, nn - 1);
        double w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn] = z;
            wi[nn - 1] = -z;
          }
          nn -= 2;
        } else {
          if (its == 30) return false;
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            double s = std::fabs(A(nn, nn - 1)) + std::fabs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          int m;
          for (m = nn - 2; m >= l; --m) {
            z = A(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - rr - ss;
            r = A(m + 2, m + 1);
            double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= scale;
            q /= scale;
            r /= scale;
            if (m == l) break;
            double u = std::fabs(A(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            double v = std::fabs(p) *
                       (std::fabs(A(m - 1, m - 1)) + std::fabs(z) + std::fabs(A(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = 0.0;
            if (i != m + 2) A(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = (k != nn - 1) ? A(k + 2, k - 1) : 0.0;
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
              } else {
                A(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                double pp = A(k, j) + q * A(k + 1, j);
                if (k != nn - 1) {
                  pp += r * A(k + 2, j);
                  A(k + 2, j) -= pp * z;
                }
                A(k + 1, j) -= pp * y;
                A(k, j) -= pp * x;
              }
              int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                double pp = x * A(i, k) + y * A(i, k + 1);
                if (k != nn - 1) {
                  pp += z * A(i, k + 2);
                  A(i, k + 2) -= pp * r;
                }
                A(i, k + 1) -= pp * q;
                A(i, k) -= pp;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return true;
}

// Norm-of-powers limit ‖M^{2^j}‖^{1/2^j} with renormalized squaring.
// Returns the upper estimate; tightest trace-based lower lands in *lo.
double power_norm_limit(const Mat& m, double* lo_out) {
  const std::size_t n = m.rows();
  Mat a = m;
  double log_scale = 0.0;  // log r_j = log_scale + log‖A_j‖ / 2^j
  double r = 0.0, r_prev = std::numeric_limits<double>::infinity();
  double lo = 0.0;
  bool settled = false;
  for (int j = 0; j <= 48; ++j) {
    const double pow2j = std::ldexp(1.0, j);
    double nm = op_norm(a);
    if (nm == 0.0) {
      if (lo_out) *lo_out = 0.0;
      return 0.0;
    }
    r = std::exp(log_scale + std::log(nm) / pow2j);
    double tr = std::fabs(trace(a)) / static_cast<double>(n);
    if (tr > 0.0) lo = std::max(lo, std::exp(log_scale + std::log(tr) / pow2j));
    if (j > 20 && std::fabs(r - r_prev) <= 1e-10 * std::max(1.0, r)) {
      settled = true;
      break;
    }
    r_prev = r;
    log_scale += std::log(nm) / pow2j;
    Mat scaled = (1.0 / nm) * a;
    a = scaled * scaled;
  }
  if (lo_out) *lo_out = lo;
  if (!settled && std::fabs(r - r_prev) > 1e-6 * std::max(1.0, r))
    throw ConvergenceError("spectral_radius: power-norm fallback did not settle", lo, r);
  return r;
}

}  // namespace

double spectral_radius(const Mat& m) {
  require(m.is_square(), "spectral_radius: matrix must be square");
  m.check_finite("spectral_radius");
  const std::size_t n = m.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::fabs(m(0, 0));

  std::vector<double> a = m.data();
  to_hessenberg(a, n);
  std::vector<double> wr(n, 0.0), wi(n, 0.0);
  if (hqr_eigenvalues(a, static_cast<int>(n), wr, wi)) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      best = std::max(best, std::hypot(wr[i], wi[i]));
    return best;
  }
  double lo = 0.0;
  double hi = power_norm_limit(m, &lo);
  return hi;
}

}  // namespace swidel
