#include "swidel/model.hpp"

#include <algorithm>
#include <utility>

namespace swidel {

namespace {

std::string idx_label(const std::string& stem, std::size_t i) {
  return stem + "_" + std::to_string(i);
}

void check_gain_shape(const Mat& k, std::size_t n, std::size_t m, int d_max,
                      const char* what) {
  const std::size_t want_cols = n + static_cast<std::size_t>(d_max) * m;
  if (k.rows() != m || k.cols() != want_cols)
    throw ShapeError(std::string(what) + ": gain must be " + std::to_string(m) + "x" +
                     std::to_string(want_cols));
}

}  // namespace

Plant::Plant(Mat a, Mat b) : A(std::move(a)), B(std::move(b)) {
  if (!A.is_square()) throw ShapeError("Plant: A must be square");
  if (B.rows() != A.rows()) throw ShapeError("Plant: B must have as many rows as A");
  if (B.cols() < 1) throw ShapeError("Plant: B needs at least one column");
}

DelaySet::DelaySet(std::vector<int> delays) : delays_(std::move(delays)) {
  if (delays_.empty()) throw std::invalid_argument("DelaySet: empty delay list");
  std::sort(delays_.begin(), delays_.end());
  if (delays_.front() < 0) throw std::invalid_argument("DelaySet: negative delay");
  if (std::adjacent_find(delays_.begin(), delays_.end()) != delays_.end())
    throw std::invalid_argument("DelaySet: duplicate delay");
}

bool DelaySet::contains(int d) const {
  return std::binary_search(delays_.begin(), delays_.end(), d);
}

std::size_t DelaySet::index_of(int d) const {
  auto it = std::lower_bound(delays_.begin(), delays_.end(), d);
  if (it == delays_.end() || *it != d)
    throw InvalidDelayError("delay " + std::to_string(d) + " not in delay set");
  return static_cast<std::size_t>(it - delays_.begin());
}

const Mat& SwitchingSystem::matrix_for(int d) const { return matrices[index_of(d)]; }

std::size_t SwitchingSystem::index_of(int d) const {
  auto it = std::lower_bound(delays.begin(), delays.end(), d);
  if (it == delays.end() || *it != d)
    throw InvalidDelayError("delay " + std::to_string(d) + " not in switching system");
  return static_cast<std::size_t>(it - delays.begin());
}

SwitchingSystem make_switching_system(std::vector<int> delays, std::vector<Mat> matrices,
                                      std::vector<std::string> layout) {
  if (delays.empty() || delays.size() != matrices.size())
    throw ShapeError("SwitchingSystem: need one matrix per delay");
  std::vector<std::size_t> order(delays.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return delays[a] < delays[b]; });
  SwitchingSystem sys;
  for (std::size_t i : order) {
    sys.delays.push_back(delays[i]);
    sys.matrices.push_back(std::move(matrices[i]));
  }
  for (std::size_t i = 1; i < sys.delays.size(); ++i)
    if (sys.delays[i] == sys.delays[i - 1])
      throw ShapeError("SwitchingSystem: duplicate delay label");
  sys.dim = sys.matrices.front().rows();
  for (const Mat& m : sys.matrices)
    if (!m.is_square() || m.rows() != sys.dim)
      throw ShapeError("SwitchingSystem: matrices must be square with equal dimension");
  if (layout.empty()) {
    for (std::size_t i = 1; i <= sys.dim; ++i) sys.layout.push_back(idx_label("s", i));
  } else {
    if (layout.size() != sys.dim)
      throw ShapeError("SwitchingSystem: layout size must equal dimension");
    sys.layout = std::move(layout);
  }
  return sys;
}

std::vector<std::string> dep_layout(std::size_t n, std::size_t m, int d_max) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(idx_label("x", i));
  for (int s = 1; s <= d_max; ++s)
    for (std::size_t j = 1; j <= m; ++j) labels.push_back(idx_label(idx_label("u", s), j));
  return labels;
}

std::vector<std::string> indep_layout(std::size_t n, std::size_t m, int d_max) {
  std::vector<std::string> labels = dep_layout(n, m, d_max);
  for (int s = 1; s <= d_max; ++s)
    for (std::size_t j = 1; j <= m; ++j) labels.push_back(idx_label(idx_label("v", s), j));
  return labels;
}

SwitchingSystem build_dep_closed_loop(const Plant& plant, const DelaySet& delays,
                                      const DepController& ctrl) {
  const std::size_t n = plant.n();
  const std::size_t m = plant.m();
  const int d_max = delays.d_max();
  const std::size_t dim = n + static_cast<std::size_t>(d_max) * m;

  Mat base(dim, dim);
  base.set_block(0, 0, plant.A);
  if (d_max >= 1) base.set_block(0, n, plant.B);
  for (int s = 1; s < d_max; ++s)
    base.set_block(n + (s - 1) * m, n + static_cast<std::size_t>(s) * m, Mat::identity(m));

  std::vector<int> labels;
  std::vector<Mat> mats;
  for (int d : delays.delays()) {
    auto it = ctrl.gains.find(d);
    if (it == ctrl.gains.end())
      throw ShapeError("delay-dependent controller: missing gain for delay " +
                       std::to_string(d));
    const Mat& K = it->second;
    check_gain_shape(K, n, m, d_max, "delay-dependent controller");
    Mat M = base;
    if (d == 0) {
      M.add_block(0, 0, plant.B * K);
    } else {
      M.add_block(n + (d - 1) * m, 0, K);
    }
    labels.push_back(d);
    mats.push_back(std::move(M));
  }
  return make_switching_system(std::move(labels), std::move(mats), dep_layout(n, m, d_max));
}

SwitchingSystem build_indep_closed_loop(const Plant& plant, const DelaySet& delays,
                                        const IndepController& ctrl) {
  const std::size_t n = plant.n();
  const std::size_t m = plant.m();
  const int d_max = delays.d_max();
  check_gain_shape(ctrl.K, n, m, d_max, "delay-independent controller");
  const std::size_t qlen = static_cast<std::size_t>(d_max) * m;
  const std::size_t dim = n + 2 * qlen;
  const std::size_t vcol0 = n + qlen;  // first memory coordinate (oldest output)

  // Row block computing v(t) = K_0 x + sum_s K_s v(t-d_max+s-1).
  Mat vrow(m, dim);
  vrow.set_block(0, 0, ctrl.K.block(0, 0, m, n));
  for (int s = 1; s <= d_max; ++s)
    vrow.set_block(0, vcol0 + (s - 1) * m, ctrl.K.block(0, n + (s - 1) * m, m, m));

  std::vector<int> labels;
  std::vector<Mat> mats;
  for (int d : delays.delays()) {
    Mat M(dim, dim);
    M.set_block(0, 0, plant.A);
    if (d_max >= 1) M.set_block(0, n, plant.B);
    if (d == 0) M.add_block(0, 0, plant.B * vrow);
    for (int s = 1; s <= d_max; ++s) {
      const std::size_t row = n + (s - 1) * m;
      if (s < d_max) M.set_block(row, n + static_cast<std::size_t>(s) * m, Mat::identity(m));
      if (s == d) M.add_block(row, 0, vrow);
    }
    for (int i = 1; i < d_max; ++i)
      M.set_block(vcol0 + (i - 1) * m, vcol0 + static_cast<std::size_t>(i) * m,
                  Mat::identity(m));
    if (d_max >= 1) M.set_block(vcol0 + (d_max - 1) * m, 0, vrow);
    labels.push_back(d);
    mats.push_back(std::move(M));
  }
  return make_switching_system(std::move(labels), std::move(mats), indep_layout(n, m, d_max));
}

SwitchingSystem build_example2(double a, double b, double k1, double k2) {
  Mat m0 = Mat::from_rows({{0.0, 1.0, 0.0},
                           {b * k1, a + b * k2, 1.0},
                           {0.0, 0.0, 0.0}});
  Mat m1 = Mat::from_rows({{0.0, 1.0, 0.0},
                           {0.0, a, 1.0},
                           {b * k1, b * k2, 0.0}});
  return make_switching_system({0, 1}, {m0, m1}, {"x_prev_1", "x_1", "u_1_1"});
}

HardnessGadget build_hardness_gadget(const Mat& A1, const Mat& A2) {
  if (!A1.is_square() || !A2.is_square() || A1.rows() != A2.rows())
    throw ShapeError("hardness gadget: A1 and A2 must be square of equal dimension");
  const std::size_t n = A1.rows();
  Plant plant(Mat(n, n), Mat::identity(n));
  DelaySet delays({0, 1});
  DepController ctrl;
  Mat K = hconcat(A1, A2);
  ctrl.gains.emplace(0, K);
  ctrl.gains.emplace(1, K);
  return HardnessGadget{std::move(plant), std::move(delays), std::move(ctrl)};
}

SwitchingSystem build_gadget_system(const Mat& A1, const Mat& A2) {
  if (!A1.is_square() || !A2.is_square() || A1.rows() != A2.rows())
    throw ShapeError("hardness gadget: A1 and A2 must be square of equal dimension");
  const std::size_t n = A1.rows();
  Mat m0(2 * n, 2 * n);
  m0.set_block(0, 0, A1);
  m0.set_block(0, n, A2);
  Mat m1(2 * n, 2 * n);
  m1.set_block(n, 0, A1);
  m1.set_block(n, n, A2);
  return make_switching_system({0, 1}, {m0, m1}, dep_layout(n, n, 1));
}

}  // namespace swidel
