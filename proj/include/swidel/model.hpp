#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "swidel/matrix.hpp"

namespace swidel {

struct InvalidDelayError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Discrete-time LTI plant x(t+1) = A x(t) + B u(t).
struct Plant {
  Mat A;
  Mat B;

  Plant(Mat a, Mat b);
  std::size_t n() const { return A.rows(); }
  std::size_t m() const { return B.cols(); }
};

/// Finite set of routing delays, kept sorted and duplicate-free.
class DelaySet {
 public:
  explicit DelaySet(std::vector<int> delays);

  const std::vector<int>& delays() const { return delays_; }
  int d_max() const { return delays_.back(); }
  std::size_t size() const { return delays_.size(); }
  bool contains(int d) const;
  std::size_t index_of(int d) const;  // throws InvalidDelayError

 private:
  std::vector<int> delays_;
};

/// One gain per delay; K(d) acts on (x, u_1, ..., u_dmax).
struct DepController {
  std::map<int, Mat> gains;
};

/// Single gain acting on (x, v(t-dmax), ..., v(t-1)); block layout
/// (K_0 | K_1 | ... | K_dmax) with K_0 of width n and each K_s of width m.
struct IndepController {
  Mat K;
};

/// Finite matrix set indexed by delay, all square of the same dimension,
/// with per-coordinate labels describing the extended state layout.
struct SwitchingSystem {
  std::vector<int> delays;        // ascending
  std::vector<Mat> matrices;      // parallel to delays
  std::size_t dim = 0;
  std::vector<std::string> layout;

  const Mat& matrix_for(int d) const;
  std::size_t index_of(int d) const;  // throws InvalidDelayError
  std::size_t size() const { return matrices.size(); }
};

SwitchingSystem make_switching_system(std::vector<int> delays, std::vector<Mat> matrices,
                                      std::vector<std::string> layout = {});

std::vector<std::string> dep_layout(std::size_t n, std::size_t m, int d_max);
std::vector<std::string> indep_layout(std::size_t n, std::size_t m, int d_max);

/// Closed loop of a delay-dependent controller on the extended state
/// (x, u_1, ..., u_dmax): M_d = base + E(d) K(d), where the base carries
/// the plant row (A B 0 ... 0) and the queue shift, and E(d) injects the
/// controller output at slot d (through B when d = 0).
SwitchingSystem build_dep_closed_loop(const Plant& plant, const DelaySet& delays,
                                      const DepController& ctrl);

/// Closed loop of a delay-independent controller on the extended state
/// (x, u_1, ..., u_dmax, v(t-dmax), ..., v(t-1)); one matrix per delay.
SwitchingSystem build_indep_closed_loop(const Plant& plant, const DelaySet& delays,
                                        const IndepController& ctrl);

/// Three-dimensional fixture for the scalar memory-of-x controller
/// v(t) = k1 x(t-1) + k2 x(t), on the state (x(t-1), x(t), u_1(t)).
SwitchingSystem build_example2(double a, double b, double k1, double k2);

struct HardnessGadget {
  Plant plant;
  DelaySet delays;
  DepController controller;
};

/// Embeds an arbitrary two-matrix semigroup {A1, A2} into a switched-delay
/// instance: plant (A = 0, B = I), D = {0, 1}, K(0) = K(1) = (A1 | A2).
HardnessGadget build_hardness_gadget(const Mat& A1, const Mat& A2);

/// The canonical 2n-dimensional two-block embedding of {A1, A2}:
/// M_0 = [[A1, A2], [0, 0]], M_1 = [[0, 0], [A1, A2]]. Products of these
/// matrices carry ordered products of A1/A2 in their nonzero blocks.
SwitchingSystem build_gadget_system(const Mat& A1, const Mat& A2);

}  // namespace swidel
