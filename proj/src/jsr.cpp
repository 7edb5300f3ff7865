#include "swidel/jsr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "parallel.hpp"

namespace swidel {

namespace {

// Fixed expansion batch per round. Exploration runs in bulk-synchronous
// rounds: a deterministic batch is popped, children are evaluated (possibly
// in parallel), and results merge in batch order. Bounds and the explored
// count therefore do not depend on the worker count.
constexpr std::size_t kBatch = 32;

struct Node {
  std::vector<std::uint8_t> word;  // matrix indices
  Mat prod;
  double tmin;  // min over prefixes of ||prefix||^(1/len)
};

using NodePtr = std::unique_ptr<Node>;

// Max-heap on tmin; ties prefer the lexicographically smaller word.
bool heap_less(const NodePtr& a, const NodePtr& b) {
  if (a->tmin != b->tmin) return a->tmin < b->tmin;
  return a->word > b->word;
}

struct ChildEval {
  Mat prod;
  double norm_root;
  double rho_root;
};

struct TreeResult {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::uint8_t> witness;
  std::uint64_t explored = 0;
  bool stopped = false;  // the stop predicate fired
};

// Gripenberg-style best-first branch-and-bound over the product tree of
// `mats` (already in the working frame). `stop` sees bounds in that frame.
// When `plain_mats` is given (a similarity-transformed run), lower-bound
// improvements are re-evaluated on the untransformed products so the
// reported lower and witness are exact for the original set; the transform
// only shapes the norms used for pruning.
TreeResult run_tree(const std::vector<Mat>& mats, const std::vector<Mat>* plain_mats,
                    double delta, std::uint64_t budget, int threads,
                    const std::function<bool(double, double)>& stop,
                    std::vector<std::pair<double, double>>* trace, double trace_scale,
                    double seed_lower, std::vector<std::uint8_t> seed_witness) {
  const std::size_t nmat = mats.size();
  std::vector<NodePtr> heap;
  double lower = seed_lower;
  double pruned_sup = 0.0;
  std::vector<std::uint8_t> witness = std::move(seed_witness);
  std::uint64_t explored = 0;

  auto plain_rho_root = [&](const std::vector<std::uint8_t>& word) {
    Mat prod = (*plain_mats)[word.front()];
    for (std::size_t i = 1; i < word.size(); ++i) prod = prod * (*plain_mats)[word[i]];
    return std::pow(spectral_radius(prod), 1.0 / static_cast<double>(word.size()));
  };
  auto improve_lower = [&](const std::vector<std::uint8_t>& word, double rho_root) {
    if (rho_root <= lower) return;
    if (plain_mats) {
      rho_root = plain_rho_root(word);
      if (rho_root <= lower) return;
    }
    lower = rho_root;
    witness = word;
  };

  auto upper_now = [&]() {
    double u = pruned_sup;
    if (!heap.empty()) u = std::max(u, heap.front()->tmin);
    return u;
  };
  auto record = [&]() {
    if (trace)
      trace->emplace_back(std::max(lower, 0.0) * trace_scale, upper_now() * trace_scale);
  };

  for (std::size_t j = 0; j < nmat; ++j) {
    auto node = std::make_unique<Node>();
    node->word = {static_cast<std::uint8_t>(j)};
    node->prod = mats[j];
    node->tmin = op_norm(node->prod);
    ++explored;
    improve_lower(node->word, spectral_radius(node->prod));
    if (node->tmin <= lower + delta) {
      pruned_sup = std::max(pruned_sup, node->tmin);
    } else {
      heap.push_back(std::move(node));
      std::push_heap(heap.begin(), heap.end(), heap_less);
    }
  }
  record();

  TreeResult out;
  auto finish = [&](bool via_stop) {
    out.lower = std::max(lower, 0.0);
    out.upper = upper_now();
    out.explored = explored;
    out.stopped = via_stop;
    out.witness = witness;
    return out;
  };

  if (stop && stop(std::max(lower, 0.0), upper_now())) return finish(true);

  std::vector<NodePtr> batch;
  std::vector<std::vector<ChildEval>> evals;
  while (true) {
    // Pop a deterministic batch: lazily prune stale leaves, stop reserving
    // expansions once their children would overrun the budget.
    batch.clear();
    while (batch.size() < kBatch && !heap.empty()) {
      if (heap.front()->tmin <= lower + delta) {
        pruned_sup = std::max(pruned_sup, heap.front()->tmin);
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        heap.pop_back();
        continue;
      }
      if (explored + nmat > budget) break;
      std::pop_heap(heap.begin(), heap.end(), heap_less);
      batch.push_back(std::move(heap.back()));
      heap.pop_back();
      explored += nmat;
    }
    if (batch.empty()) return finish(false);

    evals.assign(batch.size(), {});
    detail::parallel_for(batch.size(), threads, [&](std::size_t i) {
      const Node& parent = *batch[i];
      const double len = static_cast<double>(parent.word.size()) + 1.0;
      auto& slots = evals[i];
      slots.resize(nmat);
      for (std::size_t j = 0; j < nmat; ++j) {
        slots[j].prod = parent.prod * mats[j];
        slots[j].norm_root = std::pow(op_norm(slots[j].prod), 1.0 / len);
        slots[j].rho_root = std::pow(spectral_radius(slots[j].prod), 1.0 / len);
      }
    });

    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t j = 0; j < nmat; ++j) {
        ChildEval& ce = evals[i][j];
        if (ce.rho_root > lower) {
          std::vector<std::uint8_t> word = batch[i]->word;
          word.push_back(static_cast<std::uint8_t>(j));
          improve_lower(word, ce.rho_root);
        }
        const double tmin = std::min(batch[i]->tmin, ce.norm_root);
        if (tmin <= lower + delta) {
          pruned_sup = std::max(pruned_sup, tmin);
        } else {
          auto node = std::make_unique<Node>();
          node->word = batch[i]->word;
          node->word.push_back(static_cast<std::uint8_t>(j));
          node->prod = std::move(ce.prod);
          node->tmin = tmin;
          heap.push_back(std::move(node));
          std::push_heap(heap.begin(), heap.end(), heap_less);
        }
      }
    }
    record();
    if (stop && stop(std::max(lower, 0.0), upper_now())) return finish(true);
    if (heap.empty()) return finish(false);
  }
}

bool cholesky(const Mat& x, Mat* l_out) {
  const std::size_t n = x.rows();
  Mat l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = x(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      if (i == j) {
        if (acc <= 0.0) return false;
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  *l_out = std::move(l);
  return true;
}

// Lᵀ M L⁻ᵀ: the Euclidean norm of the result is the X-ellipsoid norm of M.
Mat similarity_transform(const Mat& l, const Mat& m) {
  const std::size_t n = m.rows();
  Mat y(n, n);  // solves Y Lᵀ = M by forward substitution per row
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= y(i, k) * l(j, k);
      y(i, j) = acc / l(j, j);
    }
  }
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = i; k < n; ++k) acc += l(k, i) * y(k, j);
      out(i, j) = acc;
    }
  return out;
}

// Averaged Lyapunov fixed point X = I + (1/(|D| r²)) Σ_d M_dᵀ X M_d.
// Converges whenever the mean-square joint rate is below r, which holds
// for r slightly above the JSR. Any partial iterate is SPD, so a capped
// run still yields a valid ellipsoidal norm.
bool lyapunov_shape(const std::vector<Mat>& mats, double r, Mat* x_out) {
  const std::size_t n = mats.front().rows();
  const double w = 1.0 / (static_cast<double>(mats.size()) * r * r);
  Mat x = Mat::identity(n);
  for (int it = 0; it < 400; ++it) {
    Mat next = Mat::identity(n);
    for (const Mat& m : mats) {
      Mat mtxm = transpose(m) * (x * m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) next(i, j) += w * mtxm(i, j);
    }
    const double diff = max_abs_diff(next, x);
    const double mag = max_abs(next);
    x = std::move(next);
    if (mag > 1e13) return false;  // r below the mean-square rate
    if (diff <= 1e-13 * std::max(1.0, mag)) break;
  }
  *x_out = std::move(x);
  return true;
}

struct Prepared {
  std::vector<Mat> work;     // deduped, normalized, preconditioned
  std::vector<Mat> plain;    // deduped, normalized only
  std::vector<int> labels;   // delay labels parallel to the matrix lists
  double scale = 1.0;        // multiply frame bounds by this
  bool zero_set = false;
};

Prepared prepare(const SwitchingSystem& sys) {
  Prepared p;
  // Identical matrices generate identical subtrees; keep the first label.
  for (std::size_t i = 0; i < sys.size(); ++i) {
    bool dup = false;
    for (const Mat& kept : p.plain)
      if (kept == sys.matrices[i]) {
        dup = true;
        break;
      }
    if (!dup) {
      p.plain.push_back(sys.matrices[i]);
      p.labels.push_back(sys.delays[i]);
    }
  }
  double s = 0.0;
  for (const Mat& m : p.plain) s = std::max(s, op_norm(m));
  if (s == 0.0) {
    p.zero_set = true;
    p.scale = 1.0;
    p.work = p.plain;
    return p;
  }
  p.scale = s;
  for (Mat& m : p.plain) m = (1.0 / s) * m;
  p.work = p.plain;
  return p;
}

// Builds the ellipsoidal working frame around a growth-rate guess.
void precondition(Prepared& p, double lower_guess) {
  if (p.zero_set) return;
  double r = std::max(lower_guess, 0.02) * 1.02;
  for (int tries = 0; tries < 30; ++tries, r *= 1.6) {
    Mat x;
    if (!lyapunov_shape(p.plain, r, &x)) continue;
    Mat l;
    if (!cholesky(x, &l)) continue;
    std::vector<Mat> transformed;
    transformed.reserve(p.plain.size());
    bool ok = true;
    try {
      for (const Mat& m : p.plain) transformed.push_back(similarity_transform(l, m));
    } catch (const NumericError&) {
      ok = false;
    }
    if (ok) p.work = std::move(transformed);
    return;
  }
}

struct EngineResult {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<int> witness;
  std::uint64_t explored = 0;
};

EngineResult refine_jsr(const SwitchingSystem& sys, double delta, std::uint64_t budget,
                        int threads, const std::function<bool(double, double)>& stop,
                        std::vector<std::pair<double, double>>* trace) {
  if (sys.size() == 0) throw std::invalid_argument("jsr: empty switching system");
  if (budget == 0) throw std::invalid_argument("jsr: budget must be positive");

  Prepared p = prepare(sys);
  const double s = p.scale;
  const double delta_s = delta / s;
  auto scaled_stop = [&](double lo, double up) { return stop && stop(lo * s, up * s); };

  auto to_result = [&](const TreeResult& t) {
    EngineResult out;
    out.lower = t.lower * s;
    out.upper = t.upper * s;
    out.explored = t.explored;
    for (std::uint8_t j : t.witness) out.witness.push_back(p.labels[j]);
    return out;
  };

  // First pass in the plain frame; cheap cases end here and its best
  // product seeds the preconditioned run.
  const std::uint64_t boot_budget = std::min<std::uint64_t>(512, budget);
  TreeResult boot = run_tree(p.plain, nullptr, delta_s, boot_budget, threads, scaled_stop,
                             nullptr, s, -1.0, {});
  if (boot.stopped || boot.explored < boot_budget || boot_budget == budget) {
    EngineResult out = to_result(boot);
    if (trace) trace->emplace_back(out.lower, out.upper);
    return out;
  }

  precondition(p, boot.lower);
  TreeResult main = run_tree(p.work, &p.plain, delta_s, budget - boot.explored, threads,
                             scaled_stop, trace, s, boot.lower, boot.witness);
  main.explored += boot.explored;
  main.upper = std::min(main.upper, boot.upper);  // both frames bound the JSR
  return to_result(main);
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

JsrBounds to_bounds(const EngineResult& r, double eps) {
  JsrBounds b;
  b.lower = r.lower;
  b.upper = r.upper;
  b.witness = r.witness;
  b.explored = r.explored;
  b.converged = r.upper - r.lower <= eps;
  return b;
}

Stability classify(double lower, double upper) {
  if (upper < 1.0) return Stability::Stable;
  if (lower > 1.0) return Stability::Unstable;
  return Stability::Undetermined;
}

GrowthVerdict make_verdict(const EngineResult& r, double eps, bool up_cert, bool lo_cert,
                           GrowthVerdict::Kind kind) {
  GrowthVerdict v;
  v.kind = kind;
  v.upper_certified = up_cert;
  v.lower_certified = lo_cert;
  v.bounds = to_bounds(r, eps);
  v.rate = kind == GrowthVerdict::Kind::UpperCertified   ? r.upper
           : kind == GrowthVerdict::Kind::LowerCertified ? r.lower
                                                         : 0.0;
  v.stability = classify(r.lower, r.upper);
  if (v.stability == Stability::Undetermined) v.undetermined_eps = r.upper - r.lower;
  return v;
}

}  // namespace

JsrBounds jsr_bounds(const SwitchingSystem& sys, const JsrOptions& opts) {
  check_eps(opts.eps);
  const int threads = detail::resolve_threads(opts.threads, opts.deterministic);
  const double eps = opts.eps;
  EngineResult r = refine_jsr(
      sys, eps, opts.budget, threads,
      [eps](double lo, double up) { return up - lo <= eps; }, opts.trace);
  return to_bounds(r, eps);
}

JsrBounds jsr_bounds(const SwitchingSystem& sys, double eps, std::uint64_t budget) {
  JsrOptions opts;
  opts.eps = eps;
  opts.budget = budget;
  return jsr_bounds(sys, opts);
}

GrowthVerdict decide_growth(const SwitchingSystem& sys, double r, const JsrOptions& opts) {
  if (!(r > 0.0)) throw std::invalid_argument("decide_growth: rate must be positive");
  check_eps(opts.eps);
  const int threads = detail::resolve_threads(opts.threads, opts.deterministic);
  const double eps = opts.eps;
  EngineResult res = refine_jsr(
      sys, eps, opts.budget, threads,
      [r, eps](double lo, double up) { return up < r + eps || lo > r - eps; }, opts.trace);
  const bool up_cert = res.upper < r + eps;
  const bool lo_cert = res.lower > r - eps;
  GrowthVerdict::Kind kind = GrowthVerdict::Kind::Bracket;
  if (up_cert)
    kind = GrowthVerdict::Kind::UpperCertified;
  else if (lo_cert)
    kind = GrowthVerdict::Kind::LowerCertified;
  return make_verdict(res, eps, up_cert, lo_cert, kind);
}

GrowthVerdict decide_growth(const SwitchingSystem& sys, double r, double eps,
                            std::uint64_t budget) {
  JsrOptions opts;
  opts.eps = eps;
  opts.budget = budget;
  return decide_growth(sys, r, opts);
}

GrowthVerdict decide_stability(const SwitchingSystem& sys, const JsrOptions& opts) {
  check_eps(opts.eps);
  const int threads = detail::resolve_threads(opts.threads, opts.deterministic);
  const double eps = opts.eps;
  EngineResult res = refine_jsr(
      sys, eps, opts.budget, threads,
      [eps](double lo, double up) { return up < 1.0 || lo > 1.0 || up - lo <= eps; },
      opts.trace);
  GrowthVerdict::Kind kind = GrowthVerdict::Kind::Bracket;
  if (res.upper < 1.0)
    kind = GrowthVerdict::Kind::UpperCertified;
  else if (res.lower > 1.0)
    kind = GrowthVerdict::Kind::LowerCertified;
  return make_verdict(res, eps, res.upper < 1.0, res.lower > 1.0, kind);
}

GrowthVerdict decide_stability(const SwitchingSystem& sys, double eps, std::uint64_t budget) {
  JsrOptions opts;
  opts.eps = eps;
  opts.budget = budget;
  return decide_stability(sys, opts);
}

}  // namespace swidel
