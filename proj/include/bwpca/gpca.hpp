#ifndef BWPCA_GPCA_HPP
#define BWPCA_GPCA_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "bwpca/dataset.hpp"
#include "bwpca/geodesic.hpp"
#include "bwpca/rotation.hpp"
#include "bwpca/tpca.hpp"

namespace bwpca {

struct SolverConfig {
  double epsilon = kDefaultEpsilon;
  int restarts = 5;
  int outer_max_iters = 200;
  double outer_tol = 1e-8;  // relative cost decrease
  DescentConfig inner;      // rotation-block descent
  std::uint64_t seed = 0;
};

/// A fitted geodesic principal component.
struct PrincipalComponent {
  int order;
  GeodesicSegment segment;
  std::vector<Rotation> rotations;
  std::vector<double> projection_times;  // clipped
  double cost;
  std::optional<double> intersection_time;
  std::vector<Matrix> frame;  // lifted previous directions, horizontal at base
  bool converged;
  std::vector<double> objective_trace;
};

/// The lifted objective F of the alternating scheme: sum over data of the
/// squared Frobenius distance to the clipped projection point on the line
/// t -> A + tX.
inline double objective_F(const FiberRep& a, const Matrix& x,
                          const std::vector<Rotation>& rotations,
                          const GaussianDataset& data, double epsilon) {
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("objective_F: direction must have unit norm");
  const auto hc = horizontal_check(a, x, 1e-7);
  if (!hc.horizontal)
    throw std::invalid_argument("objective_F: direction not horizontal, residual = " +
                                std::to_string(hc.residual));
  if (static_cast<int>(rotations.size()) != data.size())
    throw std::invalid_argument("objective_F: one rotation per datum required");
  const auto [lo, hi] = admissible_interval(a, x, epsilon);
  double acc = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Matrix b = data.roots()[i].mat() * rotations[i].mat();
    double t = ((b - a.mat()).array() * x.array()).sum();
    t = std::min(std::max(t, lo), hi);
    acc += (a.mat() + t * x - b).squaredNorm();
  }
  return acc;
}

namespace detail {

/// Mutable state of one alternating run. B_i = Sigma_i^{1/2} Q_i.
struct SolverState {
  Matrix a;                    // base point in GL_d
  Matrix x;                    // unit horizontal direction
  std::vector<Matrix> q;       // per-datum rotations
  double t_lo = 0, t_hi = 0;   // admissible interval of (a, x)
  double cost = std::numeric_limits<double>::infinity();
};

inline void update_interval(SolverState& st, double epsilon) {
  std::tie(st.t_lo, st.t_hi) =
      admissible_interval(FiberRep(st.a), st.x, epsilon);
}

inline double clipped_time(const SolverState& st, const Matrix& b) {
  const double t = ((b - st.a).array() * st.x.array()).sum();
  return std::min(std::max(t, st.t_lo), st.t_hi);
}

inline double state_cost(const SolverState& st, const GaussianDataset& data) {
  double acc = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const Matrix b = data.roots()[i].mat() * st.q[i];
    const double t = clipped_time(st, b);
    acc += (st.a + t * st.x - b).squaredNorm();
  }
  return acc;
}

/// Per-datum cost as a function of the datum's rotation alone.
inline double datum_cost(const SolverState& st, const Matrix& root,
                         const Matrix& q) {
  const Matrix b = root * q;
  const double t = clipped_time(st, b);
  return (st.a + t * st.x - b).squaredNorm();
}

/// Step 1: minimize F over the rotations (Q_i), line fixed. Each block is a
/// Riemannian descent warm-started at the better of the current rotation and
/// the Procrustes solution at the current projection time; never increases
/// the per-datum cost.
inline void step_rotations(SolverState& st, const GaussianDataset& data,
                           const DescentConfig& cfg) {
  for (int i = 0; i < data.size(); ++i) {
    const Matrix& root = data.roots()[i].mat();
    Matrix q = st.q[i];
    double c = datum_cost(st, root, q);
    {
      const double t = clipped_time(st, root * q);
      const Rotation cand = procrustes_init(st.a + t * st.x, root);
      const double cc = datum_cost(st, root, cand.mat());
      if (cc < c) {
        q = cand.mat();
        c = cc;
      }
    }
    auto objective = [&](const Rotation& r) { return datum_cost(st, root, r.mat()); };
    EuclideanGradient grad = [&](const Rotation& r) {
      const Matrix b = root * r.mat();
      const double t = clipped_time(st, b);
      // Envelope: the t-derivative term vanishes (unclipped) or t is locally
      // constant (clipped).
      return Matrix(-2.0 * root.transpose() * (st.a + t * st.x - b));
    };
    const auto res = rotation_descent(objective, Rotation(q), cfg, &grad);
    if (res.cost <= c) st.q[i] = res.q.mat();
  }
}

/// Direction from a symmetric parameter K: normalize K A after removing the
/// components along the frame vectors (all horizontal at A, so the result
/// stays horizontal).
inline Matrix constrained_direction(const Matrix& k, const Matrix& a,
                                    const std::vector<Matrix>& frame) {
  Matrix y = symmetrize(k) * a;
  std::vector<Matrix> ortho;
  for (const auto& w : frame) {
    Matrix v = w;
    for (const auto& u : ortho) v -= (v.array() * u.array()).sum() * u;
    const double nrm = v.norm();
    if (nrm > 1e-12) ortho.push_back(v / nrm);
  }
  for (const auto& u : ortho) y -= (y.array() * u.array()).sum() * u;
  const double nrm = y.norm();
  if (nrm <= 1e-10)
    throw std::runtime_error("constrained_direction: direction collapsed onto frame");
  return y / nrm;
}

/// Step 2 for the first component: projected gradient on (A, K) with X = KA
/// renormalized, Armijo backtracking, analytic gradients. Clipped residuals
/// contribute no t-derivative.
inline void step_line_first(SolverState& st, const GaussianDataset& data,
                            double epsilon, int max_iters = 60) {
  const int n = data.size();
  Matrix a = st.a;
  Matrix k = symmetrize(st.x * a.inverse());
  auto eval = [&](const Matrix& ca, const Matrix& ck, SolverState& out) -> double {
    Matrix y = symmetrize(ck) * ca;
    const double nrm = y.norm();
    if (nrm <= 1e-12) return std::numeric_limits<double>::infinity();
    SolverState cand = st;
    cand.a = ca;
    cand.x = y / nrm;
    try {
      update_interval(cand, epsilon);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
    const double c = state_cost(cand, data);
    out = cand;
    return c;
  };

  SolverState cur = st;
  double cost = st.cost;
  for (int it = 0; it < max_iters; ++it) {
    // Gradients at (a, k).
    Matrix y = symmetrize(k) * a;
    const double ynorm = y.norm();
    const Matrix x = y / ynorm;
    Matrix gx = Matrix::Zero(a.rows(), a.cols());
    Matrix ga = Matrix::Zero(a.rows(), a.cols());
    for (int i = 0; i < n; ++i) {
      const Matrix b = data.roots()[i].mat() * cur.q[i];
      const double t = clipped_time(cur, b);
      const Matrix r = cur.a + t * cur.x - b;
      ga += 2.0 * r;
      gx += 2.0 * t * r;
    }
    const Matrix gy = (gx - (gx.array() * x.array()).sum() * x) / ynorm;
    const Matrix grad_a = ga + symmetrize(k) * gy;
    const Matrix grad_k = symmetrize(gy * a.transpose());
    const double g2 = grad_a.squaredNorm() + grad_k.squaredNorm();
    if (std::sqrt(g2) < 1e-10 * (1.0 + cost)) break;

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 50; ++h) {
      SolverState cand;
      const double c = eval(a - step * grad_a, k - step * grad_k, cand);
      if (c <= cost - 1e-4 * step * g2) {
        a -= step * grad_a;
        k -= step * grad_k;
        cur = cand;
        cost = c;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (cost <= st.cost) {
    st = cur;
    st.cost = cost;
  }
}

/// Step 2 for constrained components (order >= 2): descent on the symmetric
/// parameter K with the base and frame fixed, finite-difference gradients.
inline void step_direction_constrained(SolverState& st, Matrix& k,
                                       const std::vector<Matrix>& frame,
                                       const GaussianDataset& data,
                                       double epsilon, int max_iters = 40) {
  const int d = static_cast<int>(st.a.rows());
  auto eval = [&](const Matrix& ck, SolverState& out) -> double {
    SolverState cand = st;
    try {
      cand.x = constrained_direction(ck, st.a, frame);
      update_interval(cand, epsilon);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
    const double c = state_cost(cand, data);
    out = cand;
    return c;
  };

  SolverState cur = st;
  double cost = st.cost;
  for (int it = 0; it < max_iters; ++it) {
    const double h = 1e-6 * (1.0 + k.norm());
    Matrix grad = Matrix::Zero(d, d);
    SolverState scratch;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Matrix kp = k, km = k;
        kp(i, j) += h;
        kp(j, i) = kp(i, j);
        km(i, j) -= h;
        km(j, i) = km(i, j);
        const double fp = eval(kp, scratch);
        const double fm = eval(km, scratch);
        if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
        const double der = (fp - fm) / (2.0 * h);
        grad(i, j) = der;
        grad(j, i) = der;
      }
    const double g2 = grad.squaredNorm();
    if (std::sqrt(g2) < 1e-10 * (1.0 + cost)) break;
    double step = 1.0;
    bool accepted = false;
    for (int hh = 0; hh < 50; ++hh) {
      SolverState cand;
      const double c = eval(k - step * grad, cand);
      if (c <= cost - 1e-4 * step * g2) {
        k -= step * grad;
        cur = cand;
        cost = c;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (cost <= st.cost) {
    st = cur;
    st.cost = cost;
  }
}

inline std::vector<double> clipped_times(const SolverState& st,
                                         const GaussianDataset& data) {
  std::vector<double> out(data.size());
  for (int i = 0; i < data.size(); ++i)
    out[i] = clipped_time(st, data.roots()[i].mat() * st.q[i]);
  return out;
}

/// Orientation convention: flip X when the projection times trend downward
/// against the dataset index.
inline void fix_orientation(SolverState& st, const GaussianDataset& data,
                            double epsilon) {
  const auto times = clipped_times(st, data);
  const int n = static_cast<int>(times.size());
  double mean_t = 0.0;
  for (double t : times) mean_t += t;
  mean_t /= n;
  double slope = 0.0;
  for (int i = 0; i < n; ++i) slope += (i - 0.5 * (n - 1)) * (times[i] - mean_t);
  if (slope < 0) {
    st.x = -st.x;
    update_interval(st, epsilon);
  }
}

inline Matrix random_symmetric(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = gauss(rng);
  return m;
}

inline void init_rotations(SolverState& st, const GaussianDataset& data) {
  st.q.clear();
  for (int i = 0; i < data.size(); ++i)
    st.q.push_back(procrustes_init(st.a, data.roots()[i].mat()).mat());
}

inline PrincipalComponent finalize(SolverState st, const GaussianDataset& data,
                                   int order, double epsilon, bool converged,
                                   std::vector<double> trace,
                                   std::optional<double> intersection,
                                   std::vector<Matrix> frame) {
  fix_orientation(st, data, epsilon);
  GeodesicSegment seg{FiberRep(st.a), st.x, st.t_lo, st.t_hi, epsilon};
  std::vector<Rotation> rots;
  for (const auto& q : st.q) rots.emplace_back(q);
  auto times = clipped_times(st, data);
  const double cost = state_cost(st, data);
  return PrincipalComponent{order,  std::move(seg), std::move(rots),
                            std::move(times), cost,  intersection,
                            std::move(frame), converged, std::move(trace)};
}

}  // namespace detail

/// First geodesic principal component by best-of-restarts alternating
/// minimization. Restart 0 lifts the TPCA solution; later restarts start
/// from data-pair chords with random horizontal perturbations.
inline PrincipalComponent fit_first_component(const GaussianDataset& data,
                                              const SolverConfig& cfg = {}) {
  using namespace detail;
  const int d = data.dim();
  std::mt19937_64 rng(cfg.seed);

  const TpcaResult tpca = fit_tpca(data, 1);
  const Matrix abar = spd_sqrt(tpca.barycenter).mat();

  SolverState best;
  bool best_converged = false;
  std::vector<double> best_trace;

  for (int r = 0; r < std::max(cfg.restarts, 1); ++r) {
    SolverState st;
    if (r == 0) {
      st.a = abar;
      Matrix y = tpca.principal_directions[0] * abar;
      if (y.norm() <= 1e-12) y = abar;  // fully degenerate dataset
      st.x = y / y.norm();
    } else {
      std::uniform_int_distribution<int> pick(0, data.size() - 1);
      int i = pick(rng), j = pick(rng);
      st.a = data.roots()[i].mat();
      Matrix y;
      if (i == j) {
        y = random_symmetric(d, rng) * st.a;
      } else {
        const Matrix t =
            monge_map(data.matrices()[i], data.matrices()[j]).mat();
        y = (t - Matrix::Identity(d, d)) * st.a +
            0.1 * random_symmetric(d, rng) * st.a;
      }
      if (y.norm() <= 1e-12) y = random_symmetric(d, rng) * st.a;
      st.x = y / y.norm();
    }
    try {
      update_interval(st, cfg.epsilon);
    } catch (const std::exception&) {
      continue;  // degenerate start
    }
    init_rotations(st, data);
    st.cost = state_cost(st, data);

    std::vector<double> trace{st.cost};
    bool converged = false;
    for (int it = 0; it < cfg.outer_max_iters; ++it) {
      const double prev = st.cost;
      step_rotations(st, data, cfg.inner);
      st.cost = state_cost(st, data);
      step_line_first(st, data, cfg.epsilon);
      trace.push_back(st.cost);
      if (prev - st.cost < cfg.outer_tol * std::max(prev, 1e-300)) {
        converged = true;
        break;
      }
    }
    if (st.cost < best.cost) {
      best = st;
      best_converged = converged;
      best_trace = std::move(trace);
    }
  }
  if (!std::isfinite(best.cost))
    throw std::runtime_error("fit_first_component: all restarts failed");
  return finalize(std::move(best), data, 1, cfg.epsilon, best_converged,
                  std::move(best_trace), std::nullopt, {});
}

namespace detail {

/// Shared machinery for components of order >= 2: base constrained to the
/// fiber over the crossing point, direction orthogonal to the frame lifts.
struct ConstrainedFit {
  SolverState st;
  Matrix k;                   // symmetric direction parameter
  Matrix rot;                 // R (rotation block of this component)
  double t_star = 0.0;        // only used for order 2
  std::vector<Matrix> frame;  // current frame lifts at st.a
  bool converged = false;
  std::vector<double> trace;
};

}  // namespace detail

/// Second component: orthogonal intersection with the first. Alternates over
/// the rotations (Q_i), the crossing parameters (R*, t*), and the direction
/// parameter. t* is optimized by golden-section search over the first
/// component's interval restricted to the span of its projection times.
inline PrincipalComponent fit_second_component(const GaussianDataset& data,
                                               const PrincipalComponent& first,
                                               const SolverConfig& cfg = {}) {
  using namespace detail;
  const int d = data.dim();
  if (d * (d + 1) / 2 < 2)
    throw std::runtime_error("fit_second_component: no remaining horizontal directions");
  std::mt19937_64 rng(cfg.seed + 1);

  const Matrix& a1 = first.segment.base.mat();
  const Matrix& x1 = first.segment.direction;

  // Finite search bracket for t*: the data's projection span inside the
  // admissible interval.
  double span_lo = *std::min_element(first.projection_times.begin(),
                                     first.projection_times.end());
  double span_hi = *std::max_element(first.projection_times.begin(),
                                     first.projection_times.end());
  if (span_hi - span_lo < 1e-9) {
    span_lo -= 1.0;
    span_hi += 1.0;
  }
  span_lo = std::max(span_lo, first.segment.t_min);
  span_hi = std::min(span_hi, first.segment.t_max);

  const TpcaResult tpca = fit_tpca(data, std::min(2, d * (d + 1) / 2));

  auto assemble = [&](double tstar, const Matrix& rot) {
    const Matrix a2 = (a1 + tstar * x1) * rot;
    const Matrix w = x1 * rot;  // horizontal at a2
    return std::pair<Matrix, Matrix>(a2, w);
  };

  ConstrainedFit best;
  best.st.cost = std::numeric_limits<double>::infinity();

  for (int r = 0; r < std::max(cfg.restarts, 1); ++r) {
    ConstrainedFit f;
    f.rot = Matrix::Identity(d, d);
    // Initial crossing guess: the median projection time.
    {
      std::vector<double> ts = first.projection_times;
      std::nth_element(ts.begin(), ts.begin() + ts.size() / 2, ts.end());
      f.t_star = std::min(std::max(ts[ts.size() / 2], span_lo), span_hi);
    }
    auto [a2, w] = assemble(f.t_star, f.rot);
    f.st.a = a2;
    f.frame = {w};
    if (r == 0 && static_cast<int>(tpca.principal_directions.size()) > 1) {
      f.k = tpca.principal_directions[1];
    } else {
      f.k = random_symmetric(d, rng);
    }
    try {
      f.st.x = constrained_direction(f.k, f.st.a, f.frame);
      update_interval(f.st, cfg.epsilon);
    } catch (const std::exception&) {
      continue;
    }
    init_rotations(f.st, data);
    f.st.cost = state_cost(f.st, data);
    f.trace = {f.st.cost};

    for (int it = 0; it < cfg.outer_max_iters; ++it) {
      const double prev = f.st.cost;
      step_rotations(f.st, data, cfg.inner);
      f.st.cost = state_cost(f.st, data);

      // Block (R*, t*): golden-section on t*, Riemannian descent on R*.
      auto cost_at = [&](double tstar, const Rotation& rot) -> double {
        SolverState cand = f.st;
        auto [ca, cw] = assemble(tstar, rot.mat());
        cand.a = ca;
        try {
          cand.x = constrained_direction(f.k, ca, {cw});
          update_interval(cand, cfg.epsilon);
        } catch (const std::exception&) {
          return std::numeric_limits<double>::infinity();
        }
        return state_cost(cand, data);
      };
      {
        const Rotation rot_cur{f.rot};
        const double gr = 0.6180339887498949;
        double lo = span_lo, hi = span_hi;
        double c = hi - gr * (hi - lo), dd = lo + gr * (hi - lo);
        double fc = cost_at(c, rot_cur), fd = cost_at(dd, rot_cur);
        for (int gs = 0; gs < 60 && hi - lo > 1e-10 * (1 + std::abs(hi)); ++gs) {
          if (fc < fd) {
            hi = dd;
            dd = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = cost_at(c, rot_cur);
          } else {
            lo = c;
            c = dd;
            fc = fd;
            dd = lo + gr * (hi - lo);
            fd = cost_at(dd, rot_cur);
          }
        }
        const double t_cand = 0.5 * (lo + hi);
        if (cost_at(t_cand, rot_cur) < f.st.cost) f.t_star = t_cand;
      }
      {
        auto objective = [&](const Rotation& rot) { return cost_at(f.t_star, rot); };
        const auto res =
            rotation_descent(objective, Rotation(f.rot), cfg.inner);
        if (res.cost <= f.st.cost) f.rot = res.q.mat();
      }
      {
        auto [a2n, wn] = assemble(f.t_star, f.rot);
        SolverState cand = f.st;
        cand.a = a2n;
        try {
          cand.x = constrained_direction(f.k, a2n, {wn});
          update_interval(cand, cfg.epsilon);
          cand.cost = state_cost(cand, data);
          if (cand.cost <= f.st.cost) {
            f.st = cand;
            f.frame = {wn};
          }
        } catch (const std::exception&) {
        }
      }

      step_direction_constrained(f.st, f.k, f.frame, data, cfg.epsilon);
      f.trace.push_back(f.st.cost);
      if (prev - f.st.cost < cfg.outer_tol * std::max(prev, 1e-300)) {
        f.converged = true;
        break;
      }
    }
    if (f.st.cost < best.st.cost) best = std::move(f);
  }
  if (!std::isfinite(best.st.cost))
    throw std::runtime_error("fit_second_component: all restarts failed");
  return finalize(std::move(best.st), data, 2, cfg.epsilon, best.converged,
                  std::move(best.trace), best.t_star, std::move(best.frame));
}

/// Component k >= 3: base in the fiber over the crossing point pi(A_2),
/// direction orthogonal to the rotated lifts of all previous directions.
inline PrincipalComponent fit_higher_component(
    const GaussianDataset& data, const std::vector<PrincipalComponent>& previous,
    const SolverConfig& cfg = {}) {
  using namespace detail;
  const int d = data.dim();
  const int k_order = static_cast<int>(previous.size()) + 1;
  if (k_order < 3)
    throw std::invalid_argument("fit_higher_component: needs components 1..k-1, k >= 3");
  if (k_order > d * (d + 1) / 2)
    throw std::runtime_error("fit_higher_component: no remaining horizontal directions");
  std::mt19937_64 rng(cfg.seed + k_order);

  const PrincipalComponent& prev = previous.back();
  const Matrix& a_prev = prev.segment.base.mat();
  // Base frame at a_prev: previous frame lifts plus the previous direction.
  std::vector<Matrix> frame0 = prev.frame;
  frame0.push_back(prev.segment.direction);

  ConstrainedFit best;
  best.st.cost = std::numeric_limits<double>::infinity();

  const TpcaResult tpca =
      fit_tpca(data, std::min(k_order, d * (d + 1) / 2));

  for (int r = 0; r < std::max(cfg.restarts, 1); ++r) {
    ConstrainedFit f;
    f.rot = Matrix::Identity(d, d);
    f.st.a = a_prev;
    f.frame = frame0;
    if (r == 0 &&
        static_cast<int>(tpca.principal_directions.size()) >= k_order) {
      f.k = tpca.principal_directions[k_order - 1];
    } else {
      f.k = random_symmetric(d, rng);
    }
    try {
      f.st.x = constrained_direction(f.k, f.st.a, f.frame);
      update_interval(f.st, cfg.epsilon);
    } catch (const std::exception&) {
      continue;
    }
    init_rotations(f.st, data);
    f.st.cost = state_cost(f.st, data);
    f.trace = {f.st.cost};

    auto frame_at = [&](const Matrix& rot) {
      std::vector<Matrix> fr;
      fr.reserve(frame0.size());
      for (const auto& w : frame0) fr.push_back(w * rot);
      return fr;
    };

    for (int it = 0; it < cfg.outer_max_iters; ++it) {
      const double prev_cost = f.st.cost;
      step_rotations(f.st, data, cfg.inner);
      f.st.cost = state_cost(f.st, data);

      auto cost_at = [&](const Rotation& rot) -> double {
        SolverState cand = f.st;
        cand.a = a_prev * rot.mat();
        try {
          cand.x = constrained_direction(f.k, cand.a, frame_at(rot.mat()));
          update_interval(cand, cfg.epsilon);
        } catch (const std::exception&) {
          return std::numeric_limits<double>::infinity();
        }
        return state_cost(cand, data);
      };
      {
        const auto res = rotation_descent(cost_at, Rotation(f.rot), cfg.inner);
        if (res.cost <= f.st.cost) {
          f.rot = res.q.mat();
          SolverState cand = f.st;
          cand.a = a_prev * f.rot;
          try {
            cand.x = constrained_direction(f.k, cand.a, frame_at(f.rot));
            update_interval(cand, cfg.epsilon);
            cand.cost = state_cost(cand, data);
            if (cand.cost <= f.st.cost) {
              f.st = cand;
              f.frame = frame_at(f.rot);
            }
          } catch (const std::exception&) {
          }
        }
      }

      step_direction_constrained(f.st, f.k, f.frame, data, cfg.epsilon);
      f.trace.push_back(f.st.cost);
      if (prev_cost - f.st.cost < cfg.outer_tol * std::max(prev_cost, 1e-300)) {
        f.converged = true;
        break;
      }
    }
    if (f.st.cost < best.st.cost) best = std::move(f);
  }
  if (!std::isfinite(best.st.cost))
    throw std::runtime_error("fit_higher_component: all restarts failed");
  return finalize(std::move(best.st), data, k_order, cfg.epsilon,
                  best.converged, std::move(best.trace),
                  previous[1].intersection_time, std::move(best.frame));
}

struct FixedSegmentCost {
  double cost;
  std::vector<Rotation> rotations;
  std::vector<double> projection_times;  // clipped
};

/// Residual cost of a fixed geodesic segment: optimizes only the per-datum
/// rotations (the line stays put). This is the true objective value of any
/// externally supplied component, e.g. a lifted TPCA direction.
inline FixedSegmentCost fixed_segment_cost(const GeodesicSegment& seg,
                                           const GaussianDataset& data,
                                           const DescentConfig& inner = {},
                                           int max_sweeps = 100,
                                           double tol = 1e-12) {
  using namespace detail;
  SolverState st;
  st.a = seg.base.mat();
  st.x = seg.direction;
  st.t_lo = seg.t_min;
  st.t_hi = seg.t_max;
  init_rotations(st, data);
  st.cost = state_cost(st, data);
  for (int s = 0; s < max_sweeps; ++s) {
    const double prev = st.cost;
    step_rotations(st, data, inner);
    st.cost = state_cost(st, data);
    if (prev - st.cost < tol * std::max(prev, 1e-300)) break;
  }
  std::vector<Rotation> rots;
  for (const auto& q : st.q) rots.emplace_back(q);
  return {st.cost, std::move(rots), clipped_times(st, data)};
}

struct DispersionEntry {
  int order;
  double cost;
  double fraction;  // 1 - cost / total dispersion
};

struct DispersionReport {
  double total;  // sum_i BW_2^2(Sbar, Sigma_i)
  bool zero_dispersion;
  std::vector<DispersionEntry> entries;
};

inline DispersionReport explained_dispersion(
    const GaussianDataset& data,
    const std::vector<PrincipalComponent>& components) {
  const auto bary = bw_barycenter(data);
  double total = 0.0;
  for (const auto& s : data.matrices())
    total += bures_wasserstein_sq(bary.barycenter, s);
  DispersionReport rep{total, total < 1e-12 * data.size(), {}};
  for (const auto& c : components) {
    const double frac = rep.zero_dispersion ? 0.0 : 1.0 - c.cost / total;
    rep.entries.push_back({c.order, c.cost, frac});
  }
  return rep;
}

}  // namespace bwpca

#endif  // BWPCA_GPCA_HPP
