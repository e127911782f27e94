#include "fuvalkit/oracle.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace fuvalkit {
namespace {

constexpr double kInvPhi = 0.6180339887498949;
constexpr double kInf = std::numeric_limits<double>::infinity();

class LineSearcher {
 public:
  LineSearcher(const Objective& f, const OracleOptions& opts, std::size_t k)
      : f_(f), opts_(opts), trial_(k) {}

  std::size_t evaluations() const { return evals_; }

  double eval(std::span<const double> y) {
    ++evals_;
    return f_(y);
  }

  /// Minimizes t -> f(y + t u) over [lo, hi] (which contains 0). Returns the
  /// best t found; `fy` is f(y) on entry and the best value on exit.
  double minimize(std::span<const double> y, std::span<const double> u, double lo, double hi,
                  double h0, double& fy) {
    auto phi = [&](double t) {
      for (std::size_t k = 0; k < y.size(); ++k) trial_[k] = y[k] + t * u[k];
      return eval(trial_);
    };

    double a, b;
    const double fwd = std::min(h0, hi);
    const double f_fwd = fwd > 0.0 ? phi(fwd) : kInf;
    if (f_fwd < fy) {
      if (!expand(phi, 1.0, fwd, f_fwd, hi, a, b)) return hi_or_throw(phi, hi, fy);
    } else {
      const double bwd = std::max(-h0, lo);
      const double f_bwd = bwd < 0.0 ? phi(bwd) : kInf;
      if (f_bwd < fy) {
        if (!expand(phi, -1.0, -bwd, f_bwd, -lo, a, b)) return hi_or_throw(phi, lo, fy);
      } else {
        a = bwd;
        b = fwd;
      }
    }
    return golden(phi, a, b, fy);
  }

 private:
  // Walks t = sign * (step, 2 step, 4 step, ...) until f stops decreasing.
  // Returns false when the walk reaches the boundary `limit` still decreasing.
  template <typename Phi>
  bool expand(Phi& phi, double sign, double step, double f_step, double limit, double& a, double& b) {
    double prev = 0.0, cur = step, f_cur = f_step;
    while (true) {
      double next = 2.0 * cur;
      if (next >= limit) {
        next = limit;
        const double f_next = phi(sign * next);
        if (f_next < f_cur) return false;
        a = sign > 0 ? prev : -next;
        b = sign > 0 ? next : -prev;
        return true;
      }
      if (next > opts_.unbounded_step) throw OracleError("brute_force_minimize: objective unbounded below");
      const double f_next = phi(sign * next);
      if (f_next >= f_cur) {
        a = sign > 0 ? prev : -next;
        b = sign > 0 ? next : -prev;
        return true;
      }
      prev = cur;
      cur = next;
      f_cur = f_next;
    }
  }

  template <typename Phi>
  double hi_or_throw(Phi& phi, double boundary, double& fy) {
    if (!std::isfinite(boundary)) throw OracleError("brute_force_minimize: objective unbounded below");
    const double fb = phi(boundary);
    if (fb < fy) {
      fy = fb;
      return boundary;
    }
    return 0.0;
  }

  template <typename Phi>
  double golden(Phi& phi, double a, double b, double& fy) {
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = phi(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = phi(d);
      }
    }
    const double t = fc <= fd ? c : d;
    const double ft = std::min(fc, fd);
    if (ft < fy) {
      fy = ft;
      return t;
    }
    return 0.0;
  }

  const Objective& f_;
  const OracleOptions& opts_;
  Vector trial_;
  std::size_t evals_ = 0;
};

Vector normalized(Vector u) {
  const double nrm = std::sqrt(norm_sq(u));
  if (nrm > 0.0)
    for (double& v : u) v /= nrm;
  return u;
}

}  // namespace

OracleResult brute_force_minimize(const Objective& objective, std::span<const double> start,
                                  const std::optional<LinearConstraint>& constraint,
                                  const OracleOptions& options) {
  const std::size_t k = start.size();
  if (k == 0 || k > 6) throw ContractError("brute_force_minimize: dimension must be in [1, 6]");
  if (constraint && constraint->normal.size() != k)
    throw ContractError("brute_force_minimize: constraint dimension mismatch");

  Vector y(start.begin(), start.end());
  double a_sq = 0.0;
  if (constraint) {
    a_sq = norm_sq(constraint->normal);
    const double excess = dot(constraint->normal, y) - constraint->bound;
    if (excess > 0.0) {
      if (a_sq < 1e-300) throw OracleError("brute_force_minimize: empty feasible set");
      axpy(-excess / a_sq, constraint->normal, y);
    }
  }

  // Feasible step interval [lo, hi] along u from y.
  auto interval = [&](std::span<const double> u, double& lo, double& hi) {
    lo = -kInf;
    hi = kInf;
    if (!constraint) return;
    const double au = dot(constraint->normal, u);
    const double slack = std::max(0.0, constraint->bound - dot(constraint->normal, y));
    if (au > 1e-15) hi = slack / au;
    if (au < -1e-15) lo = slack / au;
  };
  auto tangent = [&](Vector u) {
    if (constraint && a_sq > 1e-300) axpy(-dot(constraint->normal, u) / a_sq, constraint->normal, u);
    return normalized(std::move(u));
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LineSearcher search(objective, options, k);
  double fy = search.eval(y);
  if (!std::isfinite(fy)) throw OracleError("brute_force_minimize: objective not finite at start");

  std::deque<Vector> powell;
  double step = 1.0;
  std::size_t quiet_sweeps = 0;

  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    std::vector<Vector> dirs;
    for (std::size_t j = 0; j < k; ++j) {
      Vector e(k, 0.0);
      e[j] = 1.0;
      dirs.push_back(e);
      if (constraint) dirs.push_back(tangent(e));
    }
    for (int r = 0; r < 2; ++r) {
      Vector u(k);
      for (double& v : u) v = normal(rng);
      dirs.push_back(constraint ? tangent(u) : normalized(u));
    }
    for (const auto& p : powell) dirs.push_back(p);

    const Vector y_start = y;
    const double f_start = fy;
    double longest = 0.0;
    for (const auto& u : dirs) {
      if (norm_sq(u) == 0.0) continue;
      double lo, hi;
      interval(u, lo, hi);
      const double t = search.minimize(y, u, lo, hi, std::max(step, 1e-10), fy);
      if (t != 0.0) {
        axpy(t, u, y);
        longest = std::max(longest, std::abs(t));
      }
    }
    step = longest > 0.0 ? longest : 0.5 * step;

    Vector moved(k);
    for (std::size_t j = 0; j < k; ++j) moved[j] = y[j] - y_start[j];
    if (norm_sq(moved) > 0.0) {
      powell.push_back(normalized(moved));
      if (constraint) powell.push_back(tangent(moved));
      while (powell.size() > 2 * k) powell.pop_front();
    }

    if (f_start - fy < options.tol * (1.0 + std::abs(fy))) {
      if (++quiet_sweeps >= 3) return OracleResult{y, fy, search.evaluations()};
    } else {
      quiet_sweeps = 0;
    }
  }
  throw OracleError("brute_force_minimize: no convergence within sweep cap");
}

}  // namespace fuvalkit
