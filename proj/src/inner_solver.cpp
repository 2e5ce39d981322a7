#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iotmarket/convex_kernel.hpp"

namespace iotmarket {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ConcaveModel::eval(const std::vector<double>& x) const {
  double v = linear.eval(x);
  for (const LogTerm& t : logs) {
    double arg = t.arg.eval(x);
    if (!(arg > 0.0)) return -kInf;
    v += t.weight * std::log(arg);
  }
  for (const QuadTerm& t : quads) {
    double e = t.expr.eval(x);
    v -= t.weight * e * e;
  }
  return v;
}

void ConcaveModel::add_gradient(const std::vector<double>& x, double scale,
                                std::vector<double>& grad) const {
  for (const auto& [i, c] : linear.terms) grad[i] += scale * c;
  for (const LogTerm& t : logs) {
    double arg = t.arg.eval(x);
    double w = scale * t.weight / arg;
    for (const auto& [i, c] : t.arg.terms) grad[i] += w * c;
  }
  for (const QuadTerm& t : quads) {
    double w = -2.0 * scale * t.weight * t.expr.eval(x);
    for (const auto& [i, c] : t.expr.terms) grad[i] += w * c;
  }
}

namespace {

// Internal constraint form: model(x) >= 0 with the rhs folded in. Slack
// variables appended during feasibility restoration show up as one extra
// linear term per relaxed row.
struct BarrierRow {
  ConcaveModel m;
  std::string label;
};

double row_value(const BarrierRow& r, const std::vector<double>& x) {
  return r.m.eval(x);
}

// Sparse gradient of a model at x, returned as (index, value) pairs with
// duplicates merged.
void sparse_gradient(const ConcaveModel& m, const std::vector<double>& x,
                     std::vector<std::pair<int, double>>& out) {
  out.clear();
  for (const auto& [i, c] : m.linear.terms) out.emplace_back(i, c);
  for (const LogTerm& t : m.logs) {
    double w = t.weight / t.arg.eval(x);
    for (const auto& [i, c] : t.arg.terms) out.emplace_back(i, w * c);
  }
  for (const QuadTerm& t : m.quads) {
    double w = -2.0 * t.weight * t.expr.eval(x);
    for (const auto& [i, c] : t.expr.terms) out.emplace_back(i, w * c);
  }
  std::sort(out.begin(), out.end());
  size_t w = 0;
  for (size_t k = 0; k < out.size(); ++k) {
    if (w > 0 && out[w - 1].first == out[k].first)
      out[w - 1].second += out[k].second;
    else
      out[w++] = out[k];
  }
  out.resize(w);
}

// M += scale * g g^T restricted to the sparse support of g.
void add_outer(Eigen::MatrixXd& M, double scale,
               const std::vector<std::pair<int, double>>& g) {
  for (const auto& [i, gi] : g)
    for (const auto& [j, gj] : g) M(i, j) += scale * gi * gj;
}

// Negated Hessian of the nonlinear terms: w/arg^2 * a a^T per log and
// 2w * a a^T per negated square, positive semidefinite by construction.
void add_neg_hessian(Eigen::MatrixXd& M, const ConcaveModel& m,
                     const std::vector<double>& x, double scale,
                     std::vector<std::pair<int, double>>& scratch) {
  for (const LogTerm& t : m.logs) {
    double arg = t.arg.eval(x);
    scratch.assign(t.arg.terms.begin(), t.arg.terms.end());
    add_outer(M, scale * t.weight / (arg * arg), scratch);
  }
  for (const QuadTerm& t : m.quads) {
    scratch.assign(t.expr.terms.begin(), t.expr.terms.end());
    add_outer(M, 2.0 * scale * t.weight, scratch);
  }
}

}  // namespace

double DCRateTerm::true_rate(const std::vector<double>& p) const {
  double f = f_arg.eval(p), g = g_arg.eval(p);
  return (std::log2(f) - std::log2(g));
}

double DCRateTerm::surrogate(const std::vector<double>& p) const {
  double v = std::log2(f_arg.eval(p)) + surr_const;
  for (const auto& [i, c] : g_grad) v -= c * p[i];
  return v;
}

InnerResult inner_solve(const SubproblemSpec& spec, const InnerOptions& opts) {
  const int n0 = spec.dim;
  if (static_cast<int>(spec.lower.size()) != n0 ||
      static_cast<int>(spec.upper.size()) != n0)
    throw std::invalid_argument("inner_solve: box size mismatch");

  // Fold every constraint into model(x) >= 0.
  std::vector<BarrierRow> rows;
  rows.reserve(spec.linear_rows.size() + spec.concave_rows.size());
  for (const LinearRowSpec& r : spec.linear_rows) {
    BarrierRow br;
    br.label = r.label;
    if (r.sense == Sense::ge) {
      br.m.linear = r.row;
      br.m.linear.c0 -= r.rhs;
    } else {
      br.m.linear.c0 = r.rhs - r.row.c0;
      for (const auto& [i, c] : r.row.terms) br.m.linear.add(i, -c);
    }
    rows.push_back(std::move(br));
  }
  for (const ConcaveRowSpec& r : spec.concave_rows) {
    BarrierRow br;
    br.label = r.label;
    br.m = r.expr;
    br.m.linear.c0 -= r.rhs;
    rows.push_back(std::move(br));
  }
  const int n_rows = static_cast<int>(rows.size());

  // Strictly interior start inside the box.
  std::vector<double> lo = spec.lower, hi = spec.upper;
  std::vector<double> x(n0);
  for (int i = 0; i < n0; ++i) {
    if (!(hi[i] > lo[i]))
      throw std::invalid_argument("inner_solve: empty box at variable " +
                                  std::to_string(i));
    double margin = 1e-4 * (hi[i] - lo[i]);
    double w = spec.warm.empty() ? 0.5 * (lo[i] + hi[i]) : spec.warm[i];
    x[i] = std::clamp(w, lo[i] + margin, hi[i] - margin);
  }

  // Feasibility restoration: rows non-positive at the start get a penalized
  // slack variable so the barrier has an interior point to work from.
  std::vector<int> slack_of_row(n_rows, -1);
  int n = n0;
  for (int j = 0; j < n_rows; ++j) {
    double h = row_value(rows[j], x);
    if (h <= 1e-8) {
      int s = n++;
      slack_of_row[j] = s;
      rows[j].m.linear.add(s, 1.0);
      double s0 = std::max(0.0, -h) + 1.0;
      x.push_back(s0);
      lo.push_back(0.0);
      hi.push_back(2.0 * s0 + 10.0);
    }
  }
  const bool restored = n > n0;

  ConcaveModel objective = spec.objective;
  for (int j = 0; j < n_rows; ++j)
    if (slack_of_row[j] >= 0)
      objective.linear.add(slack_of_row[j], -opts.slack_penalty);

  const int m_barrier = n_rows + 2 * n;

  auto barrier_value = [&](double t, const std::vector<double>& y) {
    double v = objective.eval(y);
    if (v == -kInf) return -kInf;
    v *= t;
    for (const BarrierRow& r : rows) {
      double h = row_value(r, y);
      if (!(h > 0.0)) return -kInf;
      v += std::log(h);
    }
    for (int i = 0; i < n; ++i) {
      double a = y[i] - lo[i], b = hi[i] - y[i];
      if (!(a > 0.0) || !(b > 0.0)) return -kInf;
      v += std::log(a) + std::log(b);
    }
    return v;
  };

  InnerResult res;
  double t = opts.barrier_t0;
  std::vector<double> grad(n);
  std::vector<std::pair<int, double>> sg, scratch;
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd g(n), dx(n);
  double last_decrement = kInf;

  for (int stage = 0; stage < opts.max_stages; ++stage) {
    res.stages = stage + 1;
    for (int it = 0; it < opts.max_newton; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      M.setZero();

      objective.add_gradient(x, t, grad);
      add_neg_hessian(M, objective, x, t, scratch);
      for (const BarrierRow& r : rows) {
        double h = row_value(r, x);
        sparse_gradient(r.m, x, sg);
        for (const auto& [i, v] : sg) grad[i] += v / h;
        add_neg_hessian(M, r.m, x, 1.0 / h, scratch);
        add_outer(M, 1.0 / (h * h), sg);
      }
      for (int i = 0; i < n; ++i) {
        double a = x[i] - lo[i], b = hi[i] - x[i];
        grad[i] += 1.0 / a - 1.0 / b;
        M(i, i) += 1.0 / (a * a) + 1.0 / (b * b);
      }

      for (int i = 0; i < n; ++i) g(i) = grad[i];
      Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
      if (ldlt.info() != Eigen::Success) {
        M.diagonal().array() += 1e-10 * (1.0 + M.trace() / n);
        ldlt.compute(M);
      }
      dx = ldlt.solve(g);
      double decrement = g.dot(dx);
      last_decrement = decrement;
      ++res.newton_steps;
      if (!(decrement > 0.0) || 0.5 * decrement <= opts.newton_tol) break;

      double base = barrier_value(t, x);
      double step = 1.0;
      std::vector<double> trial(n);
      int bt = 0;
      for (; bt < opts.max_backtracks; ++bt) {
        for (int i = 0; i < n; ++i) trial[i] = x[i] + step * dx(i);
        double v = barrier_value(t, trial);
        if (v > -kInf && v >= base + opts.armijo_c * step * decrement) break;
        step *= opts.backtrack;
      }
      if (bt == opts.max_backtracks) break;  // no progress possible
      x.swap(trial);
    }
    if (m_barrier / t <= opts.gap_stop) {
      res.converged = true;
      break;
    }
    t *= opts.barrier_scale;
  }

  if (!res.converged)
    res.message = "barrier stage limit reached, decrement " +
                  std::to_string(last_decrement);

  // Report against the original rows and box.
  res.x.assign(x.begin(), x.begin() + n0);
  res.objective = spec.objective.eval(res.x);
  double viol = 0.0;
  for (int j = 0; j < n_rows; ++j) {
    ConcaveModel orig = rows[j].m;
    if (slack_of_row[j] >= 0) orig.linear.terms.pop_back();
    viol = std::max(viol, -orig.eval(res.x));
  }
  for (int i = 0; i < n0; ++i) {
    viol = std::max(viol, spec.lower[i] - res.x[i]);
    viol = std::max(viol, res.x[i] - spec.upper[i]);
  }
  res.max_violation = std::max(0.0, viol);
  if (restored) {
    double smax = 0.0;
    for (int j = 0; j < n_rows; ++j)
      if (slack_of_row[j] >= 0) smax = std::max(smax, x[slack_of_row[j]]);
    res.restored_slack = smax;
  }
  res.kkt_residual =
      m_barrier / t + std::abs(last_decrement == kInf ? 0.0 : last_decrement);
  return res;
}

}  // namespace iotmarket
