#include "noisyldpc/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace noisyldpc::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double& cost(std::size_t j) { return at(m_, j); }  // reduced cost z_j - c_j
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
    }
    basis_[r] = c;
  }

  // Sets the objective row for "maximize cost'x" given the current basis.
  void set_objective(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= n_; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < m_; ++i) z += c[basis_[i]] * at(i, j);
      cost(j) = j < n_ ? z - c[j] : z;
    }
  }

  // Runs simplex iterations over columns [0, allowed). Returns false if unbounded.
  bool optimize(std::size_t allowed, double tol) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j)
        if (cost(j) < -tol) {
          enter = j;
          break;
        }
      if (enter == allowed) return true;
      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= tol) continue;
        const double ratio = rhs(i) / a;
        if (leave == m_ || ratio < best - tol || (ratio <= best + tol && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("lp: iteration limit reached");
  }

 private:
  std::size_t m_, n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& p, double tol) {
  const std::size_t nx = p.c.size();
  const std::size_t mu = p.a_ub.size(), me = p.a_eq.size();
  if (p.b_ub.size() != mu || p.b_eq.size() != me) throw std::invalid_argument("lp: row count mismatch");
  for (const auto& r : p.a_ub)
    if (r.size() != nx) throw std::invalid_argument("lp: column count mismatch");
  for (const auto& r : p.a_eq)
    if (r.size() != nx) throw std::invalid_argument("lp: column count mismatch");

  // Columns: x, one slack per inequality, one artificial per row.
  const std::size_t m = mu + me;
  const std::size_t n_real = nx + mu;
  Tableau tab(m, n_real + m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool ub = i < mu;
    const auto& row = ub ? p.a_ub[i] : p.a_eq[i - mu];
    const double b = ub ? p.b_ub[i] : p.b_eq[i - mu];
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nx; ++j) tab.at(i, j) = sign * row[j];
    if (ub) tab.at(i, nx + i) = sign;
    tab.at(i, n_real + i) = 1.0;
    tab.rhs(i) = sign * b;
    tab.basis()[i] = n_real + i;
  }

  std::vector<double> phase1(n_real + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[n_real + i] = -1.0;
  tab.set_objective(phase1);
  tab.optimize(n_real + m, tol);

  Solution sol;
  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(i < mu ? p.b_ub[i] : p.b_eq[i - mu]));
  if (tab.cost(n_real + m) < -1e-7 * scale) {
    sol.status = Status::infeasible;
    return sol;
  }
  // Move artificials out of the basis where a real column can replace them.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis()[i] < n_real) continue;
    for (std::size_t j = 0; j < n_real; ++j)
      if (std::abs(tab.at(i, j)) > tol) {
        tab.pivot(i, j);
        break;
      }
  }

  std::vector<double> phase2(n_real + m, 0.0);
  for (std::size_t j = 0; j < nx; ++j) phase2[j] = p.c[j];
  tab.set_objective(phase2);
  if (!tab.optimize(n_real, tol)) {
    sol.status = Status::unbounded;
    return sol;
  }
  sol.status = Status::optimal;
  sol.x.assign(nx, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis()[i] < nx) sol.x[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
  sol.objective = 0.0;
  for (std::size_t j = 0; j < nx; ++j) sol.objective += p.c[j] * sol.x[j];
  return sol;
}

}  // namespace noisyldpc::lp
