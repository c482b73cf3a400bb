#pragma once

#include <vector>

namespace noisyldpc::lp {

/// maximize c'x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
struct Problem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

/// Dense two-phase simplex with Bland's pivoting rule.
Solution solve(const Problem& problem, double tol = 1e-9);

}  // namespace noisyldpc::lp
