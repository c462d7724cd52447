#include "sbr/tridiagonal.hpp"

#include <cmath>

namespace sbr {

void TridiagonalSolver::factor(const ArrayXd& sub, const ArrayXd& diag,
                               const ArrayXd& super) {
  n_ = int(diag.size());
  sub_ = sub;
  super_ = super;
  piv_ = diag;
  for (int i = 1; i < n_; ++i) {
    if (std::abs(piv_[i - 1]) < 1e-300)
      throw numerical_error("tridiagonal solve: vanishing pivot");
    const double m = sub_[i] / piv_[i - 1];
    sub_[i] = m;  // store the multiplier
    piv_[i] -= m * super_[i - 1];
  }
  if (std::abs(piv_[n_ - 1]) < 1e-300)
    throw numerical_error("tridiagonal solve: vanishing pivot");
}

void TridiagonalSolver::solve_in_place(Eigen::Ref<Eigen::VectorXd> rhs) const {
  for (int i = 1; i < n_; ++i) rhs[i] -= sub_[i] * rhs[i - 1];
  rhs[n_ - 1] /= piv_[n_ - 1];
  for (int i = n_ - 2; i >= 0; --i) rhs[i] = (rhs[i] - super_[i] * rhs[i + 1]) / piv_[i];
}

Eigen::VectorXd TridiagonalSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = rhs;
  solve_in_place(x);
  return x;
}

double TridiagonalSolver::column_dominance_margin(const ArrayXd& sub, const ArrayXd& diag,
                                                  const ArrayXd& super) {
  const int n = int(diag.size());
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double off = 0.0;
    if (j + 1 < n) off += std::abs(sub[j + 1]);    // entry (j+1, j)
    if (j - 1 >= 0) off += std::abs(super[j - 1]);  // entry (j-1, j)
    margin = std::min(margin, std::abs(diag[j]) - off);
  }
  return margin;
}

}  // namespace sbr
