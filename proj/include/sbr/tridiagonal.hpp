#pragma once

#include "sbr/types.hpp"

namespace sbr {

/// Thomas-algorithm solver. Factors once, then solves any number of
/// right-hand sides. Intended for systems that are diagonally dominant by
/// columns, where elimination without pivoting is stable.
class TridiagonalSolver {
public:
  /// sub[0] and super[n-1] are ignored (size n each for convenience).
  void factor(const ArrayXd& sub, const ArrayXd& diag, const ArrayXd& super);
  void solve_in_place(Eigen::Ref<Eigen::VectorXd> rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int size() const { return n_; }

  /// Column diagonal-dominance margin: min_j (|d_j| - sum of |off-diagonals|
  /// in column j). The systems assembled here must keep this nonnegative.
  static double column_dominance_margin(const ArrayXd& sub, const ArrayXd& diag,
                                        const ArrayXd& super);

private:
  int n_ = 0;
  ArrayXd sub_, piv_, super_;
};

}  // namespace sbr
