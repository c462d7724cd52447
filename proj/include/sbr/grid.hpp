#pragma once

#include "sbr/types.hpp"

namespace sbr {

/// Fixed computational grid on [0, 1] with the feed inlet mid-cell 0.
/// Cells j = -1..N+1 are stored at index i = j+1; interface i sits on the
/// left edge of cell index i, so face i corresponds to xi_{(i-2)+1/2}.
struct Grid {
  int N;
  double delta_xi;

  explicit Grid(int cells) : N(cells), delta_xi(1.0 / (cells + 0.5)) {
    if (cells < 4) throw config_error("grid: need at least 4 interior cells");
  }

  int num_cells() const { return N + 3; }
  int num_faces() const { return N + 4; }
  int idx(int j) const { return j + 1; }

  /// Center of cell j (signed index), exact rational form: 2j/(2N+1).
  double xi_center(int j) const { return double(2 * j) / double(2 * N + 1); }
  /// Position of face array-index i: (2(i-1)-1)/(2N+1); face N+2 is exactly 1.
  double xi_face(int i) const { return double(2 * i - 3) / double(2 * N + 1); }

  /// gamma_j: 1 inside the tank, 1/2 for the straddling feed cell, 0 outside.
  double gamma_cell(int j) const {
    if (j == 0) return 0.5;
    return (j >= 1 && j <= N) ? 1.0 : 0.0;
  }
  /// gamma at face array-index i (characteristic function of (0,1)).
  double gamma_face(int i) const { return (i >= 2 && i <= N + 1) ? 1.0 : 0.0; }
};

}  // namespace sbr
