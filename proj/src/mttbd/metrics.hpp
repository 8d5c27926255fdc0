#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mttbd {

using PointSet = std::vector<Eigen::Vector2d>;

struct OspaParams {
  double cutoff = 5.0;  // c, in the same units as the points
  double order = 1.0;   // p

  void validate() const;
};

struct Assignment {
  std::vector<int> col_for_row;  // col_for_row[i] = column matched to row i
  double total_cost = 0.0;
};

// Minimum-cost assignment of rows to columns (rows <= cols required) by
// shortest augmenting paths. Exact, O(rows^2 * cols).
Assignment optimal_assignment(const Eigen::MatrixXd& cost);

// Set distance between two 2D point sets: cutoff distances are paired by an
// optimal assignment, cardinality mismatch is charged the cutoff per missing
// point, and the p-th-order mean over the larger cardinality is returned.
// Both sets empty gives 0; exactly one empty gives the cutoff.
double ospa(const PointSet& a, const PointSet& b, const OspaParams& params = {});

}  // namespace mttbd
