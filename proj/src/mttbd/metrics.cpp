#include "mttbd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mttbd {

void OspaParams::validate() const {
  if (!(cutoff > 0.0)) throw std::invalid_argument("ospa: cutoff must be positive");
  if (!(order >= 1.0)) throw std::invalid_argument("ospa: order must be >= 1");
}

Assignment optimal_assignment(const Eigen::MatrixXd& cost) {
  const int nr = static_cast<int>(cost.rows());
  const int nc = static_cast<int>(cost.cols());
  if (nr == 0) return {};
  if (nr > nc) throw std::invalid_argument("optimal_assignment: needs rows <= cols");
  if (!cost.allFinite()) throw std::invalid_argument("optimal_assignment: non-finite cost");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Dual potentials and matching, built one row at a time by finding the
  // shortest augmenting path in the reduced-cost graph (Dijkstra over columns).
  std::vector<double> u(nr, 0.0), v(nc, 0.0);
  std::vector<int> row_of(nc, -1);  // row currently matched to each column
  std::vector<int> col_for_row(nr, -1);

  for (int cur = 0; cur < nr; ++cur) {
    std::vector<double> shortest(nc, kInf);
    std::vector<int> pred(nc, -1);  // previous column on the path to each column
    std::vector<char> done(nc, 0);
    int sink = -1;
    int i = cur;        // row being scanned
    int from_col = -1;  // column through which we reached row i
    double min_dist = 0.0;
    while (sink == -1) {
      double best = kInf;
      int best_col = -1;
      for (int j = 0; j < nc; ++j) {
        if (done[j]) continue;
        const double reduced = cost(i, j) - u[i] - v[j];
        if (min_dist + reduced < shortest[j]) {
          shortest[j] = min_dist + reduced;
          pred[j] = from_col;
        }
        if (shortest[j] < best || (shortest[j] == best && best_col != -1 &&
                                   row_of[j] == -1 && row_of[best_col] != -1)) {
          best = shortest[j];
          best_col = j;
        }
      }
      done[best_col] = 1;
      min_dist = best;
      if (row_of[best_col] == -1) {
        sink = best_col;
      } else {
        i = row_of[best_col];
        from_col = best_col;
      }
    }
    // Update potentials so every scanned arc stays tight, then flip the
    // alternating path ending at the sink.
    u[cur] += min_dist;
    for (int j = 0; j < nc; ++j) {
      if (!done[j] || j == sink) continue;
      u[row_of[j]] += min_dist - shortest[j];
      v[j] -= min_dist - shortest[j];
    }
    for (int j = sink; j != -1;) {
      const int prev = pred[j];
      row_of[j] = (prev == -1) ? cur : row_of[prev];
      col_for_row[row_of[j]] = j;
      j = prev;
    }
  }

  Assignment out;
  out.col_for_row = std::move(col_for_row);
  for (int r = 0; r < nr; ++r) out.total_cost += cost(r, out.col_for_row[r]);
  return out;
}

double ospa(const PointSet& a, const PointSet& b, const OspaParams& params) {
  params.validate();
  const PointSet* small = &a;
  const PointSet* large = &b;
  if (small->size() > large->size()) std::swap(small, large);
  const int m = static_cast<int>(small->size());
  const int n = static_cast<int>(large->size());
  if (n == 0) return 0.0;
  if (m == 0) return params.cutoff;

  const double c_p = std::pow(params.cutoff, params.order);
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = ((*small)[i] - (*large)[j]).norm();
      cost(i, j) = std::pow(std::min(d, params.cutoff), params.order);
    }
  const Assignment match = optimal_assignment(cost);
  const double total = match.total_cost + c_p * (n - m);
  return std::pow(total / n, 1.0 / params.order);
}

}  // namespace mttbd
