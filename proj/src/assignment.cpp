#include "ctcert/assignment.hpp"

#include <limits>
#include <string>

namespace ctcert {

Assignment assignment_oracle(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorKind::kInvalidArgument, "cost matrix must be square");
  if (n > kMaxAssignmentSize)
    throw Error(ErrorKind::kInvalidArgument, "assignment size " + std::to_string(n) + " exceeds 512");
  if (!cost.allFinite()) throw Error(ErrorKind::kInvalidArgument, "cost matrix has non-finite entries");
  Assignment out;
  if (n == 0) return out;

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based shortest augmenting path formulation; column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  out.permutation.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.permutation[match[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.value += cost(i, out.permutation[i]);
  return out;
}

}  // namespace ctcert
