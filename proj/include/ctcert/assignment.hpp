#pragma once

#include "ctcert/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ctcert {

struct Assignment {
  // permutation[i] = column matched to row i
  std::vector<int> permutation;
  double value = 0.0;  // sum of matched entries
};

inline constexpr int kMaxAssignmentSize = 512;

// Exact minimum-cost perfect matching (Hungarian method with potentials,
// O(N^3)).
Assignment assignment_oracle(const Eigen::MatrixXd& cost);

}  // namespace ctcert
