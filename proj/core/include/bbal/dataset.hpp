#ifndef BBAL_DATASET_HPP
#define BBAL_DATASET_HPP

#include <vector>

#include <Eigen/Core>

namespace bbal {

// Labeled classification data. `inputs` is N x D, labels are integers in
// {0, ..., num_classes-1}. N = 0 is allowed (prior-only fits).
struct Dataset {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  int num_classes = 2;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }

  // Throws DomainError if labels are out of range or inputs are non-finite.
  void validate() const;

  Dataset subset(const std::vector<int>& indices) const;
  void append_row(const Eigen::VectorXd& x, int label);
};

}  // namespace bbal

#endif  // BBAL_DATASET_HPP
