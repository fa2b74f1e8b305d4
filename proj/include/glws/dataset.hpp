#pragma once

#include <Eigen/Dense>

#include "glws/errors.hpp"

namespace glws {

/// Ordered conditioning set {X, y}. Rows must stay pairwise distinct; exact
/// duplicates would make the noise-free covariance singular.
class Dataset {
 public:
  explicit Dataset(Eigen::Index dim) : inputs_(0, dim), responses_(0) {
    if (dim <= 0) throw InvalidArgumentError("Dataset: dimension must be positive");
  }
  Dataset(Eigen::MatrixXd inputs, Eigen::VectorXd responses)
      : inputs_(std::move(inputs)), responses_(std::move(responses)) {
    if (inputs_.rows() != responses_.size())
      throw InvalidArgumentError("Dataset: row count mismatch");
    if (!inputs_.allFinite() || !responses_.allFinite())
      throw InvalidArgumentError("Dataset: non-finite entries");
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < inputs_.rows(); ++j)
        if (inputs_.row(i) == inputs_.row(j))
          throw InvalidArgumentError("Dataset: duplicate input rows");
  }

  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dim() const { return inputs_.cols(); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& responses() const { return responses_; }

  void append(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
    if (x.size() != dim()) throw InvalidArgumentError("Dataset::append: dimension mismatch");
    if (!x.allFinite() || !std::isfinite(y))
      throw InvalidArgumentError("Dataset::append: non-finite entries");
    for (Eigen::Index i = 0; i < size(); ++i)
      if (inputs_.row(i).transpose() == x)
        throw DuplicatePointError("Dataset::append: input already present");
    inputs_.conservativeResize(size() + 1, Eigen::NoChange);
    inputs_.row(inputs_.rows() - 1) = x.transpose();
    responses_.conservativeResize(responses_.size() + 1);
    responses_[responses_.size() - 1] = y;
  }

 private:
  Eigen::MatrixXd inputs_;     // n x d
  Eigen::VectorXd responses_;  // n
};

}  // namespace glws
