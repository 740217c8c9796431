#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace untangle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Ordered collection of named dense tensors. Model parameters, their
/// gradients and optimizer moments all use this layout so they can be walked
/// in lockstep by index.
class ParamSet {
 public:
  std::size_t add(std::string name, Matrix value);

  std::size_t size() const { return tensors_.size(); }
  std::size_t index_of(std::string_view name) const;  // throws ShapeError
  bool contains(std::string_view name) const;

  Matrix& operator[](std::size_t i) { return tensors_[i]; }
  const Matrix& operator[](std::size_t i) const { return tensors_[i]; }
  Matrix& at(std::string_view name) { return tensors_[index_of(name)]; }
  const Matrix& at(std::string_view name) const { return tensors_[index_of(name)]; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  /// Same names and shapes, all zeros.
  ParamSet zeros_like() const;
  void set_zero();
  std::size_t num_scalars() const;

  /// Element `flat` when all tensors are laid end to end in index order.
  double& scalar(std::size_t flat);

  void add_scaled(double alpha, const ParamSet& other);  // this += alpha * other
  void scale(double alpha);
  bool same_layout(const ParamSet& other) const;
  bool all_finite() const;

  bool operator==(const ParamSet& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace untangle
