#include "untangle/param_set.hpp"

#include "untangle/error.hpp"

namespace untangle {

std::size_t ParamSet::add(std::string name, Matrix value) {
  if (index_.contains(name)) {
    throw ShapeError("duplicate tensor name " + name);
  }
  const auto i = tensors_.size();
  index_.emplace(name, i);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
  return i;
}

std::size_t ParamSet::index_of(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw ShapeError("no tensor named " + std::string(name));
  }
  return it->second;
}

bool ParamSet::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (std::size_t i = 0; i < size(); ++i) {
    out.add(names_[i], Matrix::Zero(tensors_[i].rows(), tensors_[i].cols()));
  }
  return out;
}

void ParamSet::set_zero() {
  for (auto& t : tensors_) {
    t.setZero();
  }
}

std::size_t ParamSet::num_scalars() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) {
    n += static_cast<std::size_t>(t.size());
  }
  return n;
}

double& ParamSet::scalar(std::size_t flat) {
  for (auto& t : tensors_) {
    const auto n = static_cast<std::size_t>(t.size());
    if (flat < n) {
      return t.data()[flat];
    }
    flat -= n;
  }
  throw ShapeError("flat parameter index out of range");
}

void ParamSet::add_scaled(double alpha, const ParamSet& other) {
  if (!same_layout(other)) {
    throw ShapeError("add_scaled: parameter layouts differ");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    tensors_[i] += alpha * other.tensors_[i];
  }
}

void ParamSet::scale(double alpha) {
  for (auto& t : tensors_) {
    t *= alpha;
  }
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (size() != other.size()) {
    return false;
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (names_[i] != other.names_[i] || tensors_[i].rows() != other.tensors_[i].rows() ||
        tensors_[i].cols() != other.tensors_[i].cols()) {
      return false;
    }
  }
  return true;
}

bool ParamSet::all_finite() const {
  for (const auto& t : tensors_) {
    if (!t.allFinite()) {
      return false;
    }
  }
  return true;
}

bool ParamSet::operator==(const ParamSet& other) const {
  if (!same_layout(other)) {
    return false;
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (tensors_[i] != other.tensors_[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace untangle
