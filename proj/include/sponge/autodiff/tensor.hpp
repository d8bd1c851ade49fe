#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sponge {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

// Immutable dense row-major array of doubles. Construction rejects shape /
// length disagreement and any non-finite value.
class Tensor {
 public:
  Tensor();  // scalar 0
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor zeros(Shape shape);

  const Shape& shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }
  bool is_scalar() const { return data_.size() == 1; }

  // The single element of a size-1 tensor.
  double item() const;
  double operator[](std::size_t i) const { return data_[i]; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

std::size_t element_count(const Shape& shape);

}  // namespace sponge
