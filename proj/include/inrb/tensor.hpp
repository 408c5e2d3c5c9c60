#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace inrb {

// Dense row-major tensor of 64-bit floats.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape)
      : shape_(std::move(shape)), data_(checked_size(shape_), 0.0) {}
  Tensor(std::vector<int> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != checked_size(shape_))
      throw std::runtime_error("tensor: data length " + std::to_string(data_.size()) +
                               " does not match shape " + shape_str(shape_));
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }
  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool is_scalar() const { return data_.size() == 1; }

  // 2-D helpers; a 1-D tensor acts as a single row.
  int rows() const { return shape_.size() >= 2 ? shape_[0] : 1; }
  int cols() const {
    if (shape_.empty()) return 1;
    return shape_.size() >= 2 ? shape_[1] : shape_[0];
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols() + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  static std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + "]";
  }
  std::string shape_str() const { return shape_str(shape_); }

 private:
  static std::size_t checked_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
      if (e < 0) throw std::runtime_error("tensor: negative extent in shape " + shape_str(shape));
      n *= static_cast<std::size_t>(e);
    }
    return n;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

// Compressed sparse row matrix used for the linear constraint operators
// (pooling, masking, discrete gradient/Laplacian, CT projection).
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> row_ptr;  // rows+1 entries
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix from_triplets(int rows, int cols,
                                    const std::vector<std::tuple<int, int, double>>& trip);

  // y = A x, where x has `cols` rows and c columns (column-major over c).
  void apply(const Tensor& x, Tensor& y) const;
  // y = A^T x
  void apply_transpose(const Tensor& x, Tensor& y) const;
};

}  // namespace inrb
