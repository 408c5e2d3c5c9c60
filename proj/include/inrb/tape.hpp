#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "inrb/activations.hpp"
#include "inrb/encoding.hpp"
#include "inrb/kan.hpp"
#include "inrb/tensor.hpp"

namespace inrb {

class Tape;

// Handle to a node on a tape.
struct Value {
  int id = -1;
};

enum class Op {
  Leaf,
  Param,
  MatMul,
  Add,
  Sub,
  Mul,
  Scale,
  AddRow,
  Sum,
  Mean,
  Concat,
  SliceRows,
  Apply,
  SparseMatVec,
  GatherRows,
  KanLayer,
  Encode,
  FkanEncode,
};

// Recorded tape of tensor operations for one thread of execution.
// Node ids strictly increase in creation order; backward visits the nodes in
// reverse creation order exactly once.
class Tape {
 public:
  Value leaf(Tensor t);
  // Parameter leaf; backward() reports gradients indexed by param_id.
  Value param(Tensor t, int param_id);

  Value matmul(Value a, Value b);
  Value add(Value a, Value b);       // same shape, or b scalar
  Value sub(Value a, Value b);       // same shape, or b scalar
  Value mul(Value a, Value b);       // elementwise; same shape, or b scalar
  Value scale(Value a, double c);
  Value add_rowvec(Value a, Value row);  // a [m,n] + row [n] broadcast over rows
  Value sum(Value a);
  Value mean(Value a);
  Value concat_cols(Value a, Value b);
  Value slice_rows(Value a, int begin, int end);
  Value apply(Value a, const ActivationSpec& act);
  Value sparse_matvec(std::shared_ptr<const SparseMatrix> m, Value a);
  Value gather_rows(Value a, std::shared_ptr<const std::vector<int>> rows);
  Value kan_layer(std::shared_ptr<const BasisSpec> spec, Value coeffs, Value x);
  Value encode(std::shared_ptr<const EncodingSpec> spec, Value x);
  Value fkan_encode(std::shared_ptr<const EncodingSpec> spec, Value coeffs, Value x);

  const Tensor& value(Value v) const { return nodes_[v.id].value; }
  std::size_t node_count() const { return nodes_.size(); }

  // Reverse pass from a scalar loss. Returns per-parameter gradients indexed
  // by param_id; parameters not reachable from the loss get zero tensors of
  // their own shape.
  std::vector<Tensor> backward(Value loss, int n_params) const;

  // When recording is off, ops compute forward values only (nodes still carry
  // values so handles stay usable, but no backward is possible).
  void set_recording(bool on) { recording_ = on; }
  bool recording() const { return recording_; }

  void reset() { nodes_.clear(); }

 private:
  struct Node {
    Op op = Op::Leaf;
    int a = -1;
    int b = -1;
    Tensor value;
    double scalar = 0.0;
    int begin = 0;
    int end = 0;
    int param_id = -1;
    ActivationSpec act;
    std::shared_ptr<const SparseMatrix> smat;
    std::shared_ptr<const std::vector<int>> rows;
    std::shared_ptr<const BasisSpec> basis;
    std::shared_ptr<const EncodingSpec> enc;
  };

  int push(Node n);
  const Node& node(Value v) const;

  std::vector<Node> nodes_;
  bool recording_ = true;
};

// Max over parameters of |analytic - central difference| / (|cd| + 1e-12)
// for a scalar function built on a tape from a single parameter tensor.
// NaN anywhere is reported as +inf.
double grad_check(const std::function<Value(Tape&, Value)>& f, const Tensor& theta, double step);

}  // namespace inrb
