#include "inrb/tape.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace inrb {

namespace {

using EigenMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EigenConstMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::runtime_error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                           b.shape_str());
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

const Tape::Node& Tape::node(Value v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size()))
    throw std::runtime_error("tape: invalid node handle");
  return nodes_[v.id];
}

Value Tape::leaf(Tensor t) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(t);
  return {push(std::move(n))};
}

Value Tape::param(Tensor t, int param_id) {
  Node n;
  n.op = Op::Param;
  n.value = std::move(t);
  n.param_id = param_id;
  return {push(std::move(n))};
}

Value Tape::matmul(Value a, Value b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (ta.shape().size() != 2 || tb.shape().size() != 2 || ta.cols() != tb.rows())
    shape_error("matmul", ta, tb);
  Tensor out({ta.rows(), tb.cols()});
  EigenConstMap ma(ta.data(), ta.rows(), ta.cols());
  EigenConstMap mb(tb.data(), tb.rows(), tb.cols());
  EigenMap mo(out.data(), out.rows(), out.cols());
  mo.noalias() = ma * mb;
  Node n;
  n.op = Op::MatMul;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::add(Value a, Value b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  Tensor out(ta.shape());
  if (tb.is_scalar()) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] + tb[0];
  } else if (ta.same_shape(tb)) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] + tb[i];
  } else {
    shape_error("add", ta, tb);
  }
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::sub(Value a, Value b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  Tensor out(ta.shape());
  if (tb.is_scalar()) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] - tb[0];
  } else if (ta.same_shape(tb)) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] - tb[i];
  } else {
    shape_error("sub", ta, tb);
  }
  Node n;
  n.op = Op::Sub;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::mul(Value a, Value b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  Tensor out(ta.shape());
  if (tb.is_scalar()) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] * tb[0];
  } else if (ta.same_shape(tb)) {
    for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] * tb[i];
  } else {
    shape_error("mul", ta, tb);
  }
  Node n;
  n.op = Op::Mul;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::scale(Value a, double c) {
  const Tensor& ta = node(a).value;
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < ta.size(); ++i) out[i] = ta[i] * c;
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.scalar = c;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::add_rowvec(Value a, Value row) {
  const Tensor& ta = node(a).value;
  const Tensor& tr = node(row).value;
  if (ta.shape().size() != 2 || static_cast<int>(tr.size()) != ta.cols())
    shape_error("add_rowvec", ta, tr);
  Tensor out(ta.shape());
  for (int r = 0; r < ta.rows(); ++r)
    for (int c = 0; c < ta.cols(); ++c) out.at(r, c) = ta.at(r, c) + tr[c];
  Node n;
  n.op = Op::AddRow;
  n.a = a.id;
  n.b = row.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::sum(Value a) {
  const Tensor& ta = node(a).value;
  double s = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) s += ta[i];
  Node n;
  n.op = Op::Sum;
  n.a = a.id;
  n.value = Tensor::scalar(s);
  return {push(std::move(n))};
}

Value Tape::mean(Value a) {
  const Tensor& ta = node(a).value;
  if (ta.size() == 0) throw std::runtime_error("mean: empty tensor");
  double s = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) s += ta[i];
  Node n;
  n.op = Op::Mean;
  n.a = a.id;
  n.value = Tensor::scalar(s / static_cast<double>(ta.size()));
  return {push(std::move(n))};
}

Value Tape::concat_cols(Value a, Value b) {
  const Tensor& ta = node(a).value;
  const Tensor& tb = node(b).value;
  if (ta.shape().size() != 2 || tb.shape().size() != 2 || ta.rows() != tb.rows())
    shape_error("concat_cols", ta, tb);
  Tensor out({ta.rows(), ta.cols() + tb.cols()});
  for (int r = 0; r < ta.rows(); ++r) {
    for (int c = 0; c < ta.cols(); ++c) out.at(r, c) = ta.at(r, c);
    for (int c = 0; c < tb.cols(); ++c) out.at(r, ta.cols() + c) = tb.at(r, c);
  }
  Node n;
  n.op = Op::Concat;
  n.a = a.id;
  n.b = b.id;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::slice_rows(Value a, int begin, int end) {
  const Tensor& ta = node(a).value;
  if (ta.shape().size() != 2 || begin < 0 || end > ta.rows() || begin >= end)
    throw std::runtime_error("slice_rows: range [" + std::to_string(begin) + "," +
                             std::to_string(end) + ") invalid for " + ta.shape_str());
  Tensor out({end - begin, ta.cols()});
  for (int r = begin; r < end; ++r)
    for (int c = 0; c < ta.cols(); ++c) out.at(r - begin, c) = ta.at(r, c);
  Node n;
  n.op = Op::SliceRows;
  n.a = a.id;
  n.begin = begin;
  n.end = end;
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::apply(Value a, const ActivationSpec& act) {
  validate(act);
  Node n;
  n.op = Op::Apply;
  n.a = a.id;
  n.act = act;
  n.value = act_value(act, node(a).value);
  return {push(std::move(n))};
}

Value Tape::sparse_matvec(std::shared_ptr<const SparseMatrix> m, Value a) {
  const Tensor& ta = node(a).value;
  if (ta.rows() != m->cols)
    throw std::runtime_error("sparse_matvec: operator cols " + std::to_string(m->cols) +
                             " vs input " + ta.shape_str());
  Tensor out({m->rows, ta.cols()});
  m->apply(ta, out);
  Node n;
  n.op = Op::SparseMatVec;
  n.a = a.id;
  n.smat = std::move(m);
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::gather_rows(Value a, std::shared_ptr<const std::vector<int>> rows) {
  const Tensor& ta = node(a).value;
  Tensor out({static_cast<int>(rows->size()), ta.cols()});
  for (std::size_t i = 0; i < rows->size(); ++i) {
    int r = (*rows)[i];
    if (r < 0 || r >= ta.rows())
      throw std::runtime_error("gather_rows: index " + std::to_string(r) + " out of range for " +
                               ta.shape_str());
    for (int c = 0; c < ta.cols(); ++c) out.at(static_cast<int>(i), c) = ta.at(r, c);
  }
  Node n;
  n.op = Op::GatherRows;
  n.a = a.id;
  n.rows = std::move(rows);
  n.value = std::move(out);
  return {push(std::move(n))};
}

Value Tape::kan_layer(std::shared_ptr<const BasisSpec> spec, Value coeffs, Value x) {
  Node n;
  n.op = Op::KanLayer;
  n.a = coeffs.id;
  n.b = x.id;
  n.basis = spec;
  n.value = basis_eval(*spec, node(coeffs).value, node(x).value);
  return {push(std::move(n))};
}

Value Tape::encode(std::shared_ptr<const EncodingSpec> spec, Value x) {
  if (spec->kind == Encoding::Fkan)
    throw std::runtime_error("encode: fkan encoding requires fkan_encode with a coefficient node");
  Node n;
  n.op = Op::Encode;
  n.a = x.id;
  n.enc = spec;
  n.value = inrb::encode(*spec, node(x).value);
  return {push(std::move(n))};
}

Value Tape::fkan_encode(std::shared_ptr<const EncodingSpec> spec, Value coeffs, Value x) {
  Node n;
  n.op = Op::FkanEncode;
  n.a = coeffs.id;
  n.b = x.id;
  n.enc = spec;
  n.value = inrb::encode(*spec, node(x).value, &node(coeffs).value);
  return {push(std::move(n))};
}

std::vector<Tensor> Tape::backward(Value loss, int n_params) const {
  const Node& root = node(loss);
  if (!root.value.is_scalar())
    throw std::runtime_error("backward: loss must be scalar, got " + root.value.shape_str());
  if (!recording_) throw std::runtime_error("backward: recording is disabled");

  std::vector<Tensor> adj(nodes_.size());
  std::vector<bool> live(nodes_.size(), false);
  adj[loss.id] = Tensor::scalar(1.0);
  live[loss.id] = true;

  auto accum = [&](int id, const Tensor& g) {
    if (!live[id]) {
      adj[id] = g;
      live[id] = true;
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) adj[id][i] += g[i];
    }
  };

  for (int id = loss.id; id >= 0; --id) {
    if (!live[id]) continue;
    const Node& n = nodes_[id];
    const Tensor& g = adj[id];
    switch (n.op) {
      case Op::Leaf:
      case Op::Param:
        break;
      case Op::MatMul: {
        const Tensor& ta = nodes_[n.a].value;
        const Tensor& tb = nodes_[n.b].value;
        Tensor da(ta.shape()), db(tb.shape());
        EigenConstMap mg(g.data(), g.rows(), g.cols());
        EigenConstMap ma(ta.data(), ta.rows(), ta.cols());
        EigenConstMap mb(tb.data(), tb.rows(), tb.cols());
        EigenMap mda(da.data(), da.rows(), da.cols());
        EigenMap mdb(db.data(), db.rows(), db.cols());
        mda.noalias() = mg * mb.transpose();
        mdb.noalias() = ma.transpose() * mg;
        accum(n.a, da);
        accum(n.b, db);
        break;
      }
      case Op::Add:
      case Op::Sub: {
        double sign = n.op == Op::Sub ? -1.0 : 1.0;
        accum(n.a, g);
        const Tensor& tb = nodes_[n.b].value;
        if (tb.is_scalar() && g.size() > 1) {
          double s = 0.0;
          for (std::size_t i = 0; i < g.size(); ++i) s += g[i];
          accum(n.b, Tensor::scalar(sign * s));
        } else if (sign < 0) {
          Tensor db(g.shape());
          for (std::size_t i = 0; i < g.size(); ++i) db[i] = -g[i];
          accum(n.b, db);
        } else {
          accum(n.b, g);
        }
        break;
      }
      case Op::Mul: {
        const Tensor& ta = nodes_[n.a].value;
        const Tensor& tb = nodes_[n.b].value;
        Tensor da(ta.shape());
        if (tb.is_scalar() && ta.size() > 1) {
          double s = 0.0;
          for (std::size_t i = 0; i < ta.size(); ++i) {
            da[i] = g[i] * tb[0];
            s += g[i] * ta[i];
          }
          accum(n.a, da);
          accum(n.b, Tensor::scalar(s));
        } else {
          Tensor db(tb.shape());
          for (std::size_t i = 0; i < ta.size(); ++i) {
            da[i] = g[i] * tb[i];
            db[i] = g[i] * ta[i];
          }
          accum(n.a, da);
          accum(n.b, db);
        }
        break;
      }
      case Op::Scale: {
        Tensor da(g.shape());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] = g[i] * n.scalar;
        accum(n.a, da);
        break;
      }
      case Op::AddRow: {
        accum(n.a, g);
        const Tensor& tr = nodes_[n.b].value;
        Tensor dr(tr.shape());
        for (int r = 0; r < g.rows(); ++r)
          for (int c = 0; c < g.cols(); ++c) dr[c] += g.at(r, c);
        accum(n.b, dr);
        break;
      }
      case Op::Sum: {
        const Tensor& ta = nodes_[n.a].value;
        accum(n.a, Tensor::full(ta.shape(), g[0]));
        break;
      }
      case Op::Mean: {
        const Tensor& ta = nodes_[n.a].value;
        accum(n.a, Tensor::full(ta.shape(), g[0] / static_cast<double>(ta.size())));
        break;
      }
      case Op::Concat: {
        const Tensor& ta = nodes_[n.a].value;
        const Tensor& tb = nodes_[n.b].value;
        Tensor da(ta.shape()), db(tb.shape());
        for (int r = 0; r < ta.rows(); ++r) {
          for (int c = 0; c < ta.cols(); ++c) da.at(r, c) = g.at(r, c);
          for (int c = 0; c < tb.cols(); ++c) db.at(r, c) = g.at(r, ta.cols() + c);
        }
        accum(n.a, da);
        accum(n.b, db);
        break;
      }
      case Op::SliceRows: {
        const Tensor& ta = nodes_[n.a].value;
        Tensor da(ta.shape());
        for (int r = n.begin; r < n.end; ++r)
          for (int c = 0; c < ta.cols(); ++c) da.at(r, c) = g.at(r - n.begin, c);
        accum(n.a, da);
        break;
      }
      case Op::Apply: {
        const Tensor& ta = nodes_[n.a].value;
        Tensor da(ta.shape());
        for (std::size_t i = 0; i < ta.size(); ++i) da[i] = g[i] * act_grad(n.act, ta[i]);
        accum(n.a, da);
        break;
      }
      case Op::SparseMatVec: {
        const Tensor& ta = nodes_[n.a].value;
        Tensor da({ta.rows(), ta.cols()});
        n.smat->apply_transpose(g, da);
        accum(n.a, da);
        break;
      }
      case Op::GatherRows: {
        const Tensor& ta = nodes_[n.a].value;
        Tensor da(ta.shape());
        for (std::size_t i = 0; i < n.rows->size(); ++i) {
          int r = (*n.rows)[i];
          for (int c = 0; c < ta.cols(); ++c) da.at(r, c) += g.at(static_cast<int>(i), c);
        }
        accum(n.a, da);
        break;
      }
      case Op::KanLayer: {
        BasisGrads bg = basis_grads(*n.basis, nodes_[n.a].value, nodes_[n.b].value, g);
        accum(n.a, bg.d_coeffs);
        accum(n.b, bg.d_x);
        break;
      }
      case Op::Encode: {
        const Tensor& tx = nodes_[n.a].value;
        Tensor dx(tx.shape());
        encode_backward(*n.enc, tx, g, dx);
        accum(n.a, dx);
        break;
      }
      case Op::FkanEncode: {
        const Tensor& tc = nodes_[n.a].value;
        const Tensor& tx = nodes_[n.b].value;
        Tensor dx(tx.shape());
        Tensor dc(tc.shape());
        encode_backward(*n.enc, tx, g, dx, &tc, &dc);
        accum(n.a, dc);
        accum(n.b, dx);
        break;
      }
    }
  }

  std::vector<Tensor> grads(n_params);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.op != Op::Param || n.param_id < 0) continue;
    if (n.param_id >= n_params)
      throw std::runtime_error("backward: param_id " + std::to_string(n.param_id) +
                               " exceeds n_params");
    if (live[id]) {
      if (grads[n.param_id].size() == 0) {
        grads[n.param_id] = adj[id];
      } else {
        for (std::size_t i = 0; i < adj[id].size(); ++i) grads[n.param_id][i] += adj[id][i];
      }
    } else if (grads[n.param_id].size() == 0) {
      grads[n.param_id] = Tensor(n.value.shape());
    }
  }
  for (auto& gt : grads)
    if (gt.size() == 0) gt = Tensor::scalar(0.0);
  return grads;
}

double grad_check(const std::function<Value(Tape&, Value)>& f, const Tensor& theta, double step) {
  Tensor analytic;
  {
    Tape tape;
    Value p = tape.param(theta, 0);
    Value loss = f(tape, p);
    if (!tape.value(loss).is_scalar()) throw std::runtime_error("grad_check: f must be scalar");
    analytic = tape.backward(loss, 1)[0];
  }

  auto eval = [&](const Tensor& t) {
    Tape tape;
    Value p = tape.param(t, 0);
    Value loss = f(tape, p);
    return tape.value(loss)[0];
  };

  double worst = 0.0;
  Tensor probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double keep = probe[i];
    probe[i] = keep + step;
    double fp = eval(probe);
    probe[i] = keep - step;
    double fm = eval(probe);
    probe[i] = keep;
    double cd = (fp - fm) / (2.0 * step);
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(analytic[i]))
      return std::numeric_limits<double>::infinity();
    double err = std::abs(analytic[i] - cd) / (std::abs(cd) + 1e-12);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace inrb
