#include "inrb/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace inrb {

namespace {
constexpr double kPi = 3.14159265358979323846;

Tensor grid_targets(const SignalGrid& g) {
  Tensor t({static_cast<int>(g.points()), g.channels});
  for (std::size_t i = 0; i < g.total(); ++i) t[i] = g.values[i];
  return t;
}

std::vector<double> column(const Tensor& t, const std::vector<int>& rows) {
  std::vector<double> out;
  if (rows.empty()) {
    out.assign(t.data(), t.data() + t.size());
  } else {
    out.reserve(rows.size() * t.cols());
    for (int r : rows)
      for (int c = 0; c < t.cols(); ++c) out.push_back(t.at(r, c));
  }
  return out;
}

}  // namespace

const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::AudioReg: return "audio_reg";
    case TaskKind::ImageReg: return "image_reg";
    case TaskKind::SdfReg: return "sdf_reg";
    case TaskKind::Inpaint: return "inpaint";
    case TaskKind::SuperRes: return "super_res";
    case TaskKind::Denoise: return "denoise";
    case TaskKind::PoissonGrad: return "poisson_grad";
    case TaskKind::PoissonLap: return "poisson_lap";
    case TaskKind::CtRecon: return "ct_recon";
  }
  return "?";
}

TaskKind task_kind_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(TaskKind::CtRecon); ++i) {
    TaskKind k = static_cast<TaskKind>(i);
    if (name == task_kind_name(k)) return k;
  }
  std::string valid;
  for (int i = 0; i <= static_cast<int>(TaskKind::CtRecon); ++i) {
    if (!valid.empty()) valid += ", ";
    valid += task_kind_name(static_cast<TaskKind>(i));
  }
  throw std::runtime_error("unknown task '" + name + "' (valid: " + valid + ")");
}

TaskInstance make_regression_task(const SignalGrid& signal, TaskKind kind) {
  if (signal.points() == 0) throw std::runtime_error("regression task: empty signal");
  int want_rank = kind == TaskKind::AudioReg ? 1 : (kind == TaskKind::ImageReg ? 2 : 3);
  if (signal.rank() != want_rank)
    throw std::runtime_error(std::string("regression task: ") + task_kind_name(kind) +
                             " expects rank " + std::to_string(want_rank) + " signal, got rank " +
                             std::to_string(signal.rank()));
  TaskInstance t;
  t.kind = kind;
  t.label = task_kind_name(kind);
  t.in_dim = signal.rank();
  t.out_dim = signal.channels;
  t.grid_dims = signal.dims;
  t.coords_train = grid_coordinates(signal.dims);
  t.targets_train = grid_targets(signal);
  t.coords_eval = t.coords_train;
  t.targets_eval = t.targets_train;
  t.metric = kind == TaskKind::AudioReg ? MetricKind::Snr
                                        : (kind == TaskKind::ImageReg ? MetricKind::Psnr
                                                                      : MetricKind::Iou);
  return t;
}

TaskInstance split_inpaint(const SignalGrid& image, uint64_t seed) {
  if (image.rank() != 2) throw std::runtime_error("inpaint: expects a 2-D signal");
  int n = static_cast<int>(image.points());
  if (n < 5) throw std::runtime_error("inpaint: image smaller than 5 pixels");
  int n_train = static_cast<int>(std::lround(0.20 * n));

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<int> train_idx(idx.begin(), idx.begin() + n_train);
  std::vector<int> eval_idx(idx.begin() + n_train, idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(eval_idx.begin(), eval_idx.end());

  TaskInstance t;
  t.kind = TaskKind::Inpaint;
  t.label = "inpaint";
  t.in_dim = 2;
  t.out_dim = image.channels;
  t.grid_dims = image.dims;
  Tensor all_coords = grid_coordinates(image.dims);
  Tensor all_targets = grid_targets(image);
  t.coords_train = Tensor({n_train, 2});
  t.targets_train = Tensor({n_train, image.channels});
  for (int i = 0; i < n_train; ++i) {
    for (int c = 0; c < 2; ++c) t.coords_train.at(i, c) = all_coords.at(train_idx[i], c);
    for (int c = 0; c < image.channels; ++c)
      t.targets_train.at(i, c) = all_targets.at(train_idx[i], c);
  }
  t.coords_eval = std::move(all_coords);
  t.targets_eval = std::move(all_targets);
  t.eval_index = std::move(eval_idx);
  t.metric = MetricKind::Psnr;
  return t;
}

TaskInstance make_superres_task(const SignalGrid& image) {
  if (image.rank() != 2) throw std::runtime_error("super_res: expects a 2-D signal");
  int h = image.dims[0], w = image.dims[1];
  if (h % 4 != 0 || w % 4 != 0)
    throw std::runtime_error("super_res: dimensions " + std::to_string(h) + "x" +
                             std::to_string(w) + " not divisible by 4");
  TaskInstance t;
  t.kind = TaskKind::SuperRes;
  t.label = "super_res";
  t.in_dim = 2;
  t.out_dim = image.channels;
  t.grid_dims = image.dims;

  int ph = h / 4, pw = w / 4;
  t.coords_train = grid_coordinates({ph, pw});
  t.targets_train = Tensor({ph * pw, image.channels});
  for (int r = 0; r < ph; ++r)
    for (int c = 0; c < pw; ++c)
      for (int ch = 0; ch < image.channels; ++ch) {
        double acc = 0.0;
        for (int dr = 0; dr < 4; ++dr)
          for (int dc = 0; dc < 4; ++dc)
            acc += image.values[(static_cast<std::size_t>(4 * r + dr) * w + (4 * c + dc)) *
                                    image.channels +
                                ch];
        t.targets_train.at(r * pw + c, ch) = acc / 16.0;
      }
  t.coords_eval = grid_coordinates(image.dims);
  t.targets_eval = grid_targets(image);
  t.metric = MetricKind::Psnr;
  return t;
}

TaskInstance corrupt_denoise(const SignalGrid& image, double photons, double sigma_read,
                             uint64_t seed) {
  if (image.rank() != 2) throw std::runtime_error("denoise: expects a 2-D signal");
  if (!(photons > 0)) throw std::runtime_error("denoise: photon count must be > 0");
  TaskInstance t;
  t.kind = TaskKind::Denoise;
  t.label = "denoise";
  t.in_dim = 2;
  t.out_dim = image.channels;
  t.grid_dims = image.dims;
  t.coords_train = grid_coordinates(image.dims);
  t.coords_eval = t.coords_train;
  t.targets_eval = grid_targets(image);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> readout(0.0, 1.0);
  t.targets_train = Tensor({static_cast<int>(image.points()), image.channels});
  for (std::size_t i = 0; i < image.total(); ++i) {
    double lambda = image.values[i] * photons;
    double shot = 0.0;
    if (lambda > 0.0) {
      std::poisson_distribution<long> pois(lambda);
      shot = static_cast<double>(pois(rng)) / photons;
    }
    double noise = sigma_read > 0.0 ? readout(rng) * sigma_read : 0.0;
    t.targets_train[i] = shot + noise;
  }
  t.metric = MetricKind::Psnr;
  t.fixed_secondary["psnr_noisy_input"] =
      metric_psnr(t.targets_train.vec(), t.targets_eval.vec());
  return t;
}

SparseMatrix grad_operator(int h, int w) {
  if (h < 3 || w < 3) throw std::runtime_error("grad_operator: grid smaller than 3x3");
  std::vector<std::tuple<int, int, double>> trip;
  auto id = [w](int r, int c) { return r * w + c; };
  int hw = h * w;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      // d/drow
      if (r == 0) {
        trip.emplace_back(id(r, c), id(r + 1, c), 1.0);
        trip.emplace_back(id(r, c), id(r, c), -1.0);
      } else if (r == h - 1) {
        trip.emplace_back(id(r, c), id(r, c), 1.0);
        trip.emplace_back(id(r, c), id(r - 1, c), -1.0);
      } else {
        trip.emplace_back(id(r, c), id(r + 1, c), 0.5);
        trip.emplace_back(id(r, c), id(r - 1, c), -0.5);
      }
      // d/dcol
      if (c == 0) {
        trip.emplace_back(hw + id(r, c), id(r, c + 1), 1.0);
        trip.emplace_back(hw + id(r, c), id(r, c), -1.0);
      } else if (c == w - 1) {
        trip.emplace_back(hw + id(r, c), id(r, c), 1.0);
        trip.emplace_back(hw + id(r, c), id(r, c - 1), -1.0);
      } else {
        trip.emplace_back(hw + id(r, c), id(r, c + 1), 0.5);
        trip.emplace_back(hw + id(r, c), id(r, c - 1), -0.5);
      }
    }
  return SparseMatrix::from_triplets(2 * hw, hw, trip);
}

SparseMatrix laplace_operator(int h, int w) {
  if (h < 3 || w < 3) throw std::runtime_error("laplace_operator: grid smaller than 3x3");
  std::vector<std::tuple<int, int, double>> trip;
  auto id = [w](int r, int c) { return r * w + c; };
  int row = 0;
  for (int r = 1; r < h - 1; ++r)
    for (int c = 1; c < w - 1; ++c) {
      trip.emplace_back(row, id(r, c), -4.0);
      trip.emplace_back(row, id(r - 1, c), 1.0);
      trip.emplace_back(row, id(r + 1, c), 1.0);
      trip.emplace_back(row, id(r, c - 1), 1.0);
      trip.emplace_back(row, id(r, c + 1), 1.0);
      ++row;
    }
  return SparseMatrix::from_triplets((h - 2) * (w - 2), h * w, trip);
}

SparseMatrix pool4_operator(int h, int w) {
  if (h % 4 != 0 || w % 4 != 0) throw std::runtime_error("pool4_operator: dims not divisible by 4");
  std::vector<std::tuple<int, int, double>> trip;
  int pw = w / 4;
  for (int r = 0; r < h / 4; ++r)
    for (int c = 0; c < pw; ++c)
      for (int dr = 0; dr < 4; ++dr)
        for (int dc = 0; dc < 4; ++dc)
          trip.emplace_back(r * pw + c, (4 * r + dr) * w + (4 * c + dc), 1.0 / 16.0);
  return SparseMatrix::from_triplets((h / 4) * (w / 4), h * w, trip);
}

TaskInstance make_poisson_task(const SignalGrid& image, bool laplacian) {
  if (image.rank() != 2 || image.channels != 1)
    throw std::runtime_error("poisson task: expects a 2-D single-channel signal");
  int h = image.dims[0], w = image.dims[1];
  TaskInstance t;
  t.kind = laplacian ? TaskKind::PoissonLap : TaskKind::PoissonGrad;
  t.label = task_kind_name(t.kind);
  t.in_dim = 2;
  t.out_dim = 1;
  t.grid_dims = image.dims;
  t.coords_train = grid_coordinates(image.dims);
  t.targets_train = grid_targets(image);
  t.coords_eval = t.coords_train;
  t.targets_eval = t.targets_train;
  t.metric = MetricKind::Psnr;
  t.eval_affine_fit = true;
  t.operator_supervised = true;
  t.op = std::make_shared<SparseMatrix>(laplacian ? laplace_operator(h, w) : grad_operator(h, w));
  t.op_target = Tensor({t.op->rows, 1});
  t.op->apply(t.targets_train, t.op_target);
  return t;
}

SparseMatrix ct_projector(int n, const std::vector<double>& angles, int n_bins, int step_div) {
  if (angles.empty() || n_bins <= 0)
    throw std::runtime_error("ct_projector: need at least one angle and one detector bin");
  double cell = 1.0 / n;
  double step = cell / (2.0 * step_div);
  double half_span = std::sqrt(2.0) / 2.0;
  int n_steps = static_cast<int>(std::ceil(2.0 * half_span / step));
  std::vector<std::tuple<int, int, double>> trip;
  trip.reserve(static_cast<std::size_t>(angles.size()) * n_bins * n_steps / 4);

  for (std::size_t ai = 0; ai < angles.size(); ++ai) {
    double ca = std::cos(angles[ai]);
    double sa = std::sin(angles[ai]);
    for (int b = 0; b < n_bins; ++b) {
      double s = -half_span + (b + 0.5) * (2.0 * half_span / n_bins);
      int row = static_cast<int>(ai) * n_bins + b;
      // ray: p(tau) = center + s * normal + tau * direction
      double px0 = 0.5 - s * sa;
      double py0 = 0.5 + s * ca;
      for (int k = 0; k < n_steps; ++k) {
        double tau = -half_span + (k + 0.5) * (2.0 * half_span / n_steps);
        double x = px0 + tau * ca;
        double y = py0 + tau * sa;
        // bilinear weights over the four nearest cell centers; zero outside
        double u = x / cell - 0.5;
        double v = y / cell - 0.5;
        int i0 = static_cast<int>(std::floor(u));
        int j0 = static_cast<int>(std::floor(v));
        double fu = u - i0, fv = v - j0;
        double wts[4] = {(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv};
        int cells[4][2] = {{i0, j0}, {i0 + 1, j0}, {i0, j0 + 1}, {i0 + 1, j0 + 1}};
        double dl = 2.0 * half_span / n_steps;
        for (int q = 0; q < 4; ++q) {
          int ci = cells[q][0], cj = cells[q][1];
          if (ci < 0 || ci >= n || cj < 0 || cj >= n) continue;
          if (wts[q] == 0.0) continue;
          // grid is row-major with row 0 at y near 0: col = ci, row = cj
          trip.emplace_back(row, cj * n + ci, wts[q] * dl);
        }
      }
    }
  }
  return SparseMatrix::from_triplets(static_cast<int>(angles.size()) * n_bins, n * n, trip);
}

Tensor ct_project(const SignalGrid& density, const std::vector<double>& angles, int n_bins) {
  if (density.rank() != 2 || density.dims[0] != density.dims[1])
    throw std::runtime_error("ct_project: expects a square 2-D density grid");
  SparseMatrix a = ct_projector(density.dims[0], angles, n_bins);
  Tensor x({static_cast<int>(density.points()), 1});
  for (std::size_t i = 0; i < density.points(); ++i) x[i] = density.values[i];
  Tensor sino({a.rows, 1});
  a.apply(x, sino);
  return Tensor({static_cast<int>(angles.size()), n_bins}, sino.vec());
}

TaskInstance make_ct_task(const SignalGrid& density, int n_angles, int n_bins) {
  if (density.rank() != 2 || density.dims[0] != density.dims[1])
    throw std::runtime_error("ct task: expects a square 2-D density grid");
  if (n_angles <= 0 || n_bins <= 0) throw std::runtime_error("ct task: need angles and bins");
  TaskInstance t;
  t.kind = TaskKind::CtRecon;
  t.label = "ct_recon";
  t.in_dim = 2;
  t.out_dim = 1;
  t.grid_dims = density.dims;
  t.coords_train = grid_coordinates(density.dims);
  t.targets_train = grid_targets(density);
  t.coords_eval = t.coords_train;
  t.targets_eval = t.targets_train;
  t.metric = MetricKind::Psnr;
  t.operator_supervised = true;
  std::vector<double> angles(n_angles);
  for (int i = 0; i < n_angles; ++i) angles[i] = kPi * i / n_angles;
  t.op = std::make_shared<SparseMatrix>(ct_projector(density.dims[0], angles, n_bins));
  t.op_target = Tensor({t.op->rows, 1});
  t.op->apply(t.targets_train, t.op_target);
  return t;
}

const char* primary_metric_name(const TaskInstance& task) {
  switch (task.metric) {
    case MetricKind::Snr: return "snr_db";
    case MetricKind::Psnr: return "psnr_db";
    case MetricKind::Iou: return "iou";
  }
  return "?";
}

std::map<std::string, double> evaluate_task(const TaskInstance& task, const Tensor& pred_eval) {
  if (!pred_eval.same_shape(task.targets_eval))
    throw std::runtime_error("evaluate_task: prediction " + pred_eval.shape_str() +
                             " does not match eval targets " + task.targets_eval.shape_str());
  std::map<std::string, double> m = task.fixed_secondary;
  std::vector<double> pred = column(pred_eval, task.eval_index);
  std::vector<double> target = column(task.targets_eval, task.eval_index);
  switch (task.metric) {
    case MetricKind::Snr:
      m["snr_db"] = metric_snr(pred, target);
      m["lsd"] = metric_lsd(pred, target);
      break;
    case MetricKind::Psnr:
      m["psnr_db"] = task.eval_affine_fit ? metric_psnr_affine(pred, target)
                                          : metric_psnr(pred, target);
      break;
    case MetricKind::Iou:
      m["iou"] = metric_iou(pred, target);
      break;
  }
  if (!task.eval_index.empty()) {
    // whole-signal secondary alongside the held-out primary
    m["psnr_db_full"] = metric_psnr(column(pred_eval, {}), column(task.targets_eval, {}));
  }
  if (task.eval_affine_fit) {
    m["psnr_db_raw"] = metric_psnr(pred, target);
  }
  return m;
}

TrainResult train(Network& net, const TaskInstance& task, const TrainConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  TrainResult result;
  if (net.config().in_dim != task.in_dim || net.config().out_dim != task.out_dim)
    throw std::runtime_error("train: network dims (" + std::to_string(net.config().in_dim) + "->" +
                             std::to_string(net.config().out_dim) + ") do not match task (" +
                             std::to_string(task.in_dim) + "->" + std::to_string(task.out_dim) +
                             ")");

  int n_train = task.coords_train.rows();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick(0, n_train - 1);
  int n_params = net.n_params();

  auto make_loss = [&](Tape& tape, const Network::Bound& bound, const Tensor& coords,
                       const Tensor& targets) {
    Value x = tape.leaf(coords);
    Value pred = net.forward(tape, bound, x);
    if (task.operator_supervised) {
      Value projected = tape.sparse_matvec(task.op, pred);
      Value r = tape.sub(projected, tape.leaf(task.op_target));
      return tape.mean(tape.mul(r, r));
    }
    Value r = tape.sub(pred, tape.leaf(targets));
    return tape.mean(tape.mul(r, r));
  };

  bool full_grid = task.operator_supervised;
  Tensor batch_coords, batch_targets;
  double loss_value = 0.0;
  for (int step = 0; step < cfg.steps; ++step) {
    if (full_grid) {
      batch_coords = task.coords_train;
      batch_targets = task.targets_train;
    } else {
      int bs = cfg.batch;  // with-replacement sampling
      batch_coords = Tensor({bs, task.in_dim});
      batch_targets = Tensor({bs, task.out_dim});
      for (int i = 0; i < bs; ++i) {
        int r = pick(rng);
        for (int c = 0; c < task.in_dim; ++c) batch_coords.at(i, c) = task.coords_train.at(r, c);
        for (int c = 0; c < task.out_dim; ++c)
          batch_targets.at(i, c) = task.targets_train.at(r, c);
      }
    }

    Tape tape;
    Network::Bound bound = net.bind(tape);
    Value loss = make_loss(tape, bound, batch_coords, batch_targets);
    loss_value = tape.value(loss)[0];
    if (!std::isfinite(loss_value)) {
      result.diverged = true;
      break;
    }
    if (step % cfg.record_every == 0) result.loss_curve.emplace_back(step, loss_value);

    std::vector<Tensor> grads = tape.backward(loss, n_params);
    adam_step(net.params(), grads, cosine_lr(cfg, step), cfg);
  }
  if (!result.diverged) result.loss_curve.emplace_back(cfg.steps, loss_value);

  if (!result.diverged) {
    Tensor pred = net.predict(task.coords_eval);
    bool finite = true;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (!std::isfinite(pred[i])) finite = false;
    if (!finite) {
      result.diverged = true;
    } else {
      result.metrics = evaluate_task(task, pred);
      result.metric_curve.emplace_back(cfg.steps, result.metrics[primary_metric_name(task)]);
    }
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace inrb
