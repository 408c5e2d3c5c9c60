#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "inrb/metrics.hpp"
#include "inrb/network.hpp"
#include "inrb/signal.hpp"
#include "inrb/tensor.hpp"

namespace inrb {

enum class TaskKind {
  AudioReg,
  ImageReg,
  SdfReg,
  Inpaint,
  SuperRes,
  Denoise,
  PoissonGrad,
  PoissonLap,
  CtRecon,
};

enum class MetricKind { Snr, Psnr, Iou };

const char* task_kind_name(TaskKind k);
TaskKind task_kind_from_name(const std::string& name);

// A concrete training/evaluation problem. Pointwise tasks sample batches of
// (coords_train, targets_train); operator tasks evaluate the network on the
// full grid and compare op * prediction against op * target.
struct TaskInstance {
  TaskKind kind = TaskKind::ImageReg;
  std::string label;
  int in_dim = 1;
  int out_dim = 1;

  Tensor coords_train, targets_train;
  Tensor coords_eval, targets_eval;
  std::vector<int> eval_index;  // primary-metric subset of eval rows (empty = all)
  std::vector<int> grid_dims;

  MetricKind metric = MetricKind::Psnr;
  bool eval_affine_fit = false;  // fit gain/offset before PSNR (Poisson tasks)

  bool operator_supervised = false;
  std::shared_ptr<const SparseMatrix> op;
  Tensor op_target;

  std::map<std::string, double> fixed_secondary;  // e.g. PSNR of the noisy input
};

TaskInstance make_regression_task(const SignalGrid& signal, TaskKind kind);
TaskInstance split_inpaint(const SignalGrid& image, uint64_t seed);
TaskInstance make_superres_task(const SignalGrid& image);
TaskInstance corrupt_denoise(const SignalGrid& image, double photons, double sigma_read,
                             uint64_t seed);
TaskInstance make_poisson_task(const SignalGrid& image, bool laplacian);
TaskInstance make_ct_task(const SignalGrid& density, int n_angles, int n_bins);

// Discrete operators on an H x W grid (row-major flattening).
// Gradient: central differences inside, one-sided at the borders; rows
// 0..HW-1 are d/drow, rows HW..2HW-1 are d/dcol.
SparseMatrix grad_operator(int h, int w);
// 5-point Laplacian on interior cells; (h-2)(w-2) rows.
SparseMatrix laplace_operator(int h, int w);
// 4x4 average pooling: (h/4)(w/4) rows.
SparseMatrix pool4_operator(int h, int w);

// Parallel-beam projector over the unit square. Rays step at half a cell and
// sample the density bilinearly; entries are accumulated per grid cell so the
// sinogram is linear in the density. step_div subdivides the half-cell step
// for oracle comparisons (step = cell/(2*step_div)).
SparseMatrix ct_projector(int n, const std::vector<double>& angles, int n_bins,
                          int step_div = 1);
Tensor ct_project(const SignalGrid& density, const std::vector<double>& angles, int n_bins);

// Primary + secondary metrics of an eval-grid prediction.
std::map<std::string, double> evaluate_task(const TaskInstance& task, const Tensor& pred_eval);
const char* primary_metric_name(const TaskInstance& task);

// Training.
struct TrainResult {
  std::vector<std::pair<int, double>> loss_curve;
  std::vector<std::pair<int, double>> metric_curve;
  std::map<std::string, double> metrics;
  bool diverged = false;
  double wall_seconds = 0.0;
};

TrainResult train(Network& net, const TaskInstance& task, const TrainConfig& cfg);

}  // namespace inrb
