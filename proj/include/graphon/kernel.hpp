#pragma once

// Interaction kernels a(t, i, j) in [0, 1] and communication kernels phi(r).

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace graphon {

struct KernelMetadata {
  bool is_symmetric = false;
  bool is_balanced = false;
  bool is_stationary = false;
  std::optional<double> period;
  /// Instants where the kernel formula changes, starting with 0. Taken modulo
  /// `period` when the kernel is periodic.
  std::vector<double> switch_times;
  /// Constant in time between consecutive switch times.
  bool piecewise_constant = false;
};

class TimeKernel {
 public:
  using Evaluator = std::function<double(double t, double i, double j)>;
  /// a(t, i, j) = profile(t, j) for every i.
  using RowProfile = std::function<double(double t, double j)>;
  /// a(t, i, j) = factor(t, i) * factor(t, j).
  using Factor = std::function<double(double t, double i)>;

  TimeKernel(std::string name, Evaluator evaluator, KernelMetadata metadata);

  double operator()(double t, double i, double j) const { return evaluator_(t, i, j); }

  const std::string& name() const { return name_; }
  const KernelMetadata& metadata() const { return metadata_; }

  TimeKernel& with_row_profile(RowProfile profile);
  TimeKernel& with_factor(Factor factor);
  const RowProfile& row_profile() const { return row_profile_; }
  const Factor& factor() const { return factor_; }

  /// Symmetric or balanced: the plain barycenter is conserved for phi = 1.
  bool balanced_topology() const {
    return metadata_.is_symmetric || metadata_.is_balanced;
  }

  /// Switch instants strictly inside (t0, t1), increasing.
  std::vector<double> breakpoints(double t0, double t1) const;

  /// Smallest gap between consecutive switch instants; +inf without switches.
  double dwell_time() const;

 private:
  std::string name_;
  Evaluator evaluator_;
  KernelMetadata metadata_;
  RowProfile row_profile_;
  Factor factor_;
};

struct KernelParams {
  double T = 10.0;
  int n = 10;
};

/// leader | balanced_cycle | symmetric_switch | half_connected | complete |
/// two_block | zero. Throws std::invalid_argument on unknown names or
/// non-positive parameters.
TimeKernel builtin_kernel(const std::string& name, const KernelParams& params = {});

/// Grid file: "N <int> T_SAMPLES <int>" followed by T_SAMPLES blocks of N x N
/// weights. Each block is held for `block_duration` and the sequence repeats.
TimeKernel parse_grid_kernel(std::istream& in, double block_duration = 1.0);
TimeKernel load_grid_kernel(const std::string& path, double block_duration = 1.0);

class NonlinKernel {
 public:
  enum class Kind { constant, cucker_smale, custom };

  NonlinKernel(std::string description, std::function<double(double)> evaluator,
               double c_phi, Kind kind = Kind::custom);

  double operator()(double r) const { return evaluator_(r); }
  double c_phi() const { return c_phi_; }
  Kind kind() const { return kind_; }
  const std::string& description() const { return description_; }

 private:
  std::string description_;
  std::function<double(double)> evaluator_;
  double c_phi_;
  Kind kind_;
};

/// phi(r) = 1 / (1 + r)^2
NonlinKernel cucker_smale_phi();
NonlinKernel constant_phi(double value = 1.0);

/// min of phi over [0, 2R]: uniform grid, then golden-section refinement
/// around the best grid point.
double gamma_R(const NonlinKernel& phi, double R, int grid_points = 10000);

}  // namespace graphon
