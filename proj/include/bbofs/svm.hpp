#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bbofs/data.hpp"

namespace bbofs {

struct SvmParams {
  double cost = 50.0;
  double gamma = 0.02;
  double tol = 1e-3;
  /// Solver budget in kernel-column reads (each SMO step reads two columns).
  std::size_t max_kernel_evals = 10'000'000;
};

/// Per-gene affine map of the training range onto [0, 1]. Constant genes map
/// to 0.
struct MinMaxScaling {
  std::vector<double> lo;
  std::vector<double> hi;

  static MinMaxScaling fit(const Dataset& train);
  void apply(std::span<const double> x, std::span<double> out) const noexcept;
};

/// Solution of the C-SVC dual
///   min 1/2 a'Qa - e'a   s.t. 0 <= a_i <= C, y'a = 0,   Q_ij = y_i y_j K_ij.
struct DualSolution {
  std::vector<double> alpha;  // unsigned, one per training sample
  double rho = 0.0;           // decision offset: f(x) = sum a_i y_i K(x_i, x) - rho
  double objective = 0.0;     // dual objective being maximised: e'a - 1/2 a'Qa
  double kkt_gap = 0.0;       // max violation m(a) - M(a) at exit
  std::size_t iterations = 0;
};

/// SMO decomposition with second-order working-set selection on a dense,
/// precomputed kernel matrix (n x n, row-major). Throws ConvergenceError when
/// the iteration budget is exhausted.
DualSolution solve_dual(std::span<const double> kernel, std::span<const Label> y, double cost,
                        double tol, std::size_t max_iterations);

/// exp(-gamma * |a - b|^2)
double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) noexcept;

/// Dense RBF Gram matrix of the rows of `x` (n rows of width d).
std::vector<double> rbf_gram(std::span<const double> x, std::size_t n, std::size_t d,
                             double gamma);

class SvmModel {
 public:
  SvmModel(MinMaxScaling scaling, std::vector<double> support_vectors,
           std::vector<double> coefficients, double bias, double gamma, double cost,
           DualSolution solution);

  std::size_t n_genes() const noexcept { return scaling_.lo.size(); }
  std::size_t n_support() const noexcept { return coef_.size(); }
  /// Scaled support vectors, row-major n_support x n_genes.
  std::span<const double> support_vectors() const noexcept { return sv_; }
  /// alpha_i * y_i for each support vector.
  std::span<const double> coefficients() const noexcept { return coef_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }
  double cost() const noexcept { return cost_; }
  const MinMaxScaling& scaling() const noexcept { return scaling_; }
  const DualSolution& solution() const noexcept { return solution_; }

  /// f(x) = sum_i coef_i K(sv_i, scale(x)) + bias, for an unscaled sample x.
  double decision_value(std::span<const double> x) const;

 private:
  MinMaxScaling scaling_;
  std::vector<double> sv_;
  std::vector<double> coef_;
  double bias_;
  double gamma_;
  double cost_;
  DualSolution solution_;
};

/// Fits min-max scaling on `train`, then solves the RBF C-SVC dual.
SvmModel svm_train(const Dataset& train, const SvmParams& params = {});

/// Sign of the decision value; f(x) == 0 maps to +1. Throws DataError on a
/// dimension mismatch.
Label svm_predict(const SvmModel& model, std::span<const double> x);

}  // namespace bbofs
