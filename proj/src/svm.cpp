#include "bbofs/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bbofs/error.hpp"
#include "bbofs/simd/kernels.hpp"

namespace bbofs {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

MinMaxScaling MinMaxScaling::fit(const Dataset& train) {
  MinMaxScaling s;
  s.lo.assign(train.n_genes(), kInf);
  s.hi.assign(train.n_genes(), -kInf);
  for (std::size_t i = 0; i < train.n_samples(); ++i) {
    const auto r = train.row(i);
    for (std::size_t g = 0; g < r.size(); ++g) {
      s.lo[g] = std::min(s.lo[g], r[g]);
      s.hi[g] = std::max(s.hi[g], r[g]);
    }
  }
  return s;
}

void MinMaxScaling::apply(std::span<const double> x, std::span<double> out) const noexcept {
  for (std::size_t g = 0; g < x.size(); ++g) {
    const double range = hi[g] - lo[g];
    out[g] = range > 0.0 ? (x[g] - lo[g]) / range : 0.0;
  }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) noexcept {
  return std::exp(-gamma * simd::squared_distance(a, b));
}

std::vector<double> rbf_gram(std::span<const double> x, std::size_t n, std::size_t d,
                             double gamma) {
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    const auto xi = x.subspan(i * d, d);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rbf_kernel(xi, x.subspan(j * d, d), gamma);
      k[i * n + j] = v;
      k[j * n + i] = v;
    }
  }
  return k;
}

DualSolution solve_dual(std::span<const double> kernel, std::span<const Label> y, double cost,
                        double tol, std::size_t max_iterations) {
  const std::size_t n = y.size();
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q[i * n + j] = static_cast<double>(y[i] * y[j]) * kernel[i * n + j];
  auto q_row = [&](std::size_t i) { return std::span<const double>(q).subspan(i * n, n); };

  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& alpha = sol.alpha;
  auto at_upper = [&](std::size_t t) { return alpha[t] >= cost; };
  auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  for (;;) {
    // Working set: i maximises -y_t G_t over I_up; j minimises the
    // second-order objective decrease over I_low.
    double gmax = -kInf;
    double gmax2 = -kInf;
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!at_upper(t) && -grad[t] >= gmax) gmax = -grad[t], i = t;
      } else {
        if (!at_lower(t) && grad[t] >= gmax) gmax = grad[t], i = t;
      }
    }
    std::size_t j = n;
    double best_decrease = kInf;
    if (i < n) {
      const auto qi = q_row(i);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff;
        double quad;
        if (y[t] == 1) {
          if (at_lower(t)) continue;
          gmax2 = std::max(gmax2, grad[t]);
          grad_diff = gmax + grad[t];
          quad = q[i * n + i] + q[t * n + t] - 2.0 * y[i] * qi[t];
        } else {
          if (at_upper(t)) continue;
          gmax2 = std::max(gmax2, -grad[t]);
          grad_diff = gmax - grad[t];
          quad = q[i * n + i] + q[t * n + t] + 2.0 * y[i] * qi[t];
        }
        if (grad_diff > 0.0) {
          const double decrease = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
          if (decrease <= best_decrease) best_decrease = decrease, j = t;
        }
      }
    }
    sol.kkt_gap = gmax + gmax2;
    if (i == n || j == n || gmax + gmax2 < tol) break;
    if (++sol.iterations > max_iterations)
      throw ConvergenceError("SVM solver did not converge within " +
                             std::to_string(max_iterations) + " iterations");

    const auto qi = q_row(i);
    const auto qj = q_row(j);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = qi[i] + qj[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = diff;
      } else {
        if (alpha[i] < 0.0) alpha[i] = 0.0, alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > cost) alpha[i] = cost, alpha[j] = cost - diff;
      } else {
        if (alpha[j] > cost) alpha[j] = cost, alpha[i] = cost + diff;
      }
    } else {
      double quad = qi[i] + qj[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > cost) {
        if (alpha[i] > cost) alpha[i] = cost, alpha[j] = sum - cost;
      } else {
        if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = sum;
      }
      if (sum > cost) {
        if (alpha[j] > cost) alpha[j] = cost, alpha[i] = sum - cost;
      } else {
        if (alpha[i] < 0.0) alpha[i] = 0.0, alpha[j] = sum;
      }
    }
    simd::axpy2(grad, alpha[i] - old_i, qi, alpha[j] - old_j, qj);
  }

  // Offset: average y*G over free variables, else the midpoint of the
  // feasible interval implied by the bounded ones.
  double ub = kInf;
  double lb = -kInf;
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  // G = Qa - e, so 1/2 a'Qa - e'a = 1/2 sum a_i (G_i - 1).
  double primal_form = 0.0;
  for (std::size_t t = 0; t < n; ++t) primal_form += alpha[t] * (grad[t] - 1.0);
  sol.objective = -0.5 * primal_form;
  return sol;
}

SvmModel::SvmModel(MinMaxScaling scaling, std::vector<double> support_vectors,
                   std::vector<double> coefficients, double bias, double gamma, double cost,
                   DualSolution solution)
    : scaling_(std::move(scaling)),
      sv_(std::move(support_vectors)),
      coef_(std::move(coefficients)),
      bias_(bias),
      gamma_(gamma),
      cost_(cost),
      solution_(std::move(solution)) {}

double SvmModel::decision_value(std::span<const double> x) const {
  const std::size_t d = n_genes();
  if (x.size() != d)
    throw DataError("sample has " + std::to_string(x.size()) + " genes, model expects " +
                    std::to_string(d));
  std::vector<double> scaled(d);
  scaling_.apply(x, scaled);
  std::vector<double> k(coef_.size());
  for (std::size_t s = 0; s < coef_.size(); ++s)
    k[s] = rbf_kernel(std::span<const double>(sv_).subspan(s * d, d), scaled, gamma_);
  return simd::dot(coef_, k) + bias_;
}

SvmModel svm_train(const Dataset& train, const SvmParams& params) {
  if (!(params.cost > 0.0)) throw ConfigError("SVM cost must be positive");
  if (!(params.gamma > 0.0)) throw ConfigError("SVM gamma must be positive");
  if (train.count(1) == 0 || train.count(-1) == 0)
    throw DataError("SVM training data must contain both classes");
  const std::size_t n = train.n_samples();
  const std::size_t d = train.n_genes();

  auto scaling = MinMaxScaling::fit(train);
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n; ++i)
    scaling.apply(train.row(i), std::span<double>(x).subspan(i * d, d));

  const auto gram = rbf_gram(x, n, d, params.gamma);
  const std::size_t max_iter = std::max<std::size_t>(params.max_kernel_evals / (2 * n), 1);
  auto sol = solve_dual(gram, train.labels(), params.cost, params.tol, max_iter);

  std::vector<double> sv;
  std::vector<double> coef;
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    coef.push_back(sol.alpha[i] * train.label(i));
    sv.insert(sv.end(), x.begin() + static_cast<std::ptrdiff_t>(i * d),
              x.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  }
  const double bias = -sol.rho;
  return SvmModel(std::move(scaling), std::move(sv), std::move(coef), bias, params.gamma,
                  params.cost, std::move(sol));
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  return model.decision_value(x) >= 0.0 ? Label{1} : Label{-1};
}

}  // namespace bbofs
