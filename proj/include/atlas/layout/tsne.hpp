#pragma once

// Exact (O(N^2)) t-SNE. Everything here is templated on the scalar type and
// works on dense Eigen matrices; `layout.hpp` wraps it for embedding files.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atlas/errors.hpp"
#include "atlas/layout/prng.hpp"

namespace atlas::layout {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

struct TsneConfig {
  double perplexity = 10.0;
  int iterations = 1000;
  double early_exaggeration_factor = 12.0;
  int exaggeration_iters = 250;
  double learning_rate = 200.0;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;  // from iteration `exaggeration_iters` on
  std::uint64_t seed = 0;
  double entropy_tolerance = 1e-5;
  int max_bisection_steps = 50;
  double init_stddev = 1e-4;
  double duplicate_jitter_stddev = 1e-8;

  /// Throws InputError when a field is out of range or, for n >= 2 points,
  /// when 3 * perplexity >= n - 1.
  void validate(Eigen::Index n) const {
    auto fail = [](const std::string& what) { throw InputError("t-SNE config: " + what); };
    if (!(perplexity > 0.0)) fail("perplexity must be positive");
    if (iterations <= 0) fail("iterations must be positive");
    if (!(early_exaggeration_factor > 0.0)) fail("early exaggeration factor must be positive");
    if (exaggeration_iters <= 0) fail("exaggeration_iters must be positive");
    if (exaggeration_iters >= iterations) fail("exaggeration_iters must be below iterations");
    if (!(learning_rate > 0.0)) fail("learning rate must be positive");
    for (double m : {momentum_initial, momentum_final}) {
      if (!(m >= 0.0 && m < 1.0)) fail("momentum must lie in [0, 1)");
    }
    if (!(entropy_tolerance > 0.0)) fail("entropy tolerance must be positive");
    if (max_bisection_steps <= 0) fail("max_bisection_steps must be positive");
    if (n >= 2 && !(3.0 * perplexity < static_cast<double>(n - 1))) {
      fail("perplexity " + std::to_string(perplexity) + " too large for " + std::to_string(n) +
           " points (need 3 * perplexity < N - 1)");
    }
  }
};

/// Pairwise squared Euclidean distances between the rows of `points`.
template <typename Derived>
Matrix<typename Derived::Scalar> squared_distances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  Matrix<Scalar> d2 = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar value = (points.row(i) - points.row(j)).squaredNorm();
      d2(i, j) = value;
      d2(j, i) = value;
    }
  }
  return d2;
}

template <typename Scalar>
struct ConditionalAffinities {
  Matrix<Scalar> p;               // row i holds P(j | i); zero diagonal
  Vector<Scalar> sigma;           // Gaussian bandwidth per row
  Vector<Scalar> entropy_bits;    // achieved Shannon entropy per row, in bits
  std::vector<bool> converged;    // false: bisection stopped at max_steps
  bool all_converged() const {
    for (bool c : converged) {
      if (!c) return false;
    }
    return true;
  }
};

/// Calibrates one Gaussian per row so that 2^H(P_i) matches the perplexity,
/// bisecting on the precision beta = 1 / (2 sigma^2). Rows that miss the
/// tolerance within `max_steps` keep the closest candidate seen and are
/// flagged in `converged`.
template <typename Scalar>
ConditionalAffinities<Scalar> conditional_affinities(const Matrix<Scalar>& distances,
                                                     Scalar perplexity, Scalar tolerance,
                                                     int max_steps) {
  const Eigen::Index n = distances.rows();
  if (distances.cols() != n) throw InputError("distance matrix must be square");
  if (n < 2) throw InputError("affinities need at least two points");
  if (!distances.allFinite()) throw InputError("distance matrix has non-finite entries");
  if (!(perplexity > Scalar(0)) || !(perplexity <= Scalar(n - 1))) {
    throw InputError("perplexity must lie in (0, N - 1]");
  }
  if ((distances.array() < Scalar(0)).any()) throw InputError("distances must be non-negative");
  Scalar off_diagonal_max = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) off_diagonal_max = std::max(off_diagonal_max, distances(i, j));
    }
  }
  if (off_diagonal_max == Scalar(0)) {
    throw DegenerateInputError("all points are identical; affinities are undefined");
  }

  const Scalar target = std::log2(perplexity);
  const Scalar ln2 = std::numbers::ln2_v<Scalar>;
  ConditionalAffinities<Scalar> out;
  out.p = Matrix<Scalar>::Zero(n, n);
  out.sigma.resize(n);
  out.entropy_bits.resize(n);
  out.converged.assign(static_cast<std::size_t>(n), false);

  Vector<Scalar> shifted(n - 1);
  Vector<Scalar> row(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0, k = 0; j < n; ++j) {
      if (j != i) shifted(k++) = distances(i, j);
    }
    shifted.array() -= shifted.minCoeff();  // exp() stays in range for any beta
    const Scalar mean = shifted.mean();

    // Entropy (bits) of the row at precision beta; fills `row` normalized.
    auto entropy_at = [&](Scalar beta) {
      row = (-beta * shifted.array()).exp().matrix();
      const Scalar total = row.sum();
      const Scalar weighted = shifted.dot(row);
      row /= total;
      return (std::log(total) + beta * weighted / total) / ln2;
    };

    Scalar beta = mean > Scalar(0) ? Scalar(1) / mean : Scalar(1);
    Scalar beta_low = 0;
    Scalar beta_high = std::numeric_limits<Scalar>::infinity();
    Scalar best_gap = std::numeric_limits<Scalar>::infinity();
    Scalar best_beta = beta;
    Scalar best_entropy = 0;
    Vector<Scalar> best_row = row;
    for (int step = 0; step < max_steps; ++step) {
      const Scalar entropy = entropy_at(beta);
      const Scalar gap = entropy - target;
      if (std::abs(gap) < best_gap) {
        best_gap = std::abs(gap);
        best_beta = beta;
        best_entropy = entropy;
        best_row = row;
      }
      if (std::abs(gap) < tolerance) {
        out.converged[static_cast<std::size_t>(i)] = true;
        break;
      }
      if (gap > 0) {  // too flat: sharpen
        beta_low = beta;
        beta = std::isinf(beta_high) ? beta * 2 : (beta + beta_high) / 2;
      } else {
        beta_high = beta;
        beta = (beta + beta_low) / 2;
      }
    }
    for (Eigen::Index j = 0, k = 0; j < n; ++j) {
      if (j != i) out.p(i, j) = best_row(k++);
    }
    out.sigma(i) = std::sqrt(Scalar(1) / (Scalar(2) * best_beta));
    out.entropy_bits(i) = best_entropy;
  }
  return out;
}

/// P_ij = (P(j|i) + P(i|j)) / (2N).
template <typename Scalar>
Matrix<Scalar> symmetrize(const Matrix<Scalar>& conditional) {
  const auto n = static_cast<Scalar>(conditional.rows());
  return (conditional + conditional.transpose()) / (Scalar(2) * n);
}

/// Unnormalized Student-t kernel (1 + |y_i - y_j|^2)^-1 with zero diagonal.
template <typename Scalar>
Matrix<Scalar> student_t_kernel(const Points2<Scalar>& y) {
  Matrix<Scalar> kernel = (Scalar(1) + squared_distances(y).array()).inverse().matrix();
  kernel.diagonal().setZero();
  return kernel;
}

/// KL(P || Q) summed over pairs with p_ij > 0.
template <typename Scalar>
Scalar kl_divergence(const Matrix<Scalar>& p, const Matrix<Scalar>& q) {
  Scalar kl = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (p(i, j) > Scalar(0)) kl += p(i, j) * std::log(p(i, j) / q(i, j));
    }
  }
  return kl;
}

/// KL(P || Q(y)) for a symmetric joint P.
template <typename Scalar>
Scalar kl_divergence(const Matrix<Scalar>& p, const Points2<Scalar>& y) {
  const Matrix<Scalar> kernel = student_t_kernel(y);
  return kl_divergence(p, Matrix<Scalar>(kernel / kernel.sum()));
}

/// dKL/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1.
template <typename Scalar>
Points2<Scalar> kl_gradient(const Matrix<Scalar>& p, const Matrix<Scalar>& q,
                            const Matrix<Scalar>& kernel, const Points2<Scalar>& y) {
  const Matrix<Scalar> weights = (p - q).cwiseProduct(kernel);
  const Vector<Scalar> row_sums = weights.rowwise().sum();
  return Scalar(4) * (row_sums.asDiagonal() * y - weights * y);
}

template <typename Scalar>
Points2<Scalar> kl_gradient(const Matrix<Scalar>& p, const Points2<Scalar>& y) {
  const Matrix<Scalar> kernel = student_t_kernel(y);
  const Matrix<Scalar> q = kernel / kernel.sum();
  return kl_gradient(p, q, kernel, y);
}

/// Adds seeded |N(0, stddev)| jitter to zero off-diagonal distances (exact
/// duplicate points). Returns the number of pairs touched.
template <typename Scalar>
std::size_t jitter_duplicate_distances(Matrix<Scalar>& distances, std::uint64_t seed,
                                       double stddev) {
  GaussianSampler gauss(seed ^ 0xD1B54A32D192ED03ULL);
  std::size_t touched = 0;
  for (Eigen::Index i = 0; i < distances.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < distances.cols(); ++j) {
      if (distances(i, j) != Scalar(0)) continue;
      Scalar value = static_cast<Scalar>(std::abs(gauss(0.0, stddev)));
      if (!(value > Scalar(0))) value = static_cast<Scalar>(stddev);
      distances(i, j) = value;
      distances(j, i) = value;
      ++touched;
    }
  }
  return touched;
}

/// Maps each column affinely onto [0, 1]; a constant column maps to 0.5.
template <typename Scalar>
void normalize_unit_square(Points2<Scalar>& y) {
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    const Scalar lo = y.col(c).minCoeff();
    const Scalar hi = y.col(c).maxCoeff();
    if (hi > lo) {
      y.col(c) = ((y.col(c).array() - lo) / (hi - lo)).matrix();
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        if (y(r, c) == lo) y(r, c) = 0;
        if (y(r, c) == hi) y(r, c) = 1;
      }
    } else {
      y.col(c).setConstant(Scalar(0.5));
    }
  }
}

template <typename Scalar>
struct IterationState {
  int iteration = 0;
  Scalar exaggeration = 1;
  Scalar kl = 0;      // against the unexaggerated P
  Scalar q_sum = 0;   // sum of all q_ij
  const Points2<Scalar>* positions = nullptr;  // before this iteration's update
  const Points2<Scalar>* gradient = nullptr;   // with the exaggerated P
};

template <typename Scalar>
using IterationObserver = std::function<void(const IterationState<Scalar>&)>;

template <typename Scalar>
struct TsneOutput {
  Points2<Scalar> coordinates;  // in [0, 1]^2
  std::vector<Scalar> kl_trace;
  std::vector<std::string> warnings;
};

/// Gradient descent with momentum from a seeded Gaussian start, on a joint
/// affinity matrix. Coordinates are returned unnormalized.
template <typename Scalar>
Points2<Scalar> optimize_embedding(const Matrix<Scalar>& p, const TsneConfig& config,
                                   std::vector<Scalar>& kl_trace,
                                   const IterationObserver<Scalar>& observer = {}) {
  const Eigen::Index n = p.rows();
  GaussianSampler gauss(config.seed);
  Points2<Scalar> y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) y(i, c) = static_cast<Scalar>(gauss(0.0, config.init_stddev));
  }
  Points2<Scalar> velocity = Points2<Scalar>::Zero(n, 2);
  const auto learning_rate = static_cast<Scalar>(config.learning_rate);

  kl_trace.clear();
  kl_trace.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const bool early = it < config.exaggeration_iters;
    const auto exaggeration = static_cast<Scalar>(early ? config.early_exaggeration_factor : 1.0);
    const auto momentum = static_cast<Scalar>(early ? config.momentum_initial : config.momentum_final);

    const Matrix<Scalar> kernel = student_t_kernel(y);
    const Matrix<Scalar> q = kernel / kernel.sum();
    const Points2<Scalar> gradient = early ? kl_gradient(Matrix<Scalar>(exaggeration * p), q, kernel, y)
                                           : kl_gradient(p, q, kernel, y);
    if (!gradient.allFinite()) {
      throw NumericalError("t-SNE gradient became non-finite at iteration " + std::to_string(it), it);
    }
    const Scalar kl = kl_divergence(p, q);
    kl_trace.push_back(kl);
    if (observer) {
      IterationState<Scalar> state;
      state.iteration = it;
      state.exaggeration = exaggeration;
      state.kl = kl;
      state.q_sum = q.sum();
      state.positions = &y;
      state.gradient = &gradient;
      observer(state);
    }

    velocity = momentum * velocity - learning_rate * gradient;
    y += velocity;
    y.rowwise() -= y.colwise().mean();
    if (!y.allFinite()) {
      throw NumericalError("t-SNE coordinates became non-finite at iteration " + std::to_string(it), it);
    }
  }
  return y;
}

/// Full pipeline on raw points (rows): distances, duplicate jitter,
/// calibrated affinities, symmetrization, optimization, unit-square scaling.
template <typename Derived>
TsneOutput<typename Derived::Scalar> run_tsne(
    const Eigen::MatrixBase<Derived>& points, const TsneConfig& config,
    const IterationObserver<typename Derived::Scalar>& observer = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  config.validate(n);
  TsneOutput<Scalar> out;
  if (n == 0) {
    out.coordinates.resize(0, 2);
    return out;
  }
  if (n == 1) {
    out.coordinates = Points2<Scalar>::Constant(1, 2, Scalar(0.5));
    return out;
  }
  if (!points.allFinite()) throw InputError("input points contain non-finite values");

  Matrix<Scalar> distances = squared_distances(points);
  if ((distances.array() == Scalar(0)).count() == n * n) {
    throw DegenerateInputError("all input points are identical");
  }
  if (const auto touched = jitter_duplicate_distances(distances, config.seed,
                                                      config.duplicate_jitter_stddev)) {
    out.warnings.push_back(std::to_string(touched) +
                           " duplicate point pair(s) separated by seeded jitter");
  }

  const auto conditional = conditional_affinities<Scalar>(
      distances, static_cast<Scalar>(config.perplexity),
      static_cast<Scalar>(config.entropy_tolerance), config.max_bisection_steps);
  for (std::size_t i = 0; i < conditional.converged.size(); ++i) {
    if (!conditional.converged[i]) {
      out.warnings.push_back("perplexity search for row " + std::to_string(i) +
                             " stopped before reaching tolerance");
    }
  }
  const Matrix<Scalar> p = symmetrize(conditional.p);
  out.coordinates = optimize_embedding(p, config, out.kl_trace, observer);
  normalize_unit_square(out.coordinates);
  return out;
}

}  // namespace atlas::layout
