#pragma once

// Reproducible zero-mean Gaussian sampling and empirical covariances.

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "ggm/error.hpp"
#include "ggm/hash.hpp"
#include "ggm/model.hpp"
#include "ggm/rng.hpp"

namespace ggm {

struct SampleSet {
  Matrix data;  // n x p, one draw per row
  std::uint64_t seed = 0;
  std::string model_id;

  std::size_t n() const noexcept { return static_cast<std::size_t>(data.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(data.cols()); }
};

/// Content fingerprint of a precision matrix, used as the model identifier
/// recorded alongside samples.
inline std::string model_fingerprint(const Matrix& J) {
  return hex64(fnv1a64(J.data(), static_cast<std::size_t>(J.size()), fnv1a64(std::to_string(J.rows()))));
}

/// Rows x = L z with Sigma = L L^T (lower Cholesky) and z standard normal;
/// z is filled row by row from a single xoshiro256** stream.
inline SampleSet sample(const Matrix& sigma, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "need at least one sample");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::not_positive_definite, "covariance Cholesky failed");
  const Matrix L = llt.matrixL();
  const auto p = sigma.rows();
  Matrix z(static_cast<Eigen::Index>(n), p);
  Rng rng(seed);
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index c = 0; c < p; ++c) z(r, c) = rng.normal();
  SampleSet out;
  out.data = z * L.transpose();
  out.seed = seed;
  return out;
}

inline SampleSet sample(const GaussianModel& m, std::size_t n, std::uint64_t seed) {
  SampleSet out = sample(m.sigma(), n, seed);
  out.model_id = model_fingerprint(m.J());
  return out;
}

/// (1/n) X^T X, or the mean-subtracted version when `center` is set. Only
/// the lower triangle is accumulated and then mirrored, so the result is
/// exactly symmetric.
inline Matrix empirical_covariance(const Matrix& data, bool center = false) {
  const auto n = data.rows();
  const auto p = data.cols();
  if (n < 1) throw Error(ErrorKind::invalid_argument, "need at least one sample");
  Matrix centered;
  const Matrix* x = &data;
  if (center) {
    centered = data.rowwise() - data.colwise().mean();
    x = &centered;
  }
  Matrix cov = Matrix::Zero(p, p);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(x->transpose());
  const double scale = 1.0 / static_cast<double>(n);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (Eigen::Index r = c; r < p; ++r) {
      cov(r, c) *= scale;
      cov(c, r) = cov(r, c);
    }
  }
  return cov;
}

inline Matrix empirical_covariance(const SampleSet& s, bool center = false) {
  return empirical_covariance(s.data, center);
}

}  // namespace ggm
