#include "multiport/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace multiport {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_probability_floor(const Vector& p) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) <= kProbabilityFloor) {
      throw BoundaryError("outcome probability p_" + std::to_string(j) +
                          " is at the boundary (<= 1e-12); Fisher information diverges");
    }
  }
}

Matrix drop_column(const Matrix& m, int drop_index) {
  const Eigen::Index d = m.cols();
  Matrix out(m.rows(), d - 1);
  Eigen::Index c = 0;
  for (Eigen::Index n = 0; n < d; ++n) {
    if (n == drop_index) continue;
    out.col(c++) = m.col(n);
  }
  return out;
}

}  // namespace

PhotonDistribution::PhotonDistribution(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) throw std::invalid_argument("PhotonDistribution: empty vector");
  if ((probs_.array() < 0.0).any()) {
    throw std::invalid_argument("PhotonDistribution: negative entry");
  }
  if (std::abs(probs_.sum() - 1.0) > kSumTolerance) {
    throw std::invalid_argument("PhotonDistribution: entries must sum to 1 within 1e-12");
  }
}

Matrix measurement_matrix(const Matrix& amplitudes, int drop_index) {
  const Eigen::Index d = amplitudes.cols();
  if (drop_index < 0 || drop_index >= d) {
    throw std::invalid_argument("measurement_matrix: drop index out of range");
  }
  Matrix c = drop_column(amplitudes, drop_index);
  c.colwise() -= amplitudes.col(drop_index);
  return c;
}

Matrix measurement_matrix(const AmplitudeMatrix& B) {
  return measurement_matrix(B.entries(), B.dim() - 1);
}

Matrix frame_operator(const Povm& povm) {
  const Eigen::Index d = povm.outcomes.cols();
  Matrix f = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < povm.outcomes.rows(); ++j) {
    const double tr = povm.traces(j);
    if (tr <= 0.0) continue;  // identically-zero outcome carries no frame weight
    f.noalias() += povm.outcomes.row(j).transpose() * povm.outcomes.row(j) / tr;
  }
  return f;
}

double smallest_eigenvalue(const Matrix& symmetric) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(symmetric, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

Matrix canonical_duals(const Povm& povm) {
  const Matrix& v = povm.outcomes;
  if (v.rows() != v.cols()) {
    throw std::invalid_argument("canonical_duals: outcome stack must be square (minimal POVM)");
  }
  if (smallest_eigenvalue(frame_operator(povm)) < kSingularFrameFloor) {
    throw SingularFrameError("frame operator is singular: device is not informationally "
                             "complete on this dimension");
  }
  // For a minimal POVM the biorthogonality V W^T = 1 pins the duals to
  // W = V^{-T}; the triangular path avoids the squared conditioning of an
  // explicit F^{-1}.
  const Eigen::Index d = v.rows();
  const bool upper_triangular =
      Matrix(v.triangularView<Eigen::StrictlyLower>()).cwiseAbs().maxCoeff() == 0.0;
  if (upper_triangular) {
    return v.triangularView<Eigen::Upper>().solve(Matrix::Identity(d, d)).transpose();
  }
  return Eigen::PartialPivLU<Matrix>(v).solve(Matrix::Identity(d, d)).transpose();
}

Vector probabilities(const AmplitudeMatrix& B, const PhotonDistribution& rho) {
  if (rho.dim() != B.dim()) throw std::invalid_argument("probabilities: dimension mismatch");
  return B.entries() * rho.probs();
}

Matrix fisher(const Matrix& amplitudes, const Vector& rho, int drop_index) {
  const Vector p = amplitudes * rho;
  check_probability_floor(p);
  const Matrix c = measurement_matrix(amplitudes, drop_index);
  return c.transpose() * p.cwiseInverse().asDiagonal() * c;
}

Matrix fisher(const AmplitudeMatrix& B, const PhotonDistribution& rho) {
  return fisher(B.entries(), rho.probs(), B.dim() - 1);
}

double crb(const Matrix& amplitudes, const Vector& rho, int drop_index) {
  // tr{(C^T P^{-1} C)^{-1}} = sum of inverse squared singular values of
  // P^{-1/2} C; working on the factor keeps full precision where forming
  // the Fisher matrix explicitly would square the conditioning.
  const Vector p = amplitudes * rho;
  check_probability_floor(p);
  const Matrix c = measurement_matrix(amplitudes, drop_index);
  const Matrix a = p.cwiseSqrt().cwiseInverse().asDiagonal() * c;
  const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
  const double floor = sv.maxCoeff() * 1e-13 * static_cast<double>(a.rows());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= floor) {
      throw SingularFrameError("Fisher operator is singular; CRB undefined");
    }
    acc += 1.0 / (sv(i) * sv(i));
  }
  return acc;
}

double crb(const AmplitudeMatrix& B, const PhotonDistribution& rho) {
  return crb(B.entries(), rho.probs(), B.dim() - 1);
}

double crb_dual(const AmplitudeMatrix& B, const PhotonDistribution& rho) {
  const Povm povm = make_povm(B);
  const Matrix duals = canonical_duals(povm);
  const Vector p = probabilities(B, rho);
  check_probability_floor(p);
  const int d = B.dim();
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    acc += duals.row(j).head(d - 1).squaredNorm() * p(j);
  }
  return acc - rho.probs().head(d - 1).squaredNorm();
}

LinearEstimate linear_estimator(const Matrix& duals, const Vector& freqs) {
  if (duals.rows() != freqs.size()) {
    throw std::invalid_argument("linear_estimator: frequency count must match outcome count");
  }
  LinearEstimate est;
  est.raw = duals.transpose() * freqs;
  est.clipped = est.raw.cwiseMax(0.0);
  const double total = est.clipped.sum();
  if (total > 0.0) est.clipped /= total;
  return est;
}

TomographyKit make_tomography_kit(const AmplitudeMatrix& B) {
  TomographyKit kit;
  const Povm povm = make_povm(B);
  kit.traces = povm.traces;
  kit.frame = frame_operator(povm);
  kit.gram = B.entries() * B.entries().transpose();
  kit.meas_matrix = measurement_matrix(B);
  kit.frame_min_eigenvalue = smallest_eigenvalue(kit.frame);
  kit.ic = kit.frame_min_eigenvalue >= kSingularFrameFloor;
  if (kit.ic) kit.duals = canonical_duals(povm);
  return kit;
}

}  // namespace multiport
