#include "cpsector/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace cpsector {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

cplx hs_inner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

double hs_norm(const Mat& a) {
  return a.norm() / std::sqrt(static_cast<double>(a.rows()));
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  // sigma_max^2 = lambda_max(a^* a); cheaper than a full SVD and accurate
  // enough for norm certificates.
  Mat g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

RVec hermitian_eigenvalues(const Mat& a) {
  Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues();
}

std::vector<Vec> orthonormalize_vectors(const std::vector<Vec>& raw,
                                        double drop_tol) {
  std::vector<Vec> onb;
  for (const Vec& v : raw) {
    double orig = v.norm();
    Vec w = v;
    for (const Vec& u : onb) w -= u.dot(w) * u;
    // second MGS pass for numerical orthogonality
    for (const Vec& u : onb) w -= u.dot(w) * u;
    double res = w.norm();
    if (res > drop_tol * std::max(orig, 1.0)) onb.push_back(w / res);
  }
  return onb;
}

OrthoResult orthonormalize_with_coeffs(const std::vector<Vec>& raw,
                                       double drop_tol) {
  OrthoResult out;
  std::vector<Eigen::RowVectorXcd> rows;
  const int k = static_cast<int>(raw.size());
  for (int i = 0; i < k; ++i) {
    const Vec& v = raw[i];
    double orig = v.norm();
    Vec w = v;
    Eigen::RowVectorXcd coeff = Eigen::RowVectorXcd::Zero(k);
    coeff(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t p = 0; p < out.onb.size(); ++p) {
        cplx c = out.onb[p].dot(w);
        w -= c * out.onb[p];
        coeff -= c * rows[p];
      }
    }
    double res = w.norm();
    if (res > drop_tol * std::max(orig, 1.0)) {
      out.onb.push_back(w / res);
      rows.push_back(coeff / res);
    }
  }
  out.coeffs.resize(static_cast<int>(out.onb.size()), k);
  for (size_t p = 0; p < rows.size(); ++p) out.coeffs.row(p) = rows[p];
  return out;
}

Mat nullspace(const Mat& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0)
    return Mat::Identity(a.cols(), a.cols());
  if (a.rows() > 2 * a.cols()) {
    // Tall stack: work with the (cols x cols) Gram matrix. Eigenvalues are
    // squared singular values, so the cutoff squares too.
    Mat g = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const auto& ev = es.eigenvalues();
    double top = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
    double cut = rel_tol * std::max(top, 1.0);
    double cut2 = cut * cut;
    int null_dim = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) <= cut2) ++null_dim;
    return es.eigenvectors().leftCols(null_dim);  // ascending eigenvalues
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = rel_tol * std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

Mat column_space(const Mat& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return Mat(a.rows(), 0);
  if (a.cols() > 2 * a.rows()) {
    Mat g = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const auto& ev = es.eigenvalues();
    double top = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
    double cut = rel_tol * std::max(top, 1.0);
    double cut2 = cut * cut;
    int rank = 0;
    for (int i = 0; i < ev.size(); ++i)
      if (ev(i) > cut2) ++rank;
    return es.eigenvectors().rightCols(rank);
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cut = rel_tol * std::max(sv.size() > 0 ? sv(0) : 0.0, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace cpsector
