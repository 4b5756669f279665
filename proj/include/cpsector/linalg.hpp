#ifndef CPSECTOR_LINALG_HPP
#define CPSECTOR_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpsector {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent user input (bad schema, shape mismatch, failed
// precondition). Maps to exit code 2 at the CLI.
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

struct NotCompletelyPositive : InvalidInput {
  double min_eigenvalue;
  explicit NotCompletelyPositive(double eig)
      : InvalidInput("map is not completely positive (Gram min eigenvalue " +
                     std::to_string(eig) + ")"),
        min_eigenvalue(eig) {}
};

// Numeric thresholds used throughout. abs_tol is an absolute entrywise/norm
// tolerance; rank_cutoff is relative to the largest eigenvalue (or singular
// value) when deciding numerical rank.
struct Tolerance {
  double abs_tol = 1e-8;
  double rank_cutoff = 1e-10;

  // Solved quantities (Radon-Nikodym operators etc.) carry amplified error,
  // so projection/membership tests use a looser threshold.
  double projection_tol() const { return 100.0 * abs_tol; }
  // Singular-value threshold for null-space / range-membership decisions.
  double nullspace_tol() const { return 1e-6; }

  void validate() const {
    if (!(abs_tol > 0) || !(rank_cutoff > 0))
      throw InvalidInput("tolerances must be strictly positive");
  }
};

inline Vec vectorize(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat unvectorize(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// Kronecker product, (A x B)(i*rB+k, j*cB+l) = A(i,j) B(k,l).
// With column-major vectorization, vec(A X B) = (B^T x A) vec(X).
Mat kron(const Mat& a, const Mat& b);

// Hilbert-Schmidt inner product normalized so that the identity has norm 1:
// <a,b> = tr(a^* b) / n.
cplx hs_inner(const Mat& a, const Mat& b);
double hs_norm(const Mat& a);

// Spectral (operator) norm.
double op_norm(const Mat& a);

// Eigenvalues of the Hermitian part; input is assumed Hermitian up to noise.
RVec hermitian_eigenvalues(const Mat& a);

// Modified Gram-Schmidt over vectors in C^d. Keeps the input order; a vector
// is dropped when its residual falls below drop_tol relative to its original
// norm (or below drop_tol absolutely for zero-norm inputs).
std::vector<Vec> orthonormalize_vectors(const std::vector<Vec>& raw,
                                        double drop_tol);

// Same, also returning the coefficient matrix L with onb[p] = sum_i L(p,i) raw[i].
struct OrthoResult {
  std::vector<Vec> onb;
  Eigen::MatrixXcd coeffs;  // (#onb) x (#raw)
};
OrthoResult orthonormalize_with_coeffs(const std::vector<Vec>& raw,
                                       double drop_tol);

// Orthonormal basis of the null space of a (columns of the result span
// {x : a x = 0}). Singular values <= rel_tol * max(sigma_max, 1) count as zero.
Mat nullspace(const Mat& a, double rel_tol);

// Orthonormal basis of the column space of a, same cutoff convention.
Mat column_space(const Mat& a, double rel_tol);

}  // namespace cpsector

#endif
