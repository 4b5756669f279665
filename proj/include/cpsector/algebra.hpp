#ifndef CPSECTOR_ALGEBRA_HPP
#define CPSECTOR_ALGEBRA_HPP

#include <optional>
#include <vector>

#include "cpsector/linalg.hpp"

namespace cpsector {

// Construction provenance, kept for compact serialization.
struct AlgebraTag {
  enum class Kind { other, full, blocks, net } kind = Kind::other;
  std::vector<int> blocks;
  std::vector<int> net_dims;
  std::vector<int> net_kinds;  // 0 = full site, 1 = diag site
};

// A unital *-subalgebra of the n x n complex matrices, stored through a
// basis that is orthonormal under the normalized Hilbert-Schmidt inner
// product. In finite dimensions the sigma-weak closure is the linear span,
// so these are exactly the von Neumann algebras on C^n.
class MatrixAlgebra {
 public:
  MatrixAlgebra() = default;

  static MatrixAlgebra full(int n);
  // Block-diagonal sum M_{s1} + M_{s2} + ... embedded in M_n, n = sum s_i.
  static MatrixAlgebra blocks(const std::vector<int>& sizes);
  static MatrixAlgebra diagonal(int n);
  static MatrixAlgebra scalars(int n);

  // Orthonormalizes the given spanning family (input order, Gram-Schmidt).
  // The span must already be a unital *-algebra; validate() checks this.
  static MatrixAlgebra span_of(int n, const std::vector<Mat>& spanning,
                               const Tolerance& tol = {});

  int space_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Mat>& basis() const { return basis_; }
  const Mat& basis(int i) const { return basis_[i]; }
  Mat identity() const { return Mat::Identity(n_, n_); }

  // Coordinates of x in the orthonormal basis; optionally reports the
  // distance from x to the span.
  Vec coords(const Mat& x, double* residual = nullptr) const;
  Mat from_coords(const Vec& c) const;
  // Orthogonal projection onto the span. For a *-subalgebra this is the
  // trace-preserving conditional expectation, in particular positive.
  Mat project(const Mat& x) const;
  bool contains(const Mat& x, double tol) const;

  bool same_span(const MatrixAlgebra& other, double tol) const;
  bool contains_span(const MatrixAlgebra& other, double tol) const;
  bool is_abelian(double tol) const;

  // Largest violation among: identity membership, adjoint closure,
  // product closure.
  double closure_defect() const;
  void validate(const Tolerance& tol = {}) const;

  const AlgebraTag& tag() const { return tag_; }
  void set_tag(AlgebraTag tag) { tag_ = std::move(tag); }

 private:
  int n_ = 0;
  std::vector<Mat> basis_;
  AlgebraTag tag_;
};

// Commutant {R : RB = BR for all B in alg}, computed from the range of the
// superoperator R -> sum_a F_a R F_a^*, whose image is exactly the commutant
// when {F_a} is an orthonormal basis of a unital *-algebra.
MatrixAlgebra commutant(const MatrixAlgebra& alg, const Tolerance& tol = {});

// Smallest unital *-algebra containing the generators.
MatrixAlgebra generated_algebra(const std::vector<Mat>& gens, int n,
                                const Tolerance& tol = {});

MatrixAlgebra center(const MatrixAlgebra& alg, const Tolerance& tol = {});

// The unique mutually orthogonal minimal projections of center(alg) summing
// to the identity, found by joint diagonalization of the center's
// self-adjoint basis. Deterministic given the basis order.
std::vector<Mat> minimal_central_projections(const MatrixAlgebra& alg,
                                             const Tolerance& tol = {});

// Intersection of the two spans as a MatrixAlgebra (orthonormalized).
MatrixAlgebra subspace_intersect(const MatrixAlgebra& a,
                                 const MatrixAlgebra& b,
                                 const Tolerance& tol = {});

}  // namespace cpsector

#endif
