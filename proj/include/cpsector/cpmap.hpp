#ifndef CPSECTOR_CPMAP_HPP
#define CPSECTOR_CPMAP_HPP

#include <optional>
#include <vector>

#include "cpsector/algebra.hpp"

namespace cpsector {

// A linear map T from a domain algebra on C^n into a target algebra on C^m,
// stored by its action on the domain's orthonormal basis. Complete
// positivity is certified separately (is_completely_positive); structural
// validity (images inside the target span, adjoint compatibility) is checked
// by validate().
struct CpMap {
  MatrixAlgebra domain;
  MatrixAlgebra target;
  std::vector<Mat> images;  // one m x m matrix per domain basis element
  std::vector<Mat> kraus;   // optional m x n family with T(X) = sum C^* X C

  int n() const { return domain.space_dim(); }
  int m() const { return target.space_dim(); }

  // T(x) for x in the domain span; throws if x is not resolvable there.
  Mat apply(const Mat& x, double span_tol = 1e-6) const;
  Mat apply_coords(const Vec& c) const;
  Mat image_of_identity() const;
  bool is_unital(double tol) const;

  void validate(const Tolerance& tol = {}) const;

  static CpMap from_images(MatrixAlgebra domain, MatrixAlgebra target,
                           std::vector<Mat> images, const Tolerance& tol = {});
  static CpMap from_kraus(MatrixAlgebra domain, MatrixAlgebra target,
                          std::vector<Mat> kraus, const Tolerance& tol = {});
};

CpMap cp_add(const CpMap& a, const CpMap& b);
CpMap cp_scale(const CpMap& a, double s);
// Composition a(b(.)); requires b's images to live in a's domain span.
CpMap cp_compose(const CpMap& a, const CpMap& b, const Tolerance& tol = {});
void require_same_spaces(const CpMap& a, const CpMap& b);

// Gram matrix G[(i,k),(j,l)] = <e_k | T(B_i^* B_j) e_l> over the domain
// basis {B_i} and the standard basis of C^m; PSD iff T is completely
// positive. Symbol index layout: (i,k) -> i*m + k.
Mat gram_matrix(const CpMap& t);
Mat gram_of_images(const MatrixAlgebra& domain, const std::vector<Mat>& images,
                   int m);

struct CpCertificate {
  bool completely_positive = false;
  double min_eigenvalue = 0;
};
CpCertificate is_completely_positive(const CpMap& t, const Tolerance& tol = {});

// Minimal Stinespring representation (pi, K, V): T(X) = V^* pi(X) V with
// K = span(pi(X) V H). pi is stored through its values on the domain basis.
struct StinespringRep {
  int dilation_dim = 0;
  std::vector<Mat> pi_images;  // dilation_dim x dilation_dim, per basis element
  Mat V;                       // dilation_dim x m

  Mat pi_apply_coords(const Vec& c) const;
  Mat pi_apply(const MatrixAlgebra& domain, const Mat& x) const;
};

// Gram-factorization GNS construction; rejects non-CP input.
StinespringRep minimal_stinespring(const CpMap& t, const Tolerance& tol = {});

// Dilation built from the Kraus family (pi0(X) = X (x) 1, V0 x = sum C_j x (x) f_j),
// compressed to the minimal invariant subspace. Unitarily equivalent to
// minimal_stinespring(t).
StinespringRep stinespring_from_kraus(const CpMap& t, const Tolerance& tol = {});

// Uses the Kraus route when a Kraus family is attached.
StinespringRep dilate(const CpMap& t, const Tolerance& tol = {});

double reconstruction_residual(const CpMap& t, const StinespringRep& rep);
double multiplicativity_residual(const MatrixAlgebra& domain,
                                 const StinespringRep& rep);

// The image algebra pi(X) on the dilation space, orthonormalized.
MatrixAlgebra pi_image_algebra(const StinespringRep& rep,
                               const MatrixAlgebra& domain,
                               const Tolerance& tol = {});

// Intertwiner between two minimal representations of the same map;
// empty optional when the solved map fails to be unitary.
std::optional<Mat> stinespring_intertwiner(const MatrixAlgebra& domain,
                                           const StinespringRep& a,
                                           const StinespringRep& b,
                                           const Tolerance& tol = {});

// Arveson commutant lifting: for A in (V^* pi(X) V)', the unique A1 in
// pi(X)' with V A = A1 V.
Mat commutant_lifting(const StinespringRep& rep, const MatrixAlgebra& domain,
                      const Mat& a, const Tolerance& tol = {});
Mat commutant_lifting(const StinespringRep& rep, const MatrixAlgebra& domain,
                      const MatrixAlgebra& pi_commutant, const Mat& a,
                      const Tolerance& tol = {});

// M-relative commutant: elements R of pi(X)' whose compressions
// V^* R pi(B) V stay inside the target span for every basis element B.
MatrixAlgebra relative_commutant(const CpMap& t, const StinespringRep& rep,
                                 const Tolerance& tol = {});

}  // namespace cpsector

#endif
