#ifndef CPSECTOR_DECOMP_HPP
#define CPSECTOR_DECOMP_HPP

#include <vector>

#include "cpsector/cpmap.hpp"

namespace cpsector {

// Cached dilation data for one barycenter map; most decomposition routines
// revolve around (pi_T, K_T, V_T) and the two commutants.
struct DilationContext {
  CpMap t;
  StinespringRep rep;
  MatrixAlgebra pi_alg;    // span of pi(X) = pi(X)'' on the dilation space
  MatrixAlgebra pi_comm;   // pi(X)'
  MatrixAlgebra rel_comm;  // M-relative commutant pi(X)^c
  std::vector<Mat> pi_v;   // pi(B_i) V, cached

  static DilationContext build(const CpMap& t, const Tolerance& tol = {});
};

struct OrderCertificate {
  bool holds = false;
  double min_eigenvalue = 0;  // of the difference's Gram matrix
};
// T1 <= T2 iff T2 - T1 is completely positive.
OrderCertificate order_leq(const CpMap& t1, const CpMap& t2,
                           const Tolerance& tol = {});

// Radon-Nikodym operator: the unique R in the relative commutant with
// 0 <= R <= 1 and Tp(X) = V^* R pi(X) V. Requires Tp <= T.
Mat rn_derivative(const CpMap& tp, const DilationContext& ctx,
                  const Tolerance& tol = {});

// T_R(X) := V^* R pi(X) V for R in the relative commutant with 0 <= R <= 1.
CpMap cp_from_operator(const DilationContext& ctx, const Mat& r,
                       const Tolerance& tol = {});

struct OrthogonalityCertificate {
  bool orthogonal = false;
  double projection_defect = 0;  // ||R^2 - R||_F for R = rn(T1, T1+T2)
  int dim_t1 = 0, dim_t2 = 0, dim_sum = 0;
  bool dims_additive = false;  // dim K_T = dim K_T1 + dim K_T2
};
OrthogonalityCertificate is_orthogonal(const CpMap& t1, const CpMap& t2,
                                       const Tolerance& tol = {});

struct DisjointnessCertificate {
  bool disjoint = false;
  bool orthogonal = false;
  double projection_defect = 0;
  double central_defect = 0;  // distance of R from pi'' ∩ pi^c
  int intertwiner_dim = 0;    // oracle: dim {S : S pi_1(B) = pi_2(B) S}
  bool oracle_agrees = false;
};
DisjointnessCertificate is_disjoint(const CpMap& t1, const CpMap& t2,
                                    const Tolerance& tol = {});

struct QuasiEquivalenceCertificate {
  bool equivalent = false;
  double kernel_gap = 0;  // projector distance between the two kernels
  int kernel_dim_1 = 0, kernel_dim_2 = 0;
};
// In finite dimensions quasi-equivalence of representations is equality of
// the supports of their irreducible constituents, i.e. equality of kernels.
QuasiEquivalenceCertificate is_quasi_equivalent(const CpMap& t1,
                                                const CpMap& t2,
                                                const Tolerance& tol = {});

// A finite CP-measure space: S = {1..m}, F the power set, mu({i}) = atoms[i],
// barycenter = mu(S). weights are the reference scalar measure nu_i =
// rho(mu_i(1)) for rho the normalized trace on the target.
struct CpMeasure {
  CpMap barycenter;
  std::vector<CpMap> atoms;
  std::vector<double> weights;

  int size() const { return static_cast<int>(atoms.size()); }
  CpMap restriction(const std::vector<int>& subset) const;
  void validate(const Tolerance& tol = {}) const;
};
CpMeasure measure_from_atoms(std::vector<CpMap> atoms,
                             const Tolerance& tol = {});

// kappa_mu on indicator functions of atoms; kappa_mu(f) = sum f(i) ops[i].
struct KappaFamily {
  std::vector<Mat> ops;
  Mat apply(const Vec& f) const;
  // family checks: each op in [0,1], in the relative commutant, sum = 1
  double positivity_defect = 0;
  double membership_defect = 0;
  double sum_defect = 0;
};
KappaFamily kappa(const CpMeasure& mu, const DilationContext& ctx,
                  const Tolerance& tol = {});

struct MeasureOrthogonality {
  bool orthogonal = false;
  double homomorphism_defect = 0;  // max ||R_i R_j - delta_ij R_i||
};
MeasureOrthogonality is_orthogonal_measure(const CpMeasure& mu,
                                           const DilationContext& ctx,
                                           const Tolerance& tol = {});

struct MeasureSubcentrality {
  bool subcentral = false;
  bool orthogonal = false;
  double central_defect = 0;  // max distance of kappa ops from pi'' ∩ pi^c
};
MeasureSubcentrality is_subcentral(const CpMeasure& mu,
                                   const DilationContext& ctx,
                                   const Tolerance& tol = {});

// Orthogonal measure generated by an abelian subalgebra of the relative
// commutant: atoms mu_i = T_{P_i} over the minimal projections P_i of B.
CpMeasure measure_from_abelian(const MatrixAlgebra& b,
                               const DilationContext& ctx,
                               const Tolerance& tol = {});

// mu1 dominated by mu2 in the finite transcription: every kappa_1-projection
// is a sum of kappa_2-projections.
bool measure_dominates(const KappaFamily& k1, const KappaFamily& k2,
                       const Tolerance& tol = {});

// pi'' ∩ pi^c on the dilation space.
MatrixAlgebra central_algebra(const DilationContext& ctx,
                              const Tolerance& tol = {});

struct CentralDecomposition {
  CpMeasure measure;
  std::vector<Mat> projections;  // minimal central projections of Z
  bool pairwise_disjoint = false;
  bool subcentral = false;
  double barycenter_defect = 0;
};
CentralDecomposition central_decomposition(const CpMap& t,
                                           const Tolerance& tol = {});

struct TomitaReport {
  bool bijection_ok = false;
  bool monotonicity_ok = false;
  double worst_roundtrip = 0;
  int measures_checked = 0;
  int algebras_checked = 0;
  int pairs_checked = 0;
};
// Verifies both directions of the measure <-> abelian-subalgebra
// correspondence on the given instances, and that dominance of measures
// matches inclusion of algebras.
TomitaReport tomita_correspondence_check(
    const DilationContext& ctx, const std::vector<CpMeasure>& measures,
    const std::vector<MatrixAlgebra>& algebras, const Tolerance& tol = {});

// max over matched atoms of the image distance, +inf when sizes differ.
double measure_distance_upto_relabeling(const CpMeasure& a, const CpMeasure& b);

}  // namespace cpsector

#endif
