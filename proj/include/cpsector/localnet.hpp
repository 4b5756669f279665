#ifndef CPSECTOR_LOCALNET_HPP
#define CPSECTOR_LOCALNET_HPP

#include <Eigen/Core>
#include <vector>

#include "cpsector/decomp.hpp"

namespace cpsector {

enum class SiteKind { full, diag };

// A finite chain of matrix-algebra sites. "full" sites carry M_d, "diag"
// sites carry the diagonal algebra C^d (classical d-valued degrees of
// freedom). The causal complement of a region is modeled as the set
// complement of its sites.
struct LatticeNet {
  std::vector<int> dims;
  std::vector<SiteKind> kinds;
  long dim_cap = 256;

  int sites() const { return static_cast<int>(dims.size()); }
  long total_dim() const;
  void validate() const;
};

struct Region {
  std::vector<int> sites;  // sorted, unique

  static Region of(std::vector<int> sites);
  bool contains(const Region& other) const;
  bool disjoint_from(const Region& other) const;
  Region complement(int num_sites) const;
  bool empty() const { return sites.empty(); }
};

// Lambda = (O1, O2) with O1 strictly inside O2.
struct RegionPair {
  Region inner;
  Region outer;
  void validate(const LatticeNet& net) const;
};

// Normal state on the inner-region algebra, carried by a density matrix on
// the inner-region Hilbert space.
struct DensityState {
  Mat rho;
  void validate(const Tolerance& tol = {}) const;
};

// Flat-index helper for the site-major tensor ordering (site 0 most
// significant).
class NetIndexer {
 public:
  explicit NetIndexer(const LatticeNet& net);
  long dim() const { return dim_; }
  long stride(int site) const { return strides_[site]; }
  int digit(long flat, int site) const {
    return static_cast<int>((flat / strides_[site]) % dims_[site]);
  }

 private:
  std::vector<int> dims_;
  std::vector<long> strides_;
  long dim_ = 1;
};

// Splits flat indices into (region part, rest part) for a fixed region.
struct RegionSplit {
  std::vector<int> region_sites;
  std::vector<int> rest_sites;
  long region_dim = 1;
  long rest_dim = 1;
  std::vector<long> region_offset;  // global contribution of a region index
  std::vector<long> rest_offset;

  RegionSplit(const LatticeNet& net, const Region& region);
  long combine(long region_idx, long rest_idx) const {
    return region_offset[region_idx] + rest_offset[rest_idx];
  }
};

// Enumerates the scaled matrix-unit basis of the algebra of a region:
// tensor products of per-site units (diag sites: diagonal units only),
// identity on the other sites, scaled to HS norm 1.
class RegionBasis {
 public:
  RegionBasis(const LatticeNet& net, const Region& region);
  long count() const { return count_; }
  double scale() const { return scale_; }
  const RegionSplit& split() const { return split_; }
  // region-space row/column indices of basis element b
  void decode(long b, long* row, long* col) const;
  long encode(long row, long col) const;  // -1 when the pattern is not allowed
  Mat dense(long b) const;                // global matrix
  long dense_count_guard() const;         // count * g^2

 private:
  const LatticeNet* net_;
  RegionSplit split_;
  std::vector<int> pair_counts_;  // per region site
  long count_ = 1;
  double scale_ = 1;
};

// The local algebra A(O) as a MatrixAlgebra on the global space.
MatrixAlgebra algebra_of(const LatticeNet& net, const Region& region,
                         const Tolerance& tol = {});

// A local state built from a density state phi on the inner region:
// T(X) = sum_{j,k} C_{j,k}^* X C_{j,k} with C_{j,k} = sqrt(p_k)|psi_k><j| (x) 1.
// T acts as phi on A(O1) and as the identity against A(O2').
struct LocalStateMap {
  LatticeNet net;
  RegionPair lambda;
  DensityState phi;
  std::vector<Mat> kraus;  // dense g x g operators, localized in O1

  Mat apply_dense(const Mat& x) const;  // sum C^* x C
  // as a CpMap on the global algebra (domain = target); dense images
  CpMap to_cpmap(const Tolerance& tol = {}) const;
};

LocalStateMap local_state(const LatticeNet& net, const RegionPair& lambda,
                          const DensityState& phi, const Tolerance& tol = {});

struct LocalStateReport {
  bool pass = false;
  double cond1_residual = 0;   // max ||T(AB) - T(A)B||_F over basis pairs
  double cond2_residual = 0;   // max off-scalar part of T on the inner algebra
  double unital_residual = 0;  // ||T(1) - 1||_F
  double phi_selfadjoint_defect = 0;
  double phi_negative_mass = 0;  // most negative eigenvalue of implied phi
  double phi_trace_defect = 0;
  long pairs_checked = 0;
  Mat implied_phi;  // extracted density matrix on the inner region
};

// Verifies Definition conditions (1)-(2) by evaluating the Kraus family over
// all basis pairs (A global, B in A(O2')).
LocalStateReport verify_local_state(const LocalStateMap& state,
                                    const Tolerance& tol = {});
// Same checks for an arbitrary map given by images over the net basis.
LocalStateReport verify_local_state(const LatticeNet& net,
                                    const RegionPair& lambda, const CpMap& t,
                                    const Tolerance& tol = {});

struct CommutationReport {
  bool outer_regions_disjoint = false;
  double max_deviation = 0;  // max ||T1(T2(B)) - T2(T1(B))||_F over the basis
  long elements_checked = 0;
};
CommutationReport commutation_check(const LocalStateMap& t1,
                                    const LocalStateMap& t2,
                                    const Tolerance& tol = {});

struct SplitWitness {
  bool inner_in_factor = false;
  bool factor_in_outer = false;
  bool factor_is_type_one = false;  // trivial center
  long factor_dim = 0;
};
// The intermediate factor N = B(H_{O1}) (x) 1 between A(O1) and A(O2);
// factor_in_outer can only hold when every inner site is a full site.
SplitWitness split_witness(const LatticeNet& net, const RegionPair& lambda,
                           const Tolerance& tol = {});

struct SectorReport {
  LocalStateReport local_state;
  bool factor_state = false;  // Z_full equals theta(center of pi(A))
  int z_full_dim = 0;
  int theta_dim = 0;
  bool theta_inside_z_full = false;
  double z_match_defect = 0;
  int sector_count = 0;
  CpMeasure components;          // subcentral decomposition of T
  std::vector<Mat> projections;  // minimal central projections of Z_full
  Eigen::MatrixXi disjoint;      // pairwise verdicts among components
  Eigen::MatrixXi quasi_equivalent;
  double barycenter_defect = 0;
  bool subcentral = false;
  // complement equations for the emergent-order algebra Z_T generated by the
  // projections: Z_T v theta = Z_full and Z_T ∩ theta = C1. Both can fail in
  // finite dimensions; they are reported, not assumed.
  bool z_join_ok = false;
  bool z_meet_ok = false;
};

// Sector analysis with respect to the defining representation of the net.
SectorReport local_sector_analysis(const LocalStateMap& state,
                                   const Tolerance& tol = {});

}  // namespace cpsector

#endif
