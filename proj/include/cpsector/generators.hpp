#ifndef CPSECTOR_GENERATORS_HPP
#define CPSECTOR_GENERATORS_HPP

#include <optional>
#include <random>

#include "cpsector/localnet.hpp"

namespace cpsector {

// Deterministic instance generation for property suites. All draws go
// through one engine so a fixed seed reproduces the whole run.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0, 1)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0, 1)(engine_); }
  cplx cnormal() { return cplx(normal(), normal()) / std::sqrt(2.0); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

Mat ginibre(Rng& rng, int rows, int cols);
Mat random_density_matrix(Rng& rng, int dim, int rank);
Vec random_unit_vector(Rng& rng, int dim);

// Domain/target mix used by the acceptance suite: M_2, M_3, M_2+M_2,
// diagonal C^3 domains; scalar, M_2 and block targets.
MatrixAlgebra sample_domain(Rng& rng);
MatrixAlgebra sample_target(Rng& rng);

// Random CP map as a conditional expectation of a Kraus map; the Kraus
// family is attached only when the target is a full matrix algebra.
CpMap random_cp_map(Rng& rng, const MatrixAlgebra& domain,
                    const MatrixAlgebra& target, int kraus_count,
                    bool attach_kraus = false);

// Random element of the relative commutant with spectrum in [0, 1].
Mat random_relcomm_element(Rng& rng, const DilationContext& ctx);

// A nontrivial projection in the relative commutant, by spectral splitting
// of its basis elements; nullopt when the relative commutant is trivial.
std::optional<Mat> find_relcomm_projection(const DilationContext& ctx,
                                           const Tolerance& tol = {});

// T1 = T_P, T2 = T_{1-P}: orthogonal by construction. Retries with fresh
// barycenters until a splittable one appears.
struct CpPair {
  CpMap t1, t2;
};
CpPair orthogonal_pair(Rng& rng, const MatrixAlgebra& domain,
                       const MatrixAlgebra& target, const Tolerance& tol = {});
// T1 = T_R with R = (1-eps) P + eps (1-P): never orthogonal.
CpPair perturbed_pair(Rng& rng, const MatrixAlgebra& domain,
                      const MatrixAlgebra& target, const Tolerance& tol = {});

struct NetInstance {
  LatticeNet net;
  RegionPair lambda;
  DensityState phi;
};
// Random net + region pair + inner density state, constrained so the
// verification sweep stays inside the work budget. max_total_dim bounds the
// global Hilbert dimension (the spec cap is 256).
NetInstance sample_net_instance(Rng& rng, long max_total_dim,
                                double work_budget);

// Two local states with disjoint outer regions on a shared net.
struct CommutingInstance {
  LatticeNet net;
  RegionPair lambda1, lambda2;
  DensityState phi1, phi2;
};
CommutingInstance sample_commuting_instance(Rng& rng, long max_total_dim,
                                            double work_budget);

}  // namespace cpsector

#endif
