#include "cpsector/localnet.hpp"

#include <algorithm>
#include <cmath>

namespace cpsector {

namespace {

constexpr double kWorkBudget = 6e9;  // rough flop guard for dense sweeps

// sparse form of a region-basis element: value `scale` at (rows[t], cols[t])
struct SparseUnit {
  std::vector<long> rows, cols;
  double scale = 1;
};

SparseUnit sparse_unit(const RegionBasis& rb, long b) {
  SparseUnit u;
  long row = 0, col = 0;
  rb.decode(b, &row, &col);
  const RegionSplit& sp = rb.split();
  u.rows.reserve(sp.rest_dim);
  u.cols.reserve(sp.rest_dim);
  for (long t = 0; t < sp.rest_dim; ++t) {
    u.rows.push_back(sp.combine(row, t));
    u.cols.push_back(sp.combine(col, t));
  }
  u.scale = rb.scale();
  return u;
}

// sum_j C_j^* (scale |i><j|) C_j
Mat kraus_unit_image(const std::vector<Mat>& kraus, long i, long j,
                     double scale) {
  const long g = kraus[0].rows();
  Mat out = Mat::Zero(g, g);
  for (const Mat& c : kraus)
    out.noalias() += scale * (c.row(i).adjoint() * c.row(j));
  return out;
}

Mat kraus_sparse_image(const std::vector<Mat>& kraus, const SparseUnit& u) {
  const long g = kraus[0].rows();
  Mat out = Mat::Zero(g, g);
  for (size_t t = 0; t < u.rows.size(); ++t)
    out += kraus_unit_image(kraus, u.rows[t], u.cols[t], u.scale);
  return out;
}

Mat right_mul(const Mat& m, const SparseUnit& u) {
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (size_t t = 0; t < u.rows.size(); ++t)
    out.col(u.cols[t]) += u.scale * m.col(u.rows[t]);
  return out;
}

// per-site digit pairs of a region-basis element, for product bookkeeping
struct DigitPairs {
  std::vector<int> sites;
  std::vector<int> row_digit, col_digit;
};

DigitPairs digit_pairs(const LatticeNet& net, const RegionBasis& rb, long b) {
  DigitPairs d;
  d.sites = rb.split().region_sites;
  long row = 0, col = 0;
  rb.decode(b, &row, &col);
  long mult = rb.split().region_dim;
  for (int s : d.sites) {
    mult /= net.dims[s];
    d.row_digit.push_back(static_cast<int>((row / mult) % net.dims[s]));
    d.col_digit.push_back(static_cast<int>((col / mult) % net.dims[s]));
  }
  return d;
}

}  // namespace

long LatticeNet::total_dim() const {
  long d = 1;
  for (int s : dims) d *= s;
  return d;
}

void LatticeNet::validate() const {
  if (dims.empty()) throw InvalidInput("net has no sites");
  if (kinds.size() != dims.size())
    throw InvalidInput("net: one kind per site required");
  for (int d : dims)
    if (d < 1) throw InvalidInput("net: site dimensions must be >= 1");
  if (total_dim() > dim_cap)
    throw InvalidInput("net: total Hilbert dimension " +
                       std::to_string(total_dim()) + " exceeds the cap " +
                       std::to_string(dim_cap));
}

Region Region::of(std::vector<int> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return Region{std::move(sites)};
}

bool Region::contains(const Region& other) const {
  return std::includes(sites.begin(), sites.end(), other.sites.begin(),
                       other.sites.end());
}

bool Region::disjoint_from(const Region& other) const {
  std::vector<int> tmp;
  std::set_intersection(sites.begin(), sites.end(), other.sites.begin(),
                        other.sites.end(), std::back_inserter(tmp));
  return tmp.empty();
}

Region Region::complement(int num_sites) const {
  std::vector<int> out;
  for (int s = 0; s < num_sites; ++s)
    if (!std::binary_search(sites.begin(), sites.end(), s)) out.push_back(s);
  return Region{std::move(out)};
}

void RegionPair::validate(const LatticeNet& net) const {
  for (int s : inner.sites)
    if (s < 0 || s >= net.sites())
      throw InvalidInput("region index out of range");
  for (int s : outer.sites)
    if (s < 0 || s >= net.sites())
      throw InvalidInput("region index out of range");
  if (inner.empty()) throw InvalidInput("inner region is empty");
  if (!outer.contains(inner) || outer.sites.size() == inner.sites.size())
    throw InvalidInput("inner region must be strictly contained in the outer");
}

void DensityState::validate(const Tolerance& tol) const {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw InvalidInput("density state must be a square matrix");
  if ((rho - rho.adjoint()).norm() > 100 * tol.abs_tol)
    throw InvalidInput("density state is not self-adjoint");
  RVec ev = hermitian_eigenvalues(rho);
  if (ev.minCoeff() < -100 * tol.abs_tol)
    throw InvalidInput("density state is not positive semidefinite");
  if (std::abs(rho.real().trace() - 1.0) > 100 * tol.abs_tol)
    throw InvalidInput("density state does not have unit trace");
}

NetIndexer::NetIndexer(const LatticeNet& net) : dims_(net.dims) {
  strides_.assign(dims_.size(), 1);
  long acc = 1;
  for (int s = static_cast<int>(dims_.size()) - 1; s >= 0; --s) {
    strides_[s] = acc;
    acc *= dims_[s];
  }
  dim_ = acc;
}

RegionSplit::RegionSplit(const LatticeNet& net, const Region& region) {
  NetIndexer ix(net);
  for (int s = 0; s < net.sites(); ++s) {
    if (std::binary_search(region.sites.begin(), region.sites.end(), s)) {
      region_sites.push_back(s);
      region_dim *= net.dims[s];
    } else {
      rest_sites.push_back(s);
      rest_dim *= net.dims[s];
    }
  }
  auto fill = [&](const std::vector<int>& sites, long dim,
                  std::vector<long>& out) {
    out.resize(dim);
    for (long v = 0; v < dim; ++v) {
      long off = 0, rem = v;
      for (int k = static_cast<int>(sites.size()) - 1; k >= 0; --k) {
        int s = sites[k];
        off += (rem % net.dims[s]) * ix.stride(s);
        rem /= net.dims[s];
      }
      out[v] = off;
    }
  };
  fill(region_sites, region_dim, region_offset);
  fill(rest_sites, rest_dim, rest_offset);
}

RegionBasis::RegionBasis(const LatticeNet& net, const Region& region)
    : net_(&net), split_(net, region) {
  for (int s : split_.region_sites) {
    int d = net.dims[s];
    pair_counts_.push_back(net.kinds[s] == SiteKind::full ? d * d : d);
    count_ *= pair_counts_.back();
  }
  scale_ = std::sqrt(static_cast<double>(split_.region_dim));
}

void RegionBasis::decode(long b, long* row, long* col) const {
  const int ns = static_cast<int>(split_.region_sites.size());
  long r = 0, c = 0;
  // digits, most significant site first
  std::vector<long> ps(ns);
  for (int k = ns - 1; k >= 0; --k) {
    ps[k] = b % pair_counts_[k];
    b /= pair_counts_[k];
  }
  for (int k = 0; k < ns; ++k) {
    int s = split_.region_sites[k];
    int d = net_->dims[s];
    long i, j;
    if (net_->kinds[s] == SiteKind::full) {
      i = ps[k] / d;
      j = ps[k] % d;
    } else {
      i = j = ps[k];
    }
    r = r * d + i;
    c = c * d + j;
  }
  *row = r;
  *col = c;
}

long RegionBasis::encode(long row, long col) const {
  const int ns = static_cast<int>(split_.region_sites.size());
  std::vector<long> ri(ns), ci(ns);
  for (int k = ns - 1; k >= 0; --k) {
    int d = net_->dims[split_.region_sites[k]];
    ri[k] = row % d;
    ci[k] = col % d;
    row /= d;
    col /= d;
  }
  long b = 0;
  for (int k = 0; k < ns; ++k) {
    int s = split_.region_sites[k];
    int d = net_->dims[s];
    long p;
    if (net_->kinds[s] == SiteKind::full) {
      p = ri[k] * d + ci[k];
    } else {
      if (ri[k] != ci[k]) return -1;
      p = ri[k];
    }
    b = b * pair_counts_[k] + p;
  }
  return b;
}

Mat RegionBasis::dense(long b) const {
  NetIndexer ix(*net_);
  Mat m = Mat::Zero(ix.dim(), ix.dim());
  SparseUnit u = sparse_unit(*this, b);
  for (size_t t = 0; t < u.rows.size(); ++t) m(u.rows[t], u.cols[t]) = u.scale;
  return m;
}

long RegionBasis::dense_count_guard() const {
  NetIndexer ix(*net_);
  return count_ * ix.dim() * ix.dim();
}

MatrixAlgebra algebra_of(const LatticeNet& net, const Region& region,
                         const Tolerance& tol) {
  net.validate();
  RegionBasis rb(net, region);
  if (rb.dense_count_guard() > (1L << 24))
    throw InvalidInput("algebra_of: dense basis would exceed the memory guard");
  std::vector<Mat> basis;
  basis.reserve(rb.count());
  for (long b = 0; b < rb.count(); ++b) basis.push_back(rb.dense(b));
  MatrixAlgebra out = MatrixAlgebra::span_of(
      static_cast<int>(NetIndexer(net).dim()), basis, tol);
  if (static_cast<int>(region.sites.size()) == net.sites()) {
    AlgebraTag tag;
    tag.kind = AlgebraTag::Kind::net;
    tag.net_dims = net.dims;
    for (SiteKind k : net.kinds)
      tag.net_kinds.push_back(k == SiteKind::full ? 0 : 1);
    out.set_tag(std::move(tag));
  }
  return out;
}

Mat LocalStateMap::apply_dense(const Mat& x) const {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const Mat& c : kraus) out.noalias() += c.adjoint() * x * c;
  return out;
}

CpMap LocalStateMap::to_cpmap(const Tolerance& tol) const {
  Region all = Region::of({}).complement(net.sites());
  MatrixAlgebra alg = algebra_of(net, all, tol);
  RegionBasis rb(net, all);
  std::vector<Mat> images;
  images.reserve(rb.count());
  for (long b = 0; b < rb.count(); ++b)
    images.push_back(kraus_sparse_image(kraus, sparse_unit(rb, b)));
  CpMap t{alg, alg, std::move(images), kraus};
  t.validate(tol);
  return t;
}

LocalStateMap local_state(const LatticeNet& net, const RegionPair& lambda,
                          const DensityState& phi, const Tolerance& tol) {
  net.validate();
  lambda.validate(net);
  phi.validate(tol);
  RegionSplit inner_split(net, lambda.inner);
  const long d1 = inner_split.region_dim;
  if (phi.rho.rows() != d1)
    throw InvalidInput(
        "density state has wrong dimension for the inner region");
  NetIndexer ix(net);
  const long g = ix.dim();

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (phi.rho + phi.rho.adjoint()));
  LocalStateMap state{net, lambda, phi, {}};
  for (long k = 0; k < d1; ++k) {
    double p = es.eigenvalues()(k);
    if (p <= 1e-14) continue;
    Vec psi = es.eigenvectors().col(k);
    for (long j = 0; j < d1; ++j) {
      // |psi_k><j| on the inner factor, identity elsewhere
      Mat c = Mat::Zero(g, g);
      for (long a = 0; a < d1; ++a) {
        cplx v = std::sqrt(p) * psi(a);
        if (v == cplx(0, 0)) continue;
        for (long t = 0; t < inner_split.rest_dim; ++t)
          c(inner_split.combine(a, t), inner_split.combine(j, t)) = v;
      }
      state.kraus.push_back(std::move(c));
    }
  }
  if (state.kraus.empty())
    throw InvalidInput("local_state: density state has no spectral mass");
  return state;
}

namespace {

// Shared sweep for both verifiers. eval_unit(i, j, scale) returns the image
// of the scaled global unit scale|i><j| under the map being verified.
template <typename EvalUnit>
LocalStateReport verify_impl(const LatticeNet& net, const RegionPair& lambda,
                             const Tolerance& tol, EvalUnit eval_unit,
                             const Mat& t_of_identity, double per_pair_cost) {
  NetIndexer ix(net);
  const long g = ix.dim();
  Region all = Region::of({}).complement(net.sites());
  RegionBasis global(net, all);
  Region oc = lambda.outer.complement(net.sites());
  RegionBasis outerc(net, oc);

  LocalStateReport rep;
  rep.unital_residual = (t_of_identity - Mat::Identity(g, g)).norm();

  double cost =
      double(global.count()) * double(outerc.count()) * per_pair_cost;
  if (cost > kWorkBudget)
    throw InvalidInput(
        "verify_local_state: basis-pair sweep exceeds the work budget; use a "
        "smaller net or region");

  std::vector<SparseUnit> bs;
  std::vector<DigitPairs> bdigits;
  bs.reserve(outerc.count());
  for (long b = 0; b < outerc.count(); ++b) {
    bs.push_back(sparse_unit(outerc, b));
    bdigits.push_back(digit_pairs(net, outerc, b));
  }

  for (long a = 0; a < global.count(); ++a) {
    long i = 0, j = 0;
    global.decode(a, &i, &j);
    Mat ta = eval_unit(i, j, global.scale());
    for (long bidx = 0; bidx < outerc.count(); ++bidx) {
      const SparseUnit& u = bs[bidx];
      const DigitPairs& dp = bdigits[bidx];
      // A B is scale_B * (another global unit) when J matches B's row digits
      bool hit = true;
      long jprime = j;
      for (size_t k = 0; k < dp.sites.size() && hit; ++k) {
        int s = dp.sites[k];
        if (ix.digit(j, s) != dp.row_digit[k])
          hit = false;
        else
          jprime += (dp.col_digit[k] - dp.row_digit[k]) * ix.stride(s);
      }
      Mat lhs = hit ? eval_unit(i, jprime, global.scale() * u.scale)
                    : Mat(Mat::Zero(g, g));
      Mat rhs = right_mul(ta, u);
      rep.cond1_residual = std::max(rep.cond1_residual, (lhs - rhs).norm());
      ++rep.pairs_checked;
    }
  }

  // condition (2): T = phi(.) 1 on the inner algebra; extract the implied phi
  RegionBasis innerb(net, lambda.inner);
  RegionSplit inner_split(net, lambda.inner);
  const long d1 = inner_split.region_dim;
  Mat implied = Mat::Zero(d1, d1);
  Mat idg = Mat::Identity(g, g);
  for (long b = 0; b < innerb.count(); ++b) {
    SparseUnit u = sparse_unit(innerb, b);
    Mat img = Mat::Zero(g, g);
    for (size_t t = 0; t < u.rows.size(); ++t)
      img += eval_unit(u.rows[t], u.cols[t], u.scale);
    cplx c = img.trace() / double(g);
    rep.cond2_residual = std::max(rep.cond2_residual, (img - c * idg).norm());
    long row = 0, col = 0;
    innerb.decode(b, &row, &col);
    // basis element a_b = scale E_{row,col} on the inner space; the state
    // with tr(sigma a_b) = phi'(a_b) is sigma = (1/d1) sum phi'(a_b) a_b^*
    implied(col, row) += c * u.scale / double(d1);
  }
  rep.implied_phi = implied;
  rep.phi_selfadjoint_defect = (implied - implied.adjoint()).norm();
  RVec ev = hermitian_eigenvalues(implied);
  rep.phi_negative_mass = std::max(0.0, -ev.minCoeff());
  rep.phi_trace_defect = std::abs(implied.real().trace() - 1.0);

  double thr = 1000 * tol.abs_tol;
  rep.pass = rep.cond1_residual <= thr && rep.cond2_residual <= thr &&
             rep.unital_residual <= thr && rep.phi_selfadjoint_defect <= thr &&
             rep.phi_negative_mass <= thr && rep.phi_trace_defect <= thr;
  return rep;
}

}  // namespace

LocalStateReport verify_local_state(const LocalStateMap& state,
                                    const Tolerance& tol) {
  state.net.validate();
  state.lambda.validate(state.net);
  NetIndexer ix(state.net);
  const long g = ix.dim();
  auto eval_unit = [&](long i, long j, double scale) {
    return kraus_unit_image(state.kraus, i, j, scale);
  };
  Mat t1 = state.apply_dense(Mat::Identity(g, g));
  double per_pair = double(state.kraus.size()) * double(g) * double(g);
  return verify_impl(state.net, state.lambda, tol, eval_unit, t1, per_pair);
}

LocalStateReport verify_local_state(const LatticeNet& net,
                                    const RegionPair& lambda, const CpMap& t,
                                    const Tolerance& tol) {
  net.validate();
  lambda.validate(net);
  NetIndexer ix(net);
  const long g = ix.dim();
  if (t.n() != g || t.m() != g)
    throw InvalidInput("verify_local_state: map does not act on the net space");
  Region all = Region::of({}).complement(net.sites());
  RegionBasis global(net, all);
  if (t.domain.dim() != global.count())
    throw InvalidInput(
        "verify_local_state: map domain does not match the net algebra");
  long step = std::max<long>(1, global.count() / 16);
  for (long b = 0; b < global.count(); b += step)
    if ((t.domain.basis(static_cast<int>(b)) - global.dense(b)).norm() > 1e-9)
      throw InvalidInput(
          "verify_local_state: map domain basis differs from the net basis");
  auto eval_unit = [&](long i, long j, double scale) -> Mat {
    long b = global.encode(i, j);
    if (b < 0) return Mat::Zero(g, g);
    return (scale / global.scale()) * t.images[b];
  };
  return verify_impl(net, lambda, tol, eval_unit, t.image_of_identity(),
                     double(g) * double(g));
}

CommutationReport commutation_check(const LocalStateMap& t1,
                                    const LocalStateMap& t2,
                                    const Tolerance& tol) {
  (void)tol;
  if (t1.net.total_dim() != t2.net.total_dim() ||
      t1.net.sites() != t2.net.sites())
    throw InvalidInput("commutation_check: maps act on different nets");
  CommutationReport rep;
  rep.outer_regions_disjoint = t1.lambda.outer.disjoint_from(t2.lambda.outer);
  NetIndexer ix(t1.net);
  const long g = ix.dim();
  Region all = Region::of({}).complement(t1.net.sites());
  RegionBasis global(t1.net, all);
  double cost = double(global.count()) *
                double(t1.kraus.size() + t2.kraus.size()) * double(g) *
                double(g) * double(g);
  if (cost > kWorkBudget)
    throw InvalidInput("commutation_check: sweep exceeds the work budget");
  for (long b = 0; b < global.count(); ++b) {
    long i = 0, j = 0;
    global.decode(b, &i, &j);
    Mat x2 = kraus_unit_image(t2.kraus, i, j, global.scale());
    Mat x1 = kraus_unit_image(t1.kraus, i, j, global.scale());
    Mat a = t1.apply_dense(x2);
    Mat c = t2.apply_dense(x1);
    rep.max_deviation = std::max(rep.max_deviation, (a - c).norm());
    ++rep.elements_checked;
  }
  return rep;
}

SplitWitness split_witness(const LatticeNet& net, const RegionPair& lambda,
                           const Tolerance& tol) {
  net.validate();
  lambda.validate(net);
  SplitWitness w;
  RegionSplit inner_split(net, lambda.inner);
  w.factor_dim = inner_split.region_dim * inner_split.region_dim;
  bool inner_all_full = true;
  for (int s : lambda.inner.sites)
    if (net.kinds[s] != SiteKind::full) inner_all_full = false;

  // N = B(H_{O1}) (x) 1: the full-kind algebra over the inner sites
  LatticeNet fullnet = net;
  for (int s : lambda.inner.sites) fullnet.kinds[s] = SiteKind::full;
  MatrixAlgebra n_alg = algebra_of(fullnet, lambda.inner, tol);
  MatrixAlgebra inner_alg = algebra_of(net, lambda.inner, tol);
  w.inner_in_factor = n_alg.contains_span(inner_alg, 1e-7);
  w.factor_is_type_one = center(n_alg, tol).dim() == 1;
  if (inner_all_full) {
    MatrixAlgebra outer_alg = algebra_of(net, lambda.outer, tol);
    w.factor_in_outer = outer_alg.contains_span(n_alg, 1e-7);
  } else {
    w.factor_in_outer = false;  // diag inner sites keep N outside A(O2)
  }
  return w;
}

SectorReport local_sector_analysis(const LocalStateMap& state,
                                   const Tolerance& tol) {
  SectorReport rep;
  rep.local_state = verify_local_state(state, tol);
  if (!rep.local_state.pass)
    throw InvalidInput(
        "local_sector_analysis: map failed the local-state verification");
  CpMap t = state.to_cpmap(tol);
  DilationContext ctx = DilationContext::build(t, tol);

  MatrixAlgebra z_full = central_algebra(ctx, tol);
  rep.z_full_dim = z_full.dim();

  // theta lift of the center of the defining representation's image
  MatrixAlgebra zc = center(t.domain, tol);
  std::vector<Mat> theta_images;
  theta_images.reserve(zc.dim());
  for (const Mat& zb : zc.basis())
    theta_images.push_back(
        commutant_lifting(ctx.rep, t.domain, ctx.pi_comm, zb, tol));
  MatrixAlgebra theta =
      MatrixAlgebra::span_of(ctx.rep.dilation_dim, theta_images, tol);
  rep.theta_dim = theta.dim();
  rep.theta_inside_z_full = z_full.contains_span(theta, tol.projection_tol());

  double defect = 0;
  for (const Mat& b : theta.basis()) {
    double r = 0;
    z_full.coords(b, &r);
    defect = std::max(defect, r);
  }
  for (const Mat& b : z_full.basis()) {
    double r = 0;
    theta.coords(b, &r);
    defect = std::max(defect, r);
  }
  rep.z_match_defect = defect;
  rep.factor_state =
      (z_full.dim() == theta.dim()) && defect <= tol.projection_tol();

  rep.projections = minimal_central_projections(z_full, tol);
  rep.sector_count = static_cast<int>(rep.projections.size());
  std::vector<CpMap> atoms;
  for (const Mat& p : rep.projections)
    atoms.push_back(cp_from_operator(ctx, p, tol));
  rep.components = measure_from_atoms(std::move(atoms), tol);

  rep.barycenter_defect = 0;
  for (size_t i = 0; i < t.images.size(); ++i)
    rep.barycenter_defect =
        std::max(rep.barycenter_defect,
                 (rep.components.barycenter.images[i] - t.images[i]).norm());
  rep.subcentral = is_subcentral(rep.components, ctx, tol).subcentral;

  const int nc = rep.components.size();
  rep.disjoint = Eigen::MatrixXi::Zero(nc, nc);
  rep.quasi_equivalent = Eigen::MatrixXi::Identity(nc, nc);
  for (int i = 0; i < nc; ++i)
    for (int j = i + 1; j < nc; ++j) {
      DisjointnessCertificate d =
          is_disjoint(rep.components.atoms[i], rep.components.atoms[j], tol);
      rep.disjoint(i, j) = rep.disjoint(j, i) = d.disjoint ? 1 : 0;
      QuasiEquivalenceCertificate q = is_quasi_equivalent(
          rep.components.atoms[i], rep.components.atoms[j], tol);
      rep.quasi_equivalent(i, j) = rep.quasi_equivalent(j, i) =
          q.equivalent ? 1 : 0;
    }

  // complement equations for Z_T generated by the projections
  std::vector<Mat> join_gens = rep.projections;
  for (const Mat& b : theta.basis()) join_gens.push_back(b);
  MatrixAlgebra join = generated_algebra(join_gens, ctx.rep.dilation_dim, tol);
  rep.z_join_ok = join.same_span(z_full, tol.projection_tol());
  MatrixAlgebra z_t =
      MatrixAlgebra::span_of(ctx.rep.dilation_dim, rep.projections, tol);
  MatrixAlgebra meet = subspace_intersect(z_t, theta, tol);
  rep.z_meet_ok = meet.dim() == 1;
  return rep;
}

}  // namespace cpsector
