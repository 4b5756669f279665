#include "cpsector/generators.hpp"

#include <algorithm>
#include <cmath>

namespace cpsector {

Mat ginibre(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
  return m;
}

Mat random_density_matrix(Rng& rng, int dim, int rank) {
  rank = std::max(1, std::min(rank, dim));
  Mat g = ginibre(rng, dim, rank);
  Mat rho = g * g.adjoint();
  rho /= rho.real().trace();
  return rho;
}

Vec random_unit_vector(Rng& rng, int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.cnormal();
  return v / v.norm();
}

MatrixAlgebra sample_domain(Rng& rng) {
  switch (rng.uniform_int(0, 3)) {
    case 0: return MatrixAlgebra::full(2);
    case 1: return MatrixAlgebra::full(3);
    case 2: return MatrixAlgebra::blocks({2, 2});
    default: return MatrixAlgebra::diagonal(3);
  }
}

MatrixAlgebra sample_target(Rng& rng) {
  switch (rng.uniform_int(0, 2)) {
    case 0: return MatrixAlgebra::scalars(1);
    case 1: return MatrixAlgebra::full(2);
    default: return MatrixAlgebra::blocks({2, 1});
  }
}

CpMap random_cp_map(Rng& rng, const MatrixAlgebra& domain,
                    const MatrixAlgebra& target, int kraus_count,
                    bool attach_kraus) {
  const int n = domain.space_dim();
  const int m = target.space_dim();
  std::vector<Mat> kraus;
  kraus.reserve(kraus_count);
  double scale = 1.0 / std::sqrt(double(kraus_count) * n);
  for (int k = 0; k < kraus_count; ++k)
    kraus.push_back(scale * ginibre(rng, n, m));
  const bool full_target = target.dim() == m * m;
  std::vector<Mat> images;
  images.reserve(domain.dim());
  for (const Mat& b : domain.basis()) {
    Mat y = Mat::Zero(m, m);
    for (const Mat& c : kraus) y += c.adjoint() * b * c;
    // compress into the target algebra; the HS projection onto a
    // *-subalgebra is the trace-preserving conditional expectation (CP)
    images.push_back(full_target ? y : target.project(y));
  }
  CpMap t{domain, target, std::move(images), {}};
  if (attach_kraus && full_target) t.kraus = std::move(kraus);
  return t;
}

Mat random_relcomm_element(Rng& rng, const DilationContext& ctx) {
  const int q = ctx.rel_comm.dim();
  Mat h = Mat::Zero(ctx.rep.dilation_dim, ctx.rep.dilation_dim);
  for (int i = 0; i < q; ++i) {
    cplx c = rng.cnormal();
    const Mat& b = ctx.rel_comm.basis(i);
    h += c * b + std::conj(c) * b.adjoint();
  }
  // shift+scale the spectrum into [0, 1]; affine combinations with the
  // identity stay inside the (unital) relative commutant
  RVec ev = hermitian_eigenvalues(h);
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  double span = std::max(hi - lo, 1e-6);
  return (h - lo * Mat::Identity(h.rows(), h.cols())) / span;
}

std::optional<Mat> find_relcomm_projection(const DilationContext& ctx,
                                           const Tolerance& tol) {
  const int k = ctx.rep.dilation_dim;
  for (int idx = 0; idx < ctx.rel_comm.dim(); ++idx) {
    for (int part = 0; part < 2; ++part) {
      const Mat& b = ctx.rel_comm.basis(idx);
      Mat h = part == 0 ? Mat(0.5 * (b + b.adjoint()))
                        : Mat(cplx(0, -0.5) * (b - b.adjoint()));
      Eigen::SelfAdjointEigenSolver<Mat> es(h);
      const RVec& ev = es.eigenvalues();
      if (ev.maxCoeff() - ev.minCoeff() < 1e-6) continue;  // scalar-like
      // split at the largest spectral gap
      int cut = 0;
      double best = -1;
      for (int i = 0; i + 1 < ev.size(); ++i)
        if (ev(i + 1) - ev(i) > best) {
          best = ev(i + 1) - ev(i);
          cut = i + 1;
        }
      Mat u = es.eigenvectors().rightCols(k - cut);
      Mat p = u * u.adjoint();
      double res = 0;
      ctx.rel_comm.coords(p, &res);
      if (res > tol.projection_tol()) continue;
      if (p.norm() < 0.5 || (Mat::Identity(k, k) - p).norm() < 0.5) continue;
      return p;
    }
  }
  return std::nullopt;
}

CpPair orthogonal_pair(Rng& rng, const MatrixAlgebra& domain,
                       const MatrixAlgebra& target, const Tolerance& tol) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    CpMap t = random_cp_map(rng, domain, target, rng.uniform_int(2, 4));
    DilationContext ctx = DilationContext::build(t, tol);
    std::optional<Mat> p = find_relcomm_projection(ctx, tol);
    if (!p) continue;
    CpMap t1 = cp_from_operator(ctx, *p, tol);
    Mat q = Mat::Identity(p->rows(), p->cols()) - *p;
    CpMap t2 = cp_from_operator(ctx, q, tol);
    return {std::move(t1), std::move(t2)};
  }
  throw Error("orthogonal_pair: no splittable barycenter found");
}

CpPair perturbed_pair(Rng& rng, const MatrixAlgebra& domain,
                      const MatrixAlgebra& target, const Tolerance& tol) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    CpMap t = random_cp_map(rng, domain, target, rng.uniform_int(2, 4));
    DilationContext ctx = DilationContext::build(t, tol);
    std::optional<Mat> p = find_relcomm_projection(ctx, tol);
    if (!p) continue;
    double eps = rng.uniform(0.05, 0.3);
    Mat id = Mat::Identity(p->rows(), p->cols());
    Mat r = (1 - eps) * (*p) + eps * (id - *p);
    CpMap t1 = cp_from_operator(ctx, r, tol);
    CpMap t2 = cp_from_operator(ctx, Mat(id - r), tol);
    return {std::move(t1), std::move(t2)};
  }
  throw Error("perturbed_pair: no splittable barycenter found");
}

namespace {

double verify_cost(const LatticeNet& net, const RegionPair& lambda,
                   long kraus_count) {
  Region all = Region::of({}).complement(net.sites());
  RegionBasis global(net, all);
  RegionBasis outerc(net, lambda.outer.complement(net.sites()));
  double g = double(net.total_dim());
  return double(global.count()) * double(outerc.count()) *
         double(kraus_count) * g * g;
}

}  // namespace

NetInstance sample_net_instance(Rng& rng, long max_total_dim,
                                double work_budget) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    LatticeNet net;
    int sites = rng.uniform_int(2, 5);
    for (int s = 0; s < sites; ++s) {
      net.dims.push_back(rng.uniform_int(1, 4));
      net.kinds.push_back(rng.uniform_int(0, 2) == 0 ? SiteKind::diag
                                                     : SiteKind::full);
    }
    net.dim_cap = max_total_dim;
    if (net.total_dim() > max_total_dim || net.total_dim() < 2) continue;

    // inner: one or two sites with dim > 1
    std::vector<int> candidates;
    for (int s = 0; s < sites; ++s)
      if (net.dims[s] > 1) candidates.push_back(s);
    if (candidates.empty()) continue;
    int inner_count = std::min<int>(rng.uniform_int(1, 2),
                                    static_cast<int>(candidates.size()));
    std::vector<int> inner_sites;
    for (int c = 0; c < inner_count; ++c)
      inner_sites.push_back(candidates[rng.uniform_int(
          0, static_cast<int>(candidates.size()) - 1)]);
    Region inner = Region::of(inner_sites);
    // outer: inner plus at least one more site
    std::vector<int> outer_sites = inner.sites;
    for (int s = 0; s < sites; ++s)
      if (!std::binary_search(inner.sites.begin(), inner.sites.end(), s) &&
          rng.uniform() < 0.6)
        outer_sites.push_back(s);
    Region outer = Region::of(outer_sites);
    if (outer.sites.size() == inner.sites.size()) {
      for (int s = 0; s < sites; ++s)
        if (!std::binary_search(inner.sites.begin(), inner.sites.end(), s)) {
          outer_sites.push_back(s);
          break;
        }
      outer = Region::of(outer_sites);
    }
    RegionPair lambda{inner, outer};
    try {
      lambda.validate(net);
    } catch (const InvalidInput&) {
      continue;
    }

    RegionSplit inner_split(net, lambda.inner);
    long d1 = inner_split.region_dim;
    int rank = rng.uniform_int(1, static_cast<int>(d1));
    long kraus_count = d1 * rank;
    if (verify_cost(net, lambda, kraus_count) > work_budget) continue;

    DensityState phi{random_density_matrix(rng, static_cast<int>(d1), rank)};
    return {std::move(net), std::move(lambda), std::move(phi)};
  }
  throw Error("sample_net_instance: no instance satisfied the budget");
}

CommutingInstance sample_commuting_instance(Rng& rng, long max_total_dim,
                                            double work_budget) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    LatticeNet net;
    int sites = rng.uniform_int(4, 6);
    for (int s = 0; s < sites; ++s) {
      net.dims.push_back(rng.uniform_int(1, 3));
      net.kinds.push_back(rng.uniform_int(0, 2) == 0 ? SiteKind::diag
                                                     : SiteKind::full);
    }
    net.dim_cap = max_total_dim;
    if (net.total_dim() > max_total_dim) continue;
    int half = sites / 2;
    // left/right halves; need a dim>1 site in each to host the inner regions
    int left_inner = -1, right_inner = -1;
    for (int s = 0; s < half; ++s)
      if (net.dims[s] > 1) left_inner = s;
    for (int s = half; s < sites; ++s)
      if (net.dims[s] > 1) right_inner = s;
    if (left_inner < 0 || right_inner < 0) continue;
    std::vector<int> left_all, right_all;
    for (int s = 0; s < half; ++s) left_all.push_back(s);
    for (int s = half; s < sites; ++s) right_all.push_back(s);
    if (left_all.size() < 2 || right_all.size() < 2) continue;
    RegionPair l1{Region::of({left_inner}), Region::of(left_all)};
    RegionPair l2{Region::of({right_inner}), Region::of(right_all)};
    try {
      l1.validate(net);
      l2.validate(net);
    } catch (const InvalidInput&) {
      continue;
    }
    long d1a = net.dims[left_inner], d1b = net.dims[right_inner];
    double g = double(net.total_dim());
    Region all = Region::of({}).complement(net.sites());
    RegionBasis global(net, all);
    double cost = double(global.count()) * double(d1a * d1a + d1b * d1b) * g *
                  g * g;
    if (cost > work_budget) continue;
    DensityState phi1{
        random_density_matrix(rng, static_cast<int>(d1a), rng.uniform_int(1, 2))};
    DensityState phi2{
        random_density_matrix(rng, static_cast<int>(d1b), rng.uniform_int(1, 2))};
    return {std::move(net), l1, l2, std::move(phi1), std::move(phi2)};
  }
  throw Error("sample_commuting_instance: no instance satisfied the budget");
}

}  // namespace cpsector
