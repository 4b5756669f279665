#include "cpsector/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpsector {

namespace {

double map_norm(const CpMap& t) {
  double s = 0;
  for (const Mat& y : t.images) s = std::max(s, y.norm());
  return s;
}

bool is_zero_map(const CpMap& t, double tol) { return map_norm(t) <= tol; }

// coefficient-space projector onto ker(pi) ⊂ domain coordinates
Mat kernel_projector(const MatrixAlgebra& domain, const StinespringRep& rep,
                     const Tolerance& tol, int* kdim) {
  const int b = domain.dim();
  const int d = rep.dilation_dim;
  Mat stack(d * d, b);
  for (int i = 0; i < b; ++i) stack.col(i) = vectorize(rep.pi_images[i]);
  Mat null = nullspace(stack, tol.nullspace_tol());
  if (kdim) *kdim = static_cast<int>(null.cols());
  return null * null.adjoint();
}

}  // namespace

DilationContext DilationContext::build(const CpMap& t, const Tolerance& tol) {
  DilationContext ctx{t, dilate(t, tol), {}, {}, {}, {}};
  if (ctx.rep.dilation_dim == 0)
    throw InvalidInput("dilation context of the zero map");
  ctx.pi_alg = pi_image_algebra(ctx.rep, t.domain, tol);
  ctx.pi_comm = commutant(ctx.pi_alg, tol);
  if (t.target.dim() == t.m() * t.m()) {
    ctx.rel_comm = ctx.pi_comm;
  } else {
    ctx.rel_comm = relative_commutant(t, ctx.rep, tol);
  }
  ctx.pi_v.reserve(t.domain.dim());
  for (int i = 0; i < t.domain.dim(); ++i)
    ctx.pi_v.push_back(ctx.rep.pi_images[i] * ctx.rep.V);
  return ctx;
}

OrderCertificate order_leq(const CpMap& t1, const CpMap& t2,
                           const Tolerance& tol) {
  require_same_spaces(t1, t2);
  std::vector<Mat> diff;
  diff.reserve(t1.images.size());
  for (size_t i = 0; i < t1.images.size(); ++i)
    diff.push_back(t2.images[i] - t1.images[i]);
  Mat g = gram_of_images(t1.domain, diff, t1.m());
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  double min_eig = es.eigenvalues().minCoeff();
  return {min_eig >= -tol.abs_tol, min_eig};
}

Mat rn_derivative(const CpMap& tp, const DilationContext& ctx,
                  const Tolerance& tol) {
  require_same_spaces(tp, ctx.t);
  const int q = ctx.rel_comm.dim();
  const int b = ctx.t.domain.dim();
  const int m = ctx.t.m();
  Mat sys(b * m * m, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < b; ++i)
      sys.block(i * m * m, j, m * m, 1) =
          vectorize(ctx.rep.V.adjoint() * (ctx.rel_comm.basis(j) * ctx.pi_v[i]));
  Vec rhs(b * m * m);
  for (int i = 0; i < b; ++i)
    rhs.segment(i * m * m, m * m) = vectorize(tp.images[i]);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(sys);
  Vec x = cod.solve(rhs);
  double residual = (sys * x - rhs).norm();
  if (residual > 1e-6 * std::max(1.0, rhs.norm()))
    throw InvalidInput(
        "rn_derivative: map is not of the form V* R pi(.) V over the relative "
        "commutant (residual " + std::to_string(residual) + ")");
  Mat r = Mat::Zero(ctx.rep.dilation_dim, ctx.rep.dilation_dim);
  for (int j = 0; j < q; ++j) r += x(j) * ctx.rel_comm.basis(j);
  r = 0.5 * (r + r.adjoint());  // unique solution is self-adjoint
  RVec ev = hermitian_eigenvalues(r);
  if (ev.minCoeff() < -tol.projection_tol() ||
      ev.maxCoeff() > 1 + tol.projection_tol())
    throw InvalidInput("rn_derivative: solved operator leaves [0,1]; T' <= T "
                       "does not hold");
  return r;
}

CpMap cp_from_operator(const DilationContext& ctx, const Mat& r,
                       const Tolerance& tol) {
  if (r.rows() != ctx.rep.dilation_dim || r.cols() != ctx.rep.dilation_dim)
    throw InvalidInput("cp_from_operator: operator has wrong shape");
  double comm_defect = 0;
  for (const Mat& p : ctx.pi_alg.basis())
    comm_defect = std::max(comm_defect, (r * p - p * r).norm());
  if (comm_defect > tol.projection_tol() * std::max(1.0, r.norm()))
    throw InvalidInput("cp_from_operator: operator not in the commutant");
  RVec ev = hermitian_eigenvalues(r);
  if (ev.size() &&
      (ev.minCoeff() < -tol.projection_tol() ||
       ev.maxCoeff() > 1 + tol.projection_tol()))
    throw InvalidInput("cp_from_operator: spectrum leaves [0,1]");
  std::vector<Mat> images;
  images.reserve(ctx.t.domain.dim());
  for (int i = 0; i < ctx.t.domain.dim(); ++i) {
    Mat y = ctx.rep.V.adjoint() * (r * ctx.pi_v[i]);
    double res = 0;
    ctx.t.target.coords(y, &res);
    if (res > tol.projection_tol() * std::max(1.0, y.norm()))
      throw InvalidInput(
          "cp_from_operator: range leaves the target span; R is outside the "
          "relative commutant");
    images.push_back(ctx.t.target.project(y));
  }
  return CpMap{ctx.t.domain, ctx.t.target, std::move(images), {}};
}

OrthogonalityCertificate is_orthogonal(const CpMap& t1, const CpMap& t2,
                                       const Tolerance& tol) {
  require_same_spaces(t1, t2);
  OrthogonalityCertificate cert;
  double zt = tol.abs_tol;
  if (is_zero_map(t1, zt) || is_zero_map(t2, zt)) {
    cert.orthogonal = true;
    cert.projection_defect = 0;
    cert.dim_t1 = is_zero_map(t1, zt) ? 0 : dilate(t1, tol).dilation_dim;
    cert.dim_t2 = is_zero_map(t2, zt) ? 0 : dilate(t2, tol).dilation_dim;
    cert.dim_sum = cert.dim_t1 + cert.dim_t2;
    cert.dims_additive = true;
    return cert;
  }
  CpMap t = cp_add(t1, t2);
  DilationContext ctx = DilationContext::build(t, tol);
  Mat r = rn_derivative(t1, ctx, tol);
  cert.projection_defect = (r * r - r).norm();
  cert.orthogonal = cert.projection_defect <= tol.projection_tol();
  cert.dim_t1 = dilate(t1, tol).dilation_dim;
  cert.dim_t2 = dilate(t2, tol).dilation_dim;
  cert.dim_sum = ctx.rep.dilation_dim;
  cert.dims_additive = (cert.dim_t1 + cert.dim_t2 == cert.dim_sum);
  return cert;
}

DisjointnessCertificate is_disjoint(const CpMap& t1, const CpMap& t2,
                                    const Tolerance& tol) {
  require_same_spaces(t1, t2);
  DisjointnessCertificate cert;
  double zt = tol.abs_tol;
  if (is_zero_map(t1, zt) || is_zero_map(t2, zt)) {
    // the zero representation shares no subrepresentation with anything
    cert.disjoint = true;
    cert.orthogonal = true;
    cert.oracle_agrees = true;
    return cert;
  }
  CpMap t = cp_add(t1, t2);
  DilationContext ctx = DilationContext::build(t, tol);
  Mat r = rn_derivative(t1, ctx, tol);
  cert.projection_defect = (r * r - r).norm();
  cert.orthogonal = cert.projection_defect <= tol.projection_tol();
  MatrixAlgebra z = central_algebra(ctx, tol);
  double res = 0;
  z.coords(r, &res);
  cert.central_defect = res;
  cert.disjoint =
      cert.orthogonal && res <= tol.projection_tol() * std::max(1.0, r.norm());

  // oracle: intertwiner space between the two minimal dilations
  StinespringRep r1 = dilate(t1, tol), r2 = dilate(t2, tol);
  const int b = t1.domain.dim();
  const int d1 = r1.dilation_dim, d2 = r2.dilation_dim;
  Mat stack(static_cast<long>(b) * d1 * d2, d1 * d2);
  for (int i = 0; i < b; ++i)
    stack.middleRows(static_cast<long>(i) * d1 * d2, d1 * d2) =
        kron(r1.pi_images[i].transpose(), Mat::Identity(d2, d2)) -
        kron(Mat::Identity(d1, d1), r2.pi_images[i]);
  Mat null = nullspace(stack, tol.nullspace_tol());
  cert.intertwiner_dim = static_cast<int>(null.cols());
  cert.oracle_agrees = (cert.intertwiner_dim == 0) == cert.disjoint;
  return cert;
}

QuasiEquivalenceCertificate is_quasi_equivalent(const CpMap& t1,
                                                const CpMap& t2,
                                                const Tolerance& tol) {
  require_same_spaces(t1, t2);
  QuasiEquivalenceCertificate cert;
  StinespringRep r1 = dilate(t1, tol), r2 = dilate(t2, tol);
  Mat p1 = kernel_projector(t1.domain, r1, tol, &cert.kernel_dim_1);
  Mat p2 = kernel_projector(t2.domain, r2, tol, &cert.kernel_dim_2);
  cert.kernel_gap = (p1 - p2).norm();
  cert.equivalent = cert.kernel_dim_1 == cert.kernel_dim_2 &&
                    cert.kernel_gap <= 1e-6 * std::max(1.0, p1.norm());
  return cert;
}

CpMap CpMeasure::restriction(const std::vector<int>& subset) const {
  if (subset.empty()) throw InvalidInput("restriction: empty subset");
  CpMap out = atoms[subset[0]];
  for (size_t k = 1; k < subset.size(); ++k)
    out = cp_add(out, atoms[subset[k]]);
  return out;
}

void CpMeasure::validate(const Tolerance& tol) const {
  if (atoms.empty()) throw InvalidInput("CpMeasure: no atoms");
  if (weights.size() != atoms.size())
    throw InvalidInput("CpMeasure: weight per atom required");
  for (const CpMap& a : atoms) {
    require_same_spaces(a, barycenter);
    CpCertificate c = is_completely_positive(a, tol);
    if (!c.completely_positive)
      throw InvalidInput("CpMeasure: atom is not completely positive");
  }
  for (size_t i = 0; i < barycenter.images.size(); ++i) {
    Mat sum = Mat::Zero(barycenter.m(), barycenter.m());
    for (const CpMap& a : atoms) sum += a.images[i];
    if ((sum - barycenter.images[i]).norm() >
        100 * tol.abs_tol * std::max(1.0, barycenter.images[i].norm()))
      throw InvalidInput("CpMeasure: atoms do not sum to the barycenter");
  }
  for (double w : weights)
    if (w < -100 * tol.abs_tol)
      throw InvalidInput("CpMeasure: negative weight");
}

CpMeasure measure_from_atoms(std::vector<CpMap> atoms, const Tolerance& tol) {
  if (atoms.empty()) throw InvalidInput("measure_from_atoms: no atoms");
  CpMap bary = atoms[0];
  for (size_t k = 1; k < atoms.size(); ++k) bary = cp_add(bary, atoms[k]);
  std::vector<double> weights;
  weights.reserve(atoms.size());
  for (const CpMap& a : atoms)
    weights.push_back(a.image_of_identity().real().trace() / a.m());
  CpMeasure mu{std::move(bary), std::move(atoms), std::move(weights)};
  mu.validate(tol);
  return mu;
}

Mat KappaFamily::apply(const Vec& f) const {
  Mat out = Mat::Zero(ops[0].rows(), ops[0].cols());
  for (size_t i = 0; i < ops.size(); ++i) out += f(static_cast<int>(i)) * ops[i];
  return out;
}

KappaFamily kappa(const CpMeasure& mu, const DilationContext& ctx,
                  const Tolerance& tol) {
  KappaFamily fam;
  fam.ops.reserve(mu.size());
  for (const CpMap& atom : mu.atoms)
    fam.ops.push_back(rn_derivative(atom, ctx, tol));
  Mat sum = Mat::Zero(ctx.rep.dilation_dim, ctx.rep.dilation_dim);
  for (const Mat& r : fam.ops) {
    RVec ev = hermitian_eigenvalues(r);
    fam.positivity_defect = std::max(
        fam.positivity_defect,
        std::max(std::max(-ev.minCoeff(), ev.maxCoeff() - 1.0), 0.0));
    double res = 0;
    ctx.rel_comm.coords(r, &res);
    fam.membership_defect = std::max(fam.membership_defect, res);
    sum += r;
  }
  fam.sum_defect =
      (sum - Mat::Identity(ctx.rep.dilation_dim, ctx.rep.dilation_dim)).norm();
  return fam;
}

MeasureOrthogonality is_orthogonal_measure(const CpMeasure& mu,
                                           const DilationContext& ctx,
                                           const Tolerance& tol) {
  KappaFamily fam = kappa(mu, ctx, tol);
  MeasureOrthogonality out;
  for (size_t i = 0; i < fam.ops.size(); ++i)
    for (size_t j = i; j < fam.ops.size(); ++j) {
      Mat want = (i == j) ? fam.ops[i] : Mat::Zero(fam.ops[i].rows(),
                                                   fam.ops[i].cols());
      out.homomorphism_defect = std::max(
          out.homomorphism_defect, (fam.ops[i] * fam.ops[j] - want).norm());
    }
  out.orthogonal = out.homomorphism_defect <= tol.projection_tol();
  return out;
}

MatrixAlgebra central_algebra(const DilationContext& ctx,
                              const Tolerance& tol) {
  return subspace_intersect(ctx.pi_alg, ctx.rel_comm, tol);
}

MeasureSubcentrality is_subcentral(const CpMeasure& mu,
                                   const DilationContext& ctx,
                                   const Tolerance& tol) {
  MeasureSubcentrality out;
  MeasureOrthogonality orth = is_orthogonal_measure(mu, ctx, tol);
  out.orthogonal = orth.orthogonal;
  MatrixAlgebra z = central_algebra(ctx, tol);
  KappaFamily fam = kappa(mu, ctx, tol);
  for (const Mat& r : fam.ops) {
    double res = 0;
    z.coords(r, &res);
    out.central_defect = std::max(out.central_defect, res);
  }
  out.subcentral =
      out.orthogonal && out.central_defect <= tol.projection_tol();
  return out;
}

CpMeasure measure_from_abelian(const MatrixAlgebra& b,
                               const DilationContext& ctx,
                               const Tolerance& tol) {
  if (!b.is_abelian(tol.projection_tol()))
    throw InvalidInput("measure_from_abelian: algebra is not abelian");
  if (!ctx.rel_comm.contains_span(b, tol.projection_tol()))
    throw InvalidInput(
        "measure_from_abelian: algebra leaves the relative commutant");
  // for abelian b, center(b) = b and the minimal central projections are its
  // minimal projections
  std::vector<Mat> projections = minimal_central_projections(b, tol);
  std::vector<CpMap> atoms;
  atoms.reserve(projections.size());
  for (const Mat& p : projections)
    atoms.push_back(cp_from_operator(ctx, p, tol));
  return measure_from_atoms(std::move(atoms), tol);
}

bool measure_dominates(const KappaFamily& k1, const KappaFamily& k2,
                       const Tolerance& tol) {
  // every kappa_1 projection must be a 0/1 combination of kappa_2 projections
  for (const Mat& p : k1.ops) {
    Mat rec = Mat::Zero(p.rows(), p.cols());
    for (const Mat& q : k2.ops) {
      double tq = std::real(q.trace());
      if (tq < 0.5) continue;  // defensive; projections have integer trace
      double lambda = std::real((q.adjoint() * p).trace()) / tq;
      if (lambda > 0.5) rec += q;
      if (lambda > tol.projection_tol() && lambda < 1 - tol.projection_tol())
        return false;  // fractional overlap: not a subset sum
    }
    if ((p - rec).norm() > tol.projection_tol() * std::max(1.0, p.norm()))
      return false;
  }
  return true;
}

CentralDecomposition central_decomposition(const CpMap& t,
                                           const Tolerance& tol) {
  CpCertificate cp = is_completely_positive(t, tol);
  if (!cp.completely_positive) throw NotCompletelyPositive(cp.min_eigenvalue);
  DilationContext ctx = DilationContext::build(t, tol);
  MatrixAlgebra z = central_algebra(ctx, tol);
  CentralDecomposition out;
  out.projections = minimal_central_projections(z, tol);
  std::vector<CpMap> atoms;
  atoms.reserve(out.projections.size());
  for (const Mat& p : out.projections)
    atoms.push_back(cp_from_operator(ctx, p, tol));
  out.measure = measure_from_atoms(std::move(atoms), tol);

  out.barycenter_defect = 0;
  for (size_t i = 0; i < t.images.size(); ++i)
    out.barycenter_defect =
        std::max(out.barycenter_defect,
                 (out.measure.barycenter.images[i] - t.images[i]).norm());

  out.pairwise_disjoint = true;
  for (int i = 0; i < out.measure.size() && out.pairwise_disjoint; ++i)
    for (int j = i + 1; j < out.measure.size(); ++j) {
      DisjointnessCertificate d =
          is_disjoint(out.measure.atoms[i], out.measure.atoms[j], tol);
      if (!d.disjoint) {
        out.pairwise_disjoint = false;
        break;
      }
    }
  out.subcentral = is_subcentral(out.measure, ctx, tol).subcentral;
  return out;
}

double measure_distance_upto_relabeling(const CpMeasure& a,
                                        const CpMeasure& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const int n = a.size();
  std::vector<bool> used(n, false);
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double d = 0;
      for (size_t k = 0; k < a.atoms[i].images.size(); ++k)
        d = std::max(d, (a.atoms[i].images[k] - b.atoms[j].images[k]).norm());
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

TomitaReport tomita_correspondence_check(
    const DilationContext& ctx, const std::vector<CpMeasure>& measures,
    const std::vector<MatrixAlgebra>& algebras, const Tolerance& tol) {
  TomitaReport rep;
  rep.bijection_ok = true;
  rep.monotonicity_ok = true;

  std::vector<KappaFamily> fams;
  std::vector<MatrixAlgebra> kappa_algebras;
  for (const CpMeasure& mu : measures) {
    MeasureOrthogonality orth = is_orthogonal_measure(mu, ctx, tol);
    if (!orth.orthogonal)
      throw InvalidInput("tomita check: supplied measure is not orthogonal");
    KappaFamily fam = kappa(mu, ctx, tol);
    MatrixAlgebra gen =
        generated_algebra(fam.ops, ctx.rep.dilation_dim, tol);
    // roundtrip measure -> algebra -> measure
    CpMeasure back = measure_from_abelian(gen, ctx, tol);
    double d = measure_distance_upto_relabeling(mu, back);
    rep.worst_roundtrip = std::max(rep.worst_roundtrip, d);
    if (d > tol.projection_tol() * 10) rep.bijection_ok = false;
    fams.push_back(std::move(fam));
    kappa_algebras.push_back(std::move(gen));
    ++rep.measures_checked;
  }
  for (const MatrixAlgebra& b : algebras) {
    // roundtrip algebra -> measure -> algebra
    CpMeasure mu = measure_from_abelian(b, ctx, tol);
    KappaFamily fam = kappa(mu, ctx, tol);
    MatrixAlgebra gen = generated_algebra(fam.ops, ctx.rep.dilation_dim, tol);
    if (!gen.same_span(b, tol.projection_tol() * 10)) rep.bijection_ok = false;
    ++rep.algebras_checked;
  }
  for (size_t i = 0; i < fams.size(); ++i)
    for (size_t j = 0; j < fams.size(); ++j) {
      if (i == j) continue;
      bool dom = measure_dominates(fams[i], fams[j], tol);
      bool incl = kappa_algebras[j].contains_span(kappa_algebras[i],
                                                  tol.projection_tol() * 10);
      if (dom != incl) rep.monotonicity_ok = false;
      ++rep.pairs_checked;
    }
  return rep;
}

}  // namespace cpsector
