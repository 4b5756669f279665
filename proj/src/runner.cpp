#include "cpsector/runner.hpp"

#include <cmath>

#include "cpsector/selfcheck.hpp"

namespace cpsector {

namespace {

int status_from_verdicts(const json& verdicts) {
  for (const auto& kv : verdicts.items())
    if (kv.value().is_boolean() && !kv.value().get<bool>()) return kCheckFailed;
  return kOk;
}

json tol_json(const Tolerance& tol) {
  json j;
  j["abs_tol"] = tol.abs_tol;
  j["rank_cutoff"] = tol.rank_cutoff;
  return j;
}

}  // namespace

RunOptions options_from_json(const json& j) {
  RunOptions opt;
  if (j.is_object()) {
    if (j.contains("tol") && !j.at("tol").is_null())
      opt.tol.abs_tol = j.at("tol").get<double>();
    if (j.contains("rank_cutoff") && !j.at("rank_cutoff").is_null())
      opt.tol.rank_cutoff = j.at("rank_cutoff").get<double>();
    if (j.contains("seed") && !j.at("seed").is_null())
      opt.seed = j.at("seed").get<uint64_t>();
    if (j.contains("jobs") && !j.at("jobs").is_null())
      opt.jobs = j.at("jobs").get<int>();
  }
  opt.tol.validate();
  if (opt.jobs < 1) throw InvalidInput("jobs must be >= 1");
  return opt;
}

RunResult run_dilate(const json& input, const RunOptions& opt) {
  CpMap t = cpmap_from_json(input, opt.tol);
  CpCertificate cp = is_completely_positive(t, opt.tol);
  if (!cp.completely_positive) throw NotCompletelyPositive(cp.min_eigenvalue);
  StinespringRep rep = minimal_stinespring(t, opt.tol);
  double recon = reconstruction_residual(t, rep);
  double mult = multiplicativity_residual(t.domain, rep);
  double isom = t.is_unital(100 * opt.tol.abs_tol)
                    ? (rep.V.adjoint() * rep.V -
                       Mat::Identity(t.m(), t.m()))
                          .norm()
                    : 0.0;

  json report;
  report["command"] = "dilate";
  report["tolerance"] = tol_json(opt.tol);
  json verdicts;
  verdicts["completely_positive"] = cp.completely_positive;
  verdicts["reconstruction"] = recon <= 1000 * opt.tol.abs_tol;
  verdicts["pi_multiplicative"] = mult <= 1000 * opt.tol.abs_tol;
  report["verdicts"] = std::move(verdicts);
  json certs;
  certs["cp_min_eigenvalue"] = cp.min_eigenvalue;
  certs["reconstruction_residual"] = recon;
  certs["pi_multiplicativity_residual"] = mult;
  certs["isometry_defect"] = isom;
  report["certificates"] = std::move(certs);
  json artifacts;
  artifacts["dilation_dim"] = rep.dilation_dim;
  json pis = json::array();
  for (const Mat& p : rep.pi_images) pis.push_back(matrix_to_json(p));
  artifacts["pi_images"] = std::move(pis);
  artifacts["V"] = matrix_to_json(rep.V);
  report["artifacts"] = std::move(artifacts);
  return {status_from_verdicts(report["verdicts"]), std::move(report)};
}

RunResult run_compare(const json& a, const json& b, const std::string& mode,
                      const RunOptions& opt) {
  CpMap t1 = cpmap_from_json(a, opt.tol);
  CpMap t2 = cpmap_from_json(b, opt.tol);
  json report;
  report["command"] = "compare";
  report["mode"] = mode;
  report["tolerance"] = tol_json(opt.tol);
  json verdicts, certs;
  if (mode == "leq") {
    OrderCertificate c = order_leq(t1, t2, opt.tol);
    verdicts["leq"] = c.holds;
    certs["gram_min_eigenvalue"] = c.min_eigenvalue;
  } else if (mode == "orthogonal") {
    OrthogonalityCertificate c = is_orthogonal(t1, t2, opt.tol);
    verdicts["orthogonal"] = c.orthogonal;
    certs["projection_defect"] = c.projection_defect;
    certs["dilation_dim_t1"] = c.dim_t1;
    certs["dilation_dim_t2"] = c.dim_t2;
    certs["dilation_dim_sum"] = c.dim_sum;
    certs["dims_additive"] = c.dims_additive;
  } else if (mode == "disjoint") {
    DisjointnessCertificate c = is_disjoint(t1, t2, opt.tol);
    verdicts["disjoint"] = c.disjoint;
    certs["orthogonal"] = c.orthogonal;
    certs["projection_defect"] = c.projection_defect;
    certs["central_defect"] = c.central_defect;
    certs["intertwiner_dimension"] = c.intertwiner_dim;
    certs["oracle_agrees"] = c.oracle_agrees;
  } else if (mode == "quasieq") {
    QuasiEquivalenceCertificate c = is_quasi_equivalent(t1, t2, opt.tol);
    verdicts["quasi_equivalent"] = c.equivalent;
    certs["kernel_gap"] = c.kernel_gap;
    certs["kernel_dim_t1"] = c.kernel_dim_1;
    certs["kernel_dim_t2"] = c.kernel_dim_2;
  } else {
    throw InvalidInput("compare: unknown mode '" + mode +
                       "' (expected leq|orthogonal|disjoint|quasieq)");
  }
  report["verdicts"] = std::move(verdicts);
  report["certificates"] = std::move(certs);
  return {status_from_verdicts(report["verdicts"]), std::move(report)};
}

RunResult run_decompose(const json& input, const RunOptions& opt) {
  CpMap t = cpmap_from_json(input, opt.tol);
  CpCertificate cp = is_completely_positive(t, opt.tol);
  if (!cp.completely_positive) throw NotCompletelyPositive(cp.min_eigenvalue);
  CentralDecomposition dec = central_decomposition(t, opt.tol);

  json report;
  report["command"] = "decompose";
  report["tolerance"] = tol_json(opt.tol);
  json verdicts;
  verdicts["pairwise_disjoint"] = dec.pairwise_disjoint;
  verdicts["subcentral"] = dec.subcentral;
  verdicts["barycenter_reproduced"] =
      dec.barycenter_defect <= 1000 * opt.tol.abs_tol;
  report["verdicts"] = std::move(verdicts);
  json certs;
  certs["atom_count"] = dec.measure.size();
  certs["barycenter_defect"] = dec.barycenter_defect;
  report["certificates"] = std::move(certs);
  json artifacts;
  artifacts["measure"] = measure_to_json(dec.measure);
  json projs = json::array();
  for (const Mat& p : dec.projections) projs.push_back(matrix_to_json(p));
  artifacts["central_projections"] = std::move(projs);
  json weights = json::array();
  for (double w : dec.measure.weights) weights.push_back(w);
  artifacts["weights"] = std::move(weights);
  report["artifacts"] = std::move(artifacts);
  return {status_from_verdicts(report["verdicts"]), std::move(report)};
}

RunResult run_kappa(const json& input, const RunOptions& opt) {
  CpMeasure mu = measure_from_json(input, opt.tol);
  DilationContext ctx = DilationContext::build(mu.barycenter, opt.tol);
  KappaFamily fam = kappa(mu, ctx, opt.tol);
  MeasureOrthogonality orth = is_orthogonal_measure(mu, ctx, opt.tol);
  MeasureSubcentrality sub = is_subcentral(mu, ctx, opt.tol);

  json report;
  report["command"] = "kappa";
  report["tolerance"] = tol_json(opt.tol);
  json verdicts;
  verdicts["kappa_in_unit_interval"] =
      fam.positivity_defect <= opt.tol.projection_tol();
  verdicts["kappa_in_relative_commutant"] =
      fam.membership_defect <= opt.tol.projection_tol();
  verdicts["kappa_sums_to_identity"] =
      fam.sum_defect <= opt.tol.projection_tol();
  verdicts["orthogonal_measure"] = orth.orthogonal;
  verdicts["subcentral_measure"] = sub.subcentral;
  report["verdicts"] = std::move(verdicts);
  json certs;
  certs["positivity_defect"] = fam.positivity_defect;
  certs["membership_defect"] = fam.membership_defect;
  certs["sum_defect"] = fam.sum_defect;
  certs["homomorphism_defect"] = orth.homomorphism_defect;
  certs["central_defect"] = sub.central_defect;
  report["certificates"] = std::move(certs);
  json artifacts;
  json ops = json::array();
  for (const Mat& r : fam.ops) ops.push_back(matrix_to_json(r));
  artifacts["kappa_operators"] = std::move(ops);
  json weights = json::array();
  for (double w : mu.weights) weights.push_back(w);
  artifacts["weights"] = std::move(weights);
  report["artifacts"] = std::move(artifacts);
  // informational verdicts (orthogonal/subcentral) do not fail the run;
  // structural kappa checks do
  int status = kOk;
  for (const char* key : {"kappa_in_unit_interval",
                          "kappa_in_relative_commutant",
                          "kappa_sums_to_identity"})
    if (!report["verdicts"][key].get<bool>()) status = kCheckFailed;
  return {status, std::move(report)};
}

namespace {

LocalStateMap local_state_from_request(const json& request, const LatticeNet& net,
                                       const RegionPair& lambda,
                                       const Tolerance& tol,
                                       const char* state_key) {
  if (!request.contains(state_key))
    throw InvalidInput(std::string("localnet: missing '") + state_key + "'");
  DensityState phi{matrix_from_json(request.at(state_key))};
  return local_state(net, lambda, phi, tol);
}

json local_report_json(const LocalStateReport& rep) {
  json j;
  j["pass"] = rep.pass;
  j["cond1_residual"] = rep.cond1_residual;
  j["cond2_residual"] = rep.cond2_residual;
  j["unital_residual"] = rep.unital_residual;
  j["phi_selfadjoint_defect"] = rep.phi_selfadjoint_defect;
  j["phi_negative_mass"] = rep.phi_negative_mass;
  j["phi_trace_defect"] = rep.phi_trace_defect;
  j["pairs_checked"] = rep.pairs_checked;
  j["implied_phi"] = matrix_to_json(rep.implied_phi);
  return j;
}

}  // namespace

RunResult run_localnet(const json& request, const RunOptions& opt) {
  if (!request.is_object() || !request.contains("net") ||
      !request.contains("action"))
    throw InvalidInput("localnet: expected {net, action, ...}");
  LatticeNet net = net_from_json(request.at("net"));
  const std::string action = request.at("action").get<std::string>();

  auto lambda_from = [&](const char* inner_key,
                         const char* outer_key) -> RegionPair {
    if (!request.contains(inner_key) || !request.contains(outer_key))
      throw InvalidInput("localnet: missing region specification");
    RegionPair lam{region_from_json(request.at(inner_key)),
                   region_from_json(request.at(outer_key))};
    lam.validate(net);
    return lam;
  };

  json report;
  report["command"] = "localnet";
  report["action"] = action;
  report["tolerance"] = tol_json(opt.tol);

  if (action == "build") {
    RegionPair lam = lambda_from("inner", "outer");
    LocalStateMap st =
        local_state_from_request(request, net, lam, opt.tol, "state");
    LocalStateReport v = verify_local_state(st, opt.tol);
    json verdicts;
    verdicts["local_state"] = v.pass;
    report["verdicts"] = std::move(verdicts);
    report["certificates"] = local_report_json(v);
    json artifacts;
    artifacts["map"] = cpmap_to_json(st.to_cpmap(opt.tol));
    report["artifacts"] = std::move(artifacts);
    return {status_from_verdicts(report["verdicts"]), std::move(report)};
  }
  if (action == "verify") {
    RegionPair lam = lambda_from("inner", "outer");
    if (!request.contains("map"))
      throw InvalidInput("localnet verify: missing 'map'");
    CpMap t = cpmap_from_json(request.at("map"), opt.tol);
    LocalStateReport v = verify_local_state(net, lam, t, opt.tol);
    json verdicts;
    verdicts["local_state"] = v.pass;
    report["verdicts"] = std::move(verdicts);
    report["certificates"] = local_report_json(v);
    return {status_from_verdicts(report["verdicts"]), std::move(report)};
  }
  if (action == "commute") {
    RegionPair l1 = lambda_from("inner", "outer");
    RegionPair l2 = lambda_from("inner2", "outer2");
    LocalStateMap t1 =
        local_state_from_request(request, net, l1, opt.tol, "state");
    LocalStateMap t2 =
        local_state_from_request(request, net, l2, opt.tol, "state2");
    CommutationReport c = commutation_check(t1, t2, opt.tol);
    json verdicts;
    verdicts["outer_regions_disjoint"] = c.outer_regions_disjoint;
    verdicts["commute"] = c.max_deviation <= 1000 * opt.tol.abs_tol;
    report["verdicts"] = std::move(verdicts);
    json certs;
    certs["max_deviation"] = c.max_deviation;
    certs["elements_checked"] = c.elements_checked;
    report["certificates"] = std::move(certs);
    return {status_from_verdicts(report["verdicts"]), std::move(report)};
  }
  if (action == "sectors") {
    RegionPair lam = lambda_from("inner", "outer");
    LocalStateMap st =
        local_state_from_request(request, net, lam, opt.tol, "state");
    SectorReport s = local_sector_analysis(st, opt.tol);
    json verdicts;
    verdicts["local_state"] = s.local_state.pass;
    verdicts["components_pairwise_disjoint"] = [&] {
      for (int i = 0; i < s.components.size(); ++i)
        for (int j = i + 1; j < s.components.size(); ++j)
          if (!s.disjoint(i, j)) return false;
      return true;
    }();
    verdicts["barycenter_reproduced"] =
        s.barycenter_defect <= 1000 * opt.tol.abs_tol;
    verdicts["subcentral"] = s.subcentral;
    report["verdicts"] = std::move(verdicts);
    json certs;
    certs["factor_state"] = s.factor_state;
    certs["sector_count"] = s.sector_count;
    certs["z_full_dim"] = s.z_full_dim;
    certs["theta_dim"] = s.theta_dim;
    certs["theta_inside_z_full"] = s.theta_inside_z_full;
    certs["z_match_defect"] = s.z_match_defect;
    certs["barycenter_defect"] = s.barycenter_defect;
    certs["z_join_ok"] = s.z_join_ok;
    certs["z_meet_ok"] = s.z_meet_ok;
    certs["local_state_report"] = local_report_json(s.local_state);
    report["certificates"] = std::move(certs);
    json artifacts;
    json projs = json::array();
    for (const Mat& p : s.projections) projs.push_back(matrix_to_json(p));
    artifacts["sector_projections"] = std::move(projs);
    json comps = json::array();
    for (const CpMap& a : s.components.atoms) comps.push_back(cpmap_to_json(a));
    artifacts["components"] = std::move(comps);
    json dis = json::array(), qe = json::array();
    for (int i = 0; i < s.sector_count; ++i) {
      json drow = json::array(), qrow = json::array();
      for (int j = 0; j < s.sector_count; ++j) {
        drow.push_back(s.disjoint(i, j));
        qrow.push_back(s.quasi_equivalent(i, j));
      }
      dis.push_back(std::move(drow));
      qe.push_back(std::move(qrow));
    }
    artifacts["disjointness_matrix"] = std::move(dis);
    artifacts["quasi_equivalence_matrix"] = std::move(qe);
    report["artifacts"] = std::move(artifacts);
    return {status_from_verdicts(report["verdicts"]), std::move(report)};
  }
  throw InvalidInput("localnet: unknown action '" + action +
                     "' (expected build|verify|sectors|commute)");
}

RunResult run_selftest(const RunOptions& opt) {
  std::vector<int> ids;
  for (int i = 1; i <= 11; ++i) ids.push_back(i);
  auto outcomes = run_criteria(opt.seed, /*reduced=*/true, opt.jobs, ids);
  json report;
  report["command"] = "selftest";
  report["seed"] = opt.seed;
  report["tolerance"] = tol_json(opt.tol);
  json verdicts, certs;
  json criteria = json::array();
  bool all = true;
  for (const auto& o : outcomes) {
    verdicts["criterion_" + std::to_string(o.id)] = o.pass;
    all = all && o.pass;
    json c;
    c["id"] = o.id;
    c["name"] = o.name;
    c["pass"] = o.pass;
    // drop wall-clock entries so the report is byte-stable across runs
    json d = o.details;
    std::vector<std::string> drop;
    for (const auto& kv : d.items())
      if (kv.key().find("second") != std::string::npos) drop.push_back(kv.key());
    for (const std::string& k : drop) d.erase(k);
    c["details"] = std::move(d);
    criteria.push_back(std::move(c));
  }
  report["verdicts"] = std::move(verdicts);
  certs["criteria_passed"] =
      static_cast<int>(std::count_if(outcomes.begin(), outcomes.end(),
                                     [](const auto& o) { return o.pass; }));
  certs["criteria_total"] = static_cast<int>(outcomes.size());
  report["certificates"] = std::move(certs);
  report["criteria"] = std::move(criteria);
  return {all ? kOk : kCheckFailed, std::move(report)};
}

RunResult run_command(const std::string& command, const json& request,
                      const RunOptions& opt) {
  if (command == "dilate") return run_dilate(request, opt);
  if (command == "compare") {
    if (!request.is_object() || !request.contains("a") ||
        !request.contains("b") || !request.contains("mode"))
      throw InvalidInput("compare: expected {a, b, mode}");
    return run_compare(request.at("a"), request.at("b"),
                       request.at("mode").get<std::string>(), opt);
  }
  if (command == "decompose") return run_decompose(request, opt);
  if (command == "kappa") return run_kappa(request, opt);
  if (command == "localnet") return run_localnet(request, opt);
  if (command == "selftest") return run_selftest(opt);
  throw InvalidInput("unknown command '" + command + "'");
}

}  // namespace cpsector
