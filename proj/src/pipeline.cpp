#include "molp/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

namespace molp {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long long binom_ll(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool lex_less(const RatVec& a, const RatVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

SystemReport run_system(const MolpProblem& p, const PipelineOptions& opts,
                        const ScalingConstants& consts, int i) {
  const auto t0 = std::chrono::steady_clock::now();
  SystemReport rep;
  rep.index = i;

  PolySystem sys = build_sys_i(p, i, consts, opts.variant);
  if (opts.do_eliminate_lambda) sys = eliminate_lambda(sys, p);

  const int min_order = sys.min_relaxation_order();
  int n_lo = opts.order_override > 0 ? opts.order_override : min_order;
  n_lo = std::max(n_lo, min_order);
  int n_hi = opts.order_override > 0 ? n_lo : (opts.n_max > 0 ? opts.n_max : min_order + 3);
  n_hi = std::max(n_hi, n_lo);

  for (int N = n_lo; N <= n_hi; ++N) {
    SystemAttempt att;
    att.order = N;
    const auto ta = std::chrono::steady_clock::now();
    const long long bsize = binom_ll(sys.catalog.size() + N, N);
    att.basis_size = static_cast<int>(bsize);
    if (bsize > opts.max_basis) {
      att.failure = "basis_size_guard";
      rep.attempts.push_back(att);
      rep.error = "relaxation order " + std::to_string(N) + " needs basis " +
                  std::to_string(bsize) + " > guard " + std::to_string(opts.max_basis);
      break;
    }

    const MomentRelaxation rel = assemble_relaxation(sys, N, opts.rescale);
    const ConicSolution sol = solve(rel, opts.solver);
    att.status = sol.status;
    att.iterations = sol.iterations;
    att.eq_residual = sol.eq_residual;
    att.min_eigenvalue = sol.min_eigenvalue;
    att.mu_final = sol.mu_final;

    if (sol.status == SolveStatus::Infeasible) {
      att.seconds = seconds_since(ta);
      rep.attempts.push_back(att);
      rep.ok = true;
      rep.empty = true;
      break;
    }
    if (sol.status != SolveStatus::Solved) {
      att.failure = sol.status == SolveStatus::MaxIters ? "max_iters" : "numerical_failure";
      att.seconds = seconds_since(ta);
      rep.attempts.push_back(att);
      continue;
    }

    ExtractionResult ext = run_extraction(rel, sys, sol, opts.extract);
    att.flat = ext.flat;
    att.t = ext.t;
    att.r = ext.r;
    att.ranks = ext.ranks;
    att.failure = ext.failure;
    att.verified_count = static_cast<int>(ext.verified.points.size());
    att.rejected_count = static_cast<int>(ext.verified.rejected.size());
    att.seconds = seconds_since(ta);
    rep.attempts.push_back(att);

    const bool clean = ext.flat && ext.failure.empty() && ext.verified.rejected.empty() &&
                       att.verified_count == ext.r;
    if (clean) {
      rep.candidates = unscale_and_project(p, sys, ext.verified);
      rep.verified_scaled = ext.verified.points;
      rep.ok = true;
      break;
    }
  }
  if (!rep.ok && rep.error.empty()) {
    rep.error = "no order in the search window produced a flat, fully verified extraction";
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace

ScalingConstants resolve_constants(const MolpProblem& p, const PipelineOptions& opts) {
  ScalingConstants consts;
  if (opts.M_override.has_value()) {
    consts.M = *opts.M_override;
    consts.m_provenance = ConstantProvenance::UserOverride;
  } else {
    consts.M = compute_M(p, MRows::Stacked, opts.enumeration_cap);
    consts.m_provenance = ConstantProvenance::ComputedLcm;
  }
  consts.Mi.resize(p.m);
  consts.mi_provenance.resize(p.m);
  for (int i = 0; i < p.m; ++i) {
    if (opts.Mi_override.has_value()) {
      consts.Mi[i] = opts.Mi_override->size() == 1 ? (*opts.Mi_override)[0]
                                                   : opts.Mi_override->at(i);
      consts.mi_provenance[i] = ConstantProvenance::UserOverride;
    } else {
      MiMode mode;
      mode.kind = MiMode::Kind::Enumerate;
      consts.Mi[i] = compute_Mi(p, i, mode, opts.enumeration_cap);
      consts.mi_provenance[i] = ConstantProvenance::ComputedLcm;
    }
  }
  return consts;
}

ParetoReport run_pipeline(const MolpProblem& p, const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  ParetoReport rep;
  rep.problem = p;
  rep.variant = opts.variant;
  rep.seed = opts.extract.seed;
  rep.consts = resolve_constants(p, opts);

  std::vector<int> systems = opts.systems;
  if (systems.empty()) {
    systems.resize(p.m);
    for (int i = 0; i < p.m; ++i) systems[i] = i + 1;
  }
  for (int i : systems)
    if (i < 1 || i > p.m) throw BadIndex("system subset entry " + std::to_string(i));

  rep.systems.resize(systems.size());
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    for (size_t s = 0; s < systems.size(); ++s)
      rep.systems[s] = run_system(p, opts, rep.consts, systems[s]);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    const size_t nworkers = std::min<size_t>(static_cast<size_t>(jobs), systems.size());
    for (size_t w = 0; w < nworkers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const size_t s = next.fetch_add(1);
          if (s >= systems.size()) return;
          rep.systems[s] = run_system(p, opts, rep.consts, systems[s]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  rep.all_systems_ok = true;
  std::vector<RatVec> projections;
  for (const auto& sr : rep.systems) {
    if (!sr.ok) rep.all_systems_ok = false;
    for (const auto& c : sr.candidates) projections.push_back(c.x);
  }
  std::sort(projections.begin(), projections.end(), lex_less);
  projections.erase(std::unique(projections.begin(), projections.end(),
                                [](const RatVec& a, const RatVec& b) { return a == b; }),
                    projections.end());
  for (const auto& x : projections) {
    if (!opts.extreme_filter || is_vertex_point(p, x)) rep.xe.push_back(x);
    else rep.non_extreme.push_back(x);
  }

  if (opts.with_oracle) {
    rep.oracle_ran = true;
    const VertexSet xe = pareto_extreme_set(p);
    rep.oracle_xe = xe.points;
    rep.oracle_edges = pareto_edges(p, xe);
    rep.agreement = rep.all_systems_ok && same_point_set(rep.xe, rep.oracle_xe);
  }
  rep.seconds_total = seconds_since(t0);
  return rep;
}

bool same_point_set(const std::vector<RatVec>& a, const std::vector<RatVec>& b) {
  if (a.size() != b.size()) return false;
  std::vector<RatVec> sa = a, sb = b;
  std::sort(sa.begin(), sa.end(), lex_less);
  std::sort(sb.begin(), sb.end(), lex_less);
  for (size_t i = 0; i < sa.size(); ++i)
    if (!(sa[i] == sb[i])) return false;
  return true;
}

namespace {

using nlohmann::json;

json point_json(const RatVec& x) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(format_rational(x(i)));
  return arr;
}

const char* provenance_name(ConstantProvenance p) {
  switch (p) {
    case ConstantProvenance::ComputedLcm: return "computed-lcm";
    case ConstantProvenance::UserOverride: return "user-override";
    case ConstantProvenance::ConservativeMultiple: return "conservative-multiple";
  }
  return "?";
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "Solved";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

}  // namespace

std::string report_to_json(const ParetoReport& r, bool include_timings) {
  json doc;
  doc["problem"] = json::parse(serialize_problem(r.problem));
  doc["variant"] = r.variant == SysVariant::FullU ? "full-u" : "reduced-u";
  doc["seed"] = r.seed;
  doc["scaling"]["M"] = r.consts.M.convert_to<long long>();
  doc["scaling"]["M_provenance"] = provenance_name(r.consts.m_provenance);
  {
    json mi = json::array(), pv = json::array();
    for (size_t i = 0; i < r.consts.Mi.size(); ++i) {
      mi.push_back(r.consts.Mi[i].convert_to<long long>());
      pv.push_back(provenance_name(r.consts.mi_provenance[i]));
    }
    doc["scaling"]["Mi"] = mi;
    doc["scaling"]["Mi_provenance"] = pv;
  }
  json systems = json::array();
  for (const auto& sr : r.systems) {
    json s;
    s["i"] = sr.index;
    s["ok"] = sr.ok;
    s["empty"] = sr.empty;
    if (!sr.error.empty()) s["error"] = sr.error;
    json attempts = json::array();
    for (const auto& a : sr.attempts) {
      json aj;
      aj["order"] = a.order;
      aj["basis_size"] = a.basis_size;
      aj["status"] = status_name(a.status);
      aj["iterations"] = a.iterations;
      aj["eq_residual"] = a.eq_residual;
      aj["min_eigenvalue"] = a.min_eigenvalue;
      aj["flat"] = a.flat;
      if (a.flat) {
        aj["t"] = a.t;
        aj["rank"] = a.r;
      }
      aj["ranks"] = a.ranks;
      aj["verified"] = a.verified_count;
      aj["rejected"] = a.rejected_count;
      if (!a.failure.empty()) aj["failure"] = a.failure;
      if (include_timings) aj["seconds"] = a.seconds;
      attempts.push_back(aj);
    }
    s["attempts"] = attempts;
    json cands = json::array();
    for (const auto& c : sr.candidates) {
      json cj;
      cj["x"] = point_json(c.x);
      cj["u"] = point_json(c.triplet.u);
      cj["lambda"] = point_json(c.triplet.lambda);
      cands.push_back(cj);
    }
    s["solutions"] = cands;
    if (include_timings) s["seconds"] = sr.seconds;
    systems.push_back(s);
  }
  doc["systems"] = systems;
  json xe = json::array();
  for (const auto& x : r.xe) xe.push_back(point_json(x));
  doc["pareto_extreme_points"] = xe;
  if (!r.non_extreme.empty()) {
    json ne = json::array();
    for (const auto& x : r.non_extreme) ne.push_back(point_json(x));
    doc["pareto_non_extreme_points"] = ne;
  }
  doc["all_systems_ok"] = r.all_systems_ok;
  if (r.oracle_ran) {
    json oxe = json::array();
    for (const auto& x : r.oracle_xe) oxe.push_back(point_json(x));
    doc["oracle_pareto_extreme_points"] = oxe;
    json edges = json::array();
    for (const auto& [a, b] : r.oracle_edges) edges.push_back(json::array({a, b}));
    doc["oracle_pareto_edges"] = edges;
    doc["agreement"] = r.agreement;
  }
  if (include_timings) doc["seconds_total"] = r.seconds_total;
  return doc.dump(2);
}

}  // namespace molp
