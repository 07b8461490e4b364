#include "molp/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace molp;

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << content;
}

std::string format_point(const RatVec& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_rational(x(i));
  }
  return s + ")";
}

struct CommonFlags {
  std::string problem_file;
  long long M = -1;
  std::vector<long long> Mi;
  std::string mi_mode = "enumerate";
  long long mi_factor = 6;
  std::vector<long long> ub_dual;
  int order = -1;
  int nmax = -1;
  int max_basis = 600;
  std::string variant = "full-u";
  std::string systems;
  bool keep_lambda = false;
  bool no_rescale = false;
  bool no_extreme_filter = false;
  double tol_sdp = 1e-9;
  int max_iters = 200;
  double tol_rank = 1e-6;
  double tol_round = 1e-4;
  std::uint64_t seed = 20240001ull;
  int jobs = 1;
  std::string report_file;
  bool quiet = false;
};

void add_solve_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("problem", f.problem_file, "input problem file (JSON)")->required();
  cmd->add_option("--M", f.M, "override for the primal scaling constant M");
  cmd->add_option("--Mi", f.Mi, "override(s) for M_i (single value or one per row)");
  cmd->add_option("--ubdual", f.ub_dual, "override dual upper bounds (single value or per row)");
  cmd->add_option("--order", f.order, "fixed relaxation order N");
  cmd->add_option("--nmax", f.nmax, "relaxation order search ceiling");
  cmd->add_option("--max-basis", f.max_basis, "moment basis size guard");
  cmd->add_option("--variant", f.variant, "system variant: full-u | reduced-u");
  cmd->add_option("--systems", f.systems, "comma-separated 1-based subset, e.g. 1,3");
  cmd->add_flag("--keep-lambda", f.keep_lambda, "skip the simplex-equality elimination");
  cmd->add_flag("--no-rescale", f.no_rescale, "disable unit-box variable rescaling");
  cmd->add_flag("--no-extreme-filter", f.no_extreme_filter,
                "keep non-vertex Pareto projections in the final set");
  cmd->add_option("--tol-sdp", f.tol_sdp, "interior-point complementarity tolerance");
  cmd->add_option("--max-iters", f.max_iters, "interior-point iteration cap");
  cmd->add_option("--tol-rank", f.tol_rank, "relative singular-value cutoff for ranks");
  cmd->add_option("--tol-round", f.tol_round, "integer rounding tolerance");
  cmd->add_option("--seed", f.seed, "seed for the extraction eigenvalue combination");
  cmd->add_option("--jobs", f.jobs, "parallel system solves");
  cmd->add_option("--report", f.report_file, "write the JSON report to this file");
  cmd->add_flag("--quiet", f.quiet, "suppress the human-readable summary");
}

MolpProblem load_problem(const CommonFlags& f) {
  MolpProblem p = parse_problem(slurp(f.problem_file));
  if (!f.ub_dual.empty()) {
    for (int i = 0; i < p.m; ++i)
      p.ub_dual(i) = Integer(f.ub_dual.size() == 1 ? f.ub_dual[0] : f.ub_dual.at(i));
  }
  return p;
}

PipelineOptions make_options(const CommonFlags& f) {
  PipelineOptions o;
  if (f.variant == "reduced-u") o.variant = SysVariant::ReducedU;
  else if (f.variant != "full-u") throw SchemaError("unknown variant '" + f.variant + "'");
  if (f.M >= 0) o.M_override = Integer(f.M);
  if (!f.Mi.empty()) {
    std::vector<Integer> mi;
    for (long long v : f.Mi) mi.push_back(Integer(v));
    o.Mi_override = mi;
  }
  o.order_override = f.order;
  o.n_max = f.nmax;
  o.max_basis = f.max_basis;
  o.do_eliminate_lambda = !f.keep_lambda;
  o.rescale = !f.no_rescale;
  o.extreme_filter = !f.no_extreme_filter;
  if (!f.systems.empty()) {
    std::stringstream ss(f.systems);
    std::string tok;
    while (std::getline(ss, tok, ',')) o.systems.push_back(std::stoi(tok));
  }
  o.solver.tol_gap = f.tol_sdp;
  o.solver.max_iters = f.max_iters;
  o.extract.tol_rank = f.tol_rank;
  o.extract.tol_round = f.tol_round;
  o.extract.seed = f.seed;
  o.jobs = f.jobs;
  return o;
}

void print_summary(const ParetoReport& rep, std::ostream& os) {
  os << "scaling: M = " << rep.consts.M << ", Mi = [";
  for (size_t i = 0; i < rep.consts.Mi.size(); ++i)
    os << (i ? ", " : "") << rep.consts.Mi[i];
  os << "]\n";
  for (const auto& sr : rep.systems) {
    os << "system " << sr.index << ": ";
    if (sr.empty) {
      os << "no solutions (relaxation infeasible)";
    } else if (sr.ok) {
      const auto& last = sr.attempts.back();
      os << "order " << last.order << ", rank " << last.r << " (M_" << last.t << " vs M_"
         << last.t - 1 << "..), " << sr.candidates.size() << " verified point(s)";
    } else {
      os << "FAILED: " << sr.error;
    }
    os << "\n";
    for (const auto& c : sr.candidates)
      os << "    x = " << format_point(c.x) << "  u = " << format_point(c.triplet.u)
         << "  lambda = " << format_point(c.triplet.lambda) << "\n";
  }
  os << "pareto extreme points (" << rep.xe.size() << "):\n";
  for (const auto& x : rep.xe) os << "    " << format_point(x) << "\n";
  if (!rep.non_extreme.empty()) {
    os << "pareto but non-extreme projections (excluded): " << rep.non_extreme.size() << "\n";
  }
  if (rep.oracle_ran) {
    os << "oracle extreme points (" << rep.oracle_xe.size() << "):\n";
    for (const auto& x : rep.oracle_xe) os << "    " << format_point(x) << "\n";
    os << "agreement: " << (rep.agreement ? "yes" : "NO") << "\n";
  }
}

int cmd_solve(const CommonFlags& f, bool with_oracle) {
  MolpProblem p = load_problem(f);
  const auto diags = validate(p);
  for (const auto& d : diags) {
    std::cerr << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
              << d.code << ": " << d.message << "\n";
    if (d.severity == Diagnostic::Severity::Error && d.code == "infeasible") return 2;
  }
  PipelineOptions opts = make_options(f);
  opts.with_oracle = with_oracle;
  const ParetoReport rep = run_pipeline(p, opts);
  if (!f.report_file.empty()) write_file(f.report_file, report_to_json(rep));
  if (!f.quiet) print_summary(rep, std::cout);
  if (!rep.all_systems_ok) return 3;
  if (with_oracle && !rep.agreement) {
    std::vector<RatVec> missing, extra;
    for (const auto& x : rep.oracle_xe)
      if (std::none_of(rep.xe.begin(), rep.xe.end(), [&](const RatVec& y) { return y == x; }))
        missing.push_back(x);
    for (const auto& x : rep.xe)
      if (std::none_of(rep.oracle_xe.begin(), rep.oracle_xe.end(),
                       [&](const RatVec& y) { return y == x; }))
        extra.push_back(x);
    for (const auto& x : missing) std::cout << "missing from pipeline: " << format_point(x) << "\n";
    for (const auto& x : extra) std::cout << "extra in pipeline: " << format_point(x) << "\n";
    return 1;
  }
  return 0;
}

int cmd_oracle(const CommonFlags& f, const std::string& csv) {
  MolpProblem p = load_problem(f);
  const auto diags = validate(p);
  for (const auto& d : diags) {
    std::cerr << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
              << d.code << ": " << d.message << "\n";
    if (d.code == "infeasible") return 2;
  }
  const VertexSet xe = pareto_extreme_set(p);
  const auto edges = pareto_edges(p, xe);
  std::cout << "pareto extreme points (" << xe.size() << "):\n";
  for (const auto& x : xe.points) std::cout << "    " << format_point(x) << "\n";
  std::cout << "pareto edges (" << edges.size() << "):\n";
  for (const auto& [a, b] : edges)
    std::cout << "    " << format_point(xe.points[a]) << " -- " << format_point(xe.points[b])
              << "\n";
  if (!csv.empty()) {
    std::ostringstream os;
    for (const auto& x : xe.points) {
      for (Eigen::Index j = 0; j < x.size(); ++j)
        os << (j ? "," : "") << to_double(x(j));
      os << "\n";
    }
    write_file(csv, os.str());
  }
  return 0;
}

int cmd_bounds(const CommonFlags& f, long long cap) {
  MolpProblem p = load_problem(f);
  std::cout << "M (stacked [A; I]) = " << compute_M(p, MRows::Stacked, cap) << "\n";
  std::cout << "M (A rows only)   = " << compute_M(p, MRows::RowsOnly, cap) << "\n";
  for (int i = 1; i <= p.m; ++i) {
    MiMode mode;
    mode.kind = MiMode::Kind::Enumerate;
    std::cout << "M_" << i << " (enumerate) = " << compute_Mi(p, i, mode, cap) << "\n";
  }
  MiMode cons;
  cons.kind = MiMode::Kind::Conservative;
  cons.value = Integer(f.mi_factor);
  std::cout << "M_i (conservative, factors 1.." << f.mi_factor
            << ") = " << compute_Mi(p, 1, cons, cap) << "\n";
  const IntVec ub = suggest_dual_bounds(p);
  std::cout << "suggested ub_dual = [";
  for (int i = 0; i < p.m; ++i) std::cout << (i ? ", " : "") << ub(i);
  std::cout << "]\n";
  return 0;
}

int cmd_export(const CommonFlags& f, int system, const std::string& output) {
  MolpProblem p = load_problem(f);
  PipelineOptions opts = make_options(f);
  const ScalingConstants consts = resolve_constants(p, opts);
  PolySystem sys = build_sys_i(p, system, consts, opts.variant);
  if (opts.do_eliminate_lambda) sys = eliminate_lambda(sys, p);
  const int N = f.order > 0 ? f.order : sys.min_relaxation_order();
  const MomentRelaxation rel = assemble_relaxation(sys, N, /*rescale=*/false);
  export_sdpa_file(rel, output);
  std::cout << "wrote " << output << ": " << rel.num_moments() << " moments, "
            << rel.blocks.size() << " PSD blocks, " << rel.equalities.size()
            << " equality rows\n";
  return 0;
}

int cmd_plot(const CommonFlags& f, const std::string& points_csv, const std::string& edges_csv,
             const std::string& svg) {
  MolpProblem p = load_problem(f);
  const VertexSet xe = pareto_extreme_set(p);
  const auto edges = pareto_edges(p, xe);

  std::ostringstream pts;
  for (const auto& x : xe.points) {
    for (Eigen::Index j = 0; j < x.size(); ++j) pts << (j ? "," : "") << to_double(x(j));
    pts << "\n";
  }
  write_file(points_csv, pts.str());
  if (!edges_csv.empty()) {
    std::ostringstream es;
    for (const auto& [a, b] : edges) es << a << "," << b << "\n";
    write_file(edges_csv, es.str());
  }
  if (!svg.empty()) {
    if (p.n != 2) {
      std::cerr << "svg output requires n = 2\n";
    } else {
      double xmax = 1, ymax = 1;
      for (const auto& x : xe.points) {
        xmax = std::max(xmax, to_double(x(0)));
        ymax = std::max(ymax, to_double(x(1)));
      }
      const double w = 400, h = 400, pad = 30;
      auto px = [&](double v) { return pad + v / xmax * (w - 2 * pad); };
      auto py = [&](double v) { return h - pad - v / ymax * (h - 2 * pad); };
      std::ostringstream sv;
      sv << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
      for (const auto& [a, b] : edges) {
        sv << "<line x1='" << px(to_double(xe.points[a](0))) << "' y1='"
           << py(to_double(xe.points[a](1))) << "' x2='" << px(to_double(xe.points[b](0)))
           << "' y2='" << py(to_double(xe.points[b](1)))
           << "' stroke='black' stroke-width='2'/>\n";
      }
      for (const auto& x : xe.points) {
        sv << "<circle cx='" << px(to_double(x(0))) << "' cy='" << py(to_double(x(1)))
           << "' r='4' fill='black'/>\n";
      }
      sv << "</svg>\n";
      write_file(svg, sv.str());
    }
  }
  std::cout << xe.size() << " points, " << edges.size() << " segments\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto-optimal extreme points of multiobjective linear programs via "
               "moment relaxations, with an exact rational oracle"};
  app.require_subcommand(1);

  CommonFlags fs, fo, fc, fb, fe, fp;
  auto* solve = app.add_subcommand("solve", "run the moment pipeline");
  add_solve_flags(solve, fs);
  auto* oracle = app.add_subcommand("oracle", "exact oracle: vertices, Pareto set, edges");
  oracle->add_option("problem", fo.problem_file, "input problem file")->required();
  std::string oracle_csv;
  oracle->add_option("--csv", oracle_csv, "write the Pareto points as CSV");
  auto* compare = app.add_subcommand("compare", "run pipeline and oracle; exit 0 iff equal");
  add_solve_flags(compare, fc);
  auto* bounds = app.add_subcommand("bounds", "scaling constants and dual bound suggestions");
  bounds->add_option("problem", fb.problem_file, "input problem file")->required();
  long long cap = 1000000;
  bounds->add_option("--cap", cap, "submatrix enumeration cap");
  bounds->add_option("--factor", fb.mi_factor, "conservative-mode factor bound");
  auto* exp = app.add_subcommand("export-sdpa", "write one relaxation in SDPA sparse format");
  add_solve_flags(exp, fe);
  int exp_system = 1;
  std::string exp_out = "relaxation.dat-s";
  exp->add_option("--system", exp_system, "constraint index i (1-based)")->required();
  exp->add_option("--output,-o", exp_out, "output path");
  auto* plot = app.add_subcommand("plot", "CSV (and SVG for n=2) of the Pareto set");
  plot->add_option("problem", fp.problem_file, "input problem file")->required();
  std::string plot_pts = "pareto_points.csv", plot_edges, plot_svg;
  plot->add_option("--points", plot_pts, "points CSV path");
  plot->add_option("--edges", plot_edges, "edges CSV path");
  plot->add_option("--svg", plot_svg, "SVG path (n=2 only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(fs, false);
    if (compare->parsed()) return cmd_solve(fc, true);
    if (oracle->parsed()) return cmd_oracle(fo, oracle_csv);
    if (bounds->parsed()) return cmd_bounds(fb, cap);
    if (exp->parsed()) return cmd_export(fe, exp_system, exp_out);
    if (plot->parsed()) return cmd_plot(fp, plot_pts, plot_edges, plot_svg);
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
