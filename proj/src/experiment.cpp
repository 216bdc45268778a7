#include "ctcert/experiment.hpp"

#include "ctcert/riccati.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace ctcert {

namespace {

using ojson = nlohmann::ordered_json;

// Infinite or NaN values become null.
ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson point_json(const ChartPoint& x) {
  ojson coords = ojson::array();
  for (Eigen::Index i = 0; i < x.coords.size(); ++i) coords.push_back(x.coords(i));
  return ojson{{"chart", x.chart}, {"coords", coords}};
}

ojson setup_json(const RunConfig& cfg) {
  ojson m{{"kind", cfg.manifold}};
  if (cfg.manifold == "flat_torus") m["periods"] = cfg.periods;
  if (cfg.manifold == "sphere") m["radius"] = cfg.radius;
  if (cfg.manifold == "hyperbolic") m["scale"] = cfg.scale;
  return ojson{{"manifold", m},
               {"potential", {{"expr", cfg.potential.expr}, {"amplitude", cfg.potential.amplitude}}},
               {"field", {{"expr", cfg.field.expr}, {"amplitude", cfg.field.amplitude}}}};
}

ojson certificate_object(const Certificate& cert) {
  return ojson{{"theorem", to_string(cert.theorem)},
               {"k", number(cert.k)},
               {"grid", cert.grid},
               {"points_checked", cert.points_checked},
               {"delta", cert.delta},
               {"verdict", cert.pass ? "pass" : "fail"},
               {"worst_margin", number(cert.worst_margin)},
               {"worst_point", point_json(cert.worst_point)},
               {"caveats", cert.caveats}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Certificate certify_with(const RunConfig& cfg, const MechanicalSystem& sys, const ScalarField& f) {
  SampleGrid grid = make_grid(sys.model, cfg.grid_resolution);
  CertifyOptions options;
  options.delta = cfg.delta;
  options.k = cfg.k;
  std::string theorem = cfg.theorem;
  if (theorem == "auto") {
    if (sys.model.curvature_bound() <= 0.0)
      theorem = "natural";
    else if (sys.potential.identically_zero())
      theorem = "riemannian";
    else
      theorem = "general";
  }
  if (theorem == "natural") return certify_natural(sys, f, grid, options);
  if (theorem == "riemannian") return certify_riemannian(sys, f, grid, options);
  if (theorem == "2d") return certify_2d(sys, f, grid, options);
  if (!cfg.k) throw Error(ErrorKind::kConfig, "certify.k is required for the general condition");
  return certify_general(sys, f, grid, *cfg.k, options);
}

}  // namespace

std::string certificate_json(const Certificate& cert, const RunConfig* cfg) {
  ojson out = certificate_object(cert);
  if (cfg) out["setup"] = setup_json(*cfg);
  return out.dump(2) + "\n";
}

CertifyRun run_certify(const RunConfig& cfg) {
  MechanicalSystem sys = build_system(cfg);
  ScalarField f = build_field(cfg, sys.model);
  CertifyRun run;
  run.certificate = certify_with(cfg, sys, f);
  run.json = certificate_json(run.certificate, &cfg);
  return run;
}

VerifyRun run_verify(const RunConfig& cfg) {
  if (cfg.samples > kMaxAssignmentSize)
    throw Error(ErrorKind::kInvalidArgument,
                "verification.samples = " + std::to_string(cfg.samples) + " exceeds the assignment cap 512");
  MechanicalSystem sys = build_system(cfg);
  ScalarField f = build_field(cfg, sys.model);
  VerifyRun run;
  std::string cert_note;
  std::optional<Certificate> cert;
  try {
    cert = certify_with(cfg, sys, f);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kPrecondition && e.kind() != ErrorKind::kConfig) throw;
    cert_note = e.what();
  }
  run.report = verify_optimality(sys, f, cfg.samples, cfg.seed);
  if (cert) run.report.certified = cert->pass;
  const TransportReport& r = run.report;
  run.pass = r.assignment_is_identity && r.duality_gap <= cfg.duality_tol;

  int moved = 0;
  for (int i = 0; i < r.samples; ++i) moved += r.permutation[i] != i;
  ojson out{{"seed", r.seed},
            {"samples", r.samples},
            {"monge_cost", r.monge_cost},
            {"assignment_cost", r.assignment_cost},
            {"optimality_gap", r.optimality_gap},
            {"assignment_is_identity", r.assignment_is_identity},
            {"non_identity_matches", moved},
            {"duality_gap", r.duality_gap},
            {"duality_tol", cfg.duality_tol},
            {"verdict", run.pass ? "pass" : "fail"}};
  if (cert)
    out["certificate"] = certificate_object(*cert);
  else
    out["certificate"] = ojson{{"verdict", nullptr}, {"note", cert_note}};
  out["setup"] = setup_json(cfg);
  run.json = out.dump(2) + "\n";

  const int n = sys.model.dim();
  std::ostringstream csv;
  csv << "i,x_chart";
  for (int k = 0; k < n; ++k) csv << ",x" << k + 1;
  csv << ",y_chart";
  for (int k = 0; k < n; ++k) csv << ",y" << k + 1;
  csv << ",matched\n";
  for (int i = 0; i < r.samples; ++i) {
    csv << i << "," << r.sample_points[i].chart;
    for (int k = 0; k < n; ++k) csv << "," << fmt(r.sample_points[i].coords(k));
    csv << "," << r.images[i].chart;
    for (int k = 0; k < n; ++k) csv << "," << fmt(r.images[i].coords(k));
    csv << "," << r.permutation[i] << "\n";
  }
  run.csv = csv.str();
  return run;
}

FlowRun run_flow(const RunConfig& cfg) {
  MechanicalSystem sys = build_system(cfg);
  const int n = sys.model.dim();
  std::vector<double> x0 = cfg.flow_x0.empty() ? std::vector<double>(n, 0.0) : cfg.flow_x0;
  std::vector<double> p0 = cfg.flow_p0.empty() ? std::vector<double>(n, 0.0) : cfg.flow_p0;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(p0.size()) != n)
    throw Error(ErrorKind::kConfig, "flow.x0 and flow.p0 need " + std::to_string(n) + " entries");
  if (cfg.flow_chart < 0 || cfg.flow_chart >= sys.model.chart_count())
    throw Error(ErrorKind::kConfig, "flow.chart out of range");
  ChartPoint x{cfg.flow_chart, Eigen::Map<const Vector>(x0.data(), n)};
  Vector p = Eigen::Map<const Vector>(p0.data(), n);
  FlowRun run;
  run.result = flow(sys, {x, p}, cfg.flow_t_end, cfg.flow_step);

  std::ostringstream csv;
  csv << "t,chart";
  for (int k = 0; k < n; ++k) csv << ",x" << k + 1;
  for (int k = 0; k < n; ++k) csv << ",p" << k + 1;
  csv << ",H\n";
  for (std::size_t i = 0; i < run.result.times.size(); ++i) {
    const CotangentState& s = run.result.states[i];
    csv << fmt(run.result.times[i]) << "," << s.x.chart;
    for (int k = 0; k < n; ++k) csv << "," << fmt(s.x.coords(k));
    for (int k = 0; k < n; ++k) csv << "," << fmt(s.p(k));
    csv << "," << fmt(hamiltonian(sys, s)) << "\n";
  }
  run.csv = csv.str();
  return run;
}

CTransformRun run_ctransform(const RunConfig& cfg) {
  MechanicalSystem sys = build_system(cfg);
  ScalarField f = build_field(cfg, sys.model);
  SampleGrid grid = make_grid(sys.model, cfg.ctransform_grid);
  CTransformRun run;
  run.result = c_transform(sys, f, grid);
  const CTransformResult& r = run.result;
  ojson values = ojson::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    ojson row = point_json(r.points[i]);
    row["f"] = number(r.f[i]);
    row["f_c"] = number(r.f_c[i]);
    row["f_cc"] = number(r.f_cc[i]);
    values.push_back(row);
  }
  ojson out{{"grid", r.grid},
            {"spacing", r.spacing},
            {"hessian_bound", r.hessian_bound},
            {"tol_grid", r.tol_grid},
            {"max_defect", r.max_defect},
            {"worst_point", point_json(r.points[r.worst_index])},
            {"c_convex", r.c_convex},
            {"failed_pairs", r.failed_pairs},
            {"setup", setup_json(cfg)},
            {"values", values}};
  run.json = out.dump(2) + "\n";
  return run;
}

std::string riccati_demo_csv(const RiccatiDemoOptions& o) {
  if (o.dim < 1 || o.dim > 6) throw Error(ErrorKind::kInvalidArgument, "dimension must lie in [1, 6]");
  if (!(o.step > 0.0) || !(o.t_end >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "need step > 0, t_end >= 0");
  const Eigen::MatrixXd s0 = o.s0 * Eigen::MatrixXd::Identity(o.dim, o.dim);
  std::ostringstream csv;
  csv << "t";
  for (int i = 0; i < o.dim; ++i) csv << ",s" << i + 1;
  csv << ",det_gamma2\n";
  const int steps = static_cast<int>(std::llround(o.t_end / o.step));
  for (int i = 0; i <= steps; ++i) {
    double t = std::min(i * o.step, o.t_end);
    GammaPair g = constant_gammas(o.k, s0, t);
    double det = g.gamma2.determinant();
    csv << fmt(t);
    if (std::abs(det) >= 1e-12) {
      Eigen::MatrixXd s = g.gamma2.transpose().partialPivLu().solve(g.gamma1.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
      for (int k = 0; k < o.dim; ++k) csv << "," << fmt(eig.eigenvalues()(k));
    } else {
      for (int k = 0; k < o.dim; ++k) csv << ",nan";
    }
    csv << "," << fmt(det) << "\n";
  }
  return csv.str();
}

}  // namespace ctcert
