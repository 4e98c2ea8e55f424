// Command-line laboratory for the Robin-function metric: domain diagnostics,
// half-space moment verification, Robin/metric evaluation, geodesics, the
// near-boundary positivity scan, and boundary asymptotics reports.

#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "robin/acceptance.hpp"
#include "robin/asymptotics.hpp"
#include "robin/config.hpp"
#include "robin/geodesic.hpp"
#include "robin/halfspace.hpp"
#include "robin/metric.hpp"
#include "robin/moments.hpp"
#include "robin/report.hpp"
#include "robin/rng.hpp"

namespace {

using nlohmann::json;
using namespace robin;

CVector parse_point(const std::string& s, int n) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if ((int)vals.size() == n) {
    CVector p(n);
    for (int i = 0; i < n; ++i) p[i] = Complex(vals[i], 0);
    return p;
  }
  if ((int)vals.size() == 2 * n) {
    CVector p(n);
    for (int i = 0; i < n; ++i) p[i] = Complex(vals[2 * i], vals[2 * i + 1]);
    return p;
  }
  throw ConfigError("point needs n or 2n comma-separated reals");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.empty()) throw ConfigError("empty list");
  return vals;
}

json robin_eval_json(const RobinEval& re) {
  json j;
  j["n"] = re.n;
  j["order"] = re.order;
  j["lambda_big"] = re.lambda_big();
  j["lambda_small"] = re.lambda_small;
  j["low_confidence"] = re.low_confidence;
  if (re.order >= 1) j["d1"] = cvector_json(re.lam.d1);
  if (re.order >= 2) j["d2"] = cmatrix_json(re.lam.d2);
  if (re.order >= 3) {
    const int m = 2 * re.n;
    json t = json::array();
    for (int a = 0; a < m; ++a) {
      json plane = json::array();
      for (int b = 0; b < m; ++b) {
        json row = json::array();
        for (int c = 0; c < m; ++c) row.push_back(complex_json(re.d3(a, b, c)));
        plane.push_back(row);
      }
      t.push_back(plane);
    }
    j["d3"] = t;
  }
  return j;
}

struct CommonArgs {
  std::string domain_file;
  std::string backend = "auto";
  uint64_t seed = 20240601;
  int threads = 1;
  std::string out_dir = ".";
};

RobinBackendPtr resolve_backend(DomainPtr spec, const std::string& requested,
                                uint64_t seed) {
  MfsOptions mo;
  mo.seed = seed;
  std::string b = requested;
  if (b == "auto") {
    const auto kind = spec->kind();
    if (kind == DomainKind::Ball) b = "ball";
    else if (kind == DomainKind::HalfSpace) b = "halfspace";
    else if (kind == DomainKind::Transformed &&
             spec->params().at("base").at("kind") == "ball")
      b = "ball";
    else
      b = "mfs";
  }
  return backend_for_domain(std::move(spec), b, mo);
}

json run_config_json(const CommonArgs& c, const json& extra) {
  json j;
  j["domain_file"] = c.domain_file;
  j["backend"] = c.backend;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["extra"] = extra;
  return j;
}

int cmd_domain_check(const CommonArgs& args, int samples) {
  auto spec = load_domain_file(args.domain_file);
  json out;
  out["kind"] = spec->kind_name();
  out["n"] = spec->dim();
  out["bounded"] = spec->bounded();

  if (spec->bounded()) {
    const auto rep = strong_pseudoconvexity_check(*spec, samples, args.seed);
    out["min_levi"] = rep.min_levi;
    out["levi_samples"] = rep.samples;
    out["projection_failures"] = rep.failures;
    out["strongly_pseudoconvex"] = rep.pass;
  }

  // conjugation + finite-difference cross-check at a few interior points
  SeededRng rng(split_seed(args.seed, 5));
  const int n = spec->dim();
  double conj_resid = 0, fd_resid = 0;
  for (int i = 0; i < 5; ++i) {
    CVector p = spec->interior_point() +
                0.1 * rng.uniform() * rng.complex_gaussian(n).normalized();
    if (spec->psi(p) >= 0) continue;
    const DefiningEval e = spec->eval(p, 2);
    for (int a = 0; a < n; ++a)
      conj_resid = std::max(conj_resid,
                            std::abs(e.d1(a + n) - std::conj(e.d1(a))));
    auto field = [&](const RVector& x) {
      CVector z(n);
      for (int k = 0; k < n; ++k) z[k] = Complex(x[2 * k], x[2 * k + 1]);
      return spec->psi(z);
    };
    const Jet3 fd = wirtinger_fd(field, p, 2, 1e-3, 1);
    for (int a = 0; a < 2 * n; ++a) {
      fd_resid = std::max(fd_resid, std::abs(fd.d1[a] - e.d1(a)) /
                                        std::max(1.0, std::abs(e.d1(a))));
    }
  }
  out["conjugation_residual"] = conj_resid;
  out["fd_gradient_residual"] = fd_resid;
  out["config_hash"] = config_hash_hex(run_config_json(args, {}));
  std::cout << out.dump(2) << "\n";
  const bool ok = (!spec->bounded() || out["strongly_pseudoconvex"].get<bool>()) &&
                  conj_resid < 1e-10 && fd_resid < 1e-6;
  return ok ? 0 : 1;
}

int cmd_halfspace_verify(const CommonArgs& args, int n, long long samples) {
  CsvWriter csv({"kind", "n", "exact_re", "exact_im", "mc_re", "mc_im",
                 "stderr", "z_score", "pass"});
  bool all_ok = true;
  for (int k = 0; k < kMomentKindCount; ++k) {
    const auto kind = static_cast<MomentKind>(k);
    const double exact = moment_exact(kind, n).value();
    const auto est = moment_mc_sharded(kind, n, samples,
                                       split_seed(args.seed, 16 * n + k), 8,
                                       args.threads);
    const double err = std::abs(est.value - Complex(exact, 0));
    const double z = est.stderr_ > 0 ? err / est.stderr_ : 0;
    const bool ok = err <= 4 * est.stderr_;
    all_ok = all_ok && ok;
    csv.add_row({moment_kind_name(kind), std::to_string(n), format_full(exact),
                 format_full(0.0), format_full(est.value.real()),
                 format_full(est.value.imag()), format_full(est.stderr_),
                 format_full(z), ok ? "1" : "0"});
  }
  const std::string path = args.out_dir + "/halfspace_verify.csv";
  csv.write(path);
  std::cout << csv.str();
  std::cerr << "wrote " << path << "\n";
  return all_ok ? 0 : 1;
}

int cmd_robin(const CommonArgs& args, const std::string& point, int order,
              bool use_fd) {
  auto spec = load_domain_file(args.domain_file);
  auto backend = resolve_backend(spec, args.backend, args.seed);
  const CVector p = parse_point(point, spec->dim());
  const DerivMode mode = (use_fd || !backend->has_analytic_derivatives())
                             ? DerivMode::FiniteDifference
                             : DerivMode::Analytic;
  const RobinEval re = robin_derivatives(*backend, *spec, p, order, mode);
  json out = robin_eval_json(re);
  out["backend"] = backend->name();
  out["config_hash"] = config_hash_hex(run_config_json(args, {{"point", point}}));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_metric(const CommonArgs& args, const std::string& point, bool use_fd) {
  auto spec = load_domain_file(args.domain_file);
  auto backend = resolve_backend(spec, args.backend, args.seed);
  const CVector p = parse_point(point, spec->dim());
  const DerivMode mode = (use_fd || !backend->has_analytic_derivatives())
                             ? DerivMode::FiniteDifference
                             : DerivMode::Analytic;
  const RobinEval re = robin_derivatives(*backend, *spec, p, 3, mode);
  const MetricData md = metric_data(re, true);
  json out;
  out["n"] = md.n;
  out["g"] = cmatrix_json(md.g);
  out["g_inv"] = cmatrix_json(md.g_inv);
  out["det"] = md.det;
  out["cofactors"] = cmatrix_json(md.cofactors);
  json dg = json::array();
  for (const auto& plane : md.dg) dg.push_back(cmatrix_json(plane));
  out["dg"] = dg;
  out["positive_definite"] = md.positive_definite;
  out["min_eigenvalue"] = md.min_eigenvalue;
  out["backend"] = backend->name();
  out["config_hash"] = config_hash_hex(run_config_json(args, {{"point", point}}));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_geodesic(const CommonArgs& args, const std::string& point,
                 const std::string& velocity, double T, double tol,
                 int outputs) {
  auto spec = load_domain_file(args.domain_file);
  auto backend = resolve_backend(spec, args.backend, args.seed);
  const DerivMode mode = backend->has_analytic_derivatives()
                             ? DerivMode::Analytic
                             : DerivMode::FiniteDifference;
  MetricSource src{backend, spec, mode, FdPolicy{}};
  GeodesicState s0;
  s0.p = parse_point(point, spec->dim());
  s0.v = parse_point(velocity, spec->dim());
  IntegrateOptions io;
  io.T = T;
  io.tol = tol;
  for (int i = 1; i <= outputs; ++i) io.output_times.push_back(T * i / outputs);
  const Trajectory traj = integrate(src, s0, io);

  const int n = spec->dim();
  std::vector<std::string> header{"t"};
  for (int i = 0; i < n; ++i) {
    header.push_back("p" + std::to_string(i) + "_re");
    header.push_back("p" + std::to_string(i) + "_im");
  }
  for (int i = 0; i < n; ++i) {
    header.push_back("v" + std::to_string(i) + "_re");
    header.push_back("v" + std::to_string(i) + "_im");
  }
  header.push_back("energy");
  header.push_back("psi");
  CsvWriter csv(header);
  for (const auto& st : traj.states) {
    std::vector<std::string> row{format_full(st.t)};
    for (int i = 0; i < n; ++i) {
      row.push_back(format_full(st.p[i].real()));
      row.push_back(format_full(st.p[i].imag()));
    }
    for (int i = 0; i < n; ++i) {
      row.push_back(format_full(st.v[i].real()));
      row.push_back(format_full(st.v[i].imag()));
    }
    row.push_back(format_full(src.energy(st.p, st.v)));
    row.push_back(format_full(spec->psi(st.p)));
    csv.add_row(row);
  }
  const std::string path = args.out_dir + "/geodesic.csv";
  csv.write(path);
  std::cout << csv.str();
  std::cerr << "wrote " << path << (traj.truncated ? " (truncated: " + traj.exit_reason + ")" : "")
            << "\n";
  return 0;
}

int cmd_band_scan(const CommonArgs& args, const std::string& epsilons,
                  int directions, int samples, const std::string& p0_str) {
  auto spec = load_domain_file(args.domain_file);
  auto backend = resolve_backend(spec, args.backend, args.seed);
  const DerivMode mode = backend->has_analytic_derivatives()
                             ? DerivMode::Analytic
                             : DerivMode::FiniteDifference;
  MetricSource src{backend, spec, mode, FdPolicy{}};
  const CVector p0 = p0_str.empty() ? spec->interior_point()
                                    : parse_point(p0_str, spec->dim());
  const BandScanReport rep = band_scan(*spec, src, parse_list(epsilons),
                                       directions, samples, args.seed, p0);

  const int n = spec->dim();
  std::vector<std::string> header{"epsilon"};
  for (int i = 0; i < n; ++i) {
    header.push_back("q" + std::to_string(i) + "_re");
    header.push_back("q" + std::to_string(i) + "_im");
  }
  for (int i = 0; i < n; ++i) {
    header.push_back("u" + std::to_string(i) + "_re");
    header.push_back("u" + std::to_string(i) + "_im");
  }
  header.push_back("delta");
  header.push_back("dpsi");
  header.push_back("d2psi");
  CsvWriter csv(header);
  for (const auto& rec : rep.records) {
    std::vector<std::string> row{format_full(rec.epsilon)};
    for (int i = 0; i < n; ++i) {
      row.push_back(format_full(rec.q[i].real()));
      row.push_back(format_full(rec.q[i].imag()));
    }
    for (int i = 0; i < n; ++i) {
      row.push_back(format_full(rec.u[i].real()));
      row.push_back(format_full(rec.u[i].imag()));
    }
    row.push_back(format_full(rec.delta));
    row.push_back(format_full(rec.dpsi));
    row.push_back(format_full(rec.d2psi));
    csv.add_row(row);
  }
  csv.write(args.out_dir + "/band_scan.csv");

  json summary;
  summary["certified_epsilon"] = rep.certified_epsilon;
  summary["epsilon1"] = rep.epsilon1;
  summary["negatives"] = rep.negatives;
  summary["launches"] = rep.records.size();
  summary["config_hash"] = config_hash_hex(run_config_json(
      args, {{"epsilons", epsilons}, {"directions", directions},
             {"samples", samples}}));
  write_json_file(args.out_dir + "/band_scan.json", summary);
  std::cout << summary.dump(2) << "\n";
  return rep.negatives == 0 ? 0 : 1;
}

int cmd_asymptotics(const CommonArgs& args, const std::string& kind_name,
                    const std::string& indices, const std::string& deltas_str,
                    const std::string& qstr, bool renormalize) {
  auto spec = load_domain_file(args.domain_file);
  const int n = spec->dim();
  KindSpec ks;
  ks.kind = asymptotic_kind_from_name(kind_name);
  if (!indices.empty()) {
    const auto idx = parse_list(indices);
    for (size_t i = 0; i < idx.size() && i < 3; ++i) ks.idx[i] = (int)idx[i];
  }
  CVector q;
  if (qstr.empty()) {
    q = boundary_project(*spec, spec->interior_point()).point;
  } else {
    q = parse_point(qstr, n);
    q = project_to_boundary_near(*spec, q);
  }

  DomainPtr work = spec;
  CVector work_q = q;
  if (renormalize || requires_dagger(ks.kind)) {
    auto [nm, nspec] = normalize_dagger(spec, q);
    work = nspec;
    work_q = CVector::Zero(n);
  }
  auto backend = resolve_backend(work, args.backend, args.seed);
  const DerivMode mode = backend->has_analytic_derivatives()
                             ? DerivMode::Analytic
                             : DerivMode::FiniteDifference;
  const auto deltas = parse_list(deltas_str);
  const auto rep = convergence_report(ks, *work, *backend, work_q, deltas,
                                      mode, FdPolicy{}, 0.02);

  CsvWriter csv({"delta", "scaled_re", "scaled_im", "target_re", "target_im",
                 "abs_err", "est_order"});
  for (const auto& s : rep.samples) {
    csv.add_row({format_full(s.delta), format_full(s.scaled.real()),
                 format_full(s.scaled.imag()), format_full(s.target.real()),
                 format_full(s.target.imag()), format_full(s.abs_err),
                 format_full(rep.est_order)});
  }
  csv.write(args.out_dir + "/asymptotics.csv");
  std::cout << csv.str();

  json verdict;
  verdict["kind"] = kind_name;
  verdict["pass"] = rep.pass;
  verdict["exact"] = rep.exact;
  verdict["est_order"] = rep.est_order;
  verdict["final_err"] = rep.final_err;
  verdict["target"] = complex_json(rep.target);
  verdict["stated_variant_target"] = complex_json(rep.stated_variant_target);
  verdict["variant_disagreement"] = rep.variant_disagreement;
  verdict["config_hash"] = config_hash_hex(
      run_config_json(args, {{"kind", kind_name}, {"deltas", deltas_str}}));
  write_json_file(args.out_dir + "/asymptotics.json", verdict);
  std::cerr << verdict.dump(2) << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_full_report(const CommonArgs& args) {
  AcceptanceOptions opts;
  opts.threads = args.threads;
  opts.seed = args.seed;
  const auto results = run_acceptance(opts, &std::cout);
  const json j = acceptance_to_json(results, opts);
  write_json_file(args.out_dir + "/full_report.json", j);
  std::cerr << "wrote " << args.out_dir << "/full_report.json\n";
  return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the Robin-function metric"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--seed", common.seed, "base seed (all randomness derives from it)");
  app.add_option("--threads", common.threads, "worker thread limit");
  app.add_option("--out-dir", common.out_dir, "output directory");

  int dc_samples = 200;
  auto* dc = app.add_subcommand("domain-check", "defining-function diagnostics");
  dc->add_option("--domain", common.domain_file)->required();
  dc->add_option("--samples", dc_samples);

  int hv_n = 2;
  double hv_samples = 1e6;
  auto* hv = app.add_subcommand("halfspace-verify",
                                "moment integrals: exact vs Monte Carlo");
  hv->add_option("--n", hv_n);
  hv->add_option("--samples", hv_samples);

  std::string point = "0,0,0,0", velocity = "1,0,0,0";
  int order = 2;
  bool use_fd = false;
  auto* rb = app.add_subcommand("robin", "Robin function and derivatives");
  rb->add_option("--domain", common.domain_file)->required();
  rb->add_option("--backend", common.backend);
  rb->add_option("--point", point)->required();
  rb->add_option("--order", order);
  rb->add_flag("--fd", use_fd, "force finite-difference derivatives");

  auto* mt = app.add_subcommand("metric", "metric tensor data");
  mt->add_option("--domain", common.domain_file)->required();
  mt->add_option("--backend", common.backend);
  mt->add_option("--point", point)->required();
  mt->add_flag("--fd", use_fd);

  double T = 1.0, tol = 1e-10;
  int outputs = 100;
  auto* ge = app.add_subcommand("geodesic", "integrate one geodesic");
  ge->add_option("--domain", common.domain_file)->required();
  ge->add_option("--backend", common.backend);
  ge->add_option("--point", point)->required();
  ge->add_option("--velocity", velocity)->required();
  ge->add_option("--T", T);
  ge->add_option("--tol", tol);
  ge->add_option("--outputs", outputs);

  std::string epsilons = "0.05,0.1,0.2", p0_str;
  int directions = 8, bs_samples = 16;
  auto* bsc = app.add_subcommand("band-scan", "near-boundary positivity scan");
  bsc->add_option("--domain", common.domain_file)->required();
  bsc->add_option("--backend", common.backend);
  bsc->add_option("--epsilons", epsilons);
  bsc->add_option("--directions", directions);
  bsc->add_option("--samples", bs_samples);
  bsc->add_option("--p0", p0_str);

  std::string kind = "LA0", indices, deltas = "0.1,0.03,0.01,0.003,0.001", qstr;
  bool renormalize = false;
  auto* as = app.add_subcommand("asymptotics", "scaled boundary limits");
  as->add_option("--domain", common.domain_file)->required();
  as->add_option("--backend", common.backend);
  as->add_option("--kind", kind)->required();
  as->add_option("--indices", indices);
  as->add_option("--deltas", deltas);
  as->add_option("--boundary-point", qstr);
  as->add_flag("--normalize", renormalize);

  auto* fr = app.add_subcommand("full-report", "run the complete verification battery");
  fr->add_option("--domain", common.domain_file);
  int fr_n = 2;
  fr->add_option("--n", fr_n);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dc->parsed()) return cmd_domain_check(common, dc_samples);
    if (hv->parsed()) return cmd_halfspace_verify(common, hv_n, (long long)hv_samples);
    if (rb->parsed()) return cmd_robin(common, point, order, use_fd);
    if (mt->parsed()) return cmd_metric(common, point, use_fd);
    if (ge->parsed()) return cmd_geodesic(common, point, velocity, T, tol, outputs);
    if (bsc->parsed()) return cmd_band_scan(common, epsilons, directions, bs_samples, p0_str);
    if (as->parsed()) return cmd_asymptotics(common, kind, indices, deltas, qstr, renormalize);
    if (fr->parsed()) return cmd_full_report(common);
  } catch (const robin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
