// Command-line front-end: analyze / laurent / generate / simulate / verify.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitroot/coint.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/laurent.hpp"
#include "unitroot/pipeline.hpp"
#include "unitroot/simkit.hpp"

namespace fs = std::filesystem;
using namespace unitroot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitVerification = 2;
constexpr int kExitUnsupported = 3;

struct CommonFlags {
  double tol_rank = Tolerances{}.rank_rel;
  double tol_nonsing = Tolerances{}.nonsing_rel;
  double radius = 0.0;
  int nodes = 0;
  int max_order = 4;
  std::string format = "pretty";

  Tolerances tolerances() const {
    Tolerances t;
    t.rank_rel = tol_rank;
    t.nonsing_rel = tol_nonsing;
    return t;
  }
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tol-rank", f.tol_rank, "relative rank cutoff");
  cmd->add_option("--tol-nonsing", f.tol_nonsing,
                  "chain nonsingularity threshold");
  cmd->add_option("--radius", f.radius, "contour radius (0 = automatic)");
  cmd->add_option("--nodes", f.nodes,
                  "quadrature nodes, power of two (0 = automatic)");
  cmd->add_option("--max-order", f.max_order, "pole-order cap (hard cap 4)")
      ->check(CLI::Range(0, 4));
  cmd->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember({"json", "pretty"}));
}

int analyze_one(const std::string& path, const CommonFlags& flags,
                std::ostream& out) {
  ModelFile model = load_model(path);
  Tolerances tol = flags.tolerances();
  tol.rank_rel = flags.tol_rank;
  if (model.tol.rank_rel != Tolerances{}.rank_rel) tol.rank_rel = model.tol.rank_rel;
  if (model.tol.nonsing_rel != Tolerances{}.nonsing_rel)
    tol.nonsing_rel = model.tol.nonsing_rel;
  if (model.tol.residual_abs != Tolerances{}.residual_abs)
    tol.residual_abs = model.tol.residual_abs;

  AnalyzeOptions opts;
  opts.radius = flags.radius;
  opts.nodes = flags.nodes;
  opts.max_order = flags.max_order;
  AnalysisReport rep = analyze_model(to_polynomial(model), tol, opts);
  out << (flags.format == "json" ? report_to_json(rep) : report_to_pretty(rep))
      << "\n";
  return rep.exit_code;
}

int cmd_analyze(const std::string& path, const std::string& batch_dir,
                const CommonFlags& flags) {
  if (!batch_dir.empty()) {
    int worst = kExitOk;
    for (const auto& entry : fs::directory_iterator(batch_dir)) {
      if (entry.path().extension() != ".json") continue;
      if (entry.path().string().ends_with(".report.json")) continue;
      fs::path report_path = entry.path();
      report_path.replace_extension(".report.json");
      std::ofstream out(report_path);
      CommonFlags json_flags = flags;
      json_flags.format = "json";
      int code;
      try {
        code = analyze_one(entry.path().string(), json_flags, out);
      } catch (const UnsupportedOrderError& e) {
        out << "{\"error\": \"" << e.what() << "\"}\n";
        code = kExitUnsupported;
      }
      std::cout << entry.path().filename().string() << ": exit " << code
                << "\n";
      worst = std::max(worst, code);
    }
    return worst;
  }
  return analyze_one(path, flags, std::cout);
}

int cmd_laurent(const std::string& path, int order_min, int order_max,
                const CommonFlags& flags) {
  ModelFile model = load_model(path);
  MatrixPolynomial P = to_polynomial(model);
  LaurentExpansion exp =
      flags.nodes > 0
          ? contour_coefficients(P, order_min, order_max,
                                 flags.radius > 0.0
                                     ? flags.radius
                                     : default_radius(det_roots(P)),
                                 flags.nodes)
          : contour_auto(P, order_min, order_max, flags.radius);
  std::cout.precision(17);
  std::cout << "radius = " << exp.radius << ", nodes = " << exp.nodes
            << ", imag_leak = " << exp.imag_leak << ", detected m = " << exp.m
            << "\n";
  for (int j = -exp.m; j <= exp.q(); ++j)
    std::cout << "N_{" << j << "} =\n" << exp.coeff(j) << "\n";
  return kExitOk;
}

int cmd_generate(Index n, const std::vector<int>& degrees, std::uint64_t seed,
                 int num_ops, const std::string& out_path) {
  SmithSpec spec;
  spec.n = n;
  spec.degrees = degrees;
  spec.seed = seed;
  spec.num_ops = num_ops;
  SmithModel model = generate_smith_model(spec);

  ModelFile file;
  file.n = n;
  file.K = model.poly.degree();
  file.form = "general";
  file.coeffs = model.poly.coeffs();
  save_model(file, out_path);
  std::cout << "wrote " << out_path << " (known pole order " << model.known_m
            << ")\n";
  return kExitOk;
}

int cmd_simulate(const std::string& path, Index T, std::uint64_t seed,
                 double sigma_scale, const std::string& out_path) {
  ModelFile model = load_model(path);
  MatrixPolynomial P = to_polynomial(model);
  if ((P.coeff(0) - Mat::Identity(P.dim(), P.dim())).norm() > 1e-12)
    P = to_var_form(P);
  Mat sigma = sigma_scale * Mat::Identity(P.dim(), P.dim());
  Trajectory traj = simulate_var(P, T, sigma, seed);

  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write trajectory: " + out_path);
  out.precision(17);
  for (Index t = 0; t < traj.T; ++t) {
    for (Index i = 0; i < traj.n; ++i)
      out << traj.values(t, i) << (i + 1 < traj.n ? "," : "");
    out << "\n";
  }
  std::cout << "wrote " << out_path << " (" << T << " x " << traj.n << ")\n";
  return kExitOk;
}

int cmd_verify(const std::string& path, std::uint64_t seed,
               const CommonFlags& flags) {
  ModelFile model = load_model(path);
  MatrixPolynomial P = to_polynomial(model);
  Tolerances tol = flags.tolerances();

  AnalyzeOptions opts;
  opts.radius = flags.radius;
  opts.nodes = flags.nodes;
  opts.max_order = flags.max_order;
  AnalysisReport rep = analyze_model(P, tol, opts);
  std::cout << report_to_pretty(rep);

  int code = rep.exit_code;

  // self-consistency of the oracle: halving the radius must not move the
  // coefficients
  const int mm = std::max(rep.m, 1);
  LaurentExpansion a = contour_auto(P, -mm, rep.m, rep.radius);
  LaurentExpansion b = contour_auto(P, -mm, rep.m, rep.radius / 2.0);
  double drift = 0.0;
  for (int j = -rep.m; j <= std::min(a.q(), b.q()); ++j) {
    const double scale = std::max(1.0, a.coeff(j).norm());
    drift = std::max(drift, (a.coeff(j) - b.coeff(j)).norm() / scale);
  }
  const bool radius_ok = drift < 1e-8;
  std::cout << "[" << (radius_ok ? "pass" : "fail")
            << "] radius_invariance (drift " << drift << ")\n";
  if (!radius_ok) code = std::max(code, kExitVerification);

  // statistical diagnostics on a simulated trajectory
  if (rep.m >= 1 && rep.m <= 2) {
    MatrixPolynomial V =
        (P.coeff(0) - Mat::Identity(P.dim(), P.dim())).norm() > 1e-12
            ? to_var_form(P)
            : P;
    Trajectory traj =
        simulate_var(V, 4000, Mat::Identity(P.dim(), P.dim()), seed);
    DiagnosticsReport diag = integration_diagnostics(traj, rep.m, rep.P);
    const bool diffs_ok = diag.stationary.back() &&
                          (rep.m == 0 || !diag.stationary[rep.m - 1]);
    std::cout << "[" << (diffs_ok ? "pass" : "warn")
              << "] variance_growth (slopes";
    for (double s : diag.slopes) std::cout << " " << s;
    std::cout << "; projected " << diag.projected_slope << ")\n";
  }
  std::cout << "exit code " << code << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unit-root matrix-polynomial analyzer"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model_path, batch_dir, out_path;
  int order_min = -4, order_max = 4;
  Index gen_n = 2;
  std::vector<int> gen_degrees;
  std::uint64_t seed = 0;
  int num_ops = 4;
  Index sim_T = 2000;
  double sigma_scale = 1.0;

  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline on a model file");
  analyze->add_option("model", model_path, "model JSON path");
  analyze->add_option("--batch", batch_dir, "analyze every *.json in a directory");
  add_common_flags(analyze, flags);

  CLI::App* laurent = app.add_subcommand("laurent", "contour-oracle coefficient dump");
  laurent->add_option("model", model_path)->required();
  laurent->add_option("--order-min", order_min);
  laurent->add_option("--order-max", order_max);
  add_common_flags(laurent, flags);

  CLI::App* generate = app.add_subcommand("generate", "random model with known pole order");
  generate->add_option("out", out_path)->required();
  generate->add_option("--n", gen_n)->required();
  generate->add_option("--degrees", gen_degrees, "unit-root orders per slot")
      ->required()
      ->delimiter(',');
  generate->add_option("--seed", seed);
  generate->add_option("--num-ops", num_ops);

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a VAR trajectory to CSV");
  simulate->add_option("model", model_path)->required();
  simulate->add_option("out", out_path)->required();
  simulate->add_option("--T", sim_T);
  simulate->add_option("--seed", seed);
  simulate->add_option("--sigma", sigma_scale, "isotropic noise variance");

  CLI::App* verify = app.add_subcommand("verify", "full invariant suite on a model file");
  verify->add_option("model", model_path)->required();
  verify->add_option("--seed", seed);
  add_common_flags(verify, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      if (model_path.empty() && batch_dir.empty())
        throw InputError("analyze: provide a model path or --batch");
      return cmd_analyze(model_path, batch_dir, flags);
    }
    if (laurent->parsed())
      return cmd_laurent(model_path, order_min, order_max, flags);
    if (generate->parsed())
      return cmd_generate(gen_n, gen_degrees, seed, num_ops, out_path);
    if (simulate->parsed())
      return cmd_simulate(model_path, sim_T, seed, sigma_scale, out_path);
    if (verify->parsed()) return cmd_verify(model_path, seed, flags);
  } catch (const UnsupportedOrderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}
