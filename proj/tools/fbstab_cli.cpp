// Command-line front end for the solver shared library. Talks to the solver
// exclusively through the C API; JSON input parsing of certificates and all
// output formatting are local concerns.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fbstab/fbstab_c.h"

namespace {

// All numeric output is printed with 17 significant digits so logged values
// round-trip exactly.
std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string vector_json(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt17(v[i]);
  }
  return out + "]";
}

struct OptionOverrides {
  std::optional<double> sigma, tau_a, tau_r, tau_d, tau_inf, kappa, alpha, beta, eta;
  std::optional<int> max_outer, max_inner;

  fbstab_options resolve() const {
    fbstab_options o = fbstab_default_options();
    if (sigma) o.sigma = *sigma;
    if (tau_a) o.tau_abs = *tau_a;
    if (tau_r) o.tau_rel = *tau_r;
    if (tau_d) o.tau_stall = *tau_d;
    if (tau_inf) o.tau_infeas = *tau_inf;
    if (kappa) o.kappa = *kappa;
    if (alpha) o.alpha = *alpha;
    if (beta) o.beta = *beta;
    if (eta) o.eta = *eta;
    if (max_outer) o.max_outer_iterations = *max_outer;
    if (max_inner) o.max_inner_iterations = *max_inner;
    return o;
  }
};

void add_option_flags(CLI::App* cmd, OptionOverrides& o) {
  cmd->add_option("--sigma", o.sigma, "proximal regularization strength");
  cmd->add_option("--tau-a", o.tau_a, "absolute stopping tolerance");
  cmd->add_option("--tau-r", o.tau_r, "relative stopping tolerance");
  cmd->add_option("--tau-d", o.tau_d, "stall tolerance");
  cmd->add_option("--tau-inf", o.tau_inf, "infeasibility detection tolerance");
  cmd->add_option("--kappa", o.kappa, "inexactness decay factor");
  cmd->add_option("--alpha", o.alpha, "complementarity blend parameter");
  cmd->add_option("--beta", o.beta, "linesearch backtracking factor");
  cmd->add_option("--eta", o.eta, "linesearch sufficient-decrease parameter");
  cmd->add_option("--max-outer", o.max_outer, "outer iteration cap");
  cmd->add_option("--max-inner", o.max_inner, "inner iteration cap per subproblem");
}

fbstab_backend parse_backend(const std::string& name) {
  if (name == "dense") return FBSTAB_BACKEND_DENSE;
  if (name == "mpc") return FBSTAB_BACKEND_MPC;
  return FBSTAB_BACKEND_AUTO;
}

struct ProblemHandle {
  fbstab_problem* p = nullptr;
  ~ProblemHandle() { fbstab_problem_free(p); }
};

struct ResultHandle {
  fbstab_result* r = nullptr;
  ~ResultHandle() { fbstab_result_free(r); }
};

int write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot open " << path << "\n";
    return 1;
  }
  out << text << "\n";
  return 0;
}

int cmd_solve(const std::string& input, const OptionOverrides& overrides,
              const std::string& backend, const std::string& output) {
  ProblemHandle ph;
  ph.p = fbstab_problem_from_json_file(input.c_str());
  if (!ph.p) {
    std::cerr << "error: " << fbstab_last_error() << "\n";
    return 1;
  }
  fbstab_backend be = parse_backend(backend);
  const fbstab_options opts = overrides.resolve();
  ResultHandle rh;
  rh.r = fbstab_solve(ph.p, nullptr, nullptr, nullptr, &opts, be);
  if (!rh.r) {
    std::cerr << "error: " << fbstab_last_error() << "\n";
    return 1;
  }
  int n = 0, m = 0, q = 0;
  fbstab_problem_dims(ph.p, &n, &m, &q);
  const fbstab_term_status status = fbstab_result_status(rh.r);
  int outer = 0;
  long inner = 0;
  double pi = 0, tf = 0, tb = 0, tt = 0;
  fbstab_result_stats(rh.r, &outer, &inner, &pi, &tf, &tb, &tt);

  std::ostringstream js;
  js << "{\n  \"status\": \"" << fbstab_status_name(status) << "\",\n"
     << "  \"pi_norm\": " << fmt17(pi) << ",\n"
     << "  \"outer_iterations\": " << outer << ",\n"
     << "  \"inner_iterations\": " << inner << ",\n"
     << "  \"solve_seconds\": " << fmt17(tt);

  if (status == FBSTAB_OPTIMAL || status == FBSTAB_MAX_ITERATIONS ||
      status == FBSTAB_STALLED) {
    std::vector<double> z(n), lam(std::max(m, 1)), v(std::max(q, 1));
    fbstab_result_primal(rh.r, z.data());
    fbstab_result_eq_duals(rh.r, lam.data());
    fbstab_result_ineq_duals(rh.r, v.data());
    lam.resize(m);
    v.resize(q);
    js << ",\n  \"z\": " << vector_json(z) << ",\n  \"lambda\": " << vector_json(lam)
       << ",\n  \"v\": " << vector_json(v);
  } else {
    std::vector<double> dz(n), dl(std::max(m, 1)), dv(std::max(q, 1));
    fbstab_result_certificate(rh.r, dz.data(), dl.data(), dv.data());
    dl.resize(m);
    dv.resize(q);
    const char* kind = status == FBSTAB_DUAL_INFEASIBLE ? "dual"
                       : status == FBSTAB_PRIMAL_INFEASIBLE ? "primal"
                                                            : "primal_dual";
    js << ",\n  \"certificate\": {\n    \"kind\": \"" << kind << "\",\n    \"dz\": "
       << vector_json(dz) << ",\n    \"dlambda\": " << vector_json(dl)
       << ",\n    \"dv\": " << vector_json(dv) << "\n  }";
  }
  js << "\n}";
  if (write_or_print(js.str(), output) != 0) return 1;

  switch (status) {
    case FBSTAB_OPTIMAL: return 0;
    case FBSTAB_PRIMAL_INFEASIBLE:
    case FBSTAB_DUAL_INFEASIBLE:
    case FBSTAB_PRIMAL_DUAL_INFEASIBLE: return 2;
    default: return 3;
  }
}

int cmd_verify(const std::string& input, const OptionOverrides& overrides) {
  ProblemHandle ph;
  ph.p = fbstab_problem_from_json_file(input.c_str());
  if (!ph.p) {
    std::cerr << "error: " << fbstab_last_error() << "\n";
    return 1;
  }
  nlohmann::json doc;
  try {
    std::ifstream in(input);
    in >> doc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (!doc.contains("certificate")) {
    std::cerr << "error: certificate field missing\n";
    return 1;
  }
  const auto& cert = doc["certificate"];
  const std::string kind = cert.value("kind", "");
  int n = 0, m = 0, q = 0;
  fbstab_problem_dims(ph.p, &n, &m, &q);
  const double tol = overrides.tau_inf.value_or(1e-8);

  auto read_vec = [&](const char* key, int want) -> std::optional<std::vector<double>> {
    if (!cert.contains(key)) return std::nullopt;
    std::vector<double> v = cert[key].get<std::vector<double>>();
    if (static_cast<int>(v.size()) != want) {
      std::cerr << "error: certificate field " << key << " must have " << want
                << " entries\n";
      return std::nullopt;
    }
    return v;
  };

  double metrics[4] = {0, 0, 0, 0};
  int valid = 0;
  std::ostringstream js;
  if (kind == "dual") {
    const auto dz = read_vec("dz", n);
    if (!dz) return 1;
    valid = fbstab_verify_dual_certificate(ph.p, dz->data(), tol, metrics);
    js << "{\n  \"kind\": \"dual\",\n  \"hz_inf\": " << fmt17(metrics[0])
       << ",\n  \"gz_inf\": " << fmt17(metrics[1]) << ",\n  \"az_max\": "
       << fmt17(metrics[2]) << ",\n  \"f_dz\": " << fmt17(metrics[3]);
  } else if (kind == "primal") {
    auto dl = read_vec("dlambda", m);
    auto dv = read_vec("dv", q);
    if (!dl && m == 0) dl = std::vector<double>{};
    if (!dv && q == 0) dv = std::vector<double>{};
    if (!dl || !dv) return 1;
    valid = fbstab_verify_primal_certificate(ph.p, m > 0 ? dl->data() : nullptr,
                                             q > 0 ? dv->data() : nullptr, tol, metrics);
    js << "{\n  \"kind\": \"primal\",\n  \"gtat_inf\": " << fmt17(metrics[0])
       << ",\n  \"farkas\": " << fmt17(metrics[1]) << ",\n  \"dv_min\": "
       << fmt17(metrics[2]);
  } else {
    std::cerr << "error: certificate kind must be \"dual\" or \"primal\"\n";
    return 1;
  }
  if (valid < 0) {
    std::cerr << "error: " << fbstab_last_error() << "\n";
    return 1;
  }
  js << ",\n  \"valid\": " << (valid == 1 ? "true" : "false") << "\n}";
  std::cout << js.str() << "\n";
  return valid == 1 ? 0 : 1;
}

int cmd_bench(const std::string& model, std::vector<int> horizons,
              const OptionOverrides& overrides, const std::string& backend,
              const std::string& output) {
  const fbstab_options opts = overrides.resolve();
  const fbstab_backend be = parse_backend(backend.empty() ? "mpc" : backend);
  std::ostringstream csv;
  csv << "model,N,backend,factor_ms,solve_ms,total_ms,outer,inner\n";
  for (const int N : horizons) {
    ProblemHandle ph;
    ph.p = model == "servo" ? fbstab_problem_servo(N) : fbstab_problem_hcw(N);
    if (!ph.p) {
      std::cerr << "error: " << fbstab_last_error() << "\n";
      return 1;
    }
    std::vector<double> totals, factors, solves;
    int outer = 0;
    long inner = 0;
    // Repeat until the timing variance settles below 10% or 20 repetitions.
    for (int rep = 0; rep < 20; ++rep) {
      ResultHandle rh;
      rh.r = fbstab_solve(ph.p, nullptr, nullptr, nullptr, &opts, be);
      if (!rh.r) {
        std::cerr << "error: " << fbstab_last_error() << "\n";
        return 1;
      }
      double pi, tf, tb, tt;
      fbstab_result_stats(rh.r, &outer, &inner, &pi, &tf, &tb, &tt);
      totals.push_back(tt * 1e3);
      factors.push_back(tf * 1e3);
      solves.push_back(tb * 1e3);
      if (rep >= 2) {
        double mean = 0;
        for (double t : totals) mean += t;
        mean /= totals.size();
        double var = 0;
        for (double t : totals) var += (t - mean) * (t - mean);
        const double sd = std::sqrt(var / (totals.size() - 1));
        if (sd / mean < 0.10) break;
      }
    }
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    csv << model << "," << N << "," << (be == FBSTAB_BACKEND_DENSE ? "dense" : "mpc")
        << "," << fmt17(median(factors)) << "," << fmt17(median(solves)) << ","
        << fmt17(median(totals)) << "," << outer << "," << inner << "\n";
  }
  std::string text = csv.str();
  text.pop_back();
  return write_or_print(text, output);
}

int cmd_demo(const std::string& model, int steps, int horizon, bool warmstart,
             const OptionOverrides& overrides, const std::string& backend,
             const std::string& output) {
  const fbstab_options opts = overrides.resolve();
  fbstab_demo_summary summary;
  const std::string csv_path = output.empty() ? std::string() : output;
  const int rc = fbstab_demo_closed_loop(
      model.c_str(), horizon, steps, warmstart ? 1 : 0, &opts,
      parse_backend(backend.empty() ? "mpc" : backend),
      csv_path.empty() ? nullptr : csv_path.c_str(), &summary);
  if (rc != FBSTAB_OK) {
    std::cerr << "error: " << fbstab_last_error() << "\n";
    return 1;
  }
  std::ostringstream js;
  js << "{\n  \"model\": \"" << model << "\",\n  \"steps\": " << summary.steps
     << ",\n  \"final_tracking_error\": " << fmt17(summary.final_tracking_error)
     << ",\n  \"max_input_violation\": " << fmt17(summary.max_input_violation)
     << ",\n  \"max_state_violation\": " << fmt17(summary.max_state_violation)
     << ",\n  \"max_outer_iterations\": " << summary.max_outer_iterations
     << ",\n  \"max_inner_iterations\": " << summary.max_inner_iterations
     << ",\n  \"median_inner_iterations\": " << fmt17(summary.median_inner_iterations)
     << ",\n  \"max_pi_norm\": " << fmt17(summary.max_pi_norm)
     << ",\n  \"all_optimal\": " << (summary.all_optimal ? "true" : "false");
  if (!summary.all_optimal) {
    js << ",\n  \"first_failed_step\": " << summary.first_failed_step;
  }
  js << "\n}";
  std::cout << js.str() << "\n";
  return summary.all_optimal ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximally stabilized semismooth QP solver"};
  app.require_subcommand(1);

  OptionOverrides overrides;
  std::string input, output, backend = "auto", model = "servo";
  std::vector<int> horizons{30};
  int steps = 40, horizon = 0;
  bool warmstart = true;
  unsigned seed = 0;

  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
  solve_cmd->add_option("input", input, "problem JSON file")->required();
  solve_cmd->add_option("--backend", backend, "auto|dense|mpc");
  solve_cmd->add_option("--output", output, "write the result JSON here");
  add_option_flags(solve_cmd, overrides);

  auto* verify_cmd = app.add_subcommand("verify", "verify an infeasibility certificate");
  verify_cmd->add_option("input", input, "problem+certificate JSON file")->required();
  add_option_flags(verify_cmd, overrides);

  auto* bench_cmd = app.add_subcommand("bench", "time solves over a horizon sweep");
  bench_cmd->add_option("--model", model, "servo|hcw")->required();
  bench_cmd->add_option("--horizons", horizons, "horizon lengths")->delimiter(',');
  bench_cmd->add_option("--backend", backend, "dense|mpc (default mpc)");
  bench_cmd->add_option("--output", output, "write the CSV here");
  add_option_flags(bench_cmd, overrides);

  auto* demo_cmd = app.add_subcommand("demo", "closed-loop simulation");
  demo_cmd->add_option("--model", model, "servo|hcw")->required();
  demo_cmd->add_option("--steps", steps, "simulation steps");
  demo_cmd->add_option("--horizon", horizon, "prediction horizon (default per model)");
  demo_cmd->add_flag("--warmstart,!--cold-start", warmstart,
                     "shifted warmstart (default) or cold start");
  demo_cmd->add_option("--backend", backend, "dense|mpc (default mpc)");
  demo_cmd->add_option("--output", output, "write the trajectory CSV here");
  add_option_flags(demo_cmd, overrides);

  app.add_option("--seed", seed, "seed for randomized inputs (reserved)");

  CLI11_PARSE(app, argc, argv);

  if (solve_cmd->parsed()) return cmd_solve(input, overrides, backend, output);
  if (verify_cmd->parsed()) return cmd_verify(input, overrides);
  if (bench_cmd->parsed()) {
    if (model != "servo" && model != "hcw") {
      std::cerr << "error: model must be servo or hcw\n";
      return 1;
    }
    return cmd_bench(model, horizons, overrides, backend, output);
  }
  if (demo_cmd->parsed()) {
    if (model != "servo" && model != "hcw") {
      std::cerr << "error: model must be servo or hcw\n";
      return 1;
    }
    if (horizon <= 0) horizon = model == "servo" ? 30 : 40;
    return cmd_demo(model, steps, horizon, warmstart, overrides, backend, output);
  }
  return 1;
}
