#include "ctcert/ctcert.h"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kFail = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  bool quiet = false;
};

int report(ctc_status status) {
  std::cerr << "ctcert: " << ctc_status_name(status) << ": " << ctc_last_error() << "\n";
  return kError;
}

struct Owned {
  char* s = nullptr;
  ~Owned() { ctc_string_free(s); }
};

struct Context {
  ctc_context* ctx = nullptr;
  ~Context() { ctc_context_destroy(ctx); }
};

std::filesystem::path output_dir(const Common& c, const ctc_context* ctx) {
  std::filesystem::path dir = c.out.empty() ? std::filesystem::path(ctc_context_output_dir(ctx)) : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);
  return dir;
}

bool write_file(const std::filesystem::path& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "ctcert: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

// Loads the config and applies the command-line overrides.
ctc_status open(const Common& c, Context& context, bool grid_is_ctransform = false) {
  ctc_status st = ctc_context_load(c.config.c_str(), &context.ctx);
  if (st != CTC_OK) return st;
  if (c.seed && (st = ctc_context_set_seed(context.ctx, *c.seed)) != CTC_OK) return st;
  if (c.grid) {
    st = grid_is_ctransform ? ctc_context_set_ctransform_grid(context.ctx, *c.grid)
                            : ctc_context_set_grid(context.ctx, *c.grid);
  }
  return st;
}

int cmd_certify(const Common& c) {
  Context context;
  if (ctc_status st = open(c, context); st != CTC_OK) return report(st);
  int pass = 0;
  Owned json;
  if (ctc_status st = ctc_certify(context.ctx, &pass, &json.s); st != CTC_OK) return report(st);
  std::filesystem::path path = output_dir(c, context.ctx) / "certificate.json";
  if (!write_file(path, json.s)) return kError;
  if (!c.quiet) std::cout << "certificate: " << (pass ? "pass" : "fail") << " -> " << path.string() << "\n";
  return pass ? kPass : kFail;
}

int cmd_verify(const Common& c) {
  Context context;
  if (ctc_status st = open(c, context); st != CTC_OK) return report(st);
  int pass = 0;
  Owned json, csv;
  if (ctc_status st = ctc_verify(context.ctx, &pass, &json.s, &csv.s); st != CTC_OK) return report(st);
  std::filesystem::path dir = output_dir(c, context.ctx);
  if (!write_file(dir / "transport_report.json", json.s) || !write_file(dir / "transport_pairs.csv", csv.s))
    return kError;
  if (!c.quiet)
    std::cout << "verification: " << (pass ? "pass" : "fail") << " -> " << (dir / "transport_report.json").string()
              << "\n";
  return pass ? kPass : kFail;
}

int cmd_flow(const Common& c) {
  Context context;
  if (ctc_status st = open(c, context); st != CTC_OK) return report(st);
  double drift = 0.0;
  Owned csv;
  if (ctc_status st = ctc_flow(context.ctx, &drift, &csv.s); st != CTC_OK) return report(st);
  std::filesystem::path path = output_dir(c, context.ctx) / "flow.csv";
  if (!write_file(path, csv.s)) return kError;
  if (!c.quiet) std::cout << "flow: energy drift " << drift << " -> " << path.string() << "\n";
  return kPass;
}

int cmd_ctransform(const Common& c) {
  Context context;
  if (ctc_status st = open(c, context, true); st != CTC_OK) return report(st);
  int convex = 0;
  Owned json;
  if (ctc_status st = ctc_ctransform(context.ctx, &convex, &json.s); st != CTC_OK) return report(st);
  std::filesystem::path path = output_dir(c, context.ctx) / "ctransform.json";
  if (!write_file(path, json.s)) return kError;
  if (!c.quiet) std::cout << "c-transform: " << (convex ? "c-convex" : "not c-convex") << " -> " << path.string() << "\n";
  return convex ? kPass : kFail;
}

struct DemoArgs {
  double k = 0.0;
  double s0 = 0.0;
  double t_end = 1.0;
  int dim = 1;
  double step = 0.01;
};

int cmd_riccati_demo(const Common& c, const DemoArgs& a) {
  Owned csv;
  if (ctc_status st = ctc_riccati_demo(a.k, a.s0, a.t_end, a.dim, a.step, &csv.s); st != CTC_OK) return report(st);
  std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);
  std::filesystem::path path = dir / "riccati.csv";
  if (!write_file(path, csv.s)) return kError;
  if (!c.quiet) std::cout << "riccati: -> " << path.string() << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify c-convex potentials and verify the induced transport maps"};
  app.require_subcommand(1);
  Common common;
  DemoArgs demo;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config, "JSON run configuration");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (default: output.dir of the config)");
    sub->add_option("--seed", common.seed, "override verification.seed");
    sub->add_option("--grid", common.grid, "override the grid resolution");
    sub->add_flag("--quiet", common.quiet, "no summary on stdout");
  };

  auto* certify = app.add_subcommand("certify", "check the sufficient c-convexity condition on a grid");
  auto* verify = app.add_subcommand("verify", "compare the induced map with an exact assignment");
  auto* flow = app.add_subcommand("flow", "integrate one extremal and write flow.csv");
  auto* ctransform = app.add_subcommand("ctransform", "brute-force double c-transform");
  auto* riccati = app.add_subcommand("riccati-demo", "explicit Riccati solution with S0 = s0 I");
  for (auto* sub : {certify, verify, flow, ctransform}) add_common(sub, true);
  add_common(riccati, false);
  riccati->add_option("--k", demo.k, "curvature constant");
  riccati->add_option("--s0", demo.s0, "initial value");
  riccati->add_option("--t-end", demo.t_end, "final time")->check(CLI::NonNegativeNumber);
  riccati->add_option("--dim", demo.dim, "matrix size")->check(CLI::Range(1, 6));
  riccati->add_option("--step", demo.step, "time step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    if (certify->parsed()) return cmd_certify(common);
    if (verify->parsed()) return cmd_verify(common);
    if (flow->parsed()) return cmd_flow(common);
    if (ctransform->parsed()) return cmd_ctransform(common);
    return cmd_riccati_demo(common, demo);
  } catch (const std::exception& e) {
    std::cerr << "ctcert: " << e.what() << "\n";
    return kError;
  }
}
