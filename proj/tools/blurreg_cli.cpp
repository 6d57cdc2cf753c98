// blurreg_cli: simulate, inspect and align blurred quantized sequences.
//
//   blurreg_cli simulate --config scenario.json
//   blurreg_cli align --config scenario.json --v-scan
//   blurreg_cli reproduce-paper --out results/
//
// Exit codes: 0 ok, 2 invalid input, 3 blur outside the supported regime,
// 4 reference reproduction mismatch.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blurreg/error.hpp"
#include "blurreg/scenario.hpp"

namespace fs = std::filesystem;
using blurreg::ExitCode;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string v;
  bool v_scan = false;
  std::string out;
  std::string format = "json";
  std::string dot;
};

/// Writes `text` to out/name when --out is set, else to stdout.
void emit(const Options& opt, const std::string& name, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(opt.out);
  const auto path = fs::path(opt.out) / name;
  std::ofstream f(path);
  if (!f) throw blurreg::ValidationError("cannot write '" + path.string() + "'");
  f << text;
}

blurreg::ScenarioConfig load(const Options& opt) {
  if (opt.config.empty()) throw blurreg::ValidationError("--config is required");
  auto config = blurreg::load_scenario(opt.config);
  if (!opt.v.empty()) {
    config.v = blurreg::parse_rational(opt.v);
    if (*config.v <= blurreg::Rational(0)) throw blurreg::ValidationError("--v must be positive");
    config.v_scan = false;
  }
  if (opt.v_scan) config.v_scan = true;
  return config;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string sequences_csv(const std::vector<blurreg::SequenceData>& seqs) {
  std::ostringstream os;
  os << "sequence,index,gamma,y,d\n";
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    const auto& s = seqs[k];
    for (std::size_t i = 0; i < s.gamma.size(); ++i) {
      os << k + 1 << "," << i << "," << blurreg::format_q256(s.gamma[i]) << ","
         << blurreg::format_q256(s.y[i]) << "," << blurreg::format_q256(s.d[i]) << "\n";
    }
  }
  return os.str();
}

int cmd_simulate(const Options& opt) {
  const auto seqs = blurreg::simulate(load(opt));
  if (opt.format == "csv") {
    emit(opt, "sequences.csv", sequences_csv(seqs));
  } else {
    blurreg::RunReport r;
    r.sequences = seqs;
    ordered_json j;
    j["sequences"] = r.to_json()["sequences"];
    emit(opt, "sequences.json", dump(j));
  }
  return 0;
}

int cmd_matrices(const Options& opt) {
  const auto config = load(opt);
  const auto seqs = blurreg::simulate(config);
  ordered_json all = ordered_json::array();
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    const auto& s = seqs[k];
    const auto m = blurreg::measurement_matrix(config.signal, config.blur, s.grid, s.gamma);
    const auto md = blurreg::difference_matrix(m.entries);
    const auto product = blurreg::classify_product(m, md, config.signal, s.counts);
    const std::string tag = std::to_string(k + 1);
    if (opt.format == "csv") {
      emit(opt, "M" + tag + ".csv", blurreg::matrix_to_csv(m.entries));
      emit(opt, "MD" + tag + ".csv", blurreg::matrix_to_csv(md));
      emit(opt, "M" + tag + ".json", blurreg::measurement_sidecar_json(m));
    } else {
      auto entry = ordered_json::parse(blurreg::measurement_sidecar_json(m));
      entry["M"] = blurreg::matrix_to_csv(m.entries);
      entry["MD"] = blurreg::matrix_to_csv(md);
      entry["product_violations"] = product.violations;
      all.push_back(entry);
    }
  }
  if (opt.format != "csv") emit(opt, "matrices.json", dump(all));
  return 0;
}

int cmd_baseline(const Options& opt) {
  const auto seqs = blurreg::simulate(load(opt));
  if (seqs.size() != 2) throw blurreg::ValidationError("baseline needs two grids");
  const auto r = blurreg::cross_correlation(seqs[0].y, seqs[1].y);
  const auto arg = blurreg::ccorr_argmax(r);
  if (opt.format == "csv") {
    emit(opt, "correlation.csv", blurreg::correlation_to_csv(r));
  } else {
    emit(opt, "baseline.json", dump({{"argmax", arg.lag}, {"tied", arg.tied}}));
  }
  return 0;
}

int cmd_align(const Options& opt) {
  const auto config = load(opt);
  const auto seqs = blurreg::simulate(config);
  if (seqs.size() != 2) throw blurreg::ValidationError("align needs two grids");
  const auto& d1 = seqs[0].d;
  const auto& d2 = seqs[1].d;
  if (d1.size() != d2.size()) throw blurreg::ValidationError("align needs equal sample counts");
  if (config.v_scan) {
    const auto scan = blurreg::scan_thresholds(d1, d2, blurreg::threshold_grid());
    int best = 0;
    for (const auto& e : scan) best = std::max(best, e.result.total_weight);
    ordered_json j = ordered_json::array();
    for (const auto& e : scan) {
      if (e.result.total_weight == best) {
        j.push_back(ordered_json::parse(blurreg::path_result_json(e.v, e.result)));
      }
    }
    emit(opt, "align.json", dump(j));
    return 0;
  }
  const auto v = config.v.value_or(blurreg::Rational(1, 256));
  const auto graph = blurreg::build_graph(d1, d2, v);
  emit(opt, "align.json", blurreg::path_result_json(v, blurreg::longest_path(graph)));
  if (!opt.dot.empty()) {
    std::ofstream(opt.dot) << graph.to_dot();
  }
  return 0;
}

int cmd_infer(const Options& opt) {
  const auto config = load(opt);
  emit(opt, "bounds.json", dump(blurreg::infer_bounds(config, blurreg::simulate(config))));
  return 0;
}

int cmd_run(const Options& opt) {
  const auto report = blurreg::run_scenario(load(opt));
  emit(opt, "report.json", dump(report.to_json()));
  return 0;
}

int cmd_reproduce(const Options& opt) {
  const auto report = blurreg::reproduce_reference_example();
  emit(opt, "reproduction.json", dump(report.to_json()));
  for (const auto& c : report.checks) {
    std::cerr << (c.passed ? "ok    " : "FAIL  ") << c.name;
    if (!c.detail.empty()) std::cerr << "  " << c.detail;
    std::cerr << "\n";
  }
  return report.passed() ? 0 : static_cast<int>(ExitCode::kMismatch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Registration and segmentation of blurred, quantized 1-D samples"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "scenario JSON file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "write outputs into this directory");
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* simulate = app.add_subcommand("simulate", "sample, quantize and add noise");
  auto* matrices = app.add_subcommand("matrices", "measurement and difference matrices");
  auto* baseline = app.add_subcommand("baseline", "cross-correlation template matching");
  auto* align = app.add_subcommand("align", "longest-path alignment of two sequences");
  auto* infer = app.add_subcommand("infer", "interval bounds from noiseless sequences");
  auto* run = app.add_subcommand("run", "full pipeline report");
  auto* reproduce = app.add_subcommand("reproduce-paper", "check the built-in reference example");
  for (auto* sub : {simulate, matrices, baseline, align, infer, run}) add_common(sub, true);
  add_common(reproduce, false);
  for (auto* sub : {align, run}) {
    auto* v = sub->add_option("--v", opt.v, "alignment threshold, e.g. 3/256");
    sub->add_flag("--v-scan", opt.v_scan, "scan thresholds k/512")->excludes(v);
  }
  align->add_option("--dot", opt.dot, "write the reachable graph in Graphviz format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*simulate) return cmd_simulate(opt);
    if (*matrices) return cmd_matrices(opt);
    if (*baseline) return cmd_baseline(opt);
    if (*align) return cmd_align(opt);
    if (*infer) return cmd_infer(opt);
    if (*run) return cmd_run(opt);
    if (*reproduce) return cmd_reproduce(opt);
  } catch (const blurreg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kValidation);
  } catch (const blurreg::RegimeError& e) {
    std::cerr << "regime: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kRegime);
  } catch (const blurreg::ReproductionMismatch& e) {
    std::cerr << "mismatch: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kMismatch);
  }
  return 0;
}
