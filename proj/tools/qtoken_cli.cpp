// qtoken: command-line front end for the token-protocol simulation library.
//
// Verbs:
//   issue    emit the issuance artifacts for the configured family
//   verify   run the configured experiment and emit one JSONL record per trial
//   attack   like verify, but requires a configured adversary
//   design   search for an ensemble-coin policy meeting the error targets
//   sweep    repeat the experiment across a parameter range, emit CSV
//   report   summarize a JSONL record stream
//   presets  list the built-in memory presets
//
// Exit codes: 0 success, 1 configuration error, 2 infeasible design.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qtoken/cv_token.hpp"
#include "qtoken/dv_token.hpp"
#include "qtoken/ensemble_token.hpp"
#include "qtoken/harness.hpp"
#include "qtoken/memory.hpp"
#include "qtoken/puf.hpp"

namespace {

using nlohmann::json;
using qtoken::harness::ConfigError;
using qtoken::harness::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;

/// Writes via a temp file + rename so readers never see a partial file.
void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    atomic_write(out_path, content);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("config is not valid JSON: ") + e.what());
  }
}

/// Applies a dotted-path override; the value is parsed as JSON when
/// possible, otherwise taken as a string literal.
void apply_override(json& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("/", "--set expects key=value, got: " + kv);
  std::string pointer = "/";
  for (char c : kv.substr(0, eq)) pointer.push_back(c == '.' ? '/' : c);
  const std::string raw = kv.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  try {
    cfg[json::json_pointer(pointer)] = value;
  } catch (const std::exception& e) {
    throw ConfigError(pointer, std::string("bad override path: ") + e.what());
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  int threads = 0;  // 0 = unset, fall back to QTOKEN_THREADS or 1
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config = true) {
  auto* c = cmd->add_option("--config", o.config_path, "experiment config (JSON)");
  if (needs_config) c->required();
  cmd->add_option("--out", o.out_path, "output file (default: stdout)");
  cmd->add_option("--set", o.overrides,
                  "dotted-path config override, key=value (repeatable)");
  cmd->add_option("--threads", o.threads, "worker threads (env QTOKEN_THREADS)");
  cmd->add_option("--seed", o.seed, "master seed override")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("QTOKEN_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

json load_config(const CommonOpts& o) {
  json cfg = load_json_file(o.config_path);
  for (const auto& kv : o.overrides) apply_override(cfg, kv);
  if (o.seed_set) cfg["master_seed"] = o.seed;
  return cfg;
}

json issue_artifacts(const ExperimentConfig& cfg) {
  qtoken::Rng rng(cfg.master_seed);
  switch (cfg.family) {
    case qtoken::harness::Family::dv: {
      const int n = cfg.family_params.value("n", 32);
      auto [secret, token] = qtoken::dv::issue(n, rng);
      return {{"family", "dv"},
              {"secret", secret.to_json()},
              {"token", token.to_json()}};
    }
    case qtoken::harness::Family::ensemble: {
      qtoken::ensemble::CoinPolicy policy(
          cfg.family_params.value("N", 16), cfg.family_params.value("M", 8),
          cfg.family_params.value("tau", 0.9), cfg.family_params.value("T", 8));
      auto [secret, coin] = qtoken::ensemble::issue_coin(policy, rng);
      json angles = json::array();
      for (const auto& a : secret.angles)
        angles.push_back({{"theta", a.theta}, {"phi", a.phi}});
      return {{"family", "ensemble"},
              {"policy", policy.to_json()},
              {"secret_angles", angles}};
    }
    case qtoken::harness::Family::cv: {
      auto codebook = cfg.family_params.contains("codebook")
                          ? qtoken::cv::Codebook::from_json(
                                cfg.family_params.at("codebook"))
                          : qtoken::cv::Codebook::random(
                                cfg.family_params.value("symbols", 4),
                                cfg.family_params.value("codebook_variance", 1.0),
                                cfg.family_params.value("squeeze_r", 0.3466),
                                cfg.family_params.value("squeeze_angle", 0.0),
                                rng);
      return {{"family", "cv"}, {"codebook", codebook.to_json()}};
    }
    case qtoken::harness::Family::puf: {
      const int dim = cfg.family_params.value("dim", 2);
      const std::uint64_t device_seed = cfg.family_params.value(
          "device_seed", qtoken::mix64(cfg.master_seed, 0xD0D0));
      qtoken::puf::SimulatedQPUF device(dim, device_seed);
      qtoken::puf::CRPTable table =
          qtoken::puf::enroll(device, cfg.family_params.value("n_crp", 64), rng);
      // The enrollment table is the classical artifact; the device seed and
      // hidden unitary stay out of the output on purpose.
      return {{"family", "puf"}, {"crp_table", table.to_json()}};
    }
  }
  throw ConfigError("/family", "unhandled family");
}

int run_experiment(const CommonOpts& o, bool require_adversary) {
  const json cfg_json = load_config(o);
  const ExperimentConfig cfg = ExperimentConfig::from_json(cfg_json);
  const std::string adv = cfg.adversary.value("kind", std::string("none"));
  if (require_adversary && (adv == "none" || adv.empty()))
    throw ConfigError("/adversary/kind",
                      "the attack verb needs a configured adversary");
  const auto records =
      qtoken::harness::run_protocol(cfg, resolve_threads(o.threads));
  emit(o.out_path, qtoken::harness::records_to_jsonl(records));
  return kExitOk;
}

int run_design(const CommonOpts& o) {
  const json cfg_json = load_config(o);
  qtoken::ensemble::DesignTargets targets;
  qtoken::ensemble::DesignBounds bounds;
  if (cfg_json.contains("targets")) {
    const auto& t = cfg_json.at("targets");
    targets.max_false_accept = t.value("max_false_accept", targets.max_false_accept);
    targets.max_false_reject = t.value("max_false_reject", targets.max_false_reject);
  }
  if (cfg_json.contains("bounds")) {
    const auto& b = cfg_json.at("bounds");
    if (b.contains("spins_per_token"))
      bounds.spins_per_token = b.at("spins_per_token").get<std::vector<int>>();
    bounds.max_tokens_per_coin =
        b.value("max_tokens_per_coin", bounds.max_tokens_per_coin);
    if (b.contains("match_fractions"))
      bounds.match_fractions = b.at("match_fractions").get<std::vector<double>>();
  }
  const auto readout = cfg_json.contains("readout")
                           ? qtoken::ReadoutModel::from_json(cfg_json.at("readout"))
                           : qtoken::ReadoutModel::perfect();
  const auto attack = qtoken::ensemble::attack_kind_from_string(
      cfg_json.value("attack", std::string("three-axis")));
  const std::uint64_t seed = cfg_json.value("master_seed", std::uint64_t{1});
  const auto result = qtoken::ensemble::design_coin(
      targets, readout, attack, bounds, seed,
      cfg_json.value("screen_samples", std::int64_t{20000}),
      cfg_json.value("certify_samples", std::int64_t{1000000}),
      resolve_threads(o.threads));
  emit(o.out_path, result.to_json().dump(2) + "\n");
  if (!result.feasible) {
    std::cerr << "design: no feasible policy within the search bounds\n";
    return kExitInfeasible;
  }
  std::cerr << result.certificate_text();
  return kExitOk;
}

int run_sweep(const CommonOpts& o, const std::string& records_path) {
  const json cfg_json = load_config(o);
  if (!cfg_json.contains("sweep"))
    throw ConfigError("/sweep", "sweep verb needs a sweep section");
  const auto& s = cfg_json.at("sweep");
  if (!s.contains("parameter") || !s.contains("values"))
    throw ConfigError("/sweep", "needs 'parameter' (dotted path) and 'values'");
  json base = cfg_json;
  base.erase("sweep");
  const ExperimentConfig cfg = ExperimentConfig::from_json(base);
  std::vector<json> values;
  for (const auto& v : s.at("values")) values.push_back(v);
  const auto result = qtoken::harness::sweep(
      cfg, s.at("parameter").get<std::string>(), values,
      resolve_threads(o.threads));
  emit(o.out_path, result.to_csv());
  if (!records_path.empty())
    atomic_write(records_path, qtoken::harness::records_to_jsonl(result.records));
  return kExitOk;
}

int run_report(const std::string& in_path, const std::string& out_path,
               const std::string& format) {
  std::string text;
  if (in_path.empty() || in_path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw ConfigError("/", "cannot open records file: " + in_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const auto summary = qtoken::harness::summarize_jsonl(text);
  emit(out_path, format == "csv" ? summary.to_csv() : summary.to_text());
  return kExitOk;
}

int run_presets(const std::string& out_path) {
  json out = json::array();
  for (const auto& p : qtoken::builtin_memory_presets()) out.push_back(p.to_json());
  emit(out_path, out.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-token protocol simulator"};
  app.require_subcommand(1);

  CommonOpts issue_o, verify_o, attack_o, design_o, sweep_o;
  std::string sweep_records, report_in, report_out, report_format = "text";
  std::string presets_out;

  auto* issue = app.add_subcommand("issue", "emit issuance artifacts");
  add_common(issue, issue_o);
  auto* verify = app.add_subcommand("verify", "run the experiment, emit JSONL");
  add_common(verify, verify_o);
  auto* attack = app.add_subcommand("attack", "run with a configured adversary");
  add_common(attack, attack_o);
  auto* design = app.add_subcommand("design", "search ensemble-coin policies");
  add_common(design, design_o);
  auto* sweep = app.add_subcommand("sweep", "parameter sweep, emit CSV");
  add_common(sweep, sweep_o);
  sweep->add_option("--records", sweep_records, "also write per-trial JSONL here");
  auto* report = app.add_subcommand("report", "summarize a JSONL stream");
  report->add_option("--in", report_in, "records file ('-' = stdin)");
  report->add_option("--out", report_out, "output file (default: stdout)");
  report->add_option("--format", report_format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));
  auto* presets = app.add_subcommand("presets", "list built-in memory presets");
  presets->add_option("--out", presets_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*issue) {
      const ExperimentConfig cfg =
          ExperimentConfig::from_json(load_config(issue_o));
      emit(issue_o.out_path, issue_artifacts(cfg).dump(2) + "\n");
      return kExitOk;
    }
    if (*verify) return run_experiment(verify_o, /*require_adversary=*/false);
    if (*attack) return run_experiment(attack_o, /*require_adversary=*/true);
    if (*design) return run_design(design_o);
    if (*sweep) return run_sweep(sweep_o, sweep_records);
    if (*report) return run_report(report_in, report_out, report_format);
    if (*presets) return run_presets(presets_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.pointer() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
