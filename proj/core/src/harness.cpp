#include "qtoken/harness.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "qtoken/cv_token.hpp"
#include "qtoken/dv_token.hpp"
#include "qtoken/ensemble_token.hpp"
#include "qtoken/puf.hpp"
#include "qtoken/stats.hpp"

namespace qtoken::harness {

std::string to_string(Role r) {
  switch (r) {
    case Role::issuer: return "issuer";
    case Role::holder: return "holder";
    case Role::verifier: return "verifier";
    case Role::adversary: return "adversary";
  }
  return "holder";
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::issue: return "issue";
    case Phase::transmit: return "transmit";
    case Phase::store: return "store";
    case Phase::challenge: return "challenge";
    case Phase::respond: return "respond";
    case Phase::verdict: return "verdict";
  }
  return "issue";
}

void ProtocolTrace::advance(Phase next) {
  static const int order[] = {0, 1, 2, 3, 4, 5};
  if (!phases_.empty()) {
    const int prev = order[static_cast<int>(phases_.back())];
    const int cur = order[static_cast<int>(next)];
    if (cur <= prev)
      throw std::logic_error("protocol-graph violation: " +
                             to_string(phases_.back()) + " -> " +
                             to_string(next));
  } else if (next != Phase::issue) {
    throw std::logic_error("protocol-graph violation: must start at issue");
  }
  phases_.push_back(next);
}

nlohmann::json ChannelSpec::to_json() const {
  return {{"loss", loss},
          {"noise", {{"kind", qtoken::to_string(noise.kind)},
                     {"parameter", noise.parameter}}},
          {"latency_s", latency_s}};
}

ChannelSpec ChannelSpec::from_json(const nlohmann::json& j) {
  ChannelSpec c;
  c.loss = j.value("loss", 0.0);
  if (c.loss < 0.0 || c.loss > 1.0)
    throw ConfigError("/channel/loss", "must be in [0,1]");
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    c.noise = NoiseChannel::checked(
        channel_kind_from_string(n.value("kind", std::string("identity"))),
        n.value("parameter", 0.0));
  }
  c.latency_s = j.value("latency_s", 0.0);
  return c;
}

Family family_from_string(const std::string& s) {
  if (s == "dv") return Family::dv;
  if (s == "ensemble") return Family::ensemble;
  if (s == "cv") return Family::cv;
  if (s == "puf") return Family::puf;
  throw ConfigError("/family", "unknown family: " + s);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::dv: return "dv";
    case Family::ensemble: return "ensemble";
    case Family::cv: return "cv";
    case Family::puf: return "puf";
  }
  return "dv";
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  try {
    return from_json_impl(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("/", std::string("malformed config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_impl(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.contains("family")) throw ConfigError("/family", "missing");
  c.family = family_from_string(j.at("family").get<std::string>());
  c.family_params = j.value("family_params", nlohmann::json::object());
  if (j.contains("memory") && !j.at("memory").is_null()) {
    const auto& m = j.at("memory");
    try {
      if (m.is_string())
        c.memory = find_preset(m.get<std::string>());
      else if (m.contains("preset"))
        c.memory = find_preset(m.at("preset").get<std::string>());
      else
        c.memory = MemorySpec::from_json(m);
    } catch (const std::exception& e) {
      throw ConfigError("/memory", e.what());
    }
  }
  if (j.contains("channel")) c.channel = ChannelSpec::from_json(j.at("channel"));
  c.trials = j.value("trials", std::int64_t{1});
  if (c.trials < 1) throw ConfigError("/trials", "must be >= 1");
  c.master_seed = j.value("master_seed", std::uint64_t{0});
  c.hold_s = j.value("hold_s", 0.0);
  if (c.hold_s < 0.0) throw ConfigError("/hold_s", "must be >= 0");
  const std::string mode = j.value("mode", std::string("flying"));
  if (mode != "flying" && mode != "stored")
    throw ConfigError("/mode", "must be 'flying' or 'stored'");
  c.stored_mode = mode == "stored";
  if (c.stored_mode && !c.memory)
    throw ConfigError("/memory", "stored mode requires a memory spec");
  c.remote = j.value("remote", false);
  c.expiry_factor = j.value("expiry_factor", 3.0);
  c.adversary = j.value("adversary", nlohmann::json::object());
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"family", to_string(family)},
                   {"family_params", family_params},
                   {"channel", channel.to_json()},
                   {"trials", trials},
                   {"master_seed", master_seed},
                   {"hold_s", hold_s},
                   {"mode", stored_mode ? "stored" : "flying"},
                   {"remote", remote},
                   {"expiry_factor", expiry_factor},
                   {"adversary", adversary}};
  if (memory) j["memory"] = memory->to_json();
  return j;
}

bool is_expired(const ExperimentConfig& config) {
  if (!config.stored_mode || !config.memory) return false;
  return config.hold_s > config.expiry_factor * config.memory->t2_s;
}

namespace {

std::string adversary_kind(const ExperimentConfig& cfg) {
  return cfg.adversary.value("kind", std::string("none"));
}

/// Shared record head; field order is the JSONL contract.
ordered_json record_head(const ExperimentConfig& cfg, std::int64_t trial,
                         std::uint64_t trial_seed) {
  ordered_json rec;
  rec["trial"] = trial;
  rec["family"] = to_string(cfg.family);
  rec["seed"] = trial_seed;
  return rec;
}

void record_tail(ordered_json& rec, const ExperimentConfig& cfg,
                 const ProtocolTrace& trace, ordered_json transcript) {
  rec["expired"] = is_expired(cfg);
  rec["elapsed_s"] = cfg.channel.latency_s + (cfg.stored_mode ? cfg.hold_s : 0.0);
  ordered_json phases = ordered_json::array();
  for (auto p : trace.phases()) phases.push_back(to_string(p));
  rec["phases"] = phases;
  rec["transcript"] = std::move(transcript);
}

std::vector<ordered_json> run_dv_trial(const ExperimentConfig& cfg,
                                       std::int64_t trial) {
  const std::uint64_t trial_seed = mix64(cfg.master_seed, trial);
  Rng rng(trial_seed);
  ProtocolTrace trace;
  ordered_json transcript = ordered_json::array();

  const int n = cfg.family_params.value("n", 32);
  dv::VerificationPolicy policy;
  policy.min_matches = cfg.family_params.value("min_matches", 0);
  policy.lenient = cfg.family_params.value("lenient", false);
  policy.min_answered = cfg.family_params.value("min_answered", 0);

  trace.advance(Phase::issue);
  auto [secret, token] = dv::issue(n, rng);

  trace.advance(Phase::transmit);
  for (auto& q : token.qubits) {
    if (rng.bernoulli(cfg.channel.loss)) {
      q.erased = true;
      continue;
    }
    if (cfg.channel.noise.kind != NoiseChannel::Kind::identity &&
        cfg.channel.noise.kind != NoiseChannel::Kind::erasure)
      q.state.apply(cfg.channel.noise);
  }
  const std::string adv = adversary_kind(cfg);
  if (adv != "none" && adv != "") {
    token = dv::adversary_measure_resend(
        token, dv::measure_strategy_from_string(
                   cfg.adversary.value("strategy", std::string("random"))),
        rng);
    transcript.push_back({{"from", "adversary"},
                          {"to", "verifier"},
                          {"type", "forged-token"}});
  }

  if (cfg.stored_mode) {
    trace.advance(Phase::store);
    Memory mem(*cfg.memory);
    if (cfg.memory->modes < n)
      throw ConfigError("/memory/modes", "dv token does not fit the memory");
    std::vector<bool> heralded(n, false);
    for (int i = 0; i < n; ++i)
      if (!token.qubits[i].erased)
        heralded[i] = mem.write(i, token.qubits[i].state, 0.0, rng);
    for (int i = 0; i < n; ++i) {
      if (token.qubits[i].erased) continue;
      if (!heralded[i]) {
        token.qubits[i].erased = true;
        continue;
      }
      auto got = mem.read(i, cfg.hold_s, rng);
      if (got.state)
        token.qubits[i].state = *got.state;
      else
        token.qubits[i].erased = true;
    }
  }

  trace.advance(Phase::challenge);
  if (cfg.remote) {
    // Verifier announces measurement bases only; bit values stay with the
    // issuer.
    ordered_json bases = ordered_json::array();
    for (const auto& r : secret.records)
      bases.push_back(r.basis == dv::Basis::Z ? "Z" : "X");
    transcript.push_back({{"from", "verifier"},
                          {"to", "holder"},
                          {"type", "basis-challenge"},
                          {"bases", bases}});
  }
  trace.advance(Phase::respond);
  const auto res = dv::verify(token, secret, policy, rng);
  if (cfg.remote)
    transcript.push_back({{"from", "holder"},
                          {"to", "verifier"},
                          {"type", "outcomes"},
                          {"answered", res.answered}});
  trace.advance(Phase::verdict);

  ordered_json rec = record_head(cfg, trial, trial_seed);
  rec["verdict"] = res.accept ? "accept" : "reject";
  rec["matches"] = res.matches;
  rec["answered"] = res.answered;
  rec["n"] = n;
  rec["mode"] = cfg.remote ? "remote" : "local";
  record_tail(rec, cfg, trace, std::move(transcript));
  return {std::move(rec)};
}

std::vector<ordered_json> run_ensemble_trial(const ExperimentConfig& cfg,
                                             std::int64_t trial) {
  const std::uint64_t trial_seed = mix64(cfg.master_seed, trial);
  Rng rng(trial_seed);
  ProtocolTrace trace;
  ordered_json transcript = ordered_json::array();

  ensemble::CoinPolicy policy(
      cfg.family_params.value("N", 16), cfg.family_params.value("M", 8),
      cfg.family_params.value("tau", 0.9), cfg.family_params.value("T", 8));
  ReadoutModel readout = cfg.family_params.contains("readout")
                             ? ReadoutModel::from_json(cfg.family_params.at("readout"))
                             : ReadoutModel::perfect();

  trace.advance(Phase::issue);
  auto [secret, coin] = ensemble::issue_coin(policy, rng);

  trace.advance(Phase::transmit);
  if (cfg.channel.noise.kind != NoiseChannel::Kind::identity &&
      cfg.channel.noise.kind != NoiseChannel::Kind::erasure)
    for (auto& token : coin.tokens)
      for (auto& spin : token) spin.apply(cfg.channel.noise);
  const std::string adv = adversary_kind(cfg);
  if (adv != "none" && adv != "") {
    coin = ensemble::attack_estimate_reprepare(
        coin,
        ensemble::attack_kind_from_string(
            cfg.adversary.value("attack", std::string("three-axis"))),
        rng);
    transcript.push_back({{"from", "adversary"},
                          {"to", "verifier"},
                          {"type", "forged-coin"}});
  }

  trace.advance(Phase::challenge);
  trace.advance(Phase::respond);
  const auto res = ensemble::verify_coin(coin, secret, policy, readout, rng);
  trace.advance(Phase::verdict);

  ordered_json rec = record_head(cfg, trial, trial_seed);
  rec["verdict"] = res.accept ? "accept" : "reject";
  rec["passing_tokens"] = res.passing_tokens;
  rec["M"] = policy.tokens_per_coin;
  rec["mode"] = cfg.remote ? "remote" : "local";
  record_tail(rec, cfg, trace, std::move(transcript));
  return {std::move(rec)};
}

std::vector<ordered_json> run_cv_trial(const ExperimentConfig& cfg,
                                       std::int64_t trial) {
  const std::uint64_t trial_seed = mix64(cfg.master_seed, trial);
  Rng rng(trial_seed);
  ProtocolTrace trace;

  cv::Codebook codebook =
      cfg.family_params.contains("codebook")
          ? cv::Codebook::from_json(cfg.family_params.at("codebook"))
          : cv::Codebook::random(cfg.family_params.value("symbols", 4),
                                 cfg.family_params.value("codebook_variance", 1.0),
                                 cfg.family_params.value("squeeze_r", 0.3466),
                                 cfg.family_params.value("squeeze_angle", 0.0),
                                 rng);
  cv::SpinMemoryParams params =
      cfg.family_params.contains("spin_memory")
          ? cv::SpinMemoryParams::from_json(cfg.family_params.at("spin_memory"))
          : cv::SpinMemoryParams();
  const int n_samples = cfg.family_params.value("n_samples", 20000);
  const double added_noise = cfg.family_params.value("added_noise_sq", 0.25);
  const double beta = cfg.family_params.value("beta", cv::kDefaultBeta);

  trace.advance(Phase::issue);
  trace.advance(Phase::transmit);
  trace.advance(Phase::challenge);
  trace.advance(Phase::respond);
  const auto reports =
      cv::roundtrip(codebook, params, n_samples, added_noise, rng, beta);
  trace.advance(Phase::verdict);

  std::vector<ordered_json> out;
  for (const auto& rep : reports) {
    ordered_json rec = record_head(cfg, trial, trial_seed);
    rec["symbol"] = rep.symbol_index;
    rec["verdict"] = rep.verdict == cv::Verdict::authentic ? "accept" : "reject";
    rec["fidelity"] = rep.fidelity;
    rec["S_in_db"] = rep.squeezing_in_db;
    rec["S_out_db"] = rep.squeezing_out_db;
    record_tail(rec, cfg, trace, ordered_json::array());
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ordered_json> run_puf_trial(const ExperimentConfig& cfg,
                                        std::int64_t trial) {
  const std::uint64_t trial_seed = mix64(cfg.master_seed, trial);
  Rng rng(trial_seed);
  ProtocolTrace trace;

  const int dim = cfg.family_params.value("dim", 2);
  const int n_crp = cfg.family_params.value("n_crp", 64);
  const std::uint64_t device_seed =
      cfg.family_params.value("device_seed", mix64(cfg.master_seed, 0xD0D0));
  puf::AuthPolicy policy(cfg.family_params.value("k", 8),
                         cfg.family_params.value("accept_min", 8));

  puf::SimulatedQPUF device(dim, device_seed);
  trace.advance(Phase::issue);
  puf::CRPTable table = puf::enroll(device, n_crp, rng);

  trace.advance(Phase::transmit);
  trace.advance(Phase::challenge);
  trace.advance(Phase::respond);
  const std::string adv = adversary_kind(cfg);
  puf::AuthResult res;
  if (adv == "none" || adv.empty()) {
    puf::GenuineDevice genuine(device);
    res = puf::authenticate(genuine, table, policy, rng);
  } else if (adv == "fixed-state") {
    puf::FixedStateImpersonator imp(puf::haar_random_state(dim, rng));
    res = puf::authenticate(imp, table, policy, rng);
  } else if (adv == "emulator") {
    const int m = cfg.adversary.value("observed", 0);
    std::vector<puf::CRPEntry> observed(
        table.entries.begin(),
        table.entries.begin() + std::min<std::size_t>(m, table.entries.size()));
    puf::EmulatorAdversary emu(
        std::move(observed),
        puf::emulation_strategy_from_string(
            cfg.adversary.value("strategy", std::string("random"))));
    res = puf::authenticate(emu, table, policy, rng);
  } else {
    throw ConfigError("/adversary/kind", "unknown puf adversary: " + adv);
  }
  trace.advance(Phase::verdict);

  ordered_json rec = record_head(cfg, trial, trial_seed);
  rec["verdict"] = res.accept ? "accept" : "reject";
  rec["passed"] = res.passed;
  rec["k"] = policy.challenges_per_session;
  record_tail(rec, cfg, trace, ordered_json(res.transcript));
  return {std::move(rec)};
}

std::vector<ordered_json> run_trial(const ExperimentConfig& cfg,
                                    std::int64_t trial) {
  switch (cfg.family) {
    case Family::dv: return run_dv_trial(cfg, trial);
    case Family::ensemble: return run_ensemble_trial(cfg, trial);
    case Family::cv: return run_cv_trial(cfg, trial);
    case Family::puf: return run_puf_trial(cfg, trial);
  }
  return {};
}

}  // namespace

std::vector<ordered_json> run_protocol(const ExperimentConfig& config,
                                       int threads) {
  threads = std::max(1, threads);
  std::vector<std::vector<ordered_json>> per_trial(config.trials);
  std::exception_ptr error;
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::int64_t t = next.fetch_add(1);
      if (t >= config.trials || failed.load()) return;
      try {
        per_trial[t] = run_trial(config, t);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);

  std::vector<ordered_json> records;
  for (auto& batch : per_trial)
    for (auto& rec : batch) records.push_back(std::move(rec));
  return records;
}

std::string records_to_jsonl(const std::vector<ordered_json>& records) {
  std::string out;
  for (const auto& rec : records) {
    out += rec.dump();
    out += '\n';
  }
  return out;
}

namespace {

void set_dotted_path(nlohmann::json& j, const std::string& dotted,
                     const nlohmann::json& value) {
  std::string pointer = "/";
  for (char c : dotted) pointer += c == '.' ? '/' : std::string(1, c)[0];
  try {
    j[nlohmann::json::json_pointer(pointer)] = value;
  } catch (const std::exception& e) {
    throw ConfigError(pointer, std::string("bad parameter path: ") + e.what());
  }
}

}  // namespace

SweepResult sweep(const ExperimentConfig& config,
                  const std::string& parameter_path,
                  const std::vector<nlohmann::json>& values, int threads) {
  SweepResult result;
  result.parameter = parameter_path;
  for (const auto& value : values) {
    nlohmann::json cfg_json = config.to_json();
    set_dotted_path(cfg_json, parameter_path, value);
    const ExperimentConfig cfg = ExperimentConfig::from_json(cfg_json);
    const auto records = run_protocol(cfg, threads);
    SweepRow row;
    row.value = value.dump();
    for (const auto& rec : records) {
      ++row.trials;
      if (rec.value("verdict", std::string{}) == "accept") ++row.accepted;
    }
    row.rate = row.trials > 0 ? double(row.accepted) / double(row.trials) : 0.0;
    std::tie(row.ci_low, row.ci_high) =
        stats::wilson_interval(row.accepted, row.trials, 1.959963984540054);
    result.rows.push_back(row);
    for (auto rec : records) {
      rec["sweep_value"] = nlohmann::json(value);
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << "parameter,value,trials,accepted,rate,ci_low,ci_high\n";
  os.precision(12);
  for (const auto& row : rows)
    os << parameter << ',' << row.value << ',' << row.trials << ','
       << row.accepted << ',' << row.rate << ',' << row.ci_low << ','
       << row.ci_high << '\n';
  return os.str();
}

ReportSummary summarize_jsonl(const std::string& jsonl_text) {
  ReportSummary summary;
  std::istringstream in(jsonl_text);
  std::string line;
  double s_in_sum = 0.0, s_out_sum = 0.0;
  std::int64_t s_count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      ++summary.corrupt_lines;
      continue;
    }
    ++summary.records;
    if (rec.value("verdict", std::string{}) == "accept") ++summary.accepted;
    if (rec.contains("S_in_db")) {
      s_in_sum += rec["S_in_db"].get<double>();
      s_out_sum += rec["S_out_db"].get<double>();
      ++s_count;
    }
  }
  if (summary.records > 0) {
    summary.accept_rate = double(summary.accepted) / double(summary.records);
    std::tie(summary.ci_low, summary.ci_high) = stats::wilson_interval(
        summary.accepted, summary.records, 1.959963984540054);
  }
  if (s_count > 0) {
    summary.has_squeezing = true;
    summary.mean_s_in_db = s_in_sum / s_count;
    summary.mean_s_out_db = s_out_sum / s_count;
  }
  return summary;
}

std::string ReportSummary::to_text() const {
  std::ostringstream os;
  os << "records: " << records << " (corrupt lines skipped: " << corrupt_lines
     << ")\n";
  if (records > 0)
    os << "accept rate: " << accept_rate << "  [Wilson 95% CI " << ci_low
       << ", " << ci_high << "]\n";
  if (has_squeezing)
    os << "mean squeezing: S_in " << mean_s_in_db << " dB, S_out "
       << mean_s_out_db << " dB\n";
  return os.str();
}

std::string ReportSummary::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "records,corrupt,accepted,rate,ci_low,ci_high";
  if (has_squeezing) os << ",mean_s_in_db,mean_s_out_db";
  os << '\n'
     << records << ',' << corrupt_lines << ',' << accepted << ',' << accept_rate
     << ',' << ci_low << ',' << ci_high;
  if (has_squeezing) os << ',' << mean_s_in_db << ',' << mean_s_out_db;
  os << '\n';
  return os.str();
}

}  // namespace qtoken::harness
