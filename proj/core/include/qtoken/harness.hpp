#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtoken/channel.hpp"
#include "qtoken/memory.hpp"
#include "qtoken/rng.hpp"

namespace qtoken::harness {

using ordered_json = nlohmann::ordered_json;

/// Config parsing failures carry the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& pointer, const std::string& message)
      : std::runtime_error(pointer + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class Role { issuer, holder, verifier, adversary };
std::string to_string(Role r);

/// Protocol graph: issue -> transmit -> store -> challenge -> respond ->
/// verdict. "Flying" runs skip the store phase.
enum class Phase { issue, transmit, store, challenge, respond, verdict };
std::string to_string(Phase p);

/// Per-trial phase trace; advancing out of order is an internal bug and
/// throws.
class ProtocolTrace {
 public:
  void advance(Phase next);
  const std::vector<Phase>& phases() const { return phases_; }

 private:
  std::vector<Phase> phases_;
};

/// Transmission leg: per-element loss, a qubit noise channel, and a
/// declared logical latency.
struct ChannelSpec {
  double loss = 0.0;
  NoiseChannel noise = NoiseChannel::identity();
  double latency_s = 0.0;

  nlohmann::json to_json() const;
  static ChannelSpec from_json(const nlohmann::json& j);
};

enum class Family { dv, ensemble, cv, puf };
Family family_from_string(const std::string& s);
std::string to_string(Family f);

struct ExperimentConfig {
  Family family = Family::dv;
  nlohmann::json family_params;
  std::optional<MemorySpec> memory;
  ChannelSpec channel;
  std::int64_t trials = 1;
  std::uint64_t master_seed = 0;
  double hold_s = 0.0;
  bool stored_mode = false;   // false = flying token, no storage element
  bool remote = false;        // classical-message-only remote verification
  double expiry_factor = 3.0; // expiry = factor * t2
  nlohmann::json adversary;   // family-specific; {} or {"kind": "none"}

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  static ExperimentConfig from_json_impl(const nlohmann::json& j);
};

/// Runs every trial (trial-parallel, per-trial derived seeds) and returns
/// the records in trial order; identical configs give identical streams
/// regardless of thread count. cv-family runs emit one record per symbol
/// per trial.
std::vector<ordered_json> run_protocol(const ExperimentConfig& config,
                                       int threads = 1);

std::string records_to_jsonl(const std::vector<ordered_json>& records);

struct SweepRow {
  std::string value;
  std::int64_t trials = 0;
  std::int64_t accepted = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  std::vector<ordered_json> records;  // concatenated, tagged with the value

  std::string to_csv() const;
};

/// One run per value; `parameter_path` is dotted (e.g. "channel.loss").
SweepResult sweep(const ExperimentConfig& config,
                  const std::string& parameter_path,
                  const std::vector<nlohmann::json>& values, int threads = 1);

/// True when the hold time exceeds the configured expiry of the memory.
bool is_expired(const ExperimentConfig& config);

struct ReportSummary {
  std::int64_t records = 0;
  std::int64_t corrupt_lines = 0;
  std::int64_t accepted = 0;
  double accept_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool has_squeezing = false;
  double mean_s_in_db = 0.0;
  double mean_s_out_db = 0.0;

  std::string to_text() const;
  std::string to_csv() const;
};

ReportSummary summarize_jsonl(const std::string& jsonl_text);

}  // namespace qtoken::harness
