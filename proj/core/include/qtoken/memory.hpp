#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtoken/bloch.hpp"
#include "qtoken/channel.hpp"
#include "qtoken/rng.hpp"

namespace qtoken {

/// Single-shot readout statistics: either direct flip fidelities
/// (F_bright for bit 1, F_dark for bit 0) or Poisson photon counting with
/// bright/dark means and a count threshold.
struct ReadoutModel {
  enum class Kind { flip, poisson };

  Kind kind = Kind::flip;
  double f_bright = 1.0;
  double f_dark = 1.0;
  double n_bright = 0.0;
  double n_dark = 0.0;
  int threshold = 0;

  static ReadoutModel perfect() { return flip(1.0, 1.0); }
  static ReadoutModel flip(double f_bright, double f_dark);
  static ReadoutModel poisson(double n_bright, double n_dark, int threshold);

  /// P[observed = 1 | true bit], marginalized over the count draw for the
  /// Poisson model.
  double prob_observe_one(int true_bit) const;

  nlohmann::json to_json() const;
  static ReadoutModel from_json(const nlohmann::json& j);
};

int single_shot_readout(int true_bit, const ReadoutModel& model, Rng& rng);

enum class Multiplexing { TDM, FDM, mixed };
std::string to_string(Multiplexing m);
Multiplexing multiplexing_from_string(const std::string& s);

/// Phenomenological memory description. t2 <= 2*t1 enforced at
/// construction.
struct MemorySpec {
  std::string label;
  double t1_s = 1.0;
  double t2_s = 1.0;
  double eta_write = 1.0;
  double eta_read = 1.0;
  int modes = 1;
  Multiplexing multiplexing = Multiplexing::TDM;
  ReadoutModel readout = ReadoutModel::perfect();
  double crosstalk = 0.0;  // optional nearest-neighbor write crosstalk
  std::string note;

  MemorySpec() = default;
  MemorySpec(std::string label, double t1_s, double t2_s, double eta_write,
             double eta_read, int modes, Multiplexing mux,
             ReadoutModel readout, double crosstalk = 0.0,
             std::string note = {});

  static MemorySpec perfect(int modes);

  nlohmann::json to_json() const;
  static MemorySpec from_json(const nlohmann::json& j);
};

/// Decoherence over a hold time compiled to a fixed channel order:
/// amplitude damping, then pure dephasing, then erasure. The dephasing
/// parameter is chosen so the total off-diagonal decay equals
/// exp(-t/t2).
struct StorageChannel {
  NoiseChannel damping;
  NoiseChannel dephasing;
  double survival = 1.0;  // eta_write * eta_read

  /// Decoherence part only (the erasure leg is a heralded event).
  void apply_decoherence(BlochQubit& q) const;
  bool survives(Rng& rng) const;
};

StorageChannel storage_channel(const MemorySpec& spec, double duration_s);

/// Multiplexed memory instance: one slot per mode, single payload each.
/// Writes succeed with probability eta_write (heralded); reads with
/// eta_read, a failed read yields an erasure marker, never a wrong state.
class Memory {
 public:
  explicit Memory(MemorySpec spec);

  const MemorySpec& spec() const { return spec_; }

  /// Herald flag; on false the slot stays empty.
  bool write(int mode_index, const BlochQubit& state, double now_s, Rng& rng);

  struct ReadResult {
    std::optional<BlochQubit> state;  // empty = erasure
  };

  /// Applies the decoherence accumulated since the write. Reading an
  /// unwritten mode is an error; a read consumes the slot.
  ReadResult read(int mode_index, double now_s, Rng& rng);

  bool occupied(int mode_index) const;

 private:
  struct Slot {
    bool occupied = false;
    double written_at_s = 0.0;
    BlochQubit payload;
  };

  MemorySpec spec_;
  std::vector<Slot> slots_;
};

/// retrieved / issued.
double write_read_efficiency(std::int64_t issued, std::int64_t retrieved);

/// F_P = 3/(4 pi^2) * Q/V * lambda^3 (V in units of lambda^3 when lambda=1).
double purcell_factor(double quality, double mode_volume, double lambda);

/// C = F_P * gamma0 / (2 gamma).
double cooperativity(double purcell, double gamma0, double gamma);

/// Built-in memory preset catalog (JSON text with per-entry notes) and its
/// parsed form. Entries quote platform coherence figures verbatim; the
/// conditions behind them are heterogeneous and recorded in each note.
const std::string& memory_preset_catalog_text();
std::vector<MemorySpec> load_memory_presets(const nlohmann::json& catalog);
std::vector<MemorySpec> builtin_memory_presets();
MemorySpec find_preset(const std::string& label);

}  // namespace qtoken
