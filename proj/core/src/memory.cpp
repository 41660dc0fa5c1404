#include "qtoken/memory.hpp"

#include <cmath>
#include <stdexcept>

#include "qtoken/stats.hpp"

namespace qtoken {

ReadoutModel ReadoutModel::flip(double f_bright, double f_dark) {
  if (f_bright < 0.0 || f_bright > 1.0 || f_dark < 0.0 || f_dark > 1.0)
    throw std::invalid_argument("ReadoutModel: fidelities must be in [0,1]");
  ReadoutModel m;
  m.kind = Kind::flip;
  m.f_bright = f_bright;
  m.f_dark = f_dark;
  return m;
}

ReadoutModel ReadoutModel::poisson(double n_bright, double n_dark,
                                   int threshold) {
  if (n_bright <= 0.0 || n_dark <= 0.0)
    throw std::invalid_argument("ReadoutModel: Poisson means must be > 0");
  if (threshold < 0)
    throw std::invalid_argument("ReadoutModel: threshold must be >= 0");
  ReadoutModel m;
  m.kind = Kind::poisson;
  m.n_bright = n_bright;
  m.n_dark = n_dark;
  m.threshold = threshold;
  return m;
}

double ReadoutModel::prob_observe_one(int true_bit) const {
  if (kind == Kind::flip)
    return true_bit == 1 ? f_bright : 1.0 - f_dark;
  const double mean = true_bit == 1 ? n_bright : n_dark;
  return stats::poisson_tail(mean, threshold);
}

int single_shot_readout(int true_bit, const ReadoutModel& model, Rng& rng) {
  if (model.kind == ReadoutModel::Kind::flip) {
    const double correct = true_bit == 1 ? model.f_bright : model.f_dark;
    return rng.bernoulli(correct) ? true_bit : 1 - true_bit;
  }
  const double mean = true_bit == 1 ? model.n_bright : model.n_dark;
  return rng.poisson(mean) >= model.threshold ? 1 : 0;
}

nlohmann::json ReadoutModel::to_json() const {
  if (kind == Kind::flip)
    return {{"kind", "flip"}, {"f_bright", f_bright}, {"f_dark", f_dark}};
  return {{"kind", "poisson"},
          {"n_bright", n_bright},
          {"n_dark", n_dark},
          {"threshold", threshold}};
}

ReadoutModel ReadoutModel::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "flip")
    return flip(j.at("f_bright").get<double>(), j.at("f_dark").get<double>());
  if (kind == "poisson")
    return poisson(j.at("n_bright").get<double>(), j.at("n_dark").get<double>(),
                   j.at("threshold").get<int>());
  throw std::invalid_argument("ReadoutModel: unknown kind " + kind);
}

std::string to_string(Multiplexing m) {
  switch (m) {
    case Multiplexing::TDM: return "TDM";
    case Multiplexing::FDM: return "FDM";
    case Multiplexing::mixed: return "mixed";
  }
  return "TDM";
}

Multiplexing multiplexing_from_string(const std::string& s) {
  if (s == "TDM") return Multiplexing::TDM;
  if (s == "FDM") return Multiplexing::FDM;
  if (s == "mixed") return Multiplexing::mixed;
  throw std::invalid_argument("unknown multiplexing: " + s);
}

MemorySpec::MemorySpec(std::string label_in, double t1, double t2, double ew,
                       double er, int modes_in, Multiplexing mux,
                       ReadoutModel readout_in, double crosstalk_in,
                       std::string note_in)
    : label(std::move(label_in)),
      t1_s(t1),
      t2_s(t2),
      eta_write(ew),
      eta_read(er),
      modes(modes_in),
      multiplexing(mux),
      readout(readout_in),
      crosstalk(crosstalk_in),
      note(std::move(note_in)) {
  if (t1_s <= 0.0 || t2_s <= 0.0)
    throw std::invalid_argument("MemorySpec: t1, t2 must be > 0");
  if (t2_s > 2.0 * t1_s + 1e-15)
    throw std::invalid_argument("MemorySpec: t2 <= 2*t1 required");
  if (eta_write < 0.0 || eta_write > 1.0 || eta_read < 0.0 || eta_read > 1.0)
    throw std::invalid_argument("MemorySpec: efficiencies must be in [0,1]");
  if (modes < 1) throw std::invalid_argument("MemorySpec: modes must be >= 1");
  if (crosstalk < 0.0 || crosstalk > 1.0)
    throw std::invalid_argument("MemorySpec: crosstalk must be in [0,1]");
}

MemorySpec MemorySpec::perfect(int modes) {
  return MemorySpec("perfect", 1e18, 1e18, 1.0, 1.0, modes, Multiplexing::TDM,
                    ReadoutModel::perfect());
}

nlohmann::json MemorySpec::to_json() const {
  nlohmann::json j{{"label", label},
                   {"t1_s", t1_s},
                   {"t2_s", t2_s},
                   {"eta_write", eta_write},
                   {"eta_read", eta_read},
                   {"modes", modes},
                   {"multiplexing", to_string(multiplexing)},
                   {"readout", readout.to_json()}};
  if (crosstalk != 0.0) j["crosstalk"] = crosstalk;
  if (!note.empty()) j["note"] = note;
  return j;
}

MemorySpec MemorySpec::from_json(const nlohmann::json& j) {
  return MemorySpec(
      j.at("label").get<std::string>(), j.at("t1_s").get<double>(),
      j.at("t2_s").get<double>(), j.at("eta_write").get<double>(),
      j.at("eta_read").get<double>(), j.at("modes").get<int>(),
      multiplexing_from_string(j.at("multiplexing").get<std::string>()),
      ReadoutModel::from_json(j.at("readout")), j.value("crosstalk", 0.0),
      j.value("note", std::string{}));
}

StorageChannel storage_channel(const MemorySpec& spec, double duration_s) {
  if (duration_s < 0.0)
    throw std::invalid_argument("storage_channel: duration must be >= 0");
  const double gamma = 1.0 - std::exp(-duration_s / spec.t1_s);
  // Amplitude damping already decays off-diagonals by exp(-t/(2 t1)); the
  // pure-dephasing leg supplies the remainder of exp(-t/t2).
  const double coherence =
      std::exp(-duration_s / spec.t2_s + duration_s / (2.0 * spec.t1_s));
  StorageChannel ch;
  ch.damping = NoiseChannel::amplitude_damping(std::clamp(gamma, 0.0, 1.0));
  ch.dephasing = NoiseChannel::dephasing(std::clamp(1.0 - coherence, 0.0, 1.0));
  ch.survival = spec.eta_write * spec.eta_read;
  return ch;
}

void StorageChannel::apply_decoherence(BlochQubit& q) const {
  q.apply(damping);
  q.apply(dephasing);
}

bool StorageChannel::survives(Rng& rng) const { return rng.bernoulli(survival); }

Memory::Memory(MemorySpec spec) : spec_(std::move(spec)), slots_(spec_.modes) {}

bool Memory::write(int mode_index, const BlochQubit& state, double now_s,
                   Rng& rng) {
  if (mode_index < 0 || mode_index >= spec_.modes)
    throw std::out_of_range("Memory::write: mode index out of range");
  Slot& slot = slots_[mode_index];
  if (slot.occupied)
    throw std::logic_error("Memory::write: double write to occupied mode");
  if (!rng.bernoulli(spec_.eta_write)) return false;
  slot.occupied = true;
  slot.written_at_s = now_s;
  slot.payload = state;
  // Optional nearest-neighbor crosstalk: a successful write dephases
  // occupied adjacent slots with the configured probability.
  if (spec_.crosstalk > 0.0) {
    for (int nb : {mode_index - 1, mode_index + 1}) {
      if (nb < 0 || nb >= spec_.modes || !slots_[nb].occupied) continue;
      if (rng.bernoulli(spec_.crosstalk))
        slots_[nb].payload.apply(NoiseChannel::dephasing(1.0));
    }
  }
  return true;
}

Memory::ReadResult Memory::read(int mode_index, double now_s, Rng& rng) {
  if (mode_index < 0 || mode_index >= spec_.modes)
    throw std::out_of_range("Memory::read: mode index out of range");
  Slot& slot = slots_[mode_index];
  if (!slot.occupied)
    throw std::logic_error("Memory::read: mode was never written");
  slot.occupied = false;
  if (!rng.bernoulli(spec_.eta_read)) return {};
  const double held = std::max(0.0, now_s - slot.written_at_s);
  BlochQubit out = slot.payload;
  storage_channel(spec_, held).apply_decoherence(out);
  return {out};
}

bool Memory::occupied(int mode_index) const {
  if (mode_index < 0 || mode_index >= spec_.modes)
    throw std::out_of_range("Memory::occupied: mode index out of range");
  return slots_[mode_index].occupied;
}

double write_read_efficiency(std::int64_t issued, std::int64_t retrieved) {
  if (issued <= 0)
    throw std::invalid_argument("write_read_efficiency: issued must be > 0");
  if (retrieved < 0 || retrieved > issued)
    throw std::invalid_argument(
        "write_read_efficiency: retrieved must be in [0, issued]");
  return static_cast<double>(retrieved) / static_cast<double>(issued);
}

double purcell_factor(double quality, double mode_volume, double lambda) {
  if (quality <= 0.0 || mode_volume <= 0.0 || lambda <= 0.0)
    throw std::invalid_argument("purcell_factor: inputs must be > 0");
  constexpr double kPi = 3.14159265358979323846;
  return 3.0 / (4.0 * kPi * kPi) * quality / mode_volume * lambda * lambda *
         lambda;
}

double cooperativity(double purcell, double gamma0, double gamma) {
  if (gamma0 <= 0.0 || gamma <= 0.0)
    throw std::invalid_argument("cooperativity: rates must be > 0");
  return purcell * gamma0 / (2.0 * gamma);
}

}  // namespace qtoken
