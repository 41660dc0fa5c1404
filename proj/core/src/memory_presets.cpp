#include "qtoken/memory.hpp"

#include <stdexcept>

namespace qtoken {

namespace {

// Coherence figures are recorded verbatim from heterogeneous platform
// reports (electron vs. nuclear spin, with or without dynamical
// decoupling); the conditions live in each entry's note rather than being
// harmonized. t1 is not quoted alongside most of these figures, so the
// catalog assumes t1 = t2 (the t2 <= 2*t1 bound is then tight within 2x).
const char kCatalogText[] = R"json({
  "catalog": "qtoken-memory-presets",
  "entries": [
    {
      "label": "eu_yso_nuclear",
      "t1_s": 64800.0,
      "t2_s": 64800.0,
      "eta_write": 0.5,
      "eta_read": 0.5,
      "modes": 64,
      "multiplexing": "mixed",
      "readout": {"kind": "flip", "f_bright": 0.99, "f_dark": 0.99},
      "note": "Eu:YSO hyperfine, 18 h coherence at ZEFOZ field with dynamical decoupling; efficiencies are placeholder defaults"
    },
    {
      "label": "si_p_donor",
      "t1_s": 2.0,
      "t2_s": 2.0,
      "eta_write": 0.6,
      "eta_read": 0.6,
      "modes": 8,
      "multiplexing": "TDM",
      "readout": {"kind": "flip", "f_bright": 0.98, "f_dark": 0.98},
      "note": "P donors in silicon, second-scale coherence; narrowband, TDM only"
    },
    {
      "label": "siv_electron",
      "t1_s": 0.000273,
      "t2_s": 0.000273,
      "eta_write": 0.8,
      "eta_read": 0.8,
      "modes": 4,
      "multiplexing": "TDM",
      "readout": {"kind": "poisson", "n_bright": 32.0, "n_dark": 10.0, "threshold": 19},
      "note": "SiV electron spin, 273 us with dynamical decoupling at 4 K; single-shot readout from bright/dark photon statistics"
    },
    {
      "label": "snv_c13_nuclear",
      "t1_s": 0.017,
      "t2_s": 0.017,
      "eta_write": 0.7,
      "eta_read": 0.7,
      "modes": 16,
      "multiplexing": "TDM",
      "readout": {"kind": "flip", "f_bright": 0.935, "f_dark": 0.824},
      "note": "13C nuclear spin near a SnV, storage exceeding 17 ms after heralded write"
    }
  ]
})json";

}  // namespace

const std::string& memory_preset_catalog_text() {
  static const std::string text = kCatalogText;
  return text;
}

std::vector<MemorySpec> load_memory_presets(const nlohmann::json& catalog) {
  std::vector<MemorySpec> out;
  for (const auto& entry : catalog.at("entries"))
    out.push_back(MemorySpec::from_json(entry));
  return out;
}

std::vector<MemorySpec> builtin_memory_presets() {
  return load_memory_presets(nlohmann::json::parse(memory_preset_catalog_text()));
}

MemorySpec find_preset(const std::string& label) {
  for (const auto& spec : builtin_memory_presets())
    if (spec.label == label) return spec;
  throw std::invalid_argument("unknown memory preset: " + label);
}

}  // namespace qtoken
