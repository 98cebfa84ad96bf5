#pragma once

// Device description files (JSON). Frequencies are given as f = omega / 2pi
// in Hz and converted to rad/s on load.
//
// {
//   "target": {
//     "fsr_hz": 25.0e9,           required, > 0
//     "d2_hz": 26.5e3,
//     "d3_hz": 0.0,               optional
//     "kappa_hz": 12.1e6,         loaded linewidth, required, > 0
//     "f0_hz": 194.3e12           optional absolute frequency of k = 0
//   },
//   "crossings": [                optional
//     { "g_hz": 40e6, "kappa_c_hz": 20e6, "fsr_hz": 25.1e9, "k0": -24.0 }
//   ],
//   "eta_e": { "default": 0.9, "modes": { "-24": 0.8 } },         optional
//   "mode_offsets_hz": { "-24": 3.0e7 }                           optional
// }

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qmc/mode_spectrum.hpp"

namespace qmc {

DeviceModel device_from_json(const nlohmann::json& j);
nlohmann::json device_to_json(const DeviceModel& dev);

DeviceModel load_device(const std::filesystem::path& path);

}  // namespace qmc
