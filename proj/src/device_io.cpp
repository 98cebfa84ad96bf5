#include "qmc/device_io.hpp"

#include <fstream>
#include <stdexcept>

namespace qmc {

namespace {

double required(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number())
    throw std::invalid_argument("device file: " + where + "." + key + " missing or not a number");
  return obj.at(key).get<double>();
}

double optional_number(const nlohmann::json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw std::invalid_argument(std::string("device file: ") + key + " is not a number");
  return obj.at(key).get<double>();
}

std::map<int, double> mode_map(const nlohmann::json& obj, const std::string& where, double scale) {
  std::map<int, double> out;
  if (!obj.is_object()) throw std::invalid_argument("device file: " + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty())
      throw std::invalid_argument("device file: " + where + " key '" + key + "' is not a mode index");
    if (!value.is_number())
      throw std::invalid_argument("device file: " + where + "[" + key + "] is not a number");
    out[k] = scale * value.get<double>();
  }
  return out;
}

}  // namespace

DeviceModel device_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("target"))
    throw std::invalid_argument("device file: missing 'target' object");
  const auto& t = j.at("target");
  ModeFamily target;
  target.d1 = kTwoPi * required(t, "fsr_hz", "target");
  target.d2 = kTwoPi * optional_number(t, "d2_hz", 0.0);
  target.d3 = kTwoPi * optional_number(t, "d3_hz", 0.0);
  target.kappa = kTwoPi * required(t, "kappa_hz", "target");
  target.omega0 = kTwoPi * optional_number(t, "f0_hz", 0.0);

  std::vector<CrossingFamily> crossings;
  if (j.contains("crossings")) {
    if (!j.at("crossings").is_array())
      throw std::invalid_argument("device file: 'crossings' must be an array");
    std::size_t idx = 0;
    for (const auto& c : j.at("crossings")) {
      const std::string where = "crossings[" + std::to_string(idx++) + "]";
      CrossingFamily cf;
      cf.g_coupling = kTwoPi * required(c, "g_hz", where);
      cf.kappa_c = kTwoPi * required(c, "kappa_c_hz", where);
      cf.d1_c = kTwoPi * required(c, "fsr_hz", where);
      cf.k0 = required(c, "k0", where);
      crossings.push_back(cf);
    }
  }

  ExtractionTable eta{1.0};
  if (j.contains("eta_e")) {
    const auto& e = j.at("eta_e");
    if (e.is_number()) {
      eta = ExtractionTable(e.get<double>());
    } else {
      const double fallback = optional_number(e, "default", 1.0);
      std::map<int, double> modes;
      if (e.contains("modes")) modes = mode_map(e.at("modes"), "eta_e.modes", 1.0);
      eta = ExtractionTable(fallback, std::move(modes));
    }
  }

  std::map<int, double> offsets;
  if (j.contains("mode_offsets_hz")) offsets = mode_map(j.at("mode_offsets_hz"), "mode_offsets_hz", kTwoPi);

  return DeviceModel(target, std::move(crossings), std::move(eta), std::move(offsets));
}

nlohmann::json device_to_json(const DeviceModel& dev) {
  nlohmann::json j;
  const auto& t = dev.target();
  j["target"] = {{"fsr_hz", t.d1 / kTwoPi},
                 {"d2_hz", t.d2 / kTwoPi},
                 {"d3_hz", t.d3 / kTwoPi},
                 {"kappa_hz", t.kappa / kTwoPi},
                 {"f0_hz", t.omega0 / kTwoPi}};
  j["crossings"] = nlohmann::json::array();
  for (const auto& c : dev.crossings())
    j["crossings"].push_back({{"g_hz", c.g_coupling / kTwoPi},
                              {"kappa_c_hz", c.kappa_c / kTwoPi},
                              {"fsr_hz", c.d1_c / kTwoPi},
                              {"k0", c.k0}});
  nlohmann::json modes = nlohmann::json::object();
  for (const auto& [k, v] : dev.eta_e().entries()) modes[std::to_string(k)] = v;
  j["eta_e"] = {{"default", dev.eta_e().fallback()}, {"modes", modes}};
  nlohmann::json offsets = nlohmann::json::object();
  for (const auto& [k, v] : dev.mode_offsets()) offsets[std::to_string(k)] = v / kTwoPi;
  j["mode_offsets_hz"] = offsets;
  return j;
}

DeviceModel load_device(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open device file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("device file " + path.string() + ": " + e.what());
  }
  return device_from_json(j);
}

}  // namespace qmc
