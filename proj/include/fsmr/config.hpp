#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fsmr/block_solver.hpp"
#include "fsmr/errors.hpp"

namespace fsmr {

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw contract_error("fsmr config: value of '" + key + "' is not a number: " + text);
  return v;
}

inline int parse_integer(const std::string& key, double v) {
  if (v != static_cast<double>(static_cast<int>(v)))
    throw contract_error("fsmr config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

inline void set_param(FsmrParams& p, const std::string& key, double v) {
  if (key == "block_size") p.block_size = parse_integer(key, v);
  else if (key == "margin") p.margin = parse_integer(key, v);
  else if (key == "max_iterations") p.max_iterations = parse_integer(key, v);
  else if (key == "energy_epsilon") p.energy_epsilon = v;
  else if (key == "gamma") p.gamma = v;
  else if (key == "rho_spatial") p.rho_spatial = v;
  else if (key == "rho_freq") p.rho_freq = v;
  else throw contract_error("fsmr config: unknown key '" + key + "'");
}

}  // namespace detail

// Overrides fields of `params` from a JSON object or `key = value` lines
// (`#` starts a comment). Keys: block_size, margin, max_iterations,
// energy_epsilon, gamma, rho_spatial, rho_freq.
inline FsmrParams apply_fsmr_config(FsmrParams params, std::string_view text) {
  const std::string body = detail::trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw contract_error(std::string("fsmr config: invalid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (!value.is_number()) throw contract_error("fsmr config: '" + key + "' must be a number");
      detail::set_param(params, key, value.get<double>());
    }
  } else {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw contract_error("fsmr config: expected key=value: " + line);
      const std::string key = detail::trim(std::string_view(line).substr(0, eq));
      const std::string val = detail::trim(std::string_view(line).substr(eq + 1));
      detail::set_param(params, key, detail::parse_number(key, val));
    }
  }
  params.validate();
  return params;
}

inline FsmrParams load_fsmr_config(const std::filesystem::path& path, FsmrParams base = {}) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open fsmr config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return apply_fsmr_config(base, ss.str());
}

}  // namespace fsmr
