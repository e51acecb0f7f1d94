#include "psectd/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "psectd/errors.hpp"

namespace psectd {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::DataEfficiency: return "data-efficiency";
    case ExperimentKind::CeeConvergence: return "cee-convergence";
    case ExperimentKind::StochasticitySweep: return "stochasticity-sweep";
    case ExperimentKind::OffPolicy: return "off-policy";
    case ExperimentKind::LstdCompare: return "lstd-compare";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& value, int line_no) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw ConfigError("line " + std::to_string(line_no) + ": expected a [list]");
  }
  std::vector<std::string> out;
  std::string inner = value.substr(1, value.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& value, int line_no) {
  std::size_t pos = 0;
  double d;
  try {
    d = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + value + "'");
  }
  return d;
}

long parse_long(const std::string& value, int line_no) {
  std::size_t pos = 0;
  long v;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad integer '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad integer '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& value, int line_no) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("line " + std::to_string(line_no) + ": expected true/false, got '" +
                    value + "'");
}

ExperimentKind parse_kind(const std::string& value, int line_no) {
  for (ExperimentKind k :
       {ExperimentKind::DataEfficiency, ExperimentKind::CeeConvergence,
        ExperimentKind::StochasticitySweep, ExperimentKind::OffPolicy,
        ExperimentKind::LstdCompare}) {
    if (value == to_string(k)) return k;
  }
  throw ConfigError("line " + std::to_string(line_no) + ": unknown kind '" + value + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig cfg;
  bool saw_kind = false;
  bool saw_algorithms = false;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "kind") {
      cfg.kind = parse_kind(value, line_no);
      saw_kind = true;
    } else if (key == "slip_p") {
      cfg.slip_p = parse_double(value, line_no);
    } else if (key == "discount") {
      cfg.discount = parse_double(value, line_no);
    } else if (key == "max_steps") {
      cfg.max_steps = static_cast<int>(parse_long(value, line_no));
    } else if (key == "policy_mode") {
      if (value != "on-policy" && value != "off-policy") {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": policy_mode must be on-policy or off-policy");
      }
      cfg.policy_mode = value;
    } else if (key == "policy_seed") {
      cfg.policy_seed = static_cast<std::uint64_t>(parse_long(value, line_no));
    } else if (key == "batch_sizes") {
      cfg.batch_sizes.clear();
      for (const auto& item : split_list(value, line_no)) {
        cfg.batch_sizes.push_back(static_cast<int>(parse_long(item, line_no)));
      }
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_long(value, line_no));
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(parse_long(value, line_no));
    } else if (key == "algorithms") {
      cfg.algorithms = split_list(value, line_no);
      saw_algorithms = true;
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, line_no);
    } else if (key == "delta") {
      cfg.delta = parse_double(value, line_no);
    } else if (key == "max_presentations") {
      cfg.max_presentations = parse_long(value, line_no);
    } else if (key == "alpha_grid") {
      cfg.alpha_grid.clear();
      for (const auto& item : split_list(value, line_no)) {
        cfg.alpha_grid.push_back(parse_double(item, line_no));
      }
    } else if (key == "lstd_epsilon") {
      cfg.lstd_epsilon = parse_double(value, line_no);
    } else if (key == "lstd_weight_reward") {
      cfg.lstd_weight_reward = parse_bool(value, line_no);
    } else if (key == "lstd_placement") {
      if (value != "update" && value != "target") {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": lstd_placement must be update or target");
      }
      cfg.lstd_placement = value;
    } else if (key == "epsilon_grid") {
      cfg.epsilon_grid.clear();
      for (const auto& item : split_list(value, line_no)) {
        cfg.epsilon_grid.push_back(parse_double(item, line_no));
      }
    } else if (key == "slip_grid") {
      cfg.slip_grid.clear();
      for (const auto& item : split_list(value, line_no)) {
        cfg.slip_grid.push_back(parse_double(item, line_no));
      }
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (!saw_kind) throw ConfigError("config is missing 'kind'");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.batch_sizes.empty()) throw ConfigError("batch_sizes must be non-empty");
  for (int b : cfg.batch_sizes) {
    if (b < 1) throw ConfigError("batch sizes must be >= 1");
  }
  if (cfg.kind == ExperimentKind::StochasticitySweep) {
    if (cfg.slip_grid.empty()) {
      throw ConfigError("stochasticity-sweep needs a non-empty slip_grid");
    }
    if (cfg.batch_sizes.size() != 1) {
      throw ConfigError("stochasticity-sweep uses one fixed batch size");
    }
  }
  if (cfg.kind == ExperimentKind::OffPolicy) cfg.policy_mode = "off-policy";
  if (!saw_algorithms) {
    switch (cfg.kind) {
      case ExperimentKind::DataEfficiency:
      case ExperimentKind::StochasticitySweep:
        cfg.algorithms = {"td", "psec-td", "psec-td-estimate"};
        break;
      case ExperimentKind::CeeConvergence:
        cfg.algorithms = {"psec-td", "psec-td-estimate"};
        break;
      case ExperimentKind::OffPolicy:
        cfg.algorithms = {"is-td", "psec-td"};
        break;
      case ExperimentKind::LstdCompare:
        cfg.algorithms = {"lstd", "psec-lstd"};
        break;
    }
  }
  if (cfg.algorithms.empty()) throw ConfigError("algorithms must be non-empty");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_experiment_config(is);
}

}  // namespace psectd
