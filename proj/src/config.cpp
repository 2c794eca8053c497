#include "dtvoi/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace dtvoi {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

Vec4 parse_vec4(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  Vec4 v;
  std::string tok;
  int i = 0;
  while (in >> tok) {
    if (i == kFeatures) throw ConfigError(key + ": expected 4 numbers, got more");
    v(i++) = parse_double(key, tok);
  }
  if (i != kFeatures) throw ConfigError(key + ": expected 4 numbers, got " + std::to_string(i));
  return v;
}

std::string format_vec4(const Vec4& v) {
  std::string out;
  for (int i = 0; i < kFeatures; ++i) out += (i ? " " : "") + format_double(v(i));
  return out;
}

struct Key {
  std::string section;
  std::string name;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, const std::string& full, const std::string&)> set;
};

Key real(std::string section, std::string name, double SimConfig::*field) {
  return {std::move(section), std::move(name),
          [field](const SimConfig& c) { return format_double(c.*field); },
          [field](SimConfig& c, const std::string& k, const std::string& v) {
            c.*field = parse_double(k, v);
          }};
}

Key real_ref(std::string section, std::string name, std::function<double&(SimConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const SimConfig& c) { return format_double(ref(const_cast<SimConfig&>(c))); },
          [ref](SimConfig& c, const std::string& k, const std::string& v) {
            ref(c) = parse_double(k, v);
          }};
}

Key integer(std::string section, std::string name, std::function<int&(SimConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const SimConfig& c) { return std::to_string(ref(const_cast<SimConfig&>(c))); },
          [ref](SimConfig& c, const std::string& k, const std::string& v) {
            ref(c) = parse_int<int>(k, v);
          }};
}

Key boolean(std::string section, std::string name, std::function<bool&(SimConfig&)> ref) {
  return {std::move(section), std::move(name),
          [ref](const SimConfig& c) { return ref(const_cast<SimConfig&>(c)) ? "true" : "false"; },
          [ref](SimConfig& c, const std::string& k, const std::string& v) {
            ref(c) = parse_bool(k, v);
          }};
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    // [dynamics]
    k.push_back(real_ref("dynamics", "mass", [](SimConfig& c) -> double& { return c.dynamics.force.mass; }));
    k.push_back(real_ref("dynamics", "amp_x", [](SimConfig& c) -> double& { return c.dynamics.force.amp.x(); }));
    k.push_back(real_ref("dynamics", "amp_y", [](SimConfig& c) -> double& { return c.dynamics.force.amp.y(); }));
    k.push_back(real_ref("dynamics", "freq_x", [](SimConfig& c) -> double& { return c.dynamics.force.freq.x(); }));
    k.push_back(real_ref("dynamics", "freq_y", [](SimConfig& c) -> double& { return c.dynamics.force.freq.y(); }));
    k.push_back(real_ref("dynamics", "restore_gain", [](SimConfig& c) -> double& { return c.dynamics.force.restore_gain; }));
    k.push_back(real_ref("dynamics", "center_x", [](SimConfig& c) -> double& { return c.dynamics.force.center.x(); }));
    k.push_back(real_ref("dynamics", "center_y", [](SimConfig& c) -> double& { return c.dynamics.force.center.y(); }));
    k.push_back(real_ref("dynamics", "region_radius", [](SimConfig& c) -> double& { return c.dynamics.force.region_radius; }));
    k.push_back(real_ref("dynamics", "step", [](SimConfig& c) -> double& { return c.dynamics.step; }));
    k.push_back(real_ref("dynamics", "sigma_sq_pos", [](SimConfig& c) -> double& { return c.dynamics.sigma_sq_pos; }));
    k.push_back(real_ref("dynamics", "sigma_sq_vel", [](SimConfig& c) -> double& { return c.dynamics.sigma_sq_vel; }));
    k.push_back(boolean("dynamics", "known_input", [](SimConfig& c) -> bool& { return c.dynamics.known_input; }));
    k.push_back({"dynamics", "init_mean",
                 [](const SimConfig& c) { return format_vec4(c.dynamics.init_mean); },
                 [](SimConfig& c, const std::string& key, const std::string& v) {
                   c.dynamics.init_mean = parse_vec4(key, v);
                 }});
    k.push_back({"dynamics", "init_cov_diag",
                 [](const SimConfig& c) { return format_vec4(c.dynamics.init_cov_diag); },
                 [](SimConfig& c, const std::string& key, const std::string& v) {
                   c.dynamics.init_cov_diag = parse_vec4(key, v);
                 }});
    // [fleet]
    k.push_back(integer("fleet", "m_pos", [](SimConfig& c) -> int& { return c.fleet.m_pos; }));
    k.push_back(integer("fleet", "m_vel", [](SimConfig& c) -> int& { return c.fleet.m_vel; }));
    k.push_back(real_ref("fleet", "pos_var_min", [](SimConfig& c) -> double& { return c.fleet.pos_var.lo; }));
    k.push_back(real_ref("fleet", "pos_var_max", [](SimConfig& c) -> double& { return c.fleet.pos_var.hi; }));
    k.push_back(real_ref("fleet", "vel_var_min", [](SimConfig& c) -> double& { return c.fleet.vel_var.lo; }));
    k.push_back(real_ref("fleet", "vel_var_max", [](SimConfig& c) -> double& { return c.fleet.vel_var.hi; }));
    k.push_back({"fleet", "agents_file",
                 [](const SimConfig& c) { return c.agents_file.string(); },
                 [](SimConfig& c, const std::string&, const std::string& v) { c.agents_file = v; }});
    // [link]
    k.push_back(real("link", "carrier_hz", &SimConfig::carrier_hz));
    k.push_back(real("link", "bandwidth_hz", &SimConfig::bandwidth_hz));
    k.push_back(real("link", "rate_threshold_bps", &SimConfig::rate_threshold_bps));
    k.push_back(real("link", "noise_power_dbm", &SimConfig::noise_power_dbm));
    k.push_back(real("link", "rician_factor_db", &SimConfig::rician_factor_db));
    k.push_back(real("link", "outage_eps", &SimConfig::outage_eps));
    k.push_back(real("link", "mu0", &SimConfig::mu0));
    k.push_back(real("link", "path_loss_exp", &SimConfig::path_loss_exp));
    // [requirements]
    k.push_back(real("requirements", "xi_sq_pos", &SimConfig::xi_sq_pos));
    k.push_back(real("requirements", "xi_sq_vel", &SimConfig::xi_sq_vel));
    // [scheduler]
    k.push_back(integer("scheduler", "slots", [](SimConfig& c) -> int& { return c.slots; }));
    k.push_back(real("scheduler", "d_max", &SimConfig::d_max));
    k.push_back(real("scheduler", "alpha", &SimConfig::alpha));
    k.push_back(real("scheduler", "power_budget_w", &SimConfig::power_budget_w));
    k.push_back(boolean("scheduler", "regularize", [](SimConfig& c) -> bool& { return c.regularize; }));
    // [harness]
    k.push_back(integer("harness", "qis", [](SimConfig& c) -> int& { return c.qis; }));
    k.push_back(integer("harness", "runs", [](SimConfig& c) -> int& { return c.runs; }));
    k.push_back({"harness", "seed", [](const SimConfig& c) { return std::to_string(c.seed); },
                 [](SimConfig& c, const std::string& key, const std::string& v) {
                   c.seed = parse_int<std::uint64_t>(key, v);
                 }});
    k.push_back({"harness", "policies",
                 [](const SimConfig& c) { return policy_list_string(c.policies); },
                 [](SimConfig& c, const std::string&, const std::string& v) {
                   c.policies = parse_policy_list(v);
                 }});
    k.push_back(integer("harness", "threads", [](SimConfig& c) -> int& { return c.threads; }));
    return k;
  }();
  return keys;
}

const Key& find_key(const std::string& full) {
  for (const auto& k : registry()) {
    if (k.section + "." + k.name == full) return k;
  }
  throw ConfigError("unknown config key '" + full + "'");
}

}  // namespace

LinkParams SimConfig::link() const {
  LinkParams lp;
  lp.carrier_hz = carrier_hz;
  lp.bandwidth = bandwidth_hz;
  lp.noise_power = dbm_to_watts(noise_power_dbm);
  lp.rician_g = db_to_linear(rician_factor_db);
  lp.mu0 = mu0;
  lp.path_loss_exp = path_loss_exp;
  lp.rate_threshold = rate_threshold_bps;
  lp.outage_eps = outage_eps;
  return lp;
}

Requirements SimConfig::requirements() const { return Requirements::pos_vel(xi_sq_pos, xi_sq_vel); }

SchedulerParams SimConfig::scheduler() const {
  SchedulerParams p;
  p.slots = slots;
  p.power_budget = power_budget_w;
  p.filter.regularize = regularize;
  return p;
}

void SimConfig::validate() const {
  dynamics.validate();
  if (agents_file.empty()) fleet.validate();
  link().validate();
  requirements().validate();
  if (slots < 0) throw ConfigError("scheduler.slots must be >= 0");
  if (!(d_max >= 0.0)) throw ConfigError("scheduler.d_max must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("scheduler.alpha must be in [0, 1]");
  if (!(power_budget_w > 0.0)) throw ConfigError("scheduler.power_budget_w must be > 0");
  if (qis < 1) throw ConfigError("harness.qis must be >= 1");
  if (runs < 1) throw ConfigError("harness.runs must be >= 1");
  if (policies.empty()) throw ConfigError("harness.policies must name at least one policy");
  if (threads < 0) throw ConfigError("harness.threads must be >= 0");
}

void apply_overrides(SimConfig& cfg, const std::map<std::string, std::string>& assignments) {
  for (const auto& [full, value] : assignments) find_key(full).set(cfg, full, value);
}

SimConfig parse_config(std::istream& in, const std::string& origin) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  SimConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(origin + ": key '" + section + "' must live inside a [section]");
    }
    for (const auto& [name, leaf] : body) {
      const std::string full = section + "." + name;
      try {
        find_key(full).set(cfg, full, leaf.get_value<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

std::string resolved_config(const SimConfig& cfg) {
  std::ostringstream out;
  std::string current;
  for (const auto& k : registry()) {
    if (k.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << k.section << "]\n";
      current = k.section;
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

std::string policy_list_string(const std::vector<PolicyKind>& policies) {
  std::string out;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (i) out += ',';
    out += to_string(policies[i]);
  }
  return out;
}

std::vector<PolicyKind> parse_policy_list(const std::string& text) {
  if (text == "all") return {kAllPolicies.begin(), kAllPolicies.end()};
  std::vector<PolicyKind> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto p = policy_from_string(tok.substr(b, e - b + 1));
    if (std::find(out.begin(), out.end(), p) != out.end()) {
      throw ConfigError("policy '" + std::string(to_string(p)) + "' listed twice");
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace dtvoi
