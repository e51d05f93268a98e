#include "sublin/reports.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "sublin/errors.hpp"

namespace sublin {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

nlohmann::json parse_json_strict(const std::string& text) {
  // Track object nesting and reject duplicate keys via the SAX callback.
  std::vector<std::set<std::string>> stack;
  auto cb = [&stack](int /*depth*/, nlohmann::json::parse_event_t event,
                     nlohmann::json& parsed) -> bool {
    switch (event) {
      case nlohmann::json::parse_event_t::object_start:
        stack.emplace_back();
        break;
      case nlohmann::json::parse_event_t::object_end:
        stack.pop_back();
        break;
      case nlohmann::json::parse_event_t::key: {
        const std::string key = parsed.get<std::string>();
        if (!stack.back().insert(key).second) {
          throw Error("duplicate key '" + key + "' in config");
        }
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return nlohmann::json::parse(text, cb);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config parse error: ") + e.what());
  }
}

namespace {

const std::set<std::string> kCommonKeys = {"subcommand", "seed", "threads",
                                           "out", "tolerances"};

const std::map<std::string, std::set<std::string>>& subcommand_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"choquet", {"dist", "transform", "r", "tol", "t_cap"}},
      {"functionals", {"dist", "r"}},
      {"series",
       {"dist", "kind", "p", "delta", "r", "n_max", "integral_form"}},
      {"bound",
       {"dist", "type", "r", "p", "z", "k_max", "sigma_sq", "x", "y", "delta",
        "a_n", "b_n", "tail_max", "n", "integrate_z"}},
      {"dp",
       {"dist", "functional", "n", "r", "mode", "brute_check", "c_sum",
        "c_abs", "c_max"}},
      {"simulate",
       {"dist", "policy", "scale", "n", "replications", "r", "mode",
        "dump_paths"}},
      {"probe", {"dist", "r", "mode", "n_grid", "replications", "policy"}},
      {"ma-lil",
       {"dist", "coeffs", "n", "seeds", "window_lo", "bins", "convention",
        "cutoff_m", "policy"}},
      {"verify", {"checks", "scale"}},
  };
  return keys;
}

void require_keys_known(const nlohmann::json& doc, const std::string& sub) {
  const auto it = subcommand_keys().find(sub);
  if (it == subcommand_keys().end()) {
    throw Error("unknown subcommand '" + sub + "'");
  }
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!kCommonKeys.count(key) && !it->second.count(key)) {
      throw Error("unknown key '" + key + "' for subcommand '" + sub + "'");
    }
  }
}

void check_invariants(const std::string& sub, nlohmann::json& p) {
  auto num = [&p](const char* k, double dflt) {
    if (!p.contains(k)) p[k] = dflt;
    return p.at(k).get<double>();
  };
  if (sub == "bound") {
    const std::string type = p.value("type", "blocking");
    if (type == "blocking") {
      const double r = num("r", 1.0);
      const double pv = num("p", 3.0);
      if (!(pv > std::max(2.0, r))) {
        throw Error("bound requires p > 2\xE2\x88\xA8r, got p=" +
                    std::to_string(pv) + ", r=" + std::to_string(r));
      }
    }
  }
  if (sub == "series") {
    const std::string kind = p.value("kind", "truncated");
    if (kind == "truncated") {
      const double pp = num("p", 3.0);
      if (!(pp > 2.0)) throw Error("truncated series requires p > 2");
      num("delta", 1.0);
    } else if (kind == "excess") {
      const double r = num("r", 1.0);
      if (!(r > 0.0)) throw Error("excess series requires r > 0");
    } else {
      throw Error("series kind must be truncated|excess");
    }
  }
  if (sub == "dp" || sub == "simulate" || sub == "probe") {
    if (p.contains("r") && !(p.at("r").get<double>() > 0)) {
      throw Error("r must be > 0");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("config must be a JSON object");
  if (!doc.contains("subcommand")) throw Error("config needs 'subcommand'");
  ExperimentConfig cfg;
  cfg.subcommand = doc.at("subcommand").get<std::string>();
  require_keys_known(doc, cfg.subcommand);
  cfg.seed = doc.value("seed", std::uint64_t{0});
  cfg.threads = doc.value("threads", 4);
  if (cfg.threads < 1) throw Error("threads must be >= 1");
  cfg.out_dir = doc.value("out", "out");
  if (doc.contains("tolerances")) {
    for (const auto& [k, v] : doc.at("tolerances").items()) {
      cfg.tolerances[k] = v.get<double>();
    }
  }
  cfg.params = doc;
  for (const auto& k : kCommonKeys) cfg.params.erase(k);
  check_invariants(cfg.subcommand, cfg.params);
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json t(tolerances);
  nlohmann::json out = params;
  out["subcommand"] = subcommand;
  out["seed"] = seed;
  out["threads"] = threads;
  out["out"] = out_dir;
  out["tolerances"] = t;
  return out;
}

nlohmann::json RunReport::to_json() const {
  return nlohmann::json{{"schema_version", schema_version},
                        {"config", config.to_json()},
                        {"config_hash", config.hash()},
                        {"results", results},
                        {"wall_time_s", wall_time_s},
                        {"exit_code", exit_code}};
}

}  // namespace sublin
