#include "fluidlob/config_io.hpp"

#include <cmath>
#include <fstream>

#include "fluidlob/errors.hpp"

namespace fluidlob {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const json& field(const json& obj, const std::string& ptr, const char* key) {
  if (!obj.is_object()) throw ConfigError(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(ptr + "/" + key, "missing required key");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], ptr + "/" + std::to_string(k)));
  return out;
}

std::string kind_of(const json& j, const std::string& ptr) {
  const json& k = field(j, ptr, "kind");
  if (!k.is_string()) throw ConfigError(ptr + "/kind", "expected a string");
  return k.get<std::string>();
}

// Rewrites a ConfigError raised by a distribution factory so its key is a
// full JSON pointer.
template <class F>
auto with_prefix(const std::string& ptr, F&& make) {
  try {
    return make();
  } catch (const ConfigError& e) {
    throw ConfigError(ptr + "/" + e.key(), std::string(e.what()).substr(e.key().size() + 2));
  }
}

TypeDistribution parse_type(const json& j, const std::string& ptr) {
  const std::string kind = kind_of(j, ptr);
  if (kind == "exponential") {
    const double rate = number(field(j, ptr, "rate"), ptr + "/rate");
    return with_prefix(ptr, [&] { return TypeDistribution::exponential(rate); });
  }
  if (kind == "half-normal") {
    const double sigma = number(field(j, ptr, "sigma"), ptr + "/sigma");
    return with_prefix(ptr, [&] { return TypeDistribution::half_normal(sigma); });
  }
  if (kind == "tabulated") {
    const json& knots = field(j, ptr, "knots");
    if (!knots.is_array()) throw ConfigError(ptr + "/knots", "expected an array of [gamma, F] pairs");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < knots.size(); ++k) {
      const std::string kp = ptr + "/knots/" + std::to_string(k);
      const std::vector<double> pair = numbers(knots[k], kp);
      if (pair.size() != 2) throw ConfigError(kp, "expected a [gamma, F] pair");
      pts.emplace_back(pair[0], pair[1]);
    }
    return with_prefix(ptr, [&] { return TypeDistribution::tabulated(std::move(pts)); });
  }
  throw ConfigError(ptr + "/kind", "unknown type distribution '" + kind + "'");
}

SizeDistribution parse_size(const json& j, const std::string& ptr) {
  const std::string kind = kind_of(j, ptr);
  if (kind == "deterministic") {
    const double value = number(field(j, ptr, "value"), ptr + "/value");
    if (std::floor(value) != value) throw ConfigError(ptr + "/value", "must be an integer");
    return with_prefix(ptr, [&] { return SizeDistribution::deterministic(static_cast<std::int64_t>(value)); });
  }
  if (kind == "geometric") {
    const double p = number(field(j, ptr, "p"), ptr + "/p");
    return with_prefix(ptr, [&] { return SizeDistribution::geometric(p); });
  }
  if (kind == "tabulated") {
    auto probs = numbers(field(j, ptr, "probabilities"), ptr + "/probabilities");
    return with_prefix(ptr, [&] { return SizeDistribution::tabulated(std::move(probs)); });
  }
  throw ConfigError(ptr + "/kind", "unknown size distribution '" + kind + "'");
}

SizeDistribution default_size(double mean, const std::string& ptr) {
  if (mean < 1.0 || std::floor(mean) != mean) {
    throw ConfigError(ptr, "no size distribution given and the mean is not a positive integer");
  }
  return SizeDistribution::deterministic(static_cast<std::int64_t>(mean));
}

// A single distribution object is broadcast to all exchanges.
std::vector<SizeDistribution> parse_size_list(const json& j, const std::string& ptr, std::size_t n) {
  std::vector<SizeDistribution> out;
  if (j.is_array()) {
    if (j.size() != n) throw ConfigError(ptr, "needs one entry per exchange");
    for (std::size_t k = 0; k < n; ++k) out.push_back(parse_size(j[k], ptr + "/" + std::to_string(k)));
  } else {
    out.assign(n, parse_size(j, ptr));
  }
  return out;
}

}  // namespace

Fixture parse_fixture(const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  Fixture fx;
  ModelConfig& cfg = fx.model;
  const json& nx = field(j, "", "n_exchanges");
  if (!nx.is_number_integer() || nx.get<long>() < 1) {
    throw ConfigError("/n_exchanges", "must be a positive integer");
  }
  cfg.n_exchanges = nx.get<int>();
  const std::size_t n = cfg.size();
  cfg.beta = numbers(field(j, "", "beta"), "/beta");
  cfg.lambda = numbers(field(j, "", "lambda"), "/lambda");
  cfg.big_lambda = number(field(j, "", "big_lambda"), "/big_lambda");
  cfg.mu = number(field(j, "", "mu"), "/mu");
  cfg.rebate0 = number(field(j, "", "rebate0"), "/rebate0");
  cfg.rebates = numbers(field(j, "", "rebates"), "/rebates");
  cfg.v = j.contains("v") ? number(j["v"], "/v") : 1.0;
  cfg.b_dedicated = j.contains("b_dedicated") ? numbers(j["b_dedicated"], "/b_dedicated")
                                              : std::vector<double>(n, 1.0);
  cfg.b_optimized = j.contains("b_optimized") ? number(j["b_optimized"], "/b_optimized") : 1.0;
  cfg.type_dist = parse_type(field(j, "", "type_dist"), "/type_dist");
  if (cfg.b_dedicated.size() != n) throw ConfigError("/b_dedicated", "length must equal n_exchanges");

  const json sizes = j.contains("size_dists") ? j["size_dists"] : json::object();
  if (!sizes.is_object()) throw ConfigError("/size_dists", "expected an object");
  if (sizes.contains("market")) {
    cfg.market_sizes = parse_size_list(sizes["market"], "/size_dists/market", n);
  } else {
    cfg.market_sizes.assign(n, default_size(cfg.v, "/v"));
  }
  if (sizes.contains("dedicated")) {
    cfg.dedicated_sizes = parse_size_list(sizes["dedicated"], "/size_dists/dedicated", n);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      cfg.dedicated_sizes.push_back(default_size(cfg.b_dedicated[i], "/b_dedicated/" + std::to_string(i)));
    }
  }
  cfg.optimized_size = sizes.contains("optimized")
                           ? parse_size(sizes["optimized"], "/size_dists/optimized")
                           : default_size(cfg.b_optimized, "/b_optimized");
  validate(cfg);

  if (j.contains("q0")) {
    fx.q0 = numbers(j["q0"], "/q0");
    if (fx.q0->size() != n) throw ConfigError("/q0", "length must equal n_exchanges");
    for (std::size_t i = 0; i < n; ++i) {
      if (!((*fx.q0)[i] >= 0.0)) throw ConfigError("/q0/" + std::to_string(i), "must be >= 0");
    }
  }
  return fx;
}

Fixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_fixture(j);
}

ModelConfig load_config(const std::filesystem::path& path) { return load_fixture(path).model; }

json to_json(const TypeDistribution& d) {
  return std::visit(
      overloaded{
          [](const TypeDistribution::Exponential& e) { return json{{"kind", "exponential"}, {"rate", e.rate}}; },
          [](const TypeDistribution::HalfNormal& h) { return json{{"kind", "half-normal"}, {"sigma", h.sigma}}; },
          [](const TypeDistribution::Tabulated& t) {
            json knots = json::array();
            for (const auto& [g, f] : t.knots) knots.push_back({g, f});
            return json{{"kind", "tabulated"}, {"knots", knots}};
          }},
      d.variant());
}

json to_json(const SizeDistribution& d) {
  return std::visit(
      overloaded{
          [](const SizeDistribution::Deterministic& s) { return json{{"kind", "deterministic"}, {"value", s.value}}; },
          [](const SizeDistribution::Geometric& g) { return json{{"kind", "geometric"}, {"p", g.p}}; },
          [](const SizeDistribution::Tabulated& t) {
            return json{{"kind", "tabulated"}, {"probabilities", t.probabilities}};
          }},
      d.variant());
}

json to_json(const ModelConfig& cfg) {
  json market = json::array();
  for (const auto& s : cfg.market_sizes) market.push_back(to_json(s));
  json dedicated = json::array();
  for (const auto& s : cfg.dedicated_sizes) dedicated.push_back(to_json(s));
  return json{{"n_exchanges", cfg.n_exchanges},
              {"beta", cfg.beta},
              {"lambda", cfg.lambda},
              {"big_lambda", cfg.big_lambda},
              {"mu", cfg.mu},
              {"rebate0", cfg.rebate0},
              {"rebates", cfg.rebates},
              {"v", cfg.v},
              {"b_dedicated", cfg.b_dedicated},
              {"b_optimized", cfg.b_optimized},
              {"type_dist", to_json(cfg.type_dist)},
              {"size_dists",
               {{"market", market}, {"dedicated", dedicated}, {"optimized", to_json(cfg.optimized_size)}}}};
}

json to_json(const Fixture& fx) {
  json j = to_json(fx.model);
  if (fx.q0) j["q0"] = *fx.q0;
  return j;
}

}  // namespace fluidlob
