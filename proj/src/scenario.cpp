#include "evsched/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "evsched/errors.hpp"

namespace evsched {

DemandLevel parse_demand_level(const std::string& s) {
  if (s == "low") return DemandLevel::low;
  if (s == "medium") return DemandLevel::medium;
  if (s == "high") return DemandLevel::high;
  throw ValidationError("demand.level must be low, medium or high, got '" + s + "'");
}

std::string to_string(DemandLevel level) {
  switch (level) {
    case DemandLevel::low: return "low";
    case DemandLevel::medium: return "medium";
    case DemandLevel::high: return "high";
  }
  return "medium";
}

double demand_multiplier(DemandLevel level) {
  switch (level) {
    case DemandLevel::low: return 0.5;
    case DemandLevel::medium: return 1.0;
    case DemandLevel::high: return 2.0;
  }
  return 1.0;
}

DemandProfile ScenarioConfig::effective_demand() const {
  DemandProfile d = demand;
  d.scale *= demand_multiplier(level);
  return d;
}

void ScenarioConfig::validate() const {
  if (horizon < 1) throw ValidationError("horizon.periods must be >= 1");
  if (!(period_minutes > 0.0)) throw ValidationError("horizon.period_minutes must be > 0");
  net.validate(horizon);
  weights.validate(horizon);
  gne.validate();
  mcts.validate();
  if (!(rates.mean[0] > 0.0 && rates.mean[1] > 0.0))
    throw ValidationError("rates.slow and rates.fast must be > 0");
  if (!(rates.rel_sd >= 0.0)) throw ValidationError("rates.rel_sd must be >= 0");
  if (!(rates.quantum > 0.0)) throw ValidationError("rates.quantum must be > 0");
  if (!background.empty()) {
    if (background.size() != net.pool_count())
      throw ValidationError("background must have one entry per (lot, type) pool");
    for (PoolIndex p = 0; p < net.pool_count(); ++p)
      if (background[p] < 0 || background[p] > net.pool(p).capacity)
        throw ValidationError("background[" + std::to_string(p) + "] must lie in [0, capacity]");
  }
  if (users) {
    std::set<int> ids;
    const std::set<int> origins(net.origins.begin(), net.origins.end());
    const std::set<int> dests(net.destinations.begin(), net.destinations.end());
    for (std::size_t i = 0; i < users->size(); ++i) {
      const EvUser& u = (*users)[i];
      const std::string where = "users[" + std::to_string(i) + "]";
      if (!ids.insert(u.id).second) throw ValidationError(where + ".id: duplicate id");
      if (!origins.count(u.origin)) throw ValidationError(where + ".origin: unknown origin");
      if (!dests.count(u.destination))
        throw ValidationError(where + ".destination: unknown destination");
      if (u.arrival_period < 0 || u.arrival_period >= horizon)
        throw ValidationError(where + ".arrival: must lie in [0, T-1]");
      if (u.parking_duration < 1) throw ValidationError(where + ".duration: must be >= 1");
      if (!(u.battery_capacity > 0.0) || u.soc < 0.0 || u.soc > u.battery_capacity)
        throw ValidationError(where + ".soc: must lie in [0, battery_kwh]");
    }
  } else {
    demand.validate(horizon);
  }
}

namespace {

// Typed access to one JSON object, reporting errors with the field path.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  T get(const char* key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    return as<T>(j_.at(key), key);
  }

  template <class T>
  T require(const char* key) const {
    if (!j_.contains(key)) throw ValidationError(field(key) + ": missing");
    return as<T>(j_.at(key), key);
  }

  Section child(const char* key) const { return Section(j_.at(key), field(key)); }
  const nlohmann::json& at(const char* key) const { return j_.at(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "document" : path_; }

  template <class T>
  T as(const nlohmann::json& v, const char* key) const {
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(field(key) + ": wrong type");
    }
  }

  const nlohmann::json& j_;
  std::string path_;
};

}  // namespace

ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  ScenarioConfig cfg;
  const Section root(doc, "");
  cfg.name = root.get<std::string>("name", cfg.name);
  cfg.seed = root.get<std::uint64_t>("seed", cfg.seed);
  if (root.has("horizon")) {
    const Section h = root.child("horizon");
    cfg.horizon = h.get<int>("periods", cfg.horizon);
    cfg.period_minutes = h.get<double>("period_minutes", cfg.period_minutes);
  }
  if (cfg.horizon < 1) throw ValidationError("horizon.periods must be >= 1");
  if (!root.has("network")) throw ValidationError("network: missing");
  cfg.net = load_network(root.at("network"), cfg.horizon);

  if (root.has("demand")) {
    const Section d = root.child("demand");
    DemandProfile& p = cfg.demand;
    cfg.level = parse_demand_level(d.get<std::string>("level", "medium"));
    p.scale = d.get<double>("scale", p.scale);
    p.soc_low_fraction = d.get<double>("soc_low_fraction", p.soc_low_fraction);
    p.soc_high_fraction = d.get<double>("soc_high_fraction", p.soc_high_fraction);
    p.battery_capacity = d.get<double>("battery_kwh", p.battery_capacity);
    p.duration_mean = d.get<double>("duration_mean", p.duration_mean);
    p.efficiency = d.get<double>("efficiency", p.efficiency);
    p.reserve = d.get<double>("reserve_kwh", p.reserve);
    p.max_onward_miles = d.get<double>("max_onward_miles", p.max_onward_miles);
    if (d.has("bands")) {
      const auto& bands = d.at("bands");
      if (!bands.is_array()) throw ValidationError("demand.bands: expected a list");
      for (std::size_t i = 0; i < bands.size(); ++i) {
        const Section b(bands[i], "demand.bands[" + std::to_string(i) + "]");
        p.bands.push_back({b.require<int>("from"), b.require<int>("to"),
                           b.require<double>("mean")});
      }
    }
  }

  if (root.has("weights")) {
    const Section s = root.child("weights");
    CostWeights& w = cfg.weights;
    w.theta = s.get<double>("theta", w.theta);
    w.theta_wait = s.get<double>("theta_wait", w.theta_wait);
    w.alpha = s.get<double>("alpha", w.alpha);
    w.alpha_over = s.get<double>("alpha_over", w.alpha_over);
    w.pi = s.get<double>("pi", w.pi);
    w.big_m = s.get<double>("big_m", w.big_m);
    w.max_wait = s.get<double>("w_max", w.max_wait);
    w.exp_cap = s.get<double>("exp_cap", w.exp_cap);
    w.unserved_penalty = s.get<double>("unserved_penalty", w.unserved_penalty);
  }

  if (root.has("rates")) {
    const Section s = root.child("rates");
    cfg.rates.mean[kSlow] = s.get<double>("slow", cfg.rates.mean[kSlow]);
    cfg.rates.mean[kFast] = s.get<double>("fast", cfg.rates.mean[kFast]);
    cfg.rates.rel_sd = s.get<double>("rel_sd", cfg.rates.rel_sd);
    cfg.rates.quantum = s.get<double>("quantum", cfg.rates.quantum);
  }

  if (root.has("gne")) {
    const Section s = root.child("gne");
    GneConfig& g = cfg.gne;
    g.max_iters = s.get<int>("max_iters", g.max_iters);
    g.rel_tol = s.get<double>("rel_tol", g.rel_tol);
    g.rho0 = s.get<double>("rho0", g.rho0);
    g.growth = s.get<double>("growth", g.growth);
    g.u0 = s.get<double>("u0", g.u0);
  }

  if (root.has("mcts")) {
    const Section s = root.child("mcts");
    MctsConfig& m = cfg.mcts;
    m.iterations = s.get<int>("iterations", m.iterations);
    m.horizon = s.get<int>("horizon", m.horizon);
    m.expansion = s.get<int>("expansion", m.expansion);
    m.exploration = s.get<double>("exploration", m.exploration);
    m.sh_samples = s.get<int>("sh_samples", m.sh_samples);
    m.scale_exploration = s.get<bool>("scale_exploration", m.scale_exploration);
    m.trees = s.get<unsigned>("trees", m.trees);
  }

  if (root.has("background")) cfg.background = root.get<std::vector<int>>("background", {});

  if (root.has("users")) {
    const auto& list = root.at("users");
    if (!list.is_array()) throw ValidationError("users: expected a list");
    std::vector<EvUser> users;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Section s(list[i], "users[" + std::to_string(i) + "]");
      EvUser u;
      u.id = s.require<int>("id");
      u.origin = s.require<int>("origin");
      u.destination = s.require<int>("destination");
      u.arrival_period = s.get<int>("arrival", 0);
      u.battery_capacity = s.get<double>("battery_kwh", cfg.demand.battery_capacity);
      u.soc = s.require<double>("soc");
      u.parking_duration = s.require<int>("duration");
      if (s.has("threshold"))
        u.soc_threshold = s.get<double>("threshold", 0.0);
      else
        u.soc_threshold = required_soc(cfg.net, u.destination, u.battery_capacity, cfg.demand);
      users.push_back(u);
    }
    std::sort(users.begin(), users.end(),
              [](const EvUser& a, const EvUser& b) { return a.id < b.id; });
    cfg.users = std::move(users);
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

ScenarioConfig scenario_from_micro(const MicroScenario& ms, const CostWeights& w) {
  ScenarioConfig cfg;
  cfg.name = "micro";
  cfg.horizon = ms.horizon;
  cfg.net = ms.net;
  cfg.weights = w;
  cfg.rates = RateModel::nominal(w.pi);
  cfg.users = ms.users;
  cfg.background = ms.background;
  cfg.demand.bands = {{0, ms.horizon - 1, 0.0}};
  return cfg;
}

MicroScenario micro_from_scenario(const ScenarioConfig& cfg) {
  if (!cfg.users) throw ValidationError("oracle mode needs a fixed users list");
  MicroScenario ms;
  ms.net = cfg.net;
  ms.users = *cfg.users;
  ms.horizon = cfg.horizon;
  ms.background = cfg.background;
  ms.validate();
  return ms;
}

}  // namespace evsched
