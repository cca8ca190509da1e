#include "evsched/mcts.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "evsched/errors.hpp"

namespace evsched {

void MctsConfig::validate() const {
  if (iterations < 1) throw ValidationError("mcts.iterations must be >= 1");
  if (horizon < 1) throw ValidationError("mcts.horizon must be >= 1");
  if (expansion < 1) throw ValidationError("mcts.expansion must be >= 1");
  if (!(exploration >= 0.0)) throw ValidationError("mcts.exploration must be >= 0");
  if (sh_samples < 1) throw ValidationError("mcts.sh_samples must be >= 1");
  if (trees < 1) throw ValidationError("mcts.trees must be >= 1");
}

std::size_t uct_select(std::span<const ActionStats> children, int parent_visits,
                       double exploration) {
  if (children.empty()) throw ContractViolation("uct_select on a node with no explored actions");
  const double log_n = std::log(static_cast<double>(std::max(parent_visits, 1)));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < children.size(); ++i) {
    const auto& c = children[i];
    double score;
    if (c.visits <= 0) {
      score = std::numeric_limits<double>::infinity();
    } else {
      score = -(c.stage_cost + c.value) +
              exploration * std::sqrt(log_n / static_cast<double>(c.visits));
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void backpropagate(std::span<TreeNode*> path, std::span<const double> edge_costs,
                   double leaf_value) {
  if (path.empty()) return;
  if (edge_costs.size() + 1 != path.size())
    throw ContractViolation("backpropagate needs one edge cost per step");
  double g = leaf_value;
  for (std::size_t i = path.size(); i-- > 0;) {
    TreeNode& n = *path[i];
    ++n.visits;
    n.value += (g - n.value) / static_cast<double>(n.visits);
    if (i > 0) g += edge_costs[i - 1];
  }
}

double user_lower_bound(const Network& net, const SystemState& state, const EvUser& u,
                        const CostWeights& w) {
  const int t = state.t;
  const int horizon = state.horizon;
  if (!u.needs_charge() || t >= horizon) return 0.0;
  double best = w.theta_wait * (horizon - t) + w.unserved_penalty;
  for (PoolIndex p = 0; p < net.pool_count(); ++p) {
    const ChargerPool& pool = net.pool(p);
    const int bg = state.background.empty() ? 0 : state.background[p];
    if (pool.capacity <= 0 || bg >= pool.capacity) continue;
    const double wait = waiting_time(pool, bg, 0, w.max_wait);
    for (int s = t; s < horizon; ++s) {
      const DurationRange r = duration_range(u, pool_type(p), s, horizon, w.pi);
      for (int n = r.min; n <= r.max; ++n) {
        const double c = w.theta_wait * (s - t) +
                         cost_terms(net, u, Action::charge(u.id, p, n), s, wait, w).total();
        best = std::min(best, c);
      }
    }
  }
  return best;
}

double lower_bound_value(const Network& net, const SystemState& state,
                         std::span<const EvUser> users, const CostWeights& w) {
  double sum = 0.0;
  for (const auto& u : users) sum += user_lower_bound(net, state, u, w);
  return sum;
}

SearchTree::SearchTree(const Network& net, const CostWeights& w, const RateModel& rates,
                       const MctsConfig& cfg, const SystemState& root, std::vector<Action> hint,
                       std::uint64_t seed)
    : net_(net), w_(w), rates_(rates), cfg_(cfg), rng_(seed) {
  for (auto& a : hint)
    if (a.charges()) hint_.emplace(a.user, a);
  nodes_.emplace_back();
  init_period(nodes_.back(), root, 0);
  stats_.nodes = 1;
}

TreeChoice SearchTree::hint_choice(int user) const {
  auto it = hint_.find(user);
  if (it == hint_.end()) return TreeChoice{};
  return TreeChoice{it->second.pool, it->second.duration};
}

std::vector<TreeChoice> SearchTree::admissible(const TreeNode& n) const {
  const EvUser* u = n.state.find_user(n.deciding_user());
  std::vector<TreeChoice> out{TreeChoice{}};
  for (PoolIndex p = 0; p < net_.pool_count(); ++p) {
    if (net_.pool(p).capacity <= 0 || n.state.free_spots(p) - n.assigned[p] <= 0) continue;
    const DurationRange r = duration_range(*u, pool_type(p), n.state.t, n.state.horizon, w_.pi);
    for (int d = r.min; d <= r.max; ++d) out.push_back(TreeChoice{p, d});
  }
  auto it = std::find(out.begin(), out.end(), hint_choice(u->id));
  if (it != out.end()) std::rotate(out.begin(), it, it + 1);
  return out;
}

void SearchTree::init_period(TreeNode& n, SystemState state, int depth) const {
  n = TreeNode{};
  n.depth = depth;
  n.state = std::move(state);
  n.assigned.assign(net_.pool_count(), 0);
  if (n.state.t >= n.state.horizon) {
    n.kind = NodeKind::terminal;
    return;
  }
  for (const EvUser* u : n.state.uncommitted_users()) {
    if (u->needs_charge())
      n.pending.push_back(u->id);
    else
      n.decided.push_back(Action::skip(u->id));
  }
  if (n.pending.empty()) {
    n.kind = NodeKind::terminal;
    return;
  }
  if (depth >= cfg_.horizon) {
    n.kind = NodeKind::terminal;
    for (int id : n.pending)
      n.terminal_value += user_lower_bound(net_, n.state, *n.state.find_user(id), w_);
    return;
  }
  n.kind = NodeKind::pre_decision;
  n.unexplored = admissible(n);
}

std::size_t SearchTree::make_period_node(SystemState state, int depth) {
  TreeNode n;
  init_period(n, std::move(state), depth);
  stats_.max_depth = std::max(stats_.max_depth, depth);
  nodes_.push_back(std::move(n));
  stats_.nodes = nodes_.size();
  return nodes_.size() - 1;
}

void SearchTree::apply_choice(TreeNode& n, const TreeChoice& c) const {
  if (c.pool) {
    n.decided.push_back(Action::charge(n.deciding_user(), *c.pool, c.duration));
    ++n.assigned[*c.pool];
  }
  ++n.cursor;
}

std::size_t SearchTree::make_child(std::size_t parent, const TreeChoice& choice) {
  TreeNode child;
  {
    const TreeNode& p = nodes_[parent];
    child.depth = p.depth;
    child.state = p.state;
    child.decided = p.decided;
    child.pending = p.pending;
    child.cursor = p.cursor;
    child.assigned = p.assigned;
  }
  apply_choice(child, choice);
  if (child.cursor < child.pending.size()) {
    child.kind = NodeKind::pre_decision;
    child.unexplored = admissible(child);
  } else {
    child.kind = NodeKind::post_decision;
  }
  nodes_.push_back(std::move(child));
  stats_.nodes = nodes_.size();
  return nodes_.size() - 1;
}

double SearchTree::deterministic_cost(const TreeNode& n, const EvUser& u,
                                      const TreeChoice& c) const {
  const int t = n.state.t;
  if (!c.pool) return w_.theta_wait + (t + 1 >= n.state.horizon ? w_.unserved_penalty : 0.0);
  const PoolIndex p = *c.pool;
  const ChargerPool& pool = net_.pool(p);
  const int m = n.assigned[p];
  const int sigma = n.state.occupancy[p];
  // Social waiting cost added by one more user starting here this period.
  const double wait = waiting_time(pool, sigma, m, w_.max_wait);
  const double prev = m > 0 ? waiting_time(pool, sigma, m - 1, w_.max_wait) : 0.0;
  const double marginal = (m + 1) * wait - m * prev;
  return cost_terms(net_, u, Action::charge(u.id, p, c.duration), t, marginal, w_).total();
}

double SearchTree::edge_cost(const TreeNode& n, const EvUser& u, const TreeChoice& c,
                             bool simulate_rates) {
  if (!c.pool || !simulate_rates) return deterministic_cost(n, u, c);
  const PoolIndex p = *c.pool;
  const int m = n.assigned[p];
  const int sigma = n.state.occupancy[p];
  const ChargerPool& pool = net_.pool(p);
  const double wait = waiting_time(pool, sigma, m, w_.max_wait);
  const double prev = m > 0 ? waiting_time(pool, sigma, m - 1, w_.max_wait) : 0.0;
  const CostTerms terms = cost_terms(net_, u, Action::charge(u.id, p, c.duration), n.state.t,
                                     (m + 1) * wait - m * prev, w_);
  const int samples = rates_.deterministic() ? 1 : cfg_.sh_samples;
  const ShotResult shot = shoot(u.soc, c.duration, u.soc_threshold, pool_type(p), samples,
                                rates_, u.battery_capacity, rng_);
  stats_.sh_shots += shot.shots;
  stats_.sh_rejected += shot.shots - std::lround(shot.survival * shot.shots);
  return terms.travel + terms.waiting +
         shot_value(shot, terms.charging, terms.penalty, w_.alpha_over, u.parking_duration);
}

TreeChoice SearchTree::default_choice(const TreeNode& n, const EvUser& u) const {
  const TreeChoice hint = hint_choice(u.id);
  if (hint.pool) {
    const PoolIndex p = *hint.pool;
    const DurationRange r =
        duration_range(u, pool_type(p), n.state.t, n.state.horizon, w_.pi);
    if (n.state.free_spots(p) - n.assigned[p] > 0 && hint.duration >= r.min &&
        hint.duration <= r.max)
      return hint;
  }
  TreeChoice best{};
  double best_cost = std::numeric_limits<double>::infinity();
  for (PoolIndex p = 0; p < net_.pool_count(); ++p) {
    if (net_.pool(p).capacity <= 0 || n.state.free_spots(p) - n.assigned[p] <= 0) continue;
    const DurationRange r =
        duration_range(u, pool_type(p), n.state.t, n.state.horizon, w_.pi);
    for (int d = r.min; d <= r.max; ++d) {
      const TreeChoice c{p, d};
      const double cost = deterministic_cost(n, u, c);
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
  }
  return best;
}

ExogenousInfo SearchTree::draw_outcome(const TreeNode& n, std::vector<std::int64_t>& key) {
  ExogenousInfo exo;
  key.clear();
  for (const auto& [id, p] : charging_users(n.state, n.decided)) {
    const double r = rates_.sample(pool_type(p), rng_);
    exo.delivered[{id, n.state.t}] = r;
    key.push_back(std::llround(r / rates_.quantum));
  }
  return exo;
}

std::size_t SearchTree::sample_outcome(std::size_t post_node) {
  if (nodes_[post_node].kind != NodeKind::post_decision)
    throw ContractViolation("sample_outcome needs a post-decision node");
  std::vector<std::int64_t> key;
  const ExogenousInfo exo = draw_outcome(nodes_[post_node], key);
  for (const auto& b : nodes_[post_node].outcomes)
    if (b.key == key) return b.child;
  SystemState next =
      advance(net_, nodes_[post_node].state, nodes_[post_node].decided, exo, w_.max_wait);
  const std::size_t child = make_period_node(std::move(next), nodes_[post_node].depth + 1);
  nodes_[post_node].outcomes.push_back(OutcomeBranch{std::move(key), child});
  return child;
}

bool SearchTree::can_expand(std::size_t node) const {
  const TreeNode& n = nodes_[node];
  return n.kind == NodeKind::pre_decision && !n.unexplored.empty() &&
         n.explored.size() < static_cast<std::size_t>(cfg_.expansion);
}

std::size_t SearchTree::expand(std::size_t node) {
  if (!can_expand(node)) throw ContractViolation("node cannot be expanded");
  std::size_t pick = 0;
  {
    const TreeNode& n = nodes_[node];
    const TreeChoice hint = hint_choice(n.deciding_user());
    if (!(n.unexplored.front() == hint && n.explored.empty())) {
      std::uniform_int_distribution<std::size_t> dist(0, n.unexplored.size() - 1);
      pick = dist(rng_);
    }
  }
  const TreeChoice choice = nodes_[node].unexplored[pick];
  nodes_[node].unexplored.erase(nodes_[node].unexplored.begin() +
                                static_cast<std::ptrdiff_t>(pick));
  const TreeNode& n = nodes_[node];
  const double cost = edge_cost(n, *n.state.find_user(n.deciding_user()), choice, true);
  abs_cost_sum_ += std::abs(cost);
  ++abs_cost_count_;
  const std::size_t child = make_child(node, choice);
  nodes_[node].explored.push_back(TreeEdge{choice, cost, child});
  return nodes_[node].explored.size() - 1;
}

double SearchTree::rollout(std::size_t node) {
  TreeNode n = nodes_[node];
  double acc = 0.0;
  while (true) {
    if (n.kind == NodeKind::terminal) return acc + n.terminal_value;
    if (n.kind == NodeKind::pre_decision) {
      while (n.cursor < n.pending.size()) {
        const EvUser& u = *n.state.find_user(n.deciding_user());
        const TreeChoice c = default_choice(n, u);
        acc += edge_cost(n, u, c, true);
        apply_choice(n, c);
      }
    }
    std::vector<std::int64_t> key;
    const ExogenousInfo exo = draw_outcome(n, key);
    SystemState next = advance(net_, n.state, n.decided, exo, w_.max_wait);
    const int depth = n.depth + 1;
    init_period(n, std::move(next), depth);
    stats_.max_depth = std::max(stats_.max_depth, depth);
  }
}

double SearchTree::exploration_scale() const {
  if (!cfg_.scale_exploration || abs_cost_count_ == 0) return 1.0;
  return std::max(abs_cost_sum_ / static_cast<double>(abs_cost_count_), 1e-9);
}

void SearchTree::iterate() {
  std::vector<std::size_t> path{0};
  std::vector<double> costs;
  std::size_t cur = 0;
  double leaf = 0.0;
  while (true) {
    const NodeKind kind = nodes_[cur].kind;
    if (kind == NodeKind::terminal) {
      leaf = nodes_[cur].terminal_value;
      break;
    }
    if (kind == NodeKind::post_decision) {
      const std::size_t before = nodes_.size();
      const std::size_t child = sample_outcome(cur);
      path.push_back(child);
      costs.push_back(0.0);
      if (nodes_.size() > before) {
        leaf = rollout(child);
        break;
      }
      cur = child;
      continue;
    }
    if (can_expand(cur)) {
      const std::size_t e = expand(cur);
      const TreeEdge edge = nodes_[cur].explored[e];
      path.push_back(edge.child);
      costs.push_back(edge.stage_cost);
      leaf = rollout(edge.child);
      break;
    }
    const TreeNode& n = nodes_[cur];
    std::vector<ActionStats> stats;
    stats.reserve(n.explored.size());
    for (const auto& e : n.explored)
      stats.push_back({e.stage_cost, nodes_[e.child].value, nodes_[e.child].visits});
    const std::size_t pick =
        uct_select(stats, n.visits, cfg_.exploration * exploration_scale());
    costs.push_back(n.explored[pick].stage_cost);
    cur = n.explored[pick].child;
    path.push_back(cur);
  }
  std::vector<TreeNode*> nodes;
  nodes.reserve(path.size());
  for (std::size_t i : path) nodes.push_back(&nodes_[i]);
  backpropagate(nodes, costs, leaf);
}

void SearchTree::run(int iterations) {
  for (int i = 0; i < iterations; ++i) iterate();
}

std::vector<Action> SearchTree::robust_actions() const {
  return merged_robust_actions(std::span<const SearchTree>(this, 1));
}

std::vector<Action> merged_robust_actions(std::span<const SearchTree> trees) {
  if (trees.empty()) return {};
  const SearchTree& lead = trees.front();
  TreeNode walk = lead.root();
  std::vector<std::optional<std::size_t>> cur(trees.size(), std::size_t{0});
  while (walk.kind == NodeKind::pre_decision && walk.cursor < walk.pending.size()) {
    std::vector<std::pair<TreeChoice, int>> summed;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      if (!cur[i]) continue;
      const TreeNode& n = trees[i].node(*cur[i]);
      if (n.kind != NodeKind::pre_decision || n.depth != 0) continue;
      for (const auto& e : n.explored) {
        auto it = std::find_if(summed.begin(), summed.end(),
                               [&](const auto& s) { return s.first == e.choice; });
        const int v = trees[i].node(e.child).visits;
        if (it == summed.end())
          summed.emplace_back(e.choice, v);
        else
          it->second += v;
      }
    }
    if (summed.empty()) break;
    auto best = summed.begin();
    for (auto it = summed.begin(); it != summed.end(); ++it)
      if (it->second > best->second) best = it;
    const TreeChoice choice = best->first;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      if (!cur[i]) continue;
      const TreeNode& n = trees[i].node(*cur[i]);
      cur[i].reset();
      for (const auto& e : n.explored)
        if (e.choice == choice) cur[i] = e.child;
    }
    lead.apply_choice(walk, choice);
  }
  if (walk.kind == NodeKind::pre_decision) {
    while (walk.cursor < walk.pending.size()) {
      const EvUser& u = *walk.state.find_user(walk.deciding_user());
      lead.apply_choice(walk, lead.default_choice(walk, u));
    }
  }
  return walk.decided;
}

MctsResult run_mcts(const Network& net, const SystemState& root_state, const CostWeights& w,
                    const RateModel& rates, const MctsConfig& cfg,
                    std::span<const Action> hint, std::uint64_t seed) {
  cfg.validate();
  const unsigned count = std::min(cfg.trees, static_cast<unsigned>(cfg.iterations));
  std::vector<SearchTree> trees;
  trees.reserve(count);
  const std::vector<Action> hints(hint.begin(), hint.end());
  for (unsigned i = 0; i < count; ++i)
    trees.emplace_back(net, w, rates, cfg, root_state, hints,
                       derive_seed(seed, "mcts.worker", {i}));
  const int base = cfg.iterations / static_cast<int>(count);
  const int extra = cfg.iterations % static_cast<int>(count);
  auto budget = [&](unsigned i) { return base + (static_cast<int>(i) < extra ? 1 : 0); };
  const unsigned threads = std::max(1u, std::min(cfg.workers, count));
  if (threads == 1) {
    for (unsigned i = 0; i < count; ++i) trees[i].run(budget(i));
  } else {
    std::vector<std::thread> pool;
    for (unsigned w0 = 0; w0 < threads; ++w0)
      pool.emplace_back([&, w0] {
        for (unsigned i = w0; i < count; i += threads) trees[i].run(budget(i));
      });
    for (auto& th : pool) th.join();
  }

  MctsResult r;
  r.actions = merged_robust_actions(trees);
  double weighted = 0.0;
  for (const auto& tr : trees) {
    r.root_visits += tr.root().visits;
    weighted += tr.root().value * tr.root().visits;
    r.stats.sh_shots += tr.stats().sh_shots;
    r.stats.sh_rejected += tr.stats().sh_rejected;
    r.stats.max_depth = std::max(r.stats.max_depth, tr.stats().max_depth);
    r.stats.nodes += tr.stats().nodes;
  }
  r.value = r.root_visits > 0 ? weighted / r.root_visits : trees[0].root().terminal_value;
  std::vector<EvUser> users;
  for (const EvUser* u : root_state.uncommitted_users()) users.push_back(*u);
  r.lower_bound = lower_bound_value(net, root_state, users, w);
  return r;
}

}  // namespace evsched
