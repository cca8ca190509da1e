#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "evsched/action.hpp"
#include "evsched/network.hpp"
#include "evsched/rng.hpp"
#include "evsched/sh.hpp"
#include "evsched/state.hpp"
#include "evsched/user_opt.hpp"

namespace evsched {

struct MctsConfig {
  int iterations = 100;  // N
  int horizon = 4;       // H, periods of look-ahead
  int expansion = 8;     // kappa, max explored actions per node
  double exploration = std::sqrt(2.0);  // iota
  int sh_samples = 30;   // xi
  /// Independent root-parallel trees. Fixed by the configuration so the
  /// result does not depend on how many threads run them.
  unsigned trees = 1;
  unsigned workers = 1;  // threads
  /// Multiply iota by the running mean absolute edge cost so the bonus is
  /// in dollars like the costs it competes with.
  bool scale_exploration = true;

  void validate() const;
};

/// Exploitation/exploration inputs for one explored action at a node.
struct ActionStats {
  double stage_cost = 0.0;  // phi~ of taking the action
  double value = 0.0;       // V~ of the state it leads to
  int visits = 0;           // N(S, a)
};

/// argmax of -(stage_cost + value) + iota sqrt(ln N(S) / N(S, a)); ties go to
/// the lowest index. Throws ContractViolation on an empty set.
std::size_t uct_select(std::span<const ActionStats> children, int parent_visits,
                       double exploration);

/// One user's decision inside the tree; a missing pool defers the user to
/// the next period.
struct TreeChoice {
  std::optional<PoolIndex> pool;
  int duration = 0;

  bool operator==(const TreeChoice&) const = default;
};

enum class NodeKind { pre_decision, post_decision, terminal };

struct TreeEdge {
  TreeChoice choice;
  double stage_cost = 0.0;
  std::size_t child = 0;
};

struct OutcomeBranch {
  std::vector<std::int64_t> key;  // quantized delivered energy per charging user
  std::size_t child = 0;
};

struct TreeNode {
  NodeKind kind = NodeKind::terminal;
  int depth = 0;                  // t' - t
  SystemState state;              // state at the start of period t + depth
  std::vector<Action> decided;    // joint action chosen so far in this period
  std::vector<int> pending;       // users to decide this period, by id
  std::size_t cursor = 0;         // pending[cursor] decides at a pre-decision node
  std::vector<int> assigned;      // new charges per pool in this period so far
  std::vector<TreeEdge> explored;      // A~_e
  std::vector<TreeChoice> unexplored;  // A~_u
  std::vector<OutcomeBranch> outcomes;  // Omega~_e
  int visits = 0;                 // N(S~)
  double value = 0.0;             // V~, running mean cost-to-go
  double terminal_value = 0.0;    // cost-to-go estimate at a horizon cut

  int deciding_user() const { return pending[cursor]; }
};

/// Incremental-mean update along a root-to-leaf path. edge_costs[i] is the
/// stage cost paid between path[i] and path[i + 1].
void backpropagate(std::span<TreeNode*> path, std::span<const double> edge_costs,
                   double leaf_value);

struct MctsStats {
  long sh_shots = 0;
  long sh_rejected = 0;
  int max_depth = 0;
  std::size_t nodes = 0;
};

/// Look-ahead tree for one decision epoch. Nodes live in a flat arena and
/// are referenced by index.
class SearchTree {
 public:
  SearchTree(const Network& net, const CostWeights& w, const RateModel& rates,
             const MctsConfig& cfg, const SystemState& root, std::vector<Action> hint,
             std::uint64_t seed);

  /// Runs select -> expand -> simulate -> backpropagate `iterations` times.
  void run(int iterations);

  /// Moves one action from A~_u to A~_e and creates its child (the hint
  /// action first, otherwise a uniform draw). Returns the new edge index.
  /// Throws ContractViolation when the node cannot expand.
  std::size_t expand(std::size_t node);
  bool can_expand(std::size_t node) const;

  /// Draws delivered energy for every user charging in the node's period,
  /// advances the state and returns the pre-decision child, reusing an
  /// existing one when the outcome was seen before.
  std::size_t sample_outcome(std::size_t post_node);

  /// Default-policy estimate of the cost-to-go from a node.
  double rollout(std::size_t node);

  /// Most-visited chain through the root period, completed by the default
  /// policy for users the tree never reached.
  std::vector<Action> robust_actions() const;

  const TreeNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& root() const { return nodes_.front(); }
  const MctsStats& stats() const { return stats_; }
  double exploration_scale() const;

  /// Admissible choices for the deciding user of a pre-decision node, hint
  /// first, then defer, then pools in index order with n ascending.
  std::vector<TreeChoice> admissible(const TreeNode& n) const;

  friend std::vector<Action> merged_robust_actions(std::span<const SearchTree> trees);

 private:
  std::size_t make_period_node(SystemState state, int depth);
  std::size_t make_child(std::size_t parent, const TreeChoice& choice);
  double edge_cost(const TreeNode& n, const EvUser& u, const TreeChoice& c, bool simulate_rates);
  double deterministic_cost(const TreeNode& n, const EvUser& u, const TreeChoice& c) const;
  TreeChoice default_choice(const TreeNode& n, const EvUser& u) const;
  void apply_choice(TreeNode& n, const TreeChoice& c) const;
  ExogenousInfo draw_outcome(const TreeNode& n, std::vector<std::int64_t>& key);
  void iterate();
  void init_period(TreeNode& n, SystemState state, int depth) const;
  TreeChoice hint_choice(int user) const;

  const Network& net_;
  CostWeights w_;
  RateModel rates_;
  MctsConfig cfg_;
  std::unordered_map<int, Action> hint_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
  MctsStats stats_;
  double abs_cost_sum_ = 0.0;
  long abs_cost_count_ = 0;
};

std::vector<Action> merged_robust_actions(std::span<const SearchTree> trees);

struct MctsResult {
  std::vector<Action> actions;  // A*^t: charges and skips; deferred users are absent
  double value = 0.0;           // visit-weighted root V~
  double lower_bound = 0.0;     // lower_bound_value at the root
  int root_visits = 0;
  MctsStats stats;
};

/// Look-ahead decision for the users of `root_state`. Each of cfg.trees
/// trees gets its own stream and a share of the iterations; the chains merge
/// by summed visit counts. Up to cfg.workers threads build the trees.
MctsResult run_mcts(const Network& net, const SystemState& root_state, const CostWeights& w,
                    const RateModel& rates, const MctsConfig& cfg,
                    std::span<const Action> hint, std::uint64_t seed);

/// Sum over users of the cheapest cost they could face with no competition:
/// every pool at its background occupancy, any start period in [t, T-1]
/// (paying theta' per period of delay), or never being served. The costs
/// do not depend on the rate realization, so the expectation is exact.
double lower_bound_value(const Network& net, const SystemState& state,
                         std::span<const EvUser> users, const CostWeights& w);

/// The same bound for one user.
double user_lower_bound(const Network& net, const SystemState& state, const EvUser& u,
                        const CostWeights& w);

}  // namespace evsched
