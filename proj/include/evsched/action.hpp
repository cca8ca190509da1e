#pragma once

#include <optional>

#include "evsched/network.hpp"

namespace evsched {

/// One user's (y, n) decision. An absent pool means "no charge": y is all
/// zero and the duration is 0. At most one pool can be chosen, so the
/// single-choice constraint holds by construction.
struct Action {
  int user = 0;
  std::optional<PoolIndex> pool;
  int duration = 0;

  bool charges() const { return pool.has_value(); }
  /// Choice present iff duration >= 1.
  bool well_formed() const { return pool ? duration >= 1 : duration == 0; }

  static Action skip(int user) { return Action{user, std::nullopt, 0}; }
  static Action charge(int user, PoolIndex p, int n) { return Action{user, p, n}; }

  bool operator==(const Action&) const = default;
};

}  // namespace evsched
