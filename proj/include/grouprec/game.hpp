#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "grouprec/cbn.hpp"
#include "grouprec/common.hpp"
#include "grouprec/dataset.hpp"
#include "grouprec/distribution.hpp"

namespace grouprec {

struct GameConfig {
  double cost_weight = 0.6;     // eta1
  double utility_weight = 0.4;  // eta2
  double cost_exponent = 2.0;   // n
  int max_rounds = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(cost_weight >= 0)) throw InputError("eta1 must be non-negative");
    if (!(utility_weight > 0)) throw InputError("eta2 must be positive");
    if (!(cost_exponent > 0)) throw InputError("cost exponent n must be positive");
    if (max_rounds < 1) throw InputError("max_rounds must be at least 1");
  }
};

template <typename Scalar>
struct NormalizedModel {
  Matrix<Scalar> interest;  // I_N
  Matrix<Scalar> social;    // S_N
};

/// Global min-max scaling of one matrix into [0, 1]; a constant matrix maps
/// to 0.5 everywhere.
template <typename Derived>
Matrix<typename Derived::Scalar> min_max_normalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out(m.rows(), m.cols());
  if (m.size() == 0) return out;
  const Scalar lo = m.minCoeff();
  const Scalar hi = m.maxCoeff();
  if (!(hi > lo)) {
    out.setConstant(Scalar(0.5));
    return out;
  }
  out = ((m.array() - lo) / (hi - lo)).matrix();
  return out.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

template <typename Scalar>
NormalizedModel<Scalar> normalize(const CbnModel<Scalar>& model) {
  return {min_max_normalize(model.interest), min_max_normalize(model.social)};
}

/// Normalized interest and social rows of the players of one game, in player
/// order. Row p belongs to the p-th group member.
template <typename Scalar>
struct PlayerPayoffs {
  Matrix<Scalar> interest;
  Matrix<Scalar> social;

  Index num_players() const { return interest.rows(); }
  int num_topics() const { return static_cast<int>(interest.cols()); }
};

template <typename Scalar>
PlayerPayoffs<Scalar> gather_players(const Group& group, const NormalizedModel<Scalar>& model) {
  const auto n = static_cast<Index>(group.members.size());
  PlayerPayoffs<Scalar> out{Matrix<Scalar>(n, model.interest.cols()), Matrix<Scalar>(n, model.social.cols())};
  for (Index p = 0; p < n; ++p) {
    const Index user = group.members[static_cast<std::size_t>(p)];
    if (user < 0 || user >= model.interest.rows()) throw InputError("group member outside the model");
    out.interest.row(p) = model.interest.row(user);
    out.social.row(p) = model.social.row(user);
  }
  return out;
}

/// Number of players whose strategy is `topic`.
inline Index strategy_count(std::span<const int> profile, int topic) {
  Index c = 0;
  for (int s : profile) c += (s == topic);
  return c;
}

/// X_i = I_N(i, s_i) / Count(s_i); Count includes player i.
template <typename Scalar>
Scalar profit(Index player, std::span<const int> profile, const Matrix<Scalar>& interest) {
  const int topic = profile[static_cast<std::size_t>(player)];
  return interest(player, topic) / Scalar(strategy_count(profile, topic));
}

/// M_i = eta1 * (S_N(i,d) + 1 - I_N(i,d))^n for the player's own strategy d.
template <typename Scalar>
Scalar cost(Index player, int topic, const PlayerPayoffs<Scalar>& players, const GameConfig& cfg) {
  using std::pow;
  const Scalar base = players.social(player, topic) + Scalar(1) - players.interest(player, topic);
  return Scalar(cfg.cost_weight) * pow(base, Scalar(cfg.cost_exponent));
}

/// H_i = eta2 * (X_i - M_i).
template <typename Scalar>
Scalar utility(Index player, std::span<const int> profile, const PlayerPayoffs<Scalar>& players,
               const GameConfig& cfg) {
  const int topic = profile[static_cast<std::size_t>(player)];
  return Scalar(cfg.utility_weight) *
         (profit(player, profile, players.interest) - cost(player, topic, players, cfg));
}

/// Utility of `player` if it moved to `topic` while everyone else stays.
template <typename Scalar>
Scalar deviation_utility(Index player, int topic, std::span<const int> profile, const PlayerPayoffs<Scalar>& players,
                         const GameConfig& cfg) {
  std::vector<int> moved(profile.begin(), profile.end());
  moved[static_cast<std::size_t>(player)] = topic;
  return utility<Scalar>(player, moved, players, cfg);
}

/// Exhaustive argmax over the D strategies with the others fixed; ties go to
/// the smallest topic index.
template <typename Scalar>
int best_response(Index player, std::span<const int> profile, const PlayerPayoffs<Scalar>& players,
                  const GameConfig& cfg) {
  int best = 0;
  Scalar best_value = -std::numeric_limits<Scalar>::infinity();
  for (int d = 0; d < players.num_topics(); ++d) {
    const Scalar value = deviation_utility(player, d, profile, players, cfg);
    if (value > best_value) {
      best_value = value;
      best = d;
    }
  }
  return best;
}

template <typename Scalar>
struct Equilibrium {
  Index group_id = 0;
  std::vector<int> strategies;  // s_i*, in player order
  std::vector<Scalar> utilities;
  bool converged = false;
  int rounds_used = 0;
};

/// Returns true when no player can strictly raise its utility by a unilateral
/// change of strategy.
template <typename Scalar>
bool is_nash_equilibrium(std::span<const int> profile, const PlayerPayoffs<Scalar>& players, const GameConfig& cfg) {
  for (Index p = 0; p < players.num_players(); ++p) {
    const Scalar current = utility(p, profile, players, cfg);
    for (int d = 0; d < players.num_topics(); ++d)
      if (deviation_utility(p, d, profile, players, cfg) > current) return false;
  }
  return true;
}

/// Sequential best-response dynamics.
///
/// Players start on their highest-interest topic. Each round visits the
/// players in a freshly shuffled order; a player switches only if its best
/// response is strictly better than its current strategy. A round without any
/// switch ends the search as converged. `rounds_used` counts the rounds that
/// moved at least one player. If `max_rounds` rounds all move someone, the
/// profile with the highest total utility seen is returned unconverged.
template <typename Scalar>
Equilibrium<Scalar> find_equilibrium(const PlayerPayoffs<Scalar>& players, const GameConfig& cfg,
                                     std::uint64_t stream = 0) {
  cfg.validate();
  const Index n = players.num_players();
  if (n == 0) throw InputError("game has no players");

  std::vector<int> profile(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) {
    Index best = 0;
    players.interest.row(p).maxCoeff(&best);  // first maximum
    profile[static_cast<std::size_t>(p)] = static_cast<int>(best);
  }

  auto total_utility = [&](std::span<const int> prof) {
    Scalar total(0);
    for (Index p = 0; p < n; ++p) total += utility(p, prof, players, cfg);
    return total;
  };

  Rng rng = make_rng(cfg.seed, stream);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) order[static_cast<std::size_t>(p)] = p;

  std::vector<int> best_seen = profile;
  Scalar best_total = total_utility(profile);
  bool converged = false;
  int moving_rounds = 0;
  for (;;) {
    shuffle(order.begin(), order.end(), rng);
    bool moved = false;
    for (Index p : order) {
      const int response = best_response(p, profile, players, cfg);
      const auto slot = static_cast<std::size_t>(p);
      if (response != profile[slot] &&
          deviation_utility(p, response, profile, players, cfg) > utility(p, profile, players, cfg)) {
        profile[slot] = response;
        moved = true;
      }
    }
    if (!moved) {
      converged = true;
      break;
    }
    ++moving_rounds;
    const Scalar total = total_utility(profile);
    if (total > best_total) {
      best_total = total;
      best_seen = profile;
    }
    if (moving_rounds == cfg.max_rounds) {
      converged = is_nash_equilibrium<Scalar>(profile, players, cfg);
      break;
    }
  }

  Equilibrium<Scalar> eq;
  eq.strategies = converged ? profile : best_seen;
  eq.converged = converged;
  eq.rounds_used = moving_rounds;
  for (Index p = 0; p < n; ++p) eq.utilities.push_back(utility(p, eq.strategies, players, cfg));
  return eq;
}

template <typename Scalar>
Equilibrium<Scalar> find_equilibrium(const Group& group, const NormalizedModel<Scalar>& model,
                                     const GameConfig& cfg) {
  auto eq = find_equilibrium(gather_players(group, model), cfg, static_cast<std::uint64_t>(group.id));
  eq.group_id = group.id;
  return eq;
}

/// A_k = |{i : s_i* = k}| / |G|.
template <typename Scalar>
TopicDistribution recommend(const Equilibrium<Scalar>& eq, int num_topics) {
  if (eq.strategies.empty()) throw InputError("equilibrium has no players");
  Eigen::VectorXd ratios = Eigen::VectorXd::Zero(num_topics);
  for (int s : eq.strategies) {
    if (s < 0 || s >= num_topics) throw InputError("strategy outside topic range");
    ratios(s) += 1.0;
  }
  return TopicDistribution(ratios / static_cast<double>(eq.strategies.size()));
}

}  // namespace grouprec
