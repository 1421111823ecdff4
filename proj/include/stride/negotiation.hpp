#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stride/behavior.hpp"

namespace stride::behavior {

struct AgentParams
{
  NegotiationParams negotiation;
  GameMode mode = GameMode::Tournament;
  double heartbeat_period = 0.5;
  /// Silence after which the striker is presumed lost.
  double heartbeat_timeout = 2.0;
  /// Extra wait per player id before claiming a vacant striker role, so the
  /// lowest id takes over first.
  double takeover_stagger = 0.25;
  double grant_retry_interval = 0.2;
  int max_grant_retries = 3;
  /// Minimum spacing of requests from one player.
  double request_interval = 0.5;
};

/// Striker claim ordering: higher epoch wins, lower id breaks ties.
struct Claim
{
  std::uint64_t epoch = 0;
  int player = -1;

  bool beats(const Claim& other) const
  {
    return epoch != other.epoch ? epoch > other.epoch : player < other.player;
  }
};

/// One player's side of the striker-as-server protocol. A striker keeps its
/// claim until the promoted player acknowledges the grant, so at every instant
/// at least one player claims the role; among concurrent claims the highest
/// one is the effective striker and the others demote when they hear it.
class RoleAgent
{
public:
  RoleAgent(int id, Role role, const AgentParams& params, std::uint64_t epoch = 1);

  int id() const { return id_; }
  Role role() const { return role_; }
  bool claims_striker() const { return role_ == Role::Striker; }
  Claim claim() const { return {epoch_, id_}; }

  /// Processes the inbox and emits this tick's messages. `utility` is the
  /// player's own distance to the ball.
  std::vector<RoleMessage> step(double now, double utility, const std::vector<RoleMessage>& inbox);

private:
  struct PendingGrant
  {
    int target = -1;
    Role target_role = Role::Defender;
    std::uint64_t epoch = 0;
    int sent = 0;
    double last_sent = 0.0;
  };

  RoleMessage make(MessageKind kind, int target, double utility, std::uint64_t epoch);
  void hear_striker(const Claim& claim, double utility, double now);
  void demote(Role to);

  int id_;
  Role role_;
  AgentParams params_;
  std::uint64_t epoch_ = 0;
  std::uint64_t seq_ = 0;
  Claim known_striker_;
  double striker_utility_ = 0.0;
  double last_heard_ = 0.0;
  double last_heartbeat_ = -1e9;
  double last_request_ = -1e9;
  std::optional<PendingGrant> pending_;
  /// Role to fall back to when a claim is superseded.
  Role fallback_ = Role::Defender;
};

} // namespace stride::behavior
