#include "stride/negotiation.hpp"

namespace stride::behavior {

RoleAgent::RoleAgent(int id, Role role, const AgentParams& params, std::uint64_t epoch)
  : id_(id)
  , role_(role)
  , params_(params)
  , fallback_(role == Role::Striker ? Role::Defender : role)
{
  if (role_ == Role::Striker) {
    epoch_ = epoch;
    known_striker_ = {epoch, id};
  } else {
    known_striker_ = {epoch, -1};
  }
}

RoleMessage RoleAgent::make(MessageKind kind, int target, double utility, std::uint64_t epoch)
{
  RoleMessage m;
  m.kind = kind;
  m.sender = id_;
  m.target = target;
  m.utility = utility;
  m.seq = ++seq_;
  m.epoch = epoch;
  m.role = role_;
  return m;
}

void RoleAgent::hear_striker(const Claim& claim, double utility, double now)
{
  if (claim.beats(known_striker_) || (claim.epoch == known_striker_.epoch && claim.player == known_striker_.player)) {
    known_striker_ = claim;
    striker_utility_ = utility;
    last_heard_ = now;
  }
}

void RoleAgent::demote(Role to)
{
  role_ = to;
  fallback_ = to;
  pending_.reset();
}

std::vector<RoleMessage> RoleAgent::step(double now, double utility, const std::vector<RoleMessage>& inbox)
{
  std::vector<RoleMessage> out;
  auto heartbeat = [&] {
    out.push_back(make(MessageKind::Heartbeat, -1, utility, epoch_));
    last_heartbeat_ = now;
  };

  for (const auto& m : inbox) {
    if (m.sender == id_ || (m.target != -1 && m.target != id_)) {
      continue;
    }
    switch (m.kind) {
    case MessageKind::Heartbeat: {
      const Claim c{m.epoch, m.sender};
      if (claims_striker() && c.beats(claim())) {
        demote(pending_ ? pending_->target_role : fallback_);
      }
      hear_striker(c, m.utility, now);
      break;
    }
    case MessageKind::Request: {
      if (!claims_striker() || m.role == Role::Goalie) {
        break;
      }
      if (pending_) {
        if (pending_->target != m.sender) {
          out.push_back(make(MessageKind::Deny, m.sender, utility, epoch_));
        }
        break;
      }
      if (params_.mode == GameMode::DropIn || !should_request(m.utility, utility, params_.negotiation)) {
        out.push_back(make(MessageKind::Deny, m.sender, utility, epoch_));
        break;
      }
      pending_ = PendingGrant{m.sender, m.role, epoch_ + 1, 1, now};
      out.push_back(make(MessageKind::Grant, m.sender, utility, epoch_ + 1));
      break;
    }
    case MessageKind::Grant: {
      const Claim offered{m.epoch, id_};
      if (claims_striker() && epoch_ == m.epoch) {
        out.push_back(make(MessageKind::Ack, m.sender, utility, m.epoch));
        break;
      }
      if (claims_striker() || role_ == Role::Goalie || !offered.beats(known_striker_)) {
        break;
      }
      fallback_ = role_;
      role_ = Role::Striker;
      epoch_ = m.epoch;
      known_striker_ = offered;
      striker_utility_ = utility;
      last_heard_ = now;
      out.push_back(make(MessageKind::Ack, m.sender, utility, m.epoch));
      heartbeat();
      break;
    }
    case MessageKind::Ack: {
      if (pending_ && pending_->target == m.sender && pending_->epoch == m.epoch) {
        hear_striker({m.epoch, m.sender}, m.utility, now);
        demote(pending_->target_role);
      }
      break;
    }
    case MessageKind::Deny:
      break;
    }
  }

  if (claims_striker()) {
    if (pending_ && now - pending_->last_sent >= params_.grant_retry_interval) {
      if (pending_->sent <= params_.max_grant_retries) {
        ++pending_->sent;
        pending_->last_sent = now;
        out.push_back(make(MessageKind::Grant, pending_->target, utility, pending_->epoch));
      } else {
        // Never acknowledged: reclaim above the epoch that was offered.
        epoch_ = pending_->epoch + 1;
        pending_.reset();
        known_striker_ = claim();
        heartbeat();
      }
    }
    if (now - last_heartbeat_ >= params_.heartbeat_period) {
      heartbeat();
    }
    known_striker_ = claim();
    striker_utility_ = utility;
    last_heard_ = now;
    return out;
  }

  // Drop-in roles are fixed for the whole game.
  if (role_ == Role::Goalie || params_.mode == GameMode::DropIn) {
    return out;
  }
  if (now - last_heard_ > params_.heartbeat_timeout + params_.takeover_stagger * id_) {
    fallback_ = role_;
    role_ = Role::Striker;
    epoch_ = known_striker_.epoch + 1;
    known_striker_ = claim();
    last_heard_ = now;
    heartbeat();
    return out;
  }
  if (params_.mode == GameMode::Tournament && known_striker_.player >= 0 &&
      should_request(utility, striker_utility_, params_.negotiation) &&
      now - last_request_ >= params_.request_interval) {
    last_request_ = now;
    out.push_back(make(MessageKind::Request, known_striker_.player, utility, known_striker_.epoch));
  }
  return out;
}

} // namespace stride::behavior
