#pragma once

// Manhattan grid with Krauss car following and random turns at intersections.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cv2x/phy.hpp"
#include "cv2x/random.hpp"

namespace cv2x::mobility {

enum class Heading { north, east, south, west };
enum class Turn { left, right, straight };

inline constexpr std::array<Turn, 3> kTurns{Turn::left, Turn::right, Turn::straight};
inline constexpr std::array<double, 3> kTurnWeights{0.25, 0.25, 0.5};

inline const char* to_string(Turn t) {
  switch (t) {
    case Turn::left: return "left";
    case Turn::right: return "right";
    case Turn::straight: return "straight";
  }
  return "?";
}

inline Heading turned(Heading h, Turn t) {
  const int k = static_cast<int>(h);
  switch (t) {
    case Turn::left: return static_cast<Heading>((k + 3) % 4);
    case Turn::right: return static_cast<Heading>((k + 1) % 4);
    case Turn::straight: return h;
  }
  return h;
}

struct KraussParams {
  double accel = 2.6;   // m/s^2
  double decel = 4.5;   // m/s^2
  double v_max = 13.9;  // m/s
  double tau = 1.0;     // s
  double eta = 0.5;     // driver imperfection
  double length = 5.0;  // m
  double min_gap = 2.5; // m

  double spacing() const { return length + min_gap; }
};

struct MobilityConfig {
  int rows = 5;  // intersections
  int cols = 5;
  double block_m = 250.0;
  double step_s = 0.1;
  KraussParams krauss;

  void validate() const {
    if (rows < 2 || cols < 2) throw std::invalid_argument("mobility grid needs at least 2x2 intersections");
    if (!(block_m > 0.0)) throw std::invalid_argument("mobility.block_m must be positive");
    if (!(step_s > 0.0)) throw std::invalid_argument("mobility.step_s must be positive");
    const auto& k = krauss;
    if (!(k.accel > 0 && k.decel > 0 && k.v_max > 0 && k.tau > 0 && k.length > 0 && k.min_gap >= 0))
      throw std::invalid_argument("Krauss parameters must be positive");
    if (!(k.eta >= 0.0 && k.eta <= 1.0)) throw std::invalid_argument("Krauss eta must lie in [0,1]");
    if (block_m < 2.0 * k.spacing()) throw std::invalid_argument("mobility.block_m too short for one vehicle");
  }
};

/// Directed single-lane edges between neighbouring intersections, both directions.
class RoadNetwork {
 public:
  struct Edge {
    int from = 0;
    int to = 0;
    Heading heading = Heading::north;
    double length = 0.0;
  };

  RoadNetwork(int rows, int cols, double block_m) : rows_(rows), cols_(cols), block_(block_m) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs at least 2x2 intersections");
    out_.assign(static_cast<std::size_t>(rows * cols), {-1, -1, -1, -1});
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
          const int nr = r + (h == Heading::north) - (h == Heading::south);
          const int nc = c + (h == Heading::east) - (h == Heading::west);
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          out_[static_cast<std::size_t>(node(r, c))][static_cast<std::size_t>(h)] = static_cast<int>(edges_.size());
          edges_.push_back({node(r, c), node(nr, nc), h, block_m});
        }
      }
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int node(int r, int c) const { return r * cols_ + c; }
  int node_count() const { return rows_ * cols_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  Vec2 node_position(int n) const { return {(n % cols_) * block_, (n / cols_) * block_}; }

  std::optional<int> out_edge(int n, Heading h) const {
    const int e = out_[static_cast<std::size_t>(n)][static_cast<std::size_t>(h)];
    return e < 0 ? std::nullopt : std::optional<int>(e);
  }

  int out_degree(int n) const {
    return static_cast<int>(std::count_if(out_[static_cast<std::size_t>(n)].begin(),
                                          out_[static_cast<std::size_t>(n)].end(), [](int e) { return e >= 0; }));
  }

  /// Edge reached by taking `t` at the end of edge `e`, if that road exists.
  std::optional<int> after_turn(int e, Turn t) const {
    const auto& ed = edge(e);
    return out_edge(ed.to, turned(ed.heading, t));
  }

  Vec2 position(int e, double offset) const {
    const auto& ed = edge(e);
    const Vec2 a = node_position(ed.from);
    switch (ed.heading) {
      case Heading::north: return {a.x, a.y + offset};
      case Heading::south: return {a.x, a.y - offset};
      case Heading::east: return {a.x + offset, a.y};
      case Heading::west: return {a.x - offset, a.y};
    }
    return a;
  }

 private:
  int rows_;
  int cols_;
  double block_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 4>> out_;
};

/// Draws left/right/straight with weights 0.25/0.25/0.5 over the available subset.
inline Turn choose_turn(Rng& rng, std::array<bool, 3> available = {true, true, true}) {
  double total = 0.0;
  for (std::size_t k = 0; k < 3; ++k)
    if (available[k]) total += kTurnWeights[k];
  if (total <= 0.0) throw std::invalid_argument("dead end: no turn available");
  double u = unit_interval(rng()) * total;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!available[k]) continue;
    if (u < kTurnWeights[k]) return kTurns[k];
    u -= kTurnWeights[k];
  }
  for (std::size_t k = 3; k-- > 0;)
    if (available[k]) return kTurns[k];
  return Turn::straight;
}

struct LeaderInfo {
  double gap = 0.0;  // net gap minus the minimum gap, metres
  double speed = 0.0;
};

struct KraussUpdate {
  double speed = 0.0;
  bool overlap = false;
};

/// One Krauss speed update. `u` is the dawdling draw in [0,1).
inline KraussUpdate krauss_speed(double v, const std::optional<LeaderInfo>& leader, const KraussParams& p, double dt,
                                 double u) {
  if (!(dt > 0.0)) throw std::invalid_argument("Krauss step needs dt > 0");
  if (leader && leader->gap < 0.0) return {0.0, true};
  double v_safe = std::numeric_limits<double>::infinity();
  if (leader) {
    const double vl = leader->speed;
    v_safe = vl + (leader->gap - vl * p.tau) / ((v + vl) / (2.0 * p.decel) + p.tau);
  }
  const double v_des = std::min({v + p.accel * dt, v_safe, p.v_max});
  return {std::max(0.0, v_des - p.eta * p.accel * dt * u), false};
}

struct VehicleKinematics {
  int edge = 0;
  double offset = 0.0;
  double speed = 0.0;
  int next_edge = 0;  // decided on entering `edge`
};

/// Speed update plus straight-line advance along the current edge (no edge transition).
inline KraussUpdate krauss_step(VehicleKinematics& self, const std::optional<LeaderInfo>& leader,
                                const KraussParams& p, double dt, Rng& rng) {
  const auto up = krauss_speed(self.speed, leader, p, dt, unit_interval(rng()));
  self.speed = up.speed;
  self.offset += up.speed * dt;
  return up;
}

struct TurnEvent {
  Turn turn = Turn::straight;
  bool interior = false;  // all three directions were available
};

struct StepStats {
  int gap_violations = 0;   // Krauss inputs with a negative gap
  int emergency_stops = 0;  // moves shortened to keep spacing
};

// Vehicles keep `spacing` along their lane. Across an intersection the lane continues onto
// next_edge, and vehicles from different roads bound for the same next_edge queue by their
// remaining distance to the intersection.
class World {
 public:
  World(const MobilityConfig& cfg, int n_vehicles, Rng rng)
      : cfg_(cfg), net_(cfg.rows, cfg.cols, cfg.block_m), rng_(std::move(rng)) {
    cfg_.validate();
    if (n_vehicles < 0) throw std::invalid_argument("vehicle count must be non-negative");
    const double spacing = cfg_.krauss.spacing();
    const double usable = cfg_.block_m - spacing;
    const auto capacity = static_cast<long long>(net_.edges().size()) * static_cast<long long>(usable / spacing);
    if (n_vehicles > capacity / 2) throw std::invalid_argument("too many vehicles for the road network");

    on_edge_.resize(net_.edges().size());
    const auto edge_count = static_cast<int>(net_.edges().size());
    std::uniform_int_distribution<int> pick_edge(0, edge_count - 1);
    while (static_cast<int>(vehicles_.size()) < n_vehicles) {
      VehicleKinematics v;
      v.edge = pick_edge(rng_);
      v.offset = unit_interval(rng_()) * usable;
      v.next_edge = pick_next(v.edge, nullptr);
      if (!spawn_clear(v)) continue;
      on_edge_[static_cast<std::size_t>(v.edge)].push_back(static_cast<int>(vehicles_.size()));
      vehicles_.push_back(v);
    }
  }

  const RoadNetwork& network() const { return net_; }
  const MobilityConfig& config() const { return cfg_; }
  const std::vector<VehicleKinematics>& vehicles() const { return vehicles_; }
  std::size_t size() const { return vehicles_.size(); }
  const std::vector<TurnEvent>& turn_events() const { return turns_; }
  void clear_turn_events() { turns_.clear(); }

  Vec2 position(int i) const {
    const auto& v = vehicles_[static_cast<std::size_t>(i)];
    return net_.position(v.edge, v.offset);
  }

  std::vector<Vec2> positions() const {
    std::vector<Vec2> out;
    out.reserve(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) out.push_back(position(static_cast<int>(i)));
    return out;
  }

  double distance(int a, int b) const { return cv2x::distance(position(a), position(b)); }

  /// Advances every vehicle by one mobility step.
  StepStats step() {
    const double dt = cfg_.step_s;
    const auto& kp = cfg_.krauss;
    StepStats stats;

    // Speeds from the pre-step snapshot.
    std::vector<double> speed(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      const double u = unit_interval(rng_());
      const double v = vehicles_[i].speed;
      const auto up = krauss_speed(v, lane_leader(static_cast<int>(i)), kp, dt, u);
      if (up.overlap) ++stats.gap_violations;
      speed[i] = up.speed;
      if (auto m = merge_leader(static_cast<int>(i))) speed[i] = std::min(speed[i], krauss_speed(v, m, kp, dt, u).speed);
    }

    // Closest to the next intersection first; every move is capped by live positions.
    std::vector<int> order(vehicles_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [this](int a, int b) {
      const double da = to_end(a), db = to_end(b);
      return da != db ? da < db : a < b;
    });
    for (int i : order) {
      if (advance(i, speed[static_cast<std::size_t>(i)], dt)) ++stats.emergency_stops;
    }
    return stats;
  }

  /// Vehicles whose lane leader (same edge, or first on next_edge) is closer than length + min_gap.
  int spacing_violations(double tolerance = 1e-9) const {
    int count = 0;
    for (std::size_t i = 0; i < vehicles_.size(); ++i)
      if (auto l = lane_leader(static_cast<int>(i)); l && l->gap < -tolerance) ++count;
    return count;
  }

  /// Lane leader gap net of min_gap, or nullopt with no leader in reach.
  std::optional<LeaderInfo> lane_leader(int i) const {
    const auto& v = vehicles_[static_cast<std::size_t>(i)];
    const double spacing = cfg_.krauss.spacing();
    if (auto j = ahead_on(v.edge, v.offset, i)) {
      const auto& l = vehicles_[static_cast<std::size_t>(*j)];
      return LeaderInfo{l.offset - v.offset - spacing, l.speed};
    }
    if (auto j = ahead_on(v.next_edge, -1.0, i)) {
      const auto& l = vehicles_[static_cast<std::size_t>(*j)];
      return LeaderInfo{to_end(i) + l.offset - spacing, l.speed};
    }
    return std::nullopt;
  }

  /// The vehicle on another road that reaches the same next_edge just before i.
  std::optional<LeaderInfo> merge_leader(int i) const {
    const auto& v = vehicles_[static_cast<std::size_t>(i)];
    const double di = to_end(i);
    std::optional<int> best;
    double best_d = 0.0;
    for (std::size_t k = 0; k < vehicles_.size(); ++k) {
      const int j = static_cast<int>(k);
      const auto& w = vehicles_[k];
      if (j == i || w.next_edge != v.next_edge || w.edge == v.edge) continue;
      const double dj = to_end(j);
      if (dj > di || (dj == di && j > i)) continue;
      if (!best || dj > best_d || (dj == best_d && j > *best)) {
        best = j;
        best_d = dj;
      }
    }
    if (!best) return std::nullopt;
    return LeaderInfo{di - best_d - cfg_.krauss.spacing(), vehicles_[static_cast<std::size_t>(*best)].speed};
  }

 private:
  double to_end(int i) const {
    const auto& v = vehicles_[static_cast<std::size_t>(i)];
    return net_.edge(v.edge).length - v.offset;
  }

  bool spawn_clear(const VehicleKinematics& c) const {
    const double spacing = cfg_.krauss.spacing();
    const double dc = net_.edge(c.edge).length - c.offset;
    for (const auto& w : vehicles_) {
      const double dw = net_.edge(w.edge).length - w.offset;
      if (w.edge == c.edge && std::abs(w.offset - c.offset) < spacing) return false;
      if (w.edge == c.next_edge && dc + w.offset < spacing) return false;
      if (c.edge == w.next_edge && dw + c.offset < spacing) return false;
      if (w.next_edge == c.next_edge && w.edge != c.edge && std::abs(dw - dc) < spacing) return false;
    }
    return true;
  }

  int pick_next(int e, std::vector<TurnEvent>* log) {
    std::array<bool, 3> avail{};
    for (std::size_t k = 0; k < 3; ++k) avail[k] = net_.after_turn(e, kTurns[k]).has_value();
    const Turn t = choose_turn(rng_, avail);
    if (log != nullptr) log->push_back({t, avail[0] && avail[1] && avail[2]});
    return *net_.after_turn(e, t);
  }

  // Closest vehicle on edge e (other than `self`) with offset strictly greater than `after`.
  std::optional<int> ahead_on(int e, double after, int self) const {
    std::optional<int> best;
    for (int j : on_edge_[static_cast<std::size_t>(e)]) {
      if (j == self) continue;
      const double o = vehicles_[static_cast<std::size_t>(j)].offset;
      if (o > after && (!best || o < vehicles_[static_cast<std::size_t>(*best)].offset)) best = j;
    }
    return best;
  }

  void leave(int i, int e) {
    auto& list = on_edge_[static_cast<std::size_t>(e)];
    list.erase(std::find(list.begin(), list.end(), i));
  }

  // Returns true when the move had to be shortened.
  bool advance(int i, double v_new, double dt) {
    auto& v = vehicles_[static_cast<std::size_t>(i)];
    const double spacing = cfg_.krauss.spacing();
    const double len = net_.edge(v.edge).length;
    const double start = v.offset;
    const double wanted = start + v_new * dt;

    // Furthest admissible offset, in lane coordinates that run past len onto next_edge.
    double limit = std::numeric_limits<double>::infinity();
    if (auto j = ahead_on(v.edge, start, i)) limit = vehicles_[static_cast<std::size_t>(*j)].offset - spacing;
    if (auto j = ahead_on(v.next_edge, -1.0, i))
      limit = std::min(limit, len + vehicles_[static_cast<std::size_t>(*j)].offset - spacing);
    else
      limit = std::min(limit, len + net_.edge(v.next_edge).length - spacing);
    if (auto m = merge_leader(i)) limit = std::min(limit, start + m->gap);

    double target = wanted;
    bool clamped = false;
    if (target > limit) {
      target = std::max(start, limit);
      clamped = true;
    }
    v.speed = clamped ? (target - start) / dt : v_new;
    if (target <= len) {
      v.offset = target;
      return clamped;
    }
    leave(i, v.edge);
    v.edge = v.next_edge;
    v.offset = target - len;
    on_edge_[static_cast<std::size_t>(v.edge)].push_back(i);
    v.next_edge = pick_next(v.edge, &turns_);
    return clamped;
  }

  MobilityConfig cfg_;
  RoadNetwork net_;
  Rng rng_;
  std::vector<VehicleKinematics> vehicles_;
  std::vector<std::vector<int>> on_edge_;
  std::vector<TurnEvent> turns_;
};

}  // namespace cv2x::mobility
