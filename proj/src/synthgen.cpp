#include "l2d/synthgen.hpp"

#include <algorithm>
#include <cmath>

namespace l2d {

namespace {

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

Vec2 normalized(Vec2 v) {
  double n = v.norm();
  return n > 1e-12 ? v * (1.0 / n) : Vec2{0, 0};
}

Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

// Fixed task layout. Variation across demonstrators comes from style, and
// within a demonstrator from the quality noise channels only.
constexpr Vec2 kStart{0.08, 0.10};
constexpr Vec2 kObject{0.52, 0.60};
constexpr Vec2 kGoal{0.90, 0.16};
constexpr double kGoalRadius = 0.05;

// Fine positioning near the object is hard for everyone: inside this radius
// the tremor of any noisy demonstrator is lifted to at least the floor, so
// grasp-phase segments carry little tier information on their own.
constexpr double kBottleneckRadius = 0.14;
constexpr double kBottleneckFloor = 0.045;

// Start-up ramp and goal hold are near-identical across tiers; these are the
// quality-indifferent initial/final regions. They are sized to be a real
// fraction of a trajectory so windows overlapping them carry no tier signal.
constexpr int kStartupSteps = 32;
constexpr double kLaunchSpeed = 0.008;
constexpr double kStartupTremorCap = 0.002;
constexpr double kSettleTremorCap = 0.004;
constexpr int kGraspHold = 6;
constexpr int kSettleHold = 24;

constexpr double kDetourBase = 0.15;
constexpr double kDetourSpan = 0.10;
constexpr double kOvershootBase = 0.15;
constexpr double kPauseRate = 0.06;

struct RolloutState {
  std::vector<std::vector<double>> rows;
  Vec2 pos = kStart;
  bool attached = false;
  int obs_dim = 4;

  void record(Vec2 p, Vec2 object) {
    std::vector<double> row(static_cast<size_t>(obs_dim), 0.0);
    Vec2 rel = attached ? Vec2{0, 0} : object - p;
    row[0] = p.x;
    row[1] = p.y;
    row[2] = rel.x;
    row[3] = rel.y;
    rows.push_back(std::move(row));
    pos = p;
  }
  int step() const { return static_cast<int>(rows.size()); }
};

double tremor_scale(const QualityParams& qp, const RolloutState& st, Vec2 ideal,
                    bool settling) {
  if (settling) return std::min(qp.jitter_std, kSettleTremorCap);
  if (st.step() < kStartupSteps) return std::min(qp.jitter_std, kStartupTremorCap);
  if (!st.attached && (ideal - kObject).norm() < kBottleneckRadius) {
    return qp.jitter_std > 0 ? std::max(qp.jitter_std, kBottleneckFloor) : 0.0;
  }
  return qp.jitter_std;
}

Vec2 with_tremor(Vec2 ideal, double scale, Rng& rng) {
  double nx = rng.normal();
  double ny = rng.normal();
  return {ideal.x + scale * nx, ideal.y + scale * ny};
}

// Cubic Bezier leg: the first control point sits on the chord so every style
// launches straight at the target and the curvature shows mid-leg. Stepped at
// constant arc speed.
void follow_leg(Vec2 a, Vec2 b, const Style& style, const QualityParams& qp,
                RolloutState& st, Rng& rng) {
  Vec2 perp = rot90(normalized(b - a));
  Vec2 c1 = a + (b - a) * 0.25;
  Vec2 c2 = (a + b) * 0.5 + perp * (style.approach_curvature * (b - a).norm());
  double s = 0.0;
  while (s < 1.0) {
    // launch crawl is common to all styles; personal pace builds up
    // quadratically over the startup window
    const double frac =
        std::min(1.0, static_cast<double>(st.step() + 1) / kStartupSteps);
    const double speed =
        kLaunchSpeed + (style.base_speed - kLaunchSpeed) * frac * frac;
    Vec2 deriv = (c1 - a) * (3.0 * (1 - s) * (1 - s)) +
                 (c2 - c1) * (6.0 * s * (1 - s)) + (b - c2) * (3.0 * s * s);
    double dn = std::max(deriv.norm(), 1e-9);
    s = std::min(1.0, s + speed / dn);
    const double u = 1.0 - s;
    Vec2 ideal = a * (u * u * u) + c1 * (3 * s * u * u) + c2 * (3 * s * s * u) +
                 b * (s * s * s);
    bool in_bottleneck = !st.attached && (ideal - kObject).norm() < kBottleneckRadius;
    bool pause_eligible = st.step() >= kStartupSteps && !in_bottleneck;
    if (pause_eligible && qp.pause_prob > 0 &&
        rng.uniform() < qp.pause_prob * kPauseRate) {
      int hold = 4 + static_cast<int>(rng.uniform_int(5));
      Vec2 at = ideal;
      for (int h = 0; h < hold; ++h) {
        st.record(with_tremor(at, tremor_scale(qp, st, at, false), rng), kObject);
      }
    }
    st.record(with_tremor(ideal, tremor_scale(qp, st, ideal, false), rng), kObject);
  }
}

std::vector<Vec2> build_legs(Vec2 a, Vec2 b, const Style& style,
                             const QualityParams& qp, Rng& rng) {
  std::vector<Vec2> points;
  if (qp.detour_prob > 0 && rng.uniform() < qp.detour_prob) {
    double mag = kDetourBase + kDetourSpan * rng.uniform();
    Vec2 perp = rot90(normalized(b - a)) * static_cast<double>(style.preferred_detour_side);
    points.push_back((a + b) * 0.5 + perp * mag);
  }
  if (qp.overshoot_gain > 0) {
    Vec2 from = points.empty() ? a : points.back();
    Vec2 dir = normalized(b - from);
    double mag = qp.overshoot_gain * kOvershootBase * (0.5 + 0.5 * rng.uniform());
    points.push_back(b + dir * mag);
  }
  points.push_back(b);
  return points;
}

}  // namespace

QualityParams default_tier_params(int rank, int n_tiers) {
  if (n_tiers == 3) {
    static const QualityParams table[3] = {
        {0.08, 0.5, 0.3, 0.5},  // bad
        {0.04, 0.2, 0.1, 0.2},  // okay
        {0.01, 0.0, 0.0, 0.0},  // good
    };
    return table[rank];
  }
  const QualityParams worst{0.08, 0.5, 0.3, 0.5};
  const QualityParams best{0.01, 0.0, 0.0, 0.0};
  double f = n_tiers > 1 ? static_cast<double>(rank) / (n_tiers - 1) : 1.0;
  return {worst.jitter_std + f * (best.jitter_std - worst.jitter_std),
          worst.detour_prob + f * (best.detour_prob - worst.detour_prob),
          worst.pause_prob + f * (best.pause_prob - worst.pause_prob),
          worst.overshoot_gain + f * (best.overshoot_gain - worst.overshoot_gain)};
}

DemonstratorProfile make_profile(int index, const TierLadder& ladder,
                                 const Rng& root) {
  Rng rng = root.fork(0x5a17 + static_cast<uint64_t>(index));
  DemonstratorProfile p;
  p.id = "d" + std::to_string(index);
  p.style.approach_curvature = rng.uniform(-0.45, 0.45);
  p.style.preferred_detour_side = rng.uniform_int(2) == 0 ? -1 : +1;
  p.style.base_speed = rng.uniform(0.008, 0.020);
  // Each demonstrator expresses suboptimality through a different mix of the
  // knobs (jitter-heavy, pause-heavy, ...). Scaling a knob by the same factor
  // across tiers preserves the tier monotonicity invariant.
  const double jitter_w = rng.uniform(0.2, 1.8);
  const double detour_w = rng.uniform(0.2, 1.8);
  const double pause_w = rng.uniform(0.2, 1.8);
  const double overshoot_w = rng.uniform(0.2, 1.8);
  const int n = static_cast<int>(ladder.size());
  for (int r = 0; r < n; ++r) {
    QualityParams qp = default_tier_params(r, n);
    qp.jitter_std *= jitter_w;
    qp.detour_prob = std::min(1.0, qp.detour_prob * detour_w);
    qp.pause_prob = std::min(1.0, qp.pause_prob * pause_w);
    qp.overshoot_gain *= overshoot_w;
    p.tier_params.push_back(qp);
  }
  return p;
}

std::vector<std::vector<double>> rollout(const Style& style,
                                         const QualityParams& qp, int obs_dim,
                                         int min_length, Rng& rng) {
  if (obs_dim < 4) throw ConfigError("rollout requires obs_dim >= 4");
  RolloutState st;
  st.obs_dim = obs_dim;
  st.record(kStart, kObject);

  for (Vec2 wp : build_legs(kStart, kObject, style, qp, rng)) {
    follow_leg(st.pos, wp, style, qp, st, rng);
  }
  // grasp hold: bottleneck tremor for every tier
  for (int h = 0; h < kGraspHold; ++h) {
    st.record(with_tremor(kObject, tremor_scale(qp, st, kObject, false), rng), kObject);
  }
  st.attached = true;
  for (Vec2 wp : build_legs(kObject, kGoal, style, qp, rng)) {
    follow_leg(st.pos, wp, style, qp, st, rng);
  }
  // place hold inside the goal region; pad to min_length here
  int hold = kSettleHold;
  while (hold > 0 || st.step() < min_length) {
    st.record(with_tremor(kGoal, tremor_scale(qp, st, kGoal, true), rng), kObject);
    if (hold > 0) --hold;
  }
  return st.rows;
}

std::pair<double, double> goal_center() { return {kGoal.x, kGoal.y}; }
double goal_radius() { return kGoalRadius; }

Corpus generate_corpus(const GenConfig& cfg, uint64_t seed) {
  if (cfg.n_demonstrators < 2) throw ConfigError("need at least 2 demonstrators");
  if (cfg.per_tier_count < 1) throw ConfigError("per_tier_count must be >= 1");
  if (cfg.obs_dim < 4) throw ConfigError("obs_dim must be >= 4");
  validate_ladder(cfg.ladder);

  Rng root(seed);
  Corpus corpus(cfg.obs_dim, cfg.ladder);
  const int n_tiers = static_cast<int>(cfg.ladder.size());
  for (int d = 0; d < cfg.n_demonstrators; ++d) {
    DemonstratorProfile prof = make_profile(d, cfg.ladder, root);
    for (int r = 0; r < n_tiers; ++r) {
      for (int j = 0; j < cfg.per_tier_count; ++j) {
        const uint64_t traj_index =
            (static_cast<uint64_t>(d) * n_tiers + r) * cfg.per_tier_count + j;
        Rng traj_rng = root.fork(traj_index);
        Trajectory t;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%03d", j);
        t.id = prof.id + "_" + cfg.ladder[r].name + "_" + buf;
        t.demonstrator = prof.id;
        t.label = cfg.ladder[r];
        t.obs = rollout(prof.style, prof.tier_params[r], cfg.obs_dim,
                        cfg.min_length, traj_rng);
        corpus.add(std::move(t));
      }
    }
  }
  return corpus;
}

}  // namespace l2d
