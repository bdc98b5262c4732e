#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sttpp/hawkes.hpp"
#include "sttpp/rng.hpp"

namespace sttpp::sim {

using hawkes::Embedding;
using hawkes::HawkesParams;
using hawkes::MarkSpace;

struct SimEvent {
  double t = 0.0;
  std::size_t beat = 0;
  Embedding embedding;
  std::optional<std::size_t> parent;  // absent = background
};

struct SimConfig {
  HawkesParams params;
  MarkSpace omega;
  Vec mark_dist;  // background mark law over omega
  std::uint64_t seed = 1;
  std::size_t max_events = 1'000'000;
};

// Expected total offspring of a single event, maximized over the parent's
// beat and mark: max_{v, h_j} sum_k alpha_{k,v} * (S' h~_j). The temporal
// kernel integrates to one, so this is exactly the branching ratio.
inline double branching_ratio(const HawkesParams& params,
                              const MarkSpace& omega) {
  double max_col = 0.0;
  for (std::size_t v = 0; v < params.d(); ++v) {
    double col = 0.0;
    for (std::size_t k = 0; k < params.d(); ++k) col += params.A(k, v);
    max_col = std::max(max_col, col);
  }
  double max_weight = 0.0;
  for (const auto& h : omega.members) {
    max_weight = std::max(max_weight, hawkes::omega_weight(omega, h));
  }
  return max_col * max_weight;
}

// Branching construction. Background arrivals in beat k form a homogeneous
// Poisson process of rate mu_k |Omega| with marks drawn from mark_dist.
// Each event (t_j, v, h_j) spawns, per target cell (k, h in Omega), a
// Poisson number of offspring with mean alpha_{k,v} (1 - e^{-beta(T-t_j)})
// h~' h~_j; offspring times come from inverting the truncated exponential
// kernel CDF, so no thinning rejection is needed.
inline std::vector<SimEvent> simulate(const SimConfig& config) {
  const auto& params = config.params;
  const auto& omega = config.omega;
  if (omega.size() == 0) throw std::invalid_argument("simulate: empty mark space");
  if (config.mark_dist.size() != omega.size()) {
    throw std::invalid_argument("simulate: mark_dist size mismatch");
  }
  if (std::abs(std::accumulate(config.mark_dist.begin(), config.mark_dist.end(),
                               0.0) - 1.0) > 1e-9) {
    throw std::invalid_argument("simulate: mark_dist must sum to 1");
  }
  if (branching_ratio(params, omega) >= 1.0) {
    throw std::runtime_error("simulate: branching ratio >= 1, process explodes");
  }

  Rng rng(config.seed);
  const double T = params.T;
  std::vector<SimEvent> events;

  // background generation, beat by beat
  for (std::size_t k = 0; k < params.d(); ++k) {
    const double rate = params.mu[k] * static_cast<double>(omega.size());
    double t = rng.exponential(rate);
    while (t < T) {
      SimEvent e;
      e.t = t;
      e.beat = k;
      e.embedding = omega.members[rng.categorical(config.mark_dist)];
      events.push_back(std::move(e));
      t += rng.exponential(rate);
    }
  }

  // cluster expansion over the growing event list
  for (std::size_t idx = 0; idx < events.size(); ++idx) {
    if (events.size() > config.max_events) {
      throw std::runtime_error("simulate: max_events cap exceeded");
    }
    const double t_j = events[idx].t;
    const std::size_t v = events[idx].beat;
    const Embedding h_j = events[idx].embedding;  // copy: vector reallocates
    const double horizon_mass = 1.0 - std::exp(-params.beta * (T - t_j));
    for (std::size_t k = 0; k < params.d(); ++k) {
      const double alpha = params.A(k, v);
      if (alpha <= 0.0) continue;
      for (std::size_t hi = 0; hi < omega.size(); ++hi) {
        const double sim_weight = hawkes::dot_normalized(omega.members[hi], h_j);
        const double mean = alpha * horizon_mass * sim_weight;
        const std::uint64_t count = rng.poisson(mean);
        for (std::uint64_t c = 0; c < count; ++c) {
          // inverse CDF of the exponential kernel truncated to (t_j, T]
          const double u = rng.uniform();
          const double dt = -std::log(1.0 - u * horizon_mass) / params.beta;
          SimEvent child;
          child.t = t_j + dt;
          child.beat = k;
          child.embedding = omega.members[hi];
          child.parent = idx;
          events.push_back(std::move(child));
        }
      }
    }
  }

  // sort by time, remapping parent indices
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (events[a].t != events[b].t) return events[a].t < events[b].t;
    return a < b;
  });
  std::vector<std::size_t> rank(events.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  std::vector<SimEvent> sorted;
  sorted.reserve(events.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    SimEvent e = std::move(events[order[pos]]);
    if (e.parent) e.parent = rank[*e.parent];
    sorted.push_back(std::move(e));
  }
  // enforce strictly increasing times after floating-point collisions
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].t <= sorted[i - 1].t) {
      sorted[i].t = std::nextafter(sorted[i - 1].t, T + 1.0);
    }
  }
  return sorted;
}

// All pairs (i, j), i < j, sharing a cluster root: the transitive closure
// of parent links, matching the crime-series notion of linkage.
inline std::vector<std::pair<std::size_t, std::size_t>> truth_pairs(
    const std::vector<SimEvent>& events) {
  std::vector<std::size_t> root(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    root[i] = events[i].parent ? root[*events[i].parent] : i;
  }
  std::vector<std::vector<std::size_t>> clusters(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) clusters[root[i]].push_back(i);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& members : clusters) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        pairs.emplace_back(members[a], members[b]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace sttpp::sim
