#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sttpp/hawkes.hpp"
#include "sttpp/rbm.hpp"
#include "sttpp/rng.hpp"
#include "sttpp/simulate.hpp"

namespace sttpp::eval {

// unordered event-id pairs, stored with the lexicographically smaller id first
using PairSet = std::set<std::pair<std::string, std::string>>;

inline std::pair<std::string, std::string> make_pair_key(std::string a,
                                                         std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// P = |U n V| / |V|, R = |U n V| / |U|; empty denominators score 0,
// as does F1 when P + R = 0
inline Prf precision_recall_f1(const PairSet& retrieved, const PairSet& truth) {
  std::size_t hit = 0;
  for (const auto& p : retrieved) {
    if (truth.count(p)) ++hit;
  }
  Prf out;
  out.precision = retrieved.empty()
                      ? 0.0
                      : static_cast<double>(hit) / static_cast<double>(retrieved.size());
  out.recall = truth.empty()
                   ? 0.0
                   : static_cast<double>(hit) / static_cast<double>(truth.size());
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

// Mean silhouette over points: (b - a) / max(a, b), with a the mean
// intra-cluster distance (self excluded), b the smallest mean distance to
// another cluster. Singleton points and the degenerate a = b = 0 case
// score 0.
inline double silhouette(const std::vector<Vec>& points,
                         const std::vector<int>& labels) {
  if (points.size() != labels.size()) {
    throw std::invalid_argument("silhouette: size mismatch");
  }
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument("silhouette: need at least 2 clusters");
  }
  std::map<int, std::size_t> cluster_size;
  for (int l : labels) ++cluster_size[l];

  auto dist = [](const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return std::sqrt(s);
  };

  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (cluster_size[labels[i]] == 1) continue;  // singleton scores 0
    std::map<int, double> sum_dist;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      sum_dist[labels[j]] += dist(points[i], points[j]);
    }
    const double a = sum_dist[labels[i]] /
                     static_cast<double>(cluster_size[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : sum_dist) {
      if (label == labels[i]) continue;
      b = std::min(b, s / static_cast<double>(cluster_size[label]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(points.size());
}

struct CvResult {
  Vec grid;
  std::vector<Vec> fold_scores;  // per grid value, one score per fold
  Vec mean_scores;
  double best = 0.0;
};

inline void finalize_cv(CvResult& cv) {
  cv.mean_scores.clear();
  for (const auto& fs : cv.fold_scores) {
    double s = 0.0;
    for (double v : fs) s += v;
    cv.mean_scores.push_back(s / static_cast<double>(fs.size()));
  }
  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < cv.grid.size(); ++i) {
    // ties broken toward the smaller parameter value; grid scanned in order
    if (cv.mean_scores[i] > cv.mean_scores[best_idx]) best_idx = i;
  }
  cv.best = cv.grid[best_idx];
}

// seeded round-robin fold assignment after shuffling
inline std::vector<std::size_t> fold_assignment(std::size_t n,
                                                std::size_t folds,
                                                std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % folds;
  return fold;
}

inline std::vector<Vec> normalized_embeddings(
    const std::vector<rbm::Embedding>& embeddings) {
  std::vector<Vec> out;
  out.reserve(embeddings.size());
  for (const auto& h : embeddings) {
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(h.size()));
    Vec v(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
      v[j] = static_cast<double>(h[j]) * inv_sqrt_m;
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Select the RBM regularization weight: per fold, train at each delta on
// the train split, embed the held-out split, and score the silhouette of
// the held-out embeddings against category labels.
inline CvResult cv_delta(const std::vector<rbm::BowVector>& corpus,
                         const std::vector<int>& category_labels,
                         const Vec& delta_grid, std::size_t folds,
                         std::uint64_t seed, const rbm::RbmHyper& base_hyper) {
  if (corpus.size() != category_labels.size()) {
    throw std::invalid_argument("cv_delta: size mismatch");
  }
  std::set<int> distinct(category_labels.begin(), category_labels.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument("cv_delta: need at least 2 categories");
  }
  const auto fold = fold_assignment(corpus.size(), folds, seed);
  CvResult cv;
  cv.grid = delta_grid;
  cv.fold_scores.assign(delta_grid.size(), Vec(folds, 0.0));
  for (std::size_t g = 0; g < delta_grid.size(); ++g) {
    rbm::RbmHyper hyper = base_hyper;
    hyper.delta = delta_grid[g];
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<rbm::BowVector> train_set;
      std::vector<rbm::BowVector> held;
      std::vector<int> held_labels;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (fold[i] == f) {
          held.push_back(corpus[i]);
          held_labels.push_back(category_labels[i]);
        } else {
          train_set.push_back(corpus[i]);
        }
      }
      const rbm::RbmParams params = rbm::train(train_set, hyper);
      std::vector<rbm::Embedding> embeddings;
      embeddings.reserve(held.size());
      for (const auto& x : held) embeddings.push_back(rbm::embed(x, params));
      cv.fold_scores[g][f] =
          silhouette(normalized_embeddings(embeddings), held_labels);
    }
  }
  finalize_cv(cv);
  return cv;
}

// Select the temporal decay: fitting is unsupervised, so each beta is fit
// on the full data; labels enter only through scoring. Each fold is a
// random event subset and scores the retrieved top-N ranking restricted to
// pairs with both endpoints inside the fold.
inline CvResult cv_beta(const std::vector<hawkes::Event>& events,
                        const PairSet& truth, const Vec& beta_grid,
                        std::size_t N, std::size_t folds, std::uint64_t seed,
                        const hawkes::FitOptions& fit_opts = {}) {
  if (truth.empty()) throw std::invalid_argument("cv_beta: empty truth set");
  const auto omega = hawkes::build_mark_space(events);
  const double T = events.back().t;
  std::size_t d = 0;
  for (const auto& e : events) d = std::max(d, e.beat + 1);
  const auto fold = fold_assignment(events.size(), folds, seed);
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < events.size(); ++i) index_of[events[i].id] = i;

  CvResult cv;
  cv.grid = beta_grid;
  cv.fold_scores.assign(beta_grid.size(), Vec(folds, 0.0));
  for (std::size_t g = 0; g < beta_grid.size(); ++g) {
    const double beta = beta_grid[g];
    const Vec mu = hawkes::init_mu(events, d, T, omega.size());
    hawkes::FitResult fit = hawkes::fit_em(events, omega, beta, mu, T, fit_opts);
    const auto ranked = hawkes::linkage_rank(fit.linkage, N);
    for (std::size_t f = 0; f < folds; ++f) {
      PairSet retrieved;
      for (const auto& r : ranked) {
        if (fold[r.i] == f && fold[r.j] == f) {
          retrieved.insert(make_pair_key(events[r.i].id, events[r.j].id));
        }
      }
      PairSet fold_truth;
      for (const auto& p : truth) {
        auto a = index_of.find(p.first);
        auto b = index_of.find(p.second);
        if (a != index_of.end() && b != index_of.end() &&
            fold[a->second] == f && fold[b->second] == f) {
          fold_truth.insert(p);
        }
      }
      cv.fold_scores[g][f] =
          fold_truth.empty()
              ? 0.0
              : precision_recall_f1(retrieved, fold_truth).f1;
    }
  }
  finalize_cv(cv);
  return cv;
}

}  // namespace sttpp::eval
