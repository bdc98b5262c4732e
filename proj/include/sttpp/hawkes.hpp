#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sttpp/matrix.hpp"
#include "sttpp/rbm.hpp"
#include "sttpp/rng.hpp"

namespace sttpp::hawkes {

using rbm::Embedding;

struct Event {
  std::string id;
  double t = 0.0;        // days in [0, T]
  std::size_t beat = 0;  // spatial cell in [0, d)
  Embedding embedding;
};

// Omega: the deduplicated set of observed embeddings, with the precomputed
// sum of normalized members S = sum_{h in Omega} h / sqrt(m), so that
// sum_{h in Omega} h~' h~_j = S' h~_j.
struct MarkSpace {
  std::vector<Embedding> members;
  Vec sum_normalized;  // length m

  std::size_t size() const { return members.size(); }
};

struct HawkesParams {
  Vec mu;        // base intensity per beat, events / day / mark
  Matrix A;      // alpha_{k,v}: influence of beat v on beat k
  double beta = 1.0;
  double T = 0.0;

  std::size_t d() const { return mu.size(); }
};

// Triggering posteriors: diag[i] = p_ii (background), rows hold (j, p_ij)
// for j < i. Rows sum to 1.
struct LinkageMatrix {
  Vec diag;
  std::vector<std::vector<std::pair<std::size_t, double>>> tri;

  std::size_t n() const { return diag.size(); }
};

// exp(-x) below this threshold is dropped from trigger sums; the discarded
// mass is < 1e-20 per term, far under every stated tolerance
inline constexpr double kExpCutoff = 46.0;

inline double dot_normalized(const Embedding& a, const Embedding& b) {
  check_dim(a.size() == b.size(), "embedding dimension mismatch");
  std::size_t s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] & b[j];
  return static_cast<double>(s) / static_cast<double>(a.size());
}

inline void check_sorted(const std::vector<Event>& events) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (!(events[i - 1].t < events[i].t)) {
      throw std::invalid_argument("events must be strictly ordered in time");
    }
  }
}

inline MarkSpace build_mark_space(const std::vector<Event>& events) {
  if (events.empty()) throw std::invalid_argument("build_mark_space: no events");
  MarkSpace omega;
  for (const auto& e : events) {
    bool known = false;
    for (const auto& h : omega.members) {
      if (h == e.embedding) {
        known = true;
        break;
      }
    }
    if (!known) omega.members.push_back(e.embedding);
  }
  const std::size_t m = omega.members.front().size();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  omega.sum_normalized.assign(m, 0.0);
  for (const auto& h : omega.members) {
    for (std::size_t j = 0; j < m; ++j) {
      omega.sum_normalized[j] += static_cast<double>(h[j]) * inv_sqrt_m;
    }
  }
  return omega;
}

// S' h~_j = sum_{h in Omega} h' h_j / m
inline double omega_weight(const MarkSpace& omega, const Embedding& h) {
  check_dim(h.size() == omega.sum_normalized.size(),
            "omega_weight: dimension mismatch");
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(h.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j]) s += omega.sum_normalized[j];
  }
  return s * inv_sqrt_m;
}

// mu_k = max(count_k, 1) / (|Omega| T); the divisor matches the compensator
// term sum_k mu_k |Omega| T of the log-likelihood
inline Vec init_mu(const std::vector<Event>& events, std::size_t d, double T,
                   std::size_t omega_size) {
  if (T <= 0.0) throw std::invalid_argument("init_mu: T must be positive");
  std::vector<double> counts(d, 0.0);
  for (const auto& e : events) counts[e.beat] += 1.0;
  Vec mu(d);
  const double denom = static_cast<double>(omega_size) * T;
  for (std::size_t k = 0; k < d; ++k) {
    mu[k] = std::max(counts[k], 1.0) / denom;
  }
  return mu;
}

inline double intensity(std::size_t k, double t, const Embedding& h,
                        const std::vector<Event>& events,
                        const HawkesParams& params) {
  double lambda = params.mu[k];
  for (const auto& e : events) {
    if (e.t >= t) break;
    const double bdt = params.beta * (t - e.t);
    if (bdt > kExpCutoff) continue;
    lambda += params.A(k, e.beat) * params.beta * std::exp(-bdt) *
              dot_normalized(h, e.embedding);
  }
  return lambda;
}

namespace detail {
// trigger sum entering the denominator of the posterior and the first
// log-likelihood term: sum_{j<i} alpha_{s_i,s_j} beta e^{-beta dt} h~_i' h~_j
inline double trigger_sum(const std::vector<Event>& events, std::size_t i,
                          const HawkesParams& params) {
  double s = 0.0;
  const auto& ei = events[i];
  for (std::size_t j = i; j-- > 0;) {
    const double bdt = params.beta * (ei.t - events[j].t);
    if (bdt > kExpCutoff) break;
    s += params.A(ei.beat, events[j].beat) * params.beta * std::exp(-bdt) *
         dot_normalized(ei.embedding, events[j].embedding);
  }
  return s;
}
}  // namespace detail

inline double log_likelihood(const std::vector<Event>& events,
                             const HawkesParams& params,
                             const MarkSpace& omega) {
  check_sorted(events);
  const std::size_t d = params.d();
  double ll = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double arg = params.mu[events[i].beat] +
                       detail::trigger_sum(events, i, params);
    if (!(arg > 0.0)) throw std::runtime_error("log_likelihood: nonpositive intensity");
    ll += std::log(arg);
  }
  for (std::size_t k = 0; k < d; ++k) {
    ll -= params.mu[k] * static_cast<double>(omega.size()) * params.T;
  }
  for (const auto& e : events) {
    const double survive = 1.0 - std::exp(-params.beta * (params.T - e.t));
    const double weight = omega_weight(omega, e.embedding);
    double alpha_col = 0.0;
    for (std::size_t k = 0; k < d; ++k) alpha_col += params.A(k, e.beat);
    ll -= alpha_col * survive * weight;
  }
  return ll;
}

inline LinkageMatrix e_step(const std::vector<Event>& events,
                            const HawkesParams& params) {
  const std::size_t n = events.size();
  LinkageMatrix linkage;
  linkage.diag.assign(n, 0.0);
  linkage.tri.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = linkage.tri[i];
    row.clear();
    const auto& ei = events[i];
    double denom = params.mu[ei.beat];
    for (std::size_t j = i; j-- > 0;) {
      const double bdt = params.beta * (ei.t - events[j].t);
      if (bdt > kExpCutoff) break;
      const double term = params.A(ei.beat, events[j].beat) * params.beta *
                          std::exp(-bdt) *
                          dot_normalized(ei.embedding, events[j].embedding);
      if (term > 0.0) {
        row.emplace_back(j, term);
        denom += term;
      }
    }
    linkage.diag[i] = params.mu[ei.beat] / denom;
    for (auto& [j, v] : row) v /= denom;
    std::sort(row.begin(), row.end());
  }
  return linkage;
}

// closed-form maximizer of the lower bound over alpha; cells with zero
// denominator (beat never observed) get alpha = 0
inline Matrix m_step(const std::vector<Event>& events,
                     const LinkageMatrix& linkage, const MarkSpace& omega,
                     double beta, double T, std::size_t d) {
  Matrix numer(d, d, 0.0);
  Vec denom(d, 0.0);
  for (const auto& e : events) {
    denom[e.beat] += (1.0 - std::exp(-beta * (T - e.t))) *
                     omega_weight(omega, e.embedding);
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (const auto& [j, p] : linkage.tri[i]) {
      numer(events[i].beat, events[j].beat) += p;
    }
  }
  Matrix A(d, d, 0.0);
  for (std::size_t u = 0; u < d; ++u) {
    for (std::size_t v = 0; v < d; ++v) {
      A(u, v) = denom[v] > 0.0 ? numer(u, v) / denom[v] : 0.0;
    }
  }
  return A;
}

// Jensen lower bound of the log-likelihood at a given posterior; equals
// log_likelihood exactly when the posterior comes from e_step at the same A
inline double lower_bound(const std::vector<Event>& events,
                          const HawkesParams& params, const MarkSpace& omega,
                          const LinkageMatrix& linkage) {
  double lb = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ei = events[i];
    const double pii = linkage.diag[i];
    if (pii > 0.0) lb += pii * (std::log(params.mu[ei.beat]) - std::log(pii));
    for (const auto& [j, p] : linkage.tri[i]) {
      if (p <= 0.0) continue;
      const double term = params.A(ei.beat, events[j].beat) * params.beta *
                          std::exp(-params.beta * (ei.t - events[j].t)) *
                          dot_normalized(ei.embedding, events[j].embedding);
      lb += p * (std::log(term) - std::log(p));
    }
  }
  for (std::size_t k = 0; k < params.d(); ++k) {
    lb -= params.mu[k] * static_cast<double>(omega.size()) * params.T;
  }
  for (const auto& e : events) {
    const double survive = 1.0 - std::exp(-params.beta * (params.T - e.t));
    const double weight = omega_weight(omega, e.embedding);
    double alpha_col = 0.0;
    for (std::size_t k = 0; k < params.d(); ++k) alpha_col += params.A(k, e.beat);
    lb -= alpha_col * survive * weight;
  }
  return lb;
}

struct FitResult {
  HawkesParams params;
  LinkageMatrix linkage;
  Vec ll_trace;
};

struct FitOptions {
  std::size_t max_iter = 200;
  double tol = 1e-6;        // relative log-likelihood change
  std::uint64_t seed = 1;
  bool update_mu = false;   // also re-estimate background rates each iteration
};

inline FitResult fit_em(const std::vector<Event>& events,
                        const MarkSpace& omega, double beta, Vec mu, double T,
                        const FitOptions& opts = {}) {
  check_sorted(events);
  const std::size_t d = mu.size();
  Rng rng(opts.seed);
  HawkesParams params;
  params.mu = std::move(mu);
  params.beta = beta;
  params.T = T;
  params.A = Matrix(d, d);
  for (auto& v : params.A.data) v = rng.uniform();

  FitResult result;
  double ll = log_likelihood(events, params, omega);
  result.ll_trace.push_back(ll);
  result.linkage = e_step(events, params);

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    result.linkage = e_step(events, params);
    params.A = m_step(events, result.linkage, omega, beta, T, d);
    if (opts.update_mu) {
      // closed-form analogue of the alpha update, off by default
      Vec acc(d, 0.0);
      for (std::size_t i = 0; i < events.size(); ++i) {
        acc[events[i].beat] += result.linkage.diag[i];
      }
      const double denom = static_cast<double>(omega.size()) * T;
      for (std::size_t k = 0; k < d; ++k) {
        params.mu[k] = std::max(acc[k], 1e-12) / denom;
      }
    }
    const double next = log_likelihood(events, params, omega);
    result.ll_trace.push_back(next);
    const double rel = std::abs(next - ll) / std::max(1.0, std::abs(ll));
    ll = next;
    if (rel < opts.tol) break;
  }
  // posterior for the returned A
  result.linkage = e_step(events, params);
  result.params = std::move(params);
  return result;
}

struct RankedPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double p = 0.0;
};

// top-N off-diagonal p_ij, ties broken by (i, j) lexicographic ascending
inline std::vector<RankedPair> linkage_rank(const LinkageMatrix& linkage,
                                            std::size_t N) {
  std::vector<RankedPair> all;
  for (std::size_t i = 0; i < linkage.n(); ++i) {
    for (const auto& [j, p] : linkage.tri[i]) all.push_back({i, j, p});
  }
  std::sort(all.begin(), all.end(), [](const RankedPair& a, const RankedPair& b) {
    if (a.p != b.p) return a.p > b.p;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  if (all.size() > N) all.resize(N);
  return all;
}

struct Edge {
  std::size_t to = 0;    // influenced beat (row index of A)
  std::size_t from = 0;  // influencing beat (column index)
  double alpha = 0.0;
};

struct AdjacencyReport {
  std::vector<Edge> edges;
  std::vector<std::size_t> indegree;   // per influenced beat
  std::vector<std::size_t> outdegree;  // per influencing beat
};

inline AdjacencyReport threshold_adjacency(const Matrix& A, double threshold) {
  AdjacencyReport report;
  report.indegree.assign(A.rows, 0);
  report.outdegree.assign(A.cols, 0);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < A.cols; ++j) {
      if (A(i, j) > threshold) {
        report.edges.push_back({i, j, A(i, j)});
        ++report.indegree[i];
        ++report.outdegree[j];
      }
    }
  }
  return report;
}

}  // namespace sttpp::hawkes
