#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "sttpp/rbm.hpp"
#include "sttpp/rng.hpp"

using namespace sttpp;
using namespace sttpp::rbm;

namespace {

RbmParams make_params(std::size_t p, std::size_t m, double sigma = 1.0) {
  RbmParams params;
  params.sigma = sigma;
  params.w = Matrix(p, m, 0.0);
  params.b.assign(p, 0.0);
  params.c.assign(m, 0.0);
  return params;
}

// small synthetic corpus with two co-occurrence patterns
std::vector<BowVector> toy_corpus(std::size_t n_docs, std::size_t p,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BowVector> corpus;
  for (std::size_t i = 0; i < n_docs; ++i) {
    BowVector x(p, 0.0);
    const bool group = i % 2 == 0;
    for (std::size_t l = 0; l < p; ++l) {
      const bool active = group ? l < p / 2 : l >= p / 2;
      if (active && rng.bernoulli(0.8)) x[l] = rng.uniform(0.1, 0.4);
    }
    corpus.push_back(std::move(x));
  }
  return corpus;
}

}  // namespace

TEST_CASE("energy vanishes at x = b, h = 0") {
  auto params = make_params(3, 2);
  params.b = {0.5, -1.0, 2.0};
  const BowVector x = params.b;
  const Embedding h(2, 0);
  CHECK(energy(x, h, params) == doctest::Approx(0.0));
}

TEST_CASE("energy hand example") {
  auto params = make_params(1, 1);
  params.b = {1.0};
  params.c = {0.5};
  params.w(0, 0) = 0.3;
  CHECK(energy({2.0}, {1}, params) == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("energy invariant under hidden-unit permutation") {
  auto params = make_params(2, 3);
  params.b = {0.2, -0.4};
  params.c = {0.1, -0.2, 0.3};
  params.w.data = {0.5, -0.1, 0.2, 0.3, 0.7, -0.6};
  const BowVector x = {1.0, -0.5};
  const Embedding h = {1, 0, 1};

  auto swapped = params;
  std::swap(swapped.c[0], swapped.c[2]);
  for (std::size_t l = 0; l < 2; ++l) std::swap(swapped.w(l, 0), swapped.w(l, 2));
  const Embedding h_swapped = {1, 0, 1};
  CHECK(energy(x, h, params) ==
        doctest::Approx(energy(x, h_swapped, swapped)).epsilon(1e-12));
}

TEST_CASE("energy rejects dimension mismatch") {
  auto params = make_params(2, 2);
  CHECK_THROWS(energy({1.0}, {1, 0}, params));
}

TEST_CASE("cond_hidden at zero input") {
  auto params = make_params(3, 4);
  for (double pj : cond_hidden({0, 0, 0}, params)) {
    CHECK(pj == doctest::Approx(0.5));
  }
}

TEST_CASE("cond_hidden hand example") {
  auto params = make_params(1, 1);
  params.c = {-1.0};
  params.w(0, 0) = 2.0;
  CHECK(cond_hidden({1.0}, params)[0] ==
        doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("cond_hidden outputs lie strictly in (0,1)") {
  auto params = make_params(2, 3);
  params.c = {6.0, -6.0, 0.0};
  params.w.data = {2.0, -2.0, 1.0, 1.5, 0.0, -1.5};
  for (double pj : cond_hidden({3.0, -2.0}, params)) {
    CHECK(pj > 0.0);
    CHECK(pj < 1.0);
  }
}

TEST_CASE("cond_hidden matches the Boltzmann ratio on an m=3 instance") {
  // conditional independence: sigmoid form equals
  // e^{-E(h_j=1)} / (e^{-E(h_j=1)} + e^{-E(h_j=0)}) for all other-bit settings
  auto params = make_params(2, 3, 1.3);
  params.b = {0.2, -0.1};
  params.c = {0.4, -0.3, 0.1};
  params.w.data = {0.5, -0.2, 0.3, -0.4, 0.6, 0.2};
  const BowVector x = {0.7, -1.2};
  const Vec probs = cond_hidden(x, params);
  for (std::size_t j = 0; j < 3; ++j) {
    for (int others = 0; others < 4; ++others) {
      Embedding h(3, 0);
      int bit = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (k == j) continue;
        h[k] = (others >> bit) & 1;
        ++bit;
      }
      Embedding h1 = h, h0 = h;
      h1[j] = 1;
      h0[j] = 0;
      const double e1 = std::exp(-energy(x, h1, params));
      const double e0 = std::exp(-energy(x, h0, params));
      CHECK(probs[j] == doctest::Approx(e1 / (e1 + e0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cond_visible_mean at h = 0 returns b") {
  auto params = make_params(3, 2);
  params.b = {0.1, -0.2, 0.3};
  CHECK(cond_visible_mean({0, 0}, params) == params.b);
}

TEST_CASE("cond_visible_mean hand example") {
  auto params = make_params(1, 2, 2.0);
  params.b = {0.1};
  params.w.data = {0.3, -0.2};
  CHECK(cond_visible_mean({1, 1}, params)[0] ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("cond_visible_mean is linear in disjoint-support h") {
  auto params = make_params(2, 4, 1.5);
  params.b = {0.4, -0.6};
  params.w.data = {0.1, 0.2, 0.3, 0.4, -0.1, -0.2, -0.3, -0.4};
  const Embedding h1 = {1, 0, 1, 0}, h2 = {0, 1, 0, 1}, sum = {1, 1, 1, 1};
  const Vec m0 = cond_visible_mean({0, 0, 0, 0}, params);
  const Vec m1 = cond_visible_mean(h1, params);
  const Vec m2 = cond_visible_mean(h2, params);
  const Vec ms = cond_visible_mean(sum, params);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(m1[l] + m2[l] - m0[l] == doctest::Approx(ms[l]).epsilon(1e-12));
  }
}

TEST_CASE("gibbs_step: near-deterministic hidden bit") {
  auto params = make_params(1, 1);
  params.c = {12.0};  // sigm(12) = 1 - 6e-6
  Rng rng(7);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += gibbs_step({0.0}, params, rng).h[0];
  CHECK(ones > 9980);  // well inside the 3-sigma band around 10000
}

TEST_CASE("gibbs_step determinism under a fixed seed") {
  auto params = make_params(3, 2);
  params.w.data = {0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
  Rng rng1(42), rng2(42);
  const BowVector x = {0.5, -0.3, 0.2};
  for (int i = 0; i < 50; ++i) {
    const auto s1 = gibbs_step(x, params, rng1);
    const auto s2 = gibbs_step(x, params, rng2);
    CHECK(s1.h == s2.h);
    CHECK(s1.x == s2.x);
  }
}

TEST_CASE("gibbs_step visible sample mean matches the conditional mean") {
  auto params = make_params(2, 1, 1.0);
  params.b = {0.3, -0.7};
  params.w.data = {0.5, 0.2};
  params.c = {40.0};  // pin h = 1
  Rng rng(11);
  const int n = 10000;
  Vec mean(2, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto s = gibbs_step({0.0, 0.0}, params, rng);
    REQUIRE(s.h[0] == 1);
    mean[0] += s.x[0];
    mean[1] += s.x[1];
  }
  const Vec expect = cond_visible_mean({1}, params);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(std::abs(mean[l] / n - expect[l]) < 4.0 / 100.0);  // 4 sigma / sqrt(n)
  }
}

TEST_CASE("penalty_value: symmetric Gaussian case") {
  auto params = make_params(5, 2);
  CHECK(penalty_value(params, 0.0, {Embedding{0, 0}}) ==
        doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("penalty_value: normal quantile") {
  auto params = make_params(1, 1);
  CHECK(penalty_value(params, 1.6449, {Embedding{0}}) ==
        doctest::Approx(0.04999521746834630).epsilon(1e-10));
}

TEST_CASE("penalty_value is nonincreasing in tau") {
  auto params = make_params(3, 2);
  params.b = {0.3, -0.2, 0.1};
  params.w.data = {0.4, -0.3, 0.2, 0.1, -0.5, 0.6};
  const std::vector<Embedding> samples = {{1, 0}, {0, 1}, {1, 1}};
  double prev = penalty_value(params, -3.0, samples);
  for (double tau = -2.5; tau <= 3.0; tau += 0.5) {
    const double v = penalty_value(params, tau, samples);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("penalty_value rejects an empty sample set") {
  auto params = make_params(1, 1);
  CHECK_THROWS(penalty_value(params, 0.0, {}));
}

TEST_CASE("penalty_gradient with delta = 0 is zero") {
  auto params = make_params(2, 2);
  Rng rng(3);
  const auto g = penalty_gradient({{0.1, 0.2}}, params, 0.01, 0.0, rng);
  for (double v : g.dW.data) CHECK(v == 0.0);
  for (double v : g.dB) CHECK(v == 0.0);
}

// Saturated hidden biases pin the sampled h, so the internal draw is the
// fixed hidden sample the finite-difference oracle needs.
TEST_CASE("penalty_gradient matches finite differences of penalty_value") {
  auto params = make_params(3, 2, 1.0);
  params.b = {0.1, -0.3, 0.2};
  params.c = {25.0, -25.0};  // h pinned to (1, 0)
  params.w.data = {0.3, -0.1, 0.2, 0.4, -0.2, 0.1};
  const double tau = 0.15;
  const BowVector x = {0.2, 0.1, 0.3};
  const Embedding h_fixed = {1, 0};

  Rng grad_rng(5);
  const auto g = penalty_gradient({x}, params, tau, 1.0, grad_rng);

  const double step = 1e-5;
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double fd = oracle::central_difference(
          [&](double wv) {
            auto perturbed = params;
            perturbed.w(l, j) = wv;
            return penalty_value(perturbed, tau, {h_fixed});
          },
          params.w(l, j), step);
      if (std::abs(fd) > 1e-10) {
        CHECK(g.dW(l, j) == doctest::Approx(fd).epsilon(1e-4));
      } else {
        CHECK(std::abs(g.dW(l, j)) < 1e-8);
      }
    }
    const double fd_b = oracle::central_difference(
        [&](double bv) {
          auto perturbed = params;
          perturbed.b[l] = bv;
          return penalty_value(perturbed, tau, {h_fixed});
        },
        params.b[l], step);
    CHECK(g.dB[l] == doctest::Approx(fd_b).epsilon(1e-4));
  }
}

TEST_CASE("penalty_gradient: sigma != 1 still passes the oracle") {
  auto params = make_params(2, 1, 1.7);
  params.b = {0.4, -0.1};
  params.c = {25.0};
  params.w.data = {0.5, -0.3};
  const double tau = 0.2;
  const Embedding h_fixed = {1};
  Rng rng(9);
  const auto g = penalty_gradient({{0.1, 0.2}}, params, tau, 1.0, rng);
  for (std::size_t l = 0; l < 2; ++l) {
    const double fd = oracle::central_difference(
        [&](double bv) {
          auto perturbed = params;
          perturbed.b[l] = bv;
          return penalty_value(perturbed, tau, {h_fixed});
        },
        params.b[l], 1e-5);
    CHECK(g.dB[l] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("inverse-Mills gradient variant disagrees with the oracle") {
  auto params = make_params(1, 1, 1.0);
  params.b = {0.0};
  params.c = {25.0};
  params.w.data = {0.3};
  const double tau = 0.8;  // tau' = 0.5: inverse-Mills factor is far from 1
  const Embedding h_fixed = {1};
  Rng rng(2);
  const auto literal =
      penalty_gradient({{0.1}}, params, tau, 1.0, rng, /*mills_variant=*/true);
  const double fd = oracle::central_difference(
      [&](double wv) {
        auto perturbed = params;
        perturbed.w(0, 0) = wv;
        return penalty_value(perturbed, tau, {h_fixed});
      },
      params.w(0, 0), 1e-5);
  CHECK(std::abs(literal.dW(0, 0) - fd) / std::abs(fd) > 1e-2);
}

TEST_CASE("penalty gradient is zero across visible rows") {
  // dP(X_l >= tau | H)/dw_jk = 0 for l != j: the batch gradient of row l
  // never mixes in other rows, so zeroing row l of w leaves row l' gradients
  // unchanged
  auto params = make_params(3, 2);
  params.c = {25.0, 25.0};
  params.b = {0.1, 0.2, 0.3};
  params.w.data = {0.4, 0.1, -0.2, 0.3, 0.5, -0.1};
  Rng rng1(4), rng2(4);
  const auto g1 = penalty_gradient({{0.1, 0.1, 0.1}}, params, 0.2, 1.0, rng1);
  auto modified = params;
  modified.w(0, 0) = 9.9;  // only row 0 changes
  const auto g2 = penalty_gradient({{0.1, 0.1, 0.1}}, modified, 0.2, 1.0, rng2);
  for (std::size_t l = 1; l < 3; ++l) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(g1.dW(l, j) == doctest::Approx(g2.dW(l, j)).epsilon(1e-12));
    }
    CHECK(g1.dB[l] == doctest::Approx(g2.dB[l]).epsilon(1e-12));
  }
}

TEST_CASE("cd_k_update with zero learning rate is a no-op") {
  auto corpus = toy_corpus(8, 6, 21);
  RbmHyper hyper;
  hyper.m = 3;
  hyper.learning_rate = 0.0;
  Rng rng(5);
  auto params = init_params(corpus, hyper, rng);
  const auto next = cd_k_update(corpus, params, hyper, rng);
  CHECK(next.w.data == params.w.data);
  CHECK(next.b == params.b);
  CHECK(next.c == params.c);
}

TEST_CASE("cd_k_update near a fixed point produces small expected updates") {
  // with w = 0 and x drawn from N(b, sigma^2), data and model distributions
  // coincide, so the averaged update should be ~0
  auto params = make_params(2, 2);
  params.b = {0.5, -0.5};
  RbmHyper hyper;
  hyper.m = 2;
  hyper.learning_rate = 1.0;  // report the raw averaged gradient
  Rng data_rng(31);
  Matrix dw_sum(2, 2, 0.0);
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    std::vector<BowVector> batch;
    for (int i = 0; i < 8; ++i) {
      batch.push_back({data_rng.normal(0.5, 1.0), data_rng.normal(-0.5, 1.0)});
    }
    const auto next = cd_k_update(batch, params, hyper, data_rng);
    for (std::size_t idx = 0; idx < 4; ++idx) {
      dw_sum.data[idx] += next.w.data[idx] - params.w.data[idx];
    }
  }
  for (double v : dw_sum.data) {
    CHECK(std::abs(v / reps) < 0.05);
  }
}

TEST_CASE("training reduces reconstruction error on a synthetic corpus") {
  const auto corpus = toy_corpus(20, 10, 99);
  RbmHyper hyper;
  hyper.m = 6;
  hyper.epochs = 80;
  hyper.batch_size = 5;
  hyper.seed = 123;
  hyper.sigma = 0.2;  // on the scale of the data values
  hyper.learning_rate = 0.02;
  Rng init_rng(hyper.seed);
  const auto initial = init_params(corpus, hyper, init_rng);
  const auto trained = train(corpus, hyper);

  auto recon_error = [&](const RbmParams& params) {
    double err = 0.0;
    for (const auto& x : corpus) {
      const Vec mean = cond_visible_mean(embed(x, params), params);
      for (std::size_t l = 0; l < x.size(); ++l) {
        err += (x[l] - mean[l]) * (x[l] - mean[l]);
      }
    }
    return err / static_cast<double>(corpus.size());
  };
  const double before = recon_error(initial);
  const double after = recon_error(trained);
  CHECK(after < before);
}

TEST_CASE("embed: strongly negative bias with zero weights gives bit 0") {
  auto params = make_params(2, 2);
  params.c = {-5.0, -5.0};
  const auto bits = embed({1.0, 1.0}, params);
  CHECK(bits == Embedding{0, 0});
}

TEST_CASE("embed hand example") {
  auto params = make_params(1, 1);
  params.c = {-1.0};
  params.w(0, 0) = 2.0;
  CHECK(embed({1.0}, params) == Embedding{1});
}

TEST_CASE("embed is deterministic and idempotent") {
  auto params = make_params(3, 4);
  params.w.data.assign(12, 0.3);
  params.c = {0.2, -0.1, 0.4, -0.6};
  const BowVector x = {0.1, 0.5, 0.2};
  CHECK(embed(x, params) == embed(x, params));
}

TEST_CASE("reconstruct_corpus with zero weights reverts to the bias") {
  auto params = make_params(3, 2);
  params.b = {0.4, -0.2, 0.1};
  Rng rng(17);
  const std::vector<BowVector> docs = {{1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}};
  const Matrix recon = reconstruct_corpus(docs, params, 5, rng);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(recon(i, l) == doctest::Approx(std::max(0.0, params.b[l])));
    }
  }
}

TEST_CASE("reconstruct_corpus is seed-deterministic") {
  const auto corpus = toy_corpus(6, 5, 77);
  RbmHyper hyper;
  hyper.m = 3;
  hyper.epochs = 5;
  const auto params = train(corpus, hyper);
  Rng r1(9), r2(9);
  const Matrix a = reconstruct_corpus(corpus, params, 4, r1);
  const Matrix b = reconstruct_corpus(corpus, params, 4, r2);
  CHECK(a.data == b.data);
}

TEST_CASE("selected_keywords thresholds and conventions") {
  text::Vocabulary vocab;
  vocab.keywords = {"aa", "bb", "cc"};
  vocab.doc_freq = {1, 1, 1};
  vocab.idf = {1.0, 1.0, 1.0};
  vocab.n_docs = 1;

  Matrix zero(2, 3, 0.0);
  CHECK(rbm::selected_keywords(zero, vocab, 1e-2).empty());
  CHECK(rbm::selected_keywords(zero, vocab, -1.0).size() == 3);

  Matrix mixed(1, 3, 0.0);
  mixed(0, 1) = 0.5;
  CHECK(rbm::selected_keywords(mixed, vocab, 1e-2) ==
        std::vector<std::string>{"bb"});
}
