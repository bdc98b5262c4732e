// Command-line front end for the event-linkage pipeline:
// text preprocessing -> RBM embedding -> Hawkes EM fit -> linkage retrieval,
// plus the generative simulator and cross-validation drivers.

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sttpp/config.hpp"
#include "sttpp/evaluate.hpp"
#include "sttpp/hawkes.hpp"
#include "sttpp/io.hpp"
#include "sttpp/rbm.hpp"
#include "sttpp/simulate.hpp"
#include "sttpp/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sttpp;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_manifest(const std::string& command, const std::string& config_path,
                    std::uint64_t seed, const std::string& out_path) {
  std::string config_hash = "none";
  if (!config_path.empty()) {
    config_hash = io::fnv1a_hex(io::read_file(config_path));
  }
  json j = {{"command", command},
            {"config_hash", config_hash},
            {"seed", seed},
            {"versions", {{"sttpp", kVersion}}}};
  io::open_output(out_path) << j.dump(2) << "\n";
}

std::set<std::string> load_stopwords(const config::TextSection& text_cfg) {
  if (text_cfg.stopword_file.empty()) return text::default_stopwords();
  auto in = io::open_input(text_cfg.stopword_file);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (!line.empty()) words.insert(line);
  }
  return words;
}

rbm::RbmHyper hyper_from_config(const config::RbmSection& r) {
  rbm::RbmHyper h;
  h.m = r.m;
  h.delta = r.delta;
  h.tau = r.tau;
  h.cd_k = r.cd_k;
  h.learning_rate = r.learning_rate;
  h.epochs = r.epochs;
  h.batch_size = r.batch_size;
  h.seed = r.seed;
  h.sigma = r.sigma;
  h.mills_penalty_grad = r.mills_penalty_grad;
  return h;
}

Matrix build_sim_A(const config::SimSection& sim_cfg, Rng& rng) {
  const std::size_t d = sim_cfg.d;
  Matrix A(d, d, 0.0);
  const std::string& spec = sim_cfg.a_spec;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "diag") {
    const double v = std::stod(args);
    for (std::size_t k = 0; k < d; ++k) A(k, k) = v;
  } else if (kind == "uniform") {
    std::istringstream ss(args);
    std::string lo_s, hi_s, dens_s;
    std::getline(ss, lo_s, ',');
    std::getline(ss, hi_s, ',');
    std::getline(ss, dens_s, ',');
    const double lo = std::stod(lo_s), hi = std::stod(hi_s);
    const double density = std::stod(dens_s);
    for (auto& v : A.data) {
      if (rng.uniform() < density) v = rng.uniform(lo, hi);
    }
  } else if (kind == "file") {
    auto in = io::open_input(args);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line) && row < d) {
      std::istringstream ss(line);
      std::string cell;
      std::size_t col = 0;
      while (std::getline(ss, cell, ',') && col < d) {
        A(row, col) = std::stod(cell);
        ++col;
      }
      ++row;
    }
  } else {
    throw config::ConfigError("config: sim.a_spec kind must be diag, uniform, or file");
  }
  return A;
}

hawkes::MarkSpace build_sim_marks(const config::SimSection& sim_cfg, Rng& rng) {
  std::vector<rbm::Embedding> members;
  while (members.size() < sim_cfg.marks) {
    rbm::Embedding h(sim_cfg.mark_bits);
    for (auto& b : h) b = rng.bernoulli(0.5) ? 1 : 0;
    if (std::find(members.begin(), members.end(), h) == members.end()) {
      members.push_back(std::move(h));
    }
  }
  hawkes::MarkSpace omega;
  omega.members = std::move(members);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(sim_cfg.mark_bits));
  omega.sum_normalized.assign(sim_cfg.mark_bits, 0.0);
  for (const auto& h : omega.members) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      omega.sum_normalized[j] += static_cast<double>(h[j]) * inv_sqrt_m;
    }
  }
  return omega;
}

std::vector<hawkes::Event> sim_to_events(const std::vector<sim::SimEvent>& sim_events) {
  std::vector<hawkes::Event> events;
  events.reserve(sim_events.size());
  for (std::size_t i = 0; i < sim_events.size(); ++i) {
    hawkes::Event e;
    e.id = "e" + std::to_string(i);
    e.t = sim_events[i].t;
    e.beat = sim_events[i].beat;
    e.embedding = sim_events[i].embedding;
    events.push_back(std::move(e));
  }
  return events;
}

std::map<std::string, int> read_labels_csv(const std::string& path) {
  auto in = io::open_input(path);
  std::map<std::string, int> labels;
  std::map<std::string, int> codes;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, label;
    std::getline(ss, id, ',');
    std::getline(ss, label, ',');
    auto [it, inserted] = codes.try_emplace(label, static_cast<int>(codes.size()));
    labels[id] = it->second;
  }
  return labels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatio-temporal-textual event linkage pipeline"};
  app.require_subcommand(1);

  std::string config_path, input_path, outdir = ".";
  std::string bow_path, rbm_path, vocab_path, events_path, model_path;
  std::string linkage_path, truth_path, retrieved_path, labels_path, out_path;
  std::size_t top_n = 0;
  double threshold = 0.5;
  double horizon = 0.0;

  auto* cmd_pre = app.add_subcommand("preprocess", "corpus -> vocabulary + BoW vectors");
  cmd_pre->add_option("--config", config_path)->required();
  cmd_pre->add_option("--input", input_path)->required();
  cmd_pre->add_option("--outdir", outdir);

  auto* cmd_train = app.add_subcommand("train-rbm", "train the embedding model");
  cmd_train->add_option("--config", config_path)->required();
  cmd_train->add_option("--bow", bow_path)->required();
  cmd_train->add_option("--out", out_path)->required();

  auto* cmd_embed = app.add_subcommand("embed", "binary embeddings for BoW vectors");
  cmd_embed->add_option("--bow", bow_path)->required();
  cmd_embed->add_option("--rbm", rbm_path)->required();
  cmd_embed->add_option("--out", out_path)->required();
  cmd_embed->add_option("--config", config_path);

  auto* cmd_recon = app.add_subcommand("reconstruct", "keyword-selection report");
  cmd_recon->add_option("--config", config_path)->required();
  cmd_recon->add_option("--bow", bow_path)->required();
  cmd_recon->add_option("--rbm", rbm_path)->required();
  cmd_recon->add_option("--vocab", vocab_path)->required();
  cmd_recon->add_option("--out", out_path)->required();

  auto* cmd_fit = app.add_subcommand("fit", "EM fit; writes model + linkage CSV");
  cmd_fit->add_option("--config", config_path)->required();
  cmd_fit->add_option("--events", events_path)->required();
  cmd_fit->add_option("--model-out", model_path)->required();
  cmd_fit->add_option("--linkage-out", linkage_path)->required();
  cmd_fit->add_option("--horizon", horizon, "time horizon T (default: last event time)");

  auto* cmd_retrieve = app.add_subcommand("retrieve", "top-N linked pairs");
  cmd_retrieve->add_option("--linkage", linkage_path)->required();
  cmd_retrieve->add_option("--top", top_n)->required();
  cmd_retrieve->add_option("--out", out_path)->required();

  auto* cmd_sim = app.add_subcommand("simulate", "synthetic events + ground-truth links");
  cmd_sim->add_option("--config", config_path)->required();
  cmd_sim->add_option("--outdir", outdir);

  auto* cmd_eval = app.add_subcommand("evaluate", "precision/recall/F1 of retrieved pairs");
  cmd_eval->add_option("--retrieved", retrieved_path)->required();
  cmd_eval->add_option("--truth", truth_path)->required();
  cmd_eval->add_option("--out", out_path)->required();

  auto* cmd_cvd = app.add_subcommand("cv-delta", "cross-validate the RBM regularizer");
  cmd_cvd->add_option("--config", config_path)->required();
  cmd_cvd->add_option("--bow", bow_path)->required();
  cmd_cvd->add_option("--labels", labels_path)->required();
  cmd_cvd->add_option("--outdir", outdir);

  auto* cmd_cvb = app.add_subcommand("cv-beta", "cross-validate the temporal decay");
  cmd_cvb->add_option("--config", config_path)->required();
  cmd_cvb->add_option("--events", events_path)->required();
  cmd_cvb->add_option("--truth", truth_path)->required();
  cmd_cvb->add_option("--outdir", outdir);

  auto* cmd_graph = app.add_subcommand("graph", "thresholded adjacency edge list");
  cmd_graph->add_option("--model", model_path)->required();
  cmd_graph->add_option("--threshold", threshold);
  cmd_graph->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_pre) {
      const auto cfg = config::load_config(config_path);
      const auto stopwords = load_stopwords(cfg.text);
      const auto records = io::read_corpus(input_path);
      std::vector<text::Document> docs;
      for (const auto& r : records) {
        docs.push_back({r.id, r.text, text::tokenize(r.text, stopwords)});
      }
      const auto vocab =
          text::build_vocabulary(docs, cfg.text.min_tf, cfg.text.max_df_ratio);
      std::vector<std::string> ids;
      std::vector<rbm::BowVector> bows;
      for (const auto& d : docs) {
        ids.push_back(d.id);
        bows.push_back(text::tfidf_vectorize(d, vocab));
      }
      fs::create_directories(outdir);
      io::write_vocabulary(vocab, outdir + "/vocab.json");
      io::write_bow(ids, bows, outdir + "/bow.jsonl");
      write_manifest("preprocess", config_path, 0, outdir + "/manifest.json");
    } else if (*cmd_train) {
      const auto cfg = config::load_config(config_path);
      std::vector<std::string> ids;
      std::vector<rbm::BowVector> bows;
      io::read_bow(bow_path, ids, bows);
      const auto hyper = hyper_from_config(cfg.rbm);
      const auto params = rbm::train(bows, hyper);
      io::write_rbm(params, hyper, out_path);
      write_manifest("train-rbm", config_path, hyper.seed, out_path + ".manifest.json");
    } else if (*cmd_embed) {
      std::vector<std::string> ids;
      std::vector<rbm::BowVector> bows;
      io::read_bow(bow_path, ids, bows);
      const auto params = io::read_rbm(rbm_path);
      std::vector<rbm::Embedding> embeddings;
      for (const auto& x : bows) embeddings.push_back(rbm::embed(x, params));
      io::write_embeddings(ids, embeddings, out_path);
      write_manifest("embed", config_path, 0, out_path + ".manifest.json");
    } else if (*cmd_recon) {
      const auto cfg = config::load_config(config_path);
      std::vector<std::string> ids;
      std::vector<rbm::BowVector> bows;
      io::read_bow(bow_path, ids, bows);
      const auto params = io::read_rbm(rbm_path);
      const auto vocab = io::read_vocabulary(vocab_path);
      Rng rng(cfg.rbm.seed);
      const Matrix recon =
          rbm::reconstruct_corpus(bows, params, cfg.rbm.gibbs_rounds, rng);
      const auto selected = rbm::selected_keywords(recon, vocab, cfg.rbm.tau);
      Vec mean_values(recon.cols, 0.0);
      for (std::size_t l = 0; l < recon.cols; ++l) {
        for (std::size_t i = 0; i < recon.rows; ++i) mean_values[l] += recon(i, l);
        mean_values[l] /= static_cast<double>(recon.rows);
      }
      json j = {{"tau", cfg.rbm.tau},
                {"selected_keywords", selected},
                {"n_selected", selected.size()},
                {"n_keywords", vocab.size()},
                {"mean_reconstructed", mean_values}};
      io::open_output(out_path) << j.dump(2) << "\n";
      write_manifest("reconstruct", config_path, cfg.rbm.seed,
                     out_path + ".manifest.json");
    } else if (*cmd_fit) {
      const auto cfg = config::load_config(config_path);
      const auto events = io::read_events(events_path, cfg.hawkes.jitter_ties);
      if (events.empty()) throw std::runtime_error("fit: no events");
      std::size_t d = 0;
      for (const auto& e : events) d = std::max(d, e.beat + 1);
      const double T = horizon > 0.0 ? horizon : events.back().t;
      const auto omega = hawkes::build_mark_space(events);
      const Vec mu = hawkes::init_mu(events, d, T, omega.size());
      hawkes::FitOptions opts;
      opts.max_iter = cfg.hawkes.max_iter;
      opts.tol = cfg.hawkes.tol;
      opts.seed = cfg.hawkes.seed;
      opts.update_mu = cfg.hawkes.update_mu;
      const auto fit = hawkes::fit_em(events, omega, cfg.hawkes.beta, mu, T, opts);
      io::write_model(fit.params, omega, fit.ll_trace, model_path);
      const auto ranked =
          hawkes::linkage_rank(fit.linkage, static_cast<std::size_t>(-1));
      io::write_linkage_csv(ranked, events, linkage_path);
      write_manifest("fit", config_path, opts.seed, model_path + ".manifest.json");
    } else if (*cmd_retrieve) {
      auto in = io::open_input(linkage_path);
      auto out = io::open_output(out_path);
      std::string line;
      std::getline(in, line);  // header
      out << "i_id,j_id,p\n";
      for (std::size_t i = 0; i < top_n && std::getline(in, line); ++i) {
        out << line << "\n";
      }
      write_manifest("retrieve", "", 0, out_path + ".manifest.json");
    } else if (*cmd_sim) {
      const auto cfg = config::load_config(config_path);
      Rng setup_rng(cfg.sim.seed);
      sim::SimConfig sc;
      sc.params.mu.assign(cfg.sim.d, cfg.sim.mu);
      sc.params.A = build_sim_A(cfg.sim, setup_rng);
      sc.params.beta = cfg.hawkes.beta;
      sc.params.T = cfg.sim.T;
      sc.omega = build_sim_marks(cfg.sim, setup_rng);
      sc.mark_dist.assign(cfg.sim.marks, 1.0 / static_cast<double>(cfg.sim.marks));
      sc.seed = cfg.sim.seed + 1;
      sc.max_events = cfg.sim.max_events;
      const auto sim_events = sim::simulate(sc);
      const auto events = sim_to_events(sim_events);
      const auto pairs = sim::truth_pairs(sim_events);
      fs::create_directories(outdir);
      io::write_events(events, outdir + "/events.jsonl");
      io::write_truth_csv(pairs, events, outdir + "/truth.csv");
      write_manifest("simulate", config_path, cfg.sim.seed, outdir + "/manifest.json");
    } else if (*cmd_eval) {
      const auto retrieved = io::read_pair_csv(retrieved_path);
      const auto truth = io::read_pair_csv(truth_path);
      const auto prf = eval::precision_recall_f1(retrieved, truth);
      json j = {{"precision", prf.precision},
                {"recall", prf.recall},
                {"f1", prf.f1},
                {"n_retrieved", retrieved.size()},
                {"n_truth", truth.size()}};
      io::open_output(out_path) << j.dump(2) << "\n";
      write_manifest("evaluate", "", 0, out_path + ".manifest.json");
    } else if (*cmd_cvd) {
      const auto cfg = config::load_config(config_path);
      std::vector<std::string> ids;
      std::vector<rbm::BowVector> bows;
      io::read_bow(bow_path, ids, bows);
      const auto label_map = read_labels_csv(labels_path);
      std::vector<int> labels;
      for (const auto& id : ids) {
        auto it = label_map.find(id);
        if (it == label_map.end()) {
          throw std::runtime_error("cv-delta: missing label for id " + id);
        }
        labels.push_back(it->second);
      }
      const auto cv = eval::cv_delta(bows, labels, cfg.eval.delta_grid,
                                     cfg.eval.folds, cfg.eval.seed,
                                     hyper_from_config(cfg.rbm));
      fs::create_directories(outdir);
      io::write_cv_result(cv, outdir + "/cv_delta.csv", outdir + "/cv_delta.json");
      write_manifest("cv-delta", config_path, cfg.eval.seed, outdir + "/manifest.json");
    } else if (*cmd_cvb) {
      const auto cfg = config::load_config(config_path);
      const auto events = io::read_events(events_path, cfg.hawkes.jitter_ties);
      const auto truth = io::read_pair_csv(truth_path);
      hawkes::FitOptions opts;
      opts.max_iter = cfg.hawkes.max_iter;
      opts.tol = cfg.hawkes.tol;
      opts.seed = cfg.hawkes.seed;
      const auto cv =
          eval::cv_beta(events, truth, cfg.eval.beta_grid, cfg.eval.n_retrieve,
                        cfg.eval.folds, cfg.eval.seed, opts);
      fs::create_directories(outdir);
      io::write_cv_result(cv, outdir + "/cv_beta.csv", outdir + "/cv_beta.json");
      write_manifest("cv-beta", config_path, cfg.eval.seed, outdir + "/manifest.json");
    } else if (*cmd_graph) {
      const auto model = io::read_model(model_path);
      const auto report = hawkes::threshold_adjacency(model.params.A, threshold);
      auto out = io::open_output(out_path);
      out << "influenced_beat,influencing_beat,alpha\n";
      for (const auto& e : report.edges) {
        out << e.to << "," << e.from << "," << io::format_double(e.alpha) << "\n";
      }
      auto deg = io::open_output(out_path + ".degrees.csv");
      deg << "beat,indegree,outdegree\n";
      for (std::size_t k = 0; k < report.indegree.size(); ++k) {
        deg << k << "," << report.indegree[k] << "," << report.outdegree[k] << "\n";
      }
      write_manifest("graph", "", 0, out_path + ".manifest.json");
    }
  } catch (const config::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
