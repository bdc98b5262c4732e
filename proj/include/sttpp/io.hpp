#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sttpp/evaluate.hpp"
#include "sttpp/hawkes.hpp"
#include "sttpp/rbm.hpp"
#include "sttpp/simulate.hpp"
#include "sttpp/text.hpp"

namespace sttpp::io {

using nlohmann::json;

struct CorpusRecord {
  std::string id;
  double time = 0.0;
  std::size_t beat = 0;
  std::string text;
  std::string category;  // optional
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

// corpus: JSON-lines {id, time, beat, text[, category]}
inline std::vector<CorpusRecord> read_corpus(const std::string& path) {
  auto in = open_input(path);
  std::vector<CorpusRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    CorpusRecord r;
    r.id = j.at("id").get<std::string>();
    r.time = j.at("time").get<double>();
    r.beat = j.at("beat").get<std::size_t>();
    r.text = j.at("text").get<std::string>();
    if (j.contains("category")) r.category = j["category"].get<std::string>();
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_vocabulary(const text::Vocabulary& vocab,
                             const std::string& path) {
  json entries = json::array();
  for (std::size_t l = 0; l < vocab.size(); ++l) {
    entries.push_back({{"keyword", vocab.keywords[l]},
                       {"doc_freq", vocab.doc_freq[l]},
                       {"idf", vocab.idf[l]}});
  }
  json j = {{"n_docs", vocab.n_docs}, {"entries", entries}};
  open_output(path) << j.dump(2) << "\n";
}

inline text::Vocabulary read_vocabulary(const std::string& path) {
  json j = json::parse(open_input(path));
  text::Vocabulary vocab;
  vocab.n_docs = j.at("n_docs").get<std::size_t>();
  for (const auto& e : j.at("entries")) {
    vocab.keywords.push_back(e.at("keyword").get<std::string>());
    vocab.doc_freq.push_back(e.at("doc_freq").get<std::size_t>());
    vocab.idf.push_back(e.at("idf").get<double>());
  }
  return vocab;
}

// bag-of-words vectors: JSON-lines {id, values}
inline void write_bow(const std::vector<std::string>& ids,
                      const std::vector<rbm::BowVector>& bows,
                      const std::string& path) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    json j = {{"id", ids[i]}, {"values", bows[i]}};
    out << j.dump() << "\n";
  }
}

inline void read_bow(const std::string& path, std::vector<std::string>& ids,
                     std::vector<rbm::BowVector>& bows) {
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ids.push_back(j.at("id").get<std::string>());
    bows.push_back(j.at("values").get<rbm::BowVector>());
  }
}

inline void write_rbm(const rbm::RbmParams& params, const rbm::RbmHyper& hyper,
                      const std::string& path) {
  json j = {{"p", params.p()},
            {"m", params.m()},
            {"sigma", params.sigma},
            {"w", params.w.data},
            {"b", params.b},
            {"c", params.c},
            {"hyper",
             {{"m", hyper.m},
              {"delta", hyper.delta},
              {"tau", hyper.tau},
              {"cd_k", hyper.cd_k},
              {"learning_rate", hyper.learning_rate},
              {"epochs", hyper.epochs},
              {"batch_size", hyper.batch_size},
              {"mills_penalty_grad", hyper.mills_penalty_grad}}},
            {"seed", hyper.seed}};
  open_output(path) << j.dump(2) << "\n";
}

inline rbm::RbmParams read_rbm(const std::string& path) {
  json j = json::parse(open_input(path));
  rbm::RbmParams params;
  params.sigma = j.at("sigma").get<double>();
  params.b = j.at("b").get<Vec>();
  params.c = j.at("c").get<Vec>();
  params.w = Matrix(j.at("p").get<std::size_t>(), j.at("m").get<std::size_t>());
  params.w.data = j.at("w").get<Vec>();
  check_dim(params.w.data.size() == params.p() * params.m(), "rbm file: bad w size");
  return params;
}

// embeddings: JSON-lines {event_id, bits}
inline void write_embeddings(const std::vector<std::string>& ids,
                             const std::vector<rbm::Embedding>& embeddings,
                             const std::string& path) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    json bits = json::array();
    for (auto b : embeddings[i]) bits.push_back(static_cast<int>(b));
    json j = {{"event_id", ids[i]}, {"bits", bits}};
    out << j.dump() << "\n";
  }
}

// events: JSON-lines {id, time, beat, bits}
inline void write_events(const std::vector<hawkes::Event>& events,
                         const std::string& path) {
  auto out = open_output(path);
  for (const auto& e : events) {
    json bits = json::array();
    for (auto b : e.embedding) bits.push_back(static_cast<int>(b));
    json j = {{"id", e.id}, {"time", e.t}, {"beat", e.beat}, {"bits", bits}};
    out << j.dump() << "\n";
  }
}

// Events with identical timestamps are rejected unless jitter is allowed,
// in which case ties are broken by adding 1e-6-day steps.
inline std::vector<hawkes::Event> read_events(const std::string& path,
                                              bool jitter_ties = false) {
  auto in = open_input(path);
  std::vector<hawkes::Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    hawkes::Event e;
    e.id = j.at("id").get<std::string>();
    e.t = j.at("time").get<double>();
    e.beat = j.at("beat").get<std::size_t>();
    for (const auto& bit : j.at("bits")) {
      e.embedding.push_back(bit.get<int>() ? 1 : 0);
    }
    events.push_back(std::move(e));
  }
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].t <= events[i - 1].t) {
      if (!jitter_ties) {
        throw std::runtime_error(
            "events file: timestamps must be strictly increasing (id " +
            events[i].id + "); rerun with tie jitter enabled");
      }
      events[i].t = events[i - 1].t + 1e-6;
    }
  }
  return events;
}

inline void write_model(const hawkes::HawkesParams& params,
                        const hawkes::MarkSpace& omega, const Vec& ll_trace,
                        const std::string& path) {
  json members = json::array();
  for (const auto& h : omega.members) {
    json bits = json::array();
    for (auto b : h) bits.push_back(static_cast<int>(b));
    members.push_back(bits);
  }
  const std::size_t m = omega.members.empty() ? 0 : omega.members.front().size();
  json j = {{"d", params.d()},     {"m", m},
            {"beta", params.beta}, {"T", params.T},
            {"mu", params.mu},     {"A", params.A.data},
            {"omega", members},    {"ll_trace", ll_trace}};
  open_output(path) << j.dump(2) << "\n";
}

struct ModelFile {
  hawkes::HawkesParams params;
  hawkes::MarkSpace omega;
  Vec ll_trace;
};

inline ModelFile read_model(const std::string& path) {
  json j = json::parse(open_input(path));
  ModelFile model;
  model.params.beta = j.at("beta").get<double>();
  model.params.T = j.at("T").get<double>();
  model.params.mu = j.at("mu").get<Vec>();
  const std::size_t d = j.at("d").get<std::size_t>();
  model.params.A = Matrix(d, d);
  model.params.A.data = j.at("A").get<Vec>();
  for (const auto& bits : j.at("omega")) {
    rbm::Embedding h;
    for (const auto& bit : bits) h.push_back(bit.get<int>() ? 1 : 0);
    model.omega.members.push_back(std::move(h));
  }
  if (!model.omega.members.empty()) {
    const std::size_t m = model.omega.members.front().size();
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    model.omega.sum_normalized.assign(m, 0.0);
    for (const auto& h : model.omega.members) {
      for (std::size_t k = 0; k < m; ++k) {
        model.omega.sum_normalized[k] += static_cast<double>(h[k]) * inv_sqrt_m;
      }
    }
  }
  model.ll_trace = j.at("ll_trace").get<Vec>();
  return model;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// linkage CSV "i_id,j_id,p", already sorted as linkage_rank
inline void write_linkage_csv(const std::vector<hawkes::RankedPair>& ranked,
                              const std::vector<hawkes::Event>& events,
                              const std::string& path) {
  auto out = open_output(path);
  out << "i_id,j_id,p\n";
  for (const auto& r : ranked) {
    out << events[r.i].id << "," << events[r.j].id << "," << format_double(r.p)
        << "\n";
  }
}

inline void write_truth_csv(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    const std::vector<hawkes::Event>& events, const std::string& path) {
  auto out = open_output(path);
  out << "i_id,j_id\n";
  for (const auto& [i, j] : pairs) {
    out << events[i].id << "," << events[j].id << "\n";
  }
}

inline eval::PairSet read_pair_csv(const std::string& path) {
  auto in = open_input(path);
  eval::PairSet pairs;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    pairs.insert(eval::make_pair_key(a, b));
  }
  return pairs;
}

inline void write_cv_result(const eval::CvResult& cv, const std::string& csv_path,
                            const std::string& json_path) {
  auto out = open_output(csv_path);
  out << "param,fold,score\n";
  for (std::size_t g = 0; g < cv.grid.size(); ++g) {
    for (std::size_t f = 0; f < cv.fold_scores[g].size(); ++f) {
      out << format_double(cv.grid[g]) << "," << f << ","
          << format_double(cv.fold_scores[g][f]) << "\n";
    }
  }
  json j = {{"best", cv.best}, {"grid", cv.grid}, {"mean_scores", cv.mean_scores}};
  open_output(json_path) << j.dump(2) << "\n";
}

inline std::string read_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, used to fingerprint the config file in run manifests
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sttpp::io
