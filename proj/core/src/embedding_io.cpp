#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "eigenprior/embedding.hpp"
#include "eigenprior/errors.hpp"
#include "json.hpp"

namespace eigenprior {

WordIndex::WordIndex(std::vector<std::string> words) : words_(std::move(words)) {
  row_of_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!row_of_.emplace(words_[i], i).second) {
      throw InputError("duplicate embedding word '" + words_[i] + "'");
    }
  }
}

bool WordIndex::lookup(std::string_view word, std::size_t& row) const {
  const auto it = row_of_.find(word);
  if (it == row_of_.end()) return false;
  row = it->second;
  return true;
}

void EmbeddingSet::validate() const {
  EIGENPRIOR_REQUIRE(static_cast<std::size_t>(vectors.rows()) == words.size(),
                     "embedding rows and word count differ");
  EIGENPRIOR_REQUIRE(vectors.allFinite(), "embedding contains non-finite values");
}

void write_word2vec(std::ostream& out, const EmbeddingSet& emb) {
  emb.validate();
  out << emb.vectors.rows() << ' ' << emb.vectors.cols() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < emb.vectors.rows(); ++r) {
    out << emb.words.word(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < emb.vectors.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", emb.vectors(r, c));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

EmbeddingSet read_word2vec(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("embedding file is empty");
  std::istringstream header(line);
  long long rows = -1, dim = -1;
  if (!(header >> rows >> dim) || rows < 0 || dim < 0) {
    throw InputError("embedding header must be '<num_words> <dim>'");
  }
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(rows));
  DenseMatrix vectors(rows, dim);
  for (long long r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw InputError("embedding file truncated at row " + std::to_string(r + 1));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto space = line.find(' ');
    if (space == std::string::npos && dim > 0) {
      throw InputError("embedding line " + std::to_string(r + 2) + ": missing values");
    }
    words.push_back(line.substr(0, space));
    const char* p = line.data() + (space == std::string::npos ? line.size() : space);
    const char* end = line.data() + line.size();
    for (long long c = 0; c < dim; ++c) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{} || next == p) {
        throw InputError("embedding line " + std::to_string(r + 2) + ": bad value " +
                         std::to_string(c + 1));
      }
      vectors(r, c) = v;
      p = next;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) {
      throw InputError("embedding line " + std::to_string(r + 2) + ": expected " +
                       std::to_string(dim) + " values");
    }
  }
  EmbeddingSet emb{WordIndex(std::move(words)), std::move(vectors), {}};
  emb.meta.dim = dim;
  return emb;
}

void save_word2vec(const std::string& path, const EmbeddingSet& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  write_word2vec(out, emb);
  if (!out) throw InputError("write failed: " + path);
}

EmbeddingSet load_word2vec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embeddings: " + path);
  return read_word2vec(in);
}

std::string embedding_meta_path(const std::string& embedding_path) {
  return embedding_path + ".meta.json";
}

void save_embedding_meta(const std::string& path, const EmbeddingMeta& meta) {
  nlohmann::ordered_json j;
  j["kind"] = meta.kind;
  j["m"] = meta.dim;
  j["alpha"] = meta.alpha;
  j["k"] = meta.window;
  j["N"] = meta.window_n;
  j["sqrt_transform"] = meta.sqrt_transform;
  j["d1_projection"] = meta.d1_projection;
  j["seed"] = meta.seed;
  j["corpus_fingerprint"] = meta.corpus_fingerprint;
  j["svd_iterations"] = meta.svd_iterations;
  j["svd_converged"] = meta.svd_converged;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

EmbeddingMeta load_embedding_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding meta: " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    EmbeddingMeta meta;
    meta.kind = j.at("kind").get<std::string>();
    meta.dim = j.at("m").get<Eigen::Index>();
    meta.alpha = j.at("alpha").get<double>();
    meta.window = j.at("k").get<std::size_t>();
    meta.window_n = j.at("N").get<std::size_t>();
    meta.sqrt_transform = j.at("sqrt_transform").get<bool>();
    meta.d1_projection = j.at("d1_projection").get<bool>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    meta.svd_iterations = j.value("svd_iterations", 0);
    meta.svd_converged = j.value("svd_converged", true);
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad embedding meta " + path + ": " + e.what());
  }
}

}  // namespace eigenprior
