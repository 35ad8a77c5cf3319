#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eigenprior/accumulate.hpp"

namespace eigenprior {

// Text format, bit-exact on round trip:
//
//   eigenprior-stats v1 <|H|> <k> <n_examples>
//   r<TAB>s<TAB>unit<TAB>prior        (sorted by r, then s)
//   D1
//   index<TAB>count                   (non-zero entries only)
//   D2
//   index<TAB>count                   (non-zero entries only)
void write_stats(std::ostream& out, const CooccurrenceStats& stats);
CooccurrenceStats read_stats(std::istream& in);
void save_stats(const std::string& path, const CooccurrenceStats& stats);
CooccurrenceStats load_stats(const std::string& path);

struct CorpusFile {
  std::string name;
  std::string fnv1a64;  // hex digest of the raw bytes
  bool operator==(const CorpusFile&) const = default;
};

// Sidecar (`<stats>.meta.json`) with the settings that are not part of the
// counts themselves.
struct StatsMeta {
  std::size_t window_n = 12;
  std::size_t chunk_len = kDefaultChunkLength;
  std::string oov = "unk";
  std::string graph_fnv1a64;  // empty when no graph was used
  std::vector<CorpusFile> corpus;

  // Digest over the ordered per-file digests.
  std::string fingerprint() const;
  bool operator==(const StatsMeta&) const = default;
};

std::string stats_meta_path(const std::string& stats_path);
void save_stats_meta(const std::string& path, const StatsMeta& meta);
StatsMeta load_stats_meta(const std::string& path);

// Hash of a file's raw bytes (FNV-1a 64, hex).
std::string file_fingerprint(const std::string& path);

}  // namespace eigenprior
