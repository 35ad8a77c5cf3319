#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "eigenprior/corpus.hpp"
#include "eigenprior/prior_graph.hpp"

namespace eigenprior {

// Context slot layout: slot = position_index * |H| + word, where the 2k
// position indices run over offsets -k, ..., -1, +1, ..., +k in that order
// (left context nearest-last, right context nearest-first).
inline std::uint64_t context_slot(std::size_t position_index, WordId word, std::size_t vocab_size) {
  return static_cast<std::uint64_t>(position_index) * vocab_size + word;
}

// Signed offset of position index q for window k, e.g. k=2: -2,-1,+1,+2.
inline int context_offset(std::size_t q, std::size_t k) {
  return q < k ? static_cast<int>(q) - static_cast<int>(k) : static_cast<int>(q - k) + 1;
}

struct PairCounts {
  std::uint64_t unit = 0;   // plain co-occurrence count
  std::uint64_t prior = 0;  // graph-driven count, scaled by alpha later
  bool operator==(const PairCounts&) const = default;
};

struct StatsEntry {
  std::uint32_t row;
  std::uint64_t slot;
  PairCounts counts;
  bool operator==(const StatsEntry&) const = default;
};

// Sparse word x context-slot counts with the D1/D2 diagonals.
//
// Every example contributes one pivot count to d1 and 2k unit fires, so
// d1[r] = sum_s unit(r, s) / 2k and d2[s] = sum_r unit(r, s). Prior counts
// never touch d1 or d2.
class CooccurrenceStats {
 public:
  CooccurrenceStats() = default;
  CooccurrenceStats(std::size_t vocab_size, std::size_t window);

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t window() const { return window_; }
  std::uint64_t context_dim() const { return 2 * window_ * vocab_size_; }
  std::uint64_t example_count() const { return n_examples_; }
  std::size_t nonzero_count() const { return entries_.size(); }

  const std::vector<std::uint64_t>& d1() const { return d1_; }
  const std::vector<std::uint64_t>& d2() const { return d2_; }

  PairCounts at(WordId row, std::uint64_t slot) const;
  bool has_prior() const;

  // Adds one example: pivot `row` firing the given 2k words in slot order.
  void add_example(WordId row, std::span<const WordId> context);
  // Adds one prior update: `row` receives the 2k context words of another example.
  void add_prior(WordId row, std::span<const WordId> context);

  // Raw entry insertion, used by readers and tests.
  void add_entry(WordId row, std::uint64_t slot, PairCounts counts);
  void set_diagonals(std::vector<std::uint64_t> d1, std::vector<std::uint64_t> d2,
                     std::uint64_t n_examples);

  // Entrywise integer sum. Throws ContractViolation on shape mismatch.
  void merge(const CooccurrenceStats& other);

  // Entries sorted by (row, slot).
  std::vector<StatsEntry> sorted_entries() const;

  // Checks the d1/d2/n_examples invariants against the unit counts.
  // Throws InputError describing the first violation.
  void validate() const;

  bool operator==(const CooccurrenceStats& other) const;

 private:
  std::uint64_t key(WordId row, std::uint64_t slot) const {
    return static_cast<std::uint64_t>(row) * context_dim() + slot;
  }

  std::size_t vocab_size_ = 0;
  std::size_t window_ = 0;
  std::uint64_t n_examples_ = 0;
  std::vector<std::uint64_t> d1_;
  std::vector<std::uint64_t> d2_;
  std::unordered_map<std::uint64_t, PairCounts> entries_;
};

CooccurrenceStats merge(const CooccurrenceStats& a, const CooccurrenceStats& b);

struct Example {
  WordId pivot;
  std::vector<WordId> context;  // 2k words in slot order
  std::size_t position;         // index within the chunk
  bool operator==(const Example&) const = default;
};

// One example per position with a full +/-k context: positions [k, T-k).
std::vector<Example> extract_examples(std::span<const WordId> chunk, std::size_t k);

// Adds one chunk's unit counts and, for every ordered pair of distinct
// examples (i, j) whose positions differ by at most `window_n` and whose
// pivots are adjacent in `graph`, one prior count from pivot(i) to each
// context slot of example j. `graph` may be null (no prior updates).
void accumulate_chunk(CooccurrenceStats& stats, std::span<const WordId> chunk,
                      std::size_t window_n, const PriorGraph* graph);

struct AccumulateOptions {
  std::size_t window = 2;        // k
  std::size_t window_n = 12;     // N
  std::size_t chunk_len = kDefaultChunkLength;  // T
  unsigned threads = 1;
  std::size_t batch_chunks = 1 << 15;
};

// Streams documents into statistics. Each add_* call is an independent
// document source: chunk boundaries restart and no partial chunk carries
// over. Results are independent of `threads`.
class CorpusAccumulator {
 public:
  CorpusAccumulator(const Vocabulary& vocab, const PriorGraph* graph, AccumulateOptions options);

  void add_text(std::istream& in);
  void add_ids(std::span<const WordId> ids);
  CooccurrenceStats finish();

  std::uint64_t tokens_seen() const { return tokens_seen_; }
  std::uint64_t tokens_dropped() const { return tokens_dropped_; }
  std::uint64_t chunks_seen() const { return chunks_seen_; }

 private:
  void flush();

  const Vocabulary& vocab_;
  const PriorGraph* graph_;
  AccumulateOptions options_;
  std::vector<CooccurrenceStats> workers_;
  std::vector<WordId> pending_;  // whole chunks, concatenated
  std::uint64_t tokens_seen_ = 0;
  std::uint64_t tokens_dropped_ = 0;
  std::uint64_t chunks_seen_ = 0;
};

}  // namespace eigenprior
