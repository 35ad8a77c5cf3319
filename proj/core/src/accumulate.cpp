#include "eigenprior/accumulate.hpp"

#include <algorithm>
#include <istream>

#include "eigenprior/errors.hpp"
#include "parallel.hpp"

namespace eigenprior {

CooccurrenceStats::CooccurrenceStats(std::size_t vocab_size, std::size_t window)
    : vocab_size_(vocab_size),
      window_(window),
      d1_(vocab_size, 0),
      d2_(2 * window * vocab_size, 0) {
  EIGENPRIOR_REQUIRE(window >= 1, "window k must be >= 1");
}

PairCounts CooccurrenceStats::at(WordId row, std::uint64_t slot) const {
  EIGENPRIOR_REQUIRE(row < vocab_size_ && slot < context_dim(), "stats index out of range");
  const auto it = entries_.find(key(row, slot));
  return it == entries_.end() ? PairCounts{} : it->second;
}

bool CooccurrenceStats::has_prior() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const auto& kv) { return kv.second.prior != 0; });
}

void CooccurrenceStats::add_example(WordId row, std::span<const WordId> context) {
  EIGENPRIOR_REQUIRE(context.size() == 2 * window_, "context must have 2k words");
  EIGENPRIOR_REQUIRE(row < vocab_size_, "pivot id out of range");
  ++n_examples_;
  ++d1_[row];
  for (std::size_t q = 0; q < context.size(); ++q) {
    EIGENPRIOR_REQUIRE(context[q] < vocab_size_, "context id out of range");
    const auto slot = context_slot(q, context[q], vocab_size_);
    ++entries_[key(row, slot)].unit;
    ++d2_[slot];
  }
}

void CooccurrenceStats::add_prior(WordId row, std::span<const WordId> context) {
  EIGENPRIOR_REQUIRE(context.size() == 2 * window_, "context must have 2k words");
  EIGENPRIOR_REQUIRE(row < vocab_size_, "pivot id out of range");
  for (std::size_t q = 0; q < context.size(); ++q) {
    EIGENPRIOR_REQUIRE(context[q] < vocab_size_, "context id out of range");
    ++entries_[key(row, context_slot(q, context[q], vocab_size_))].prior;
  }
}

void CooccurrenceStats::add_entry(WordId row, std::uint64_t slot, PairCounts counts) {
  EIGENPRIOR_REQUIRE(row < vocab_size_ && slot < context_dim(), "stats index out of range");
  if (counts.unit == 0 && counts.prior == 0) return;
  auto& cell = entries_[key(row, slot)];
  cell.unit += counts.unit;
  cell.prior += counts.prior;
}

void CooccurrenceStats::set_diagonals(std::vector<std::uint64_t> d1, std::vector<std::uint64_t> d2,
                                      std::uint64_t n_examples) {
  EIGENPRIOR_REQUIRE(d1.size() == vocab_size_ && d2.size() == context_dim(),
                     "diagonal size mismatch");
  d1_ = std::move(d1);
  d2_ = std::move(d2);
  n_examples_ = n_examples;
}

void CooccurrenceStats::merge(const CooccurrenceStats& other) {
  EIGENPRIOR_REQUIRE(vocab_size_ == other.vocab_size_ && window_ == other.window_,
                     "cannot merge statistics with different |H| or k");
  n_examples_ += other.n_examples_;
  for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] += other.d1_[i];
  for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] += other.d2_[i];
  for (const auto& [k, counts] : other.entries_) {
    auto& cell = entries_[k];
    cell.unit += counts.unit;
    cell.prior += counts.prior;
  }
}

std::vector<StatsEntry> CooccurrenceStats::sorted_entries() const {
  std::vector<StatsEntry> out;
  out.reserve(entries_.size());
  const auto dim = context_dim();
  for (const auto& [k, counts] : entries_) {
    out.push_back({static_cast<std::uint32_t>(k / dim), k % dim, counts});
  }
  std::sort(out.begin(), out.end(), [](const StatsEntry& a, const StatsEntry& b) {
    return a.row != b.row ? a.row < b.row : a.slot < b.slot;
  });
  return out;
}

void CooccurrenceStats::validate() const {
  const std::uint64_t fires = 2 * window_;
  std::vector<std::uint64_t> row_units(vocab_size_, 0);
  std::vector<std::uint64_t> col_units(context_dim(), 0);
  for (const auto& [k, counts] : entries_) {
    row_units[k / context_dim()] += counts.unit;
    col_units[k % context_dim()] += counts.unit;
  }
  std::uint64_t d1_total = 0;
  for (std::size_t r = 0; r < vocab_size_; ++r) {
    if (row_units[r] != d1_[r] * fires) {
      throw InputError("stats invariant violated: d1[" + std::to_string(r) +
                       "] disagrees with its unit counts");
    }
    d1_total += d1_[r];
  }
  for (std::size_t s = 0; s < col_units.size(); ++s) {
    if (col_units[s] != d2_[s]) {
      throw InputError("stats invariant violated: d2[" + std::to_string(s) +
                       "] disagrees with its unit counts");
    }
  }
  if (d1_total != n_examples_) {
    throw InputError("stats invariant violated: sum(d1) != n_examples");
  }
}

bool CooccurrenceStats::operator==(const CooccurrenceStats& other) const {
  return vocab_size_ == other.vocab_size_ && window_ == other.window_ &&
         n_examples_ == other.n_examples_ && d1_ == other.d1_ && d2_ == other.d2_ &&
         entries_ == other.entries_;
}

CooccurrenceStats merge(const CooccurrenceStats& a, const CooccurrenceStats& b) {
  CooccurrenceStats out = a;
  out.merge(b);
  return out;
}

std::vector<Example> extract_examples(std::span<const WordId> chunk, std::size_t k) {
  EIGENPRIOR_REQUIRE(k >= 1, "window k must be >= 1");
  std::vector<Example> out;
  if (chunk.size() < 2 * k + 1) return out;
  for (std::size_t p = k; p + k < chunk.size(); ++p) {
    Example ex{chunk[p], std::vector<WordId>(2 * k), p};
    for (std::size_t q = 0; q < 2 * k; ++q) {
      ex.context[q] = chunk[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) +
                                                      context_offset(q, k))];
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void accumulate_chunk(CooccurrenceStats& stats, std::span<const WordId> chunk,
                      std::size_t window_n, const PriorGraph* graph) {
  const std::size_t k = stats.window();
  if (chunk.size() < 2 * k + 1) return;
  const std::size_t first = k;
  const std::size_t last = chunk.size() - k;  // exclusive

  // Context of position p is the chunk with p itself cut out of [p-k, p+k].
  std::vector<WordId> context(2 * k);
  const auto fill_context = [&](std::size_t p) {
    std::copy(chunk.begin() + static_cast<std::ptrdiff_t>(p - k),
              chunk.begin() + static_cast<std::ptrdiff_t>(p), context.begin());
    std::copy(chunk.begin() + static_cast<std::ptrdiff_t>(p + 1),
              chunk.begin() + static_cast<std::ptrdiff_t>(p + k + 1),
              context.begin() + static_cast<std::ptrdiff_t>(k));
  };

  for (std::size_t p = first; p < last; ++p) {
    fill_context(p);
    stats.add_example(chunk[p], context);
  }

  if (graph == nullptr || graph->empty() || window_n == 0) return;
  for (std::size_t pj = first; pj < last; ++pj) {
    bool filled = false;
    const std::size_t lo = pj >= first + window_n ? pj - window_n : first;
    const std::size_t hi = std::min(last, pj + window_n + 1);
    for (std::size_t pi = lo; pi < hi; ++pi) {
      if (pi == pj || !graph->connected(chunk[pi], chunk[pj])) continue;
      if (!filled) {
        fill_context(pj);
        filled = true;
      }
      stats.add_prior(chunk[pi], context);
    }
  }
}

CorpusAccumulator::CorpusAccumulator(const Vocabulary& vocab, const PriorGraph* graph,
                                     AccumulateOptions options)
    : vocab_(vocab), graph_(graph), options_(options) {
  EIGENPRIOR_REQUIRE(options_.window >= 1, "window k must be >= 1");
  EIGENPRIOR_REQUIRE(options_.chunk_len >= 2 * options_.window + 1,
                     "chunk length must be >= 2k+1");
  EIGENPRIOR_REQUIRE(!vocab_.empty(), "empty vocabulary");
  EIGENPRIOR_REQUIRE(graph_ == nullptr || graph_->vertex_count() == vocab_.size(),
                     "graph and vocabulary sizes differ");
  options_.threads = std::max(1u, options_.threads);
  options_.batch_chunks = std::max<std::size_t>(1, options_.batch_chunks);
  workers_.assign(options_.threads, CooccurrenceStats(vocab_.size(), options_.window));
}

void CorpusAccumulator::add_text(std::istream& in) {
  TokenMapper mapper(vocab_);
  std::vector<WordId> partial;
  partial.reserve(options_.chunk_len);
  for_each_token(in, [&](std::string_view token) {
    ++tokens_seen_;
    WordId id;
    if (!mapper.map(token, id)) {
      ++tokens_dropped_;
      return;
    }
    partial.push_back(id);
    if (partial.size() == options_.chunk_len) {
      pending_.insert(pending_.end(), partial.begin(), partial.end());
      partial.clear();
      ++chunks_seen_;
      if (pending_.size() >= options_.batch_chunks * options_.chunk_len) flush();
    }
  });
}

void CorpusAccumulator::add_ids(std::span<const WordId> ids) {
  const std::size_t T = options_.chunk_len;
  const std::size_t whole = ids.size() / T;
  for (const WordId id : ids) {
    EIGENPRIOR_REQUIRE(id < vocab_.size(), "token id out of range");
  }
  tokens_seen_ += ids.size();
  for (std::size_t c = 0; c < whole; ++c) {
    pending_.insert(pending_.end(), ids.begin() + static_cast<std::ptrdiff_t>(c * T),
                    ids.begin() + static_cast<std::ptrdiff_t>((c + 1) * T));
    ++chunks_seen_;
    if (pending_.size() >= options_.batch_chunks * T) flush();
  }
}

void CorpusAccumulator::flush() {
  const std::size_t T = options_.chunk_len;
  const std::size_t n_chunks = pending_.size() / T;
  detail::parallel_blocks(n_chunks, options_.threads,
                          [&](std::size_t begin, std::size_t end, unsigned w) {
                            const std::span<const WordId> all(pending_);
                            for (std::size_t c = begin; c < end; ++c) {
                              accumulate_chunk(workers_[w], all.subspan(c * T, T),
                                               options_.window_n, graph_);
                            }
                          });
  pending_.clear();
}

CooccurrenceStats CorpusAccumulator::finish() {
  flush();
  CooccurrenceStats total(vocab_.size(), options_.window);
  for (const auto& w : workers_) total.merge(w);
  workers_.assign(options_.threads, CooccurrenceStats(vocab_.size(), options_.window));
  return total;
}

}  // namespace eigenprior
