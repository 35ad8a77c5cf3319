#include "eigenprior/oracle.hpp"

#include <cstdlib>

#include "eigenprior/errors.hpp"

namespace eigenprior {

CooccurrenceStats oracle_accumulate(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab, std::size_t k, std::size_t n,
                                    const PriorGraph& graph, std::size_t chunk_len) {
  EIGENPRIOR_REQUIRE(k >= 1 && chunk_len >= 2 * k + 1, "oracle needs chunk_len >= 2k+1");
  const std::size_t h = vocab.size();
  const std::size_t width = 2 * k * h;

  // Resolve words by scanning the word list, not through the hash index.
  const bool unk = !vocab.words().empty() && vocab.words()[0] == "<unk>";
  std::vector<std::size_t> ids;
  for (const auto& t : tokens) {
    bool found = false;
    for (std::size_t w = 0; w < h; ++w) {
      if (vocab.words()[w] == t) {
        ids.push_back(w);
        found = true;
        break;
      }
    }
    if (!found && unk) ids.push_back(0);
  }

  std::vector<std::vector<bool>> adjacent(h, std::vector<bool>(h, false));
  for (std::size_t i = 0; i < h; ++i) {
    for (const WordId j : graph.neighbors(static_cast<WordId>(i))) adjacent[i][j] = true;
  }

  std::vector<int> offsets;
  for (int o = -static_cast<int>(k); o <= static_cast<int>(k); ++o) {
    if (o != 0) offsets.push_back(o);
  }

  std::vector<std::uint64_t> unit(h * width, 0), prior(h * width, 0), d1(h, 0), d2(width, 0);
  std::uint64_t examples = 0;

  const std::size_t chunks = ids.size() / chunk_len;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t base = c * chunk_len;
    for (std::size_t p = 0; p < chunk_len; ++p) {
      if (p < k || p + k >= chunk_len) continue;
      const std::size_t pivot = ids[base + p];
      ++examples;
      ++d1[pivot];
      for (std::size_t q = 0; q < offsets.size(); ++q) {
        const std::size_t ctx = ids[base + p + offsets[q]];
        ++unit[pivot * width + q * h + ctx];
        ++d2[q * h + ctx];
      }
    }
    for (std::size_t pi = k; pi + k < chunk_len; ++pi) {
      for (std::size_t pj = k; pj + k < chunk_len; ++pj) {
        if (pi == pj) continue;
        const std::size_t dist = pi > pj ? pi - pj : pj - pi;
        if (dist > n) continue;
        const std::size_t a = ids[base + pi];
        const std::size_t b = ids[base + pj];
        if (!adjacent[a][b]) continue;
        for (std::size_t q = 0; q < offsets.size(); ++q) {
          const std::size_t ctx = ids[base + pj + offsets[q]];
          ++prior[a * width + q * h + ctx];
        }
      }
    }
  }

  CooccurrenceStats stats(h, k);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t s = 0; s < width; ++s) {
      const std::size_t cell = r * width + s;
      if (unit[cell] != 0 || prior[cell] != 0) {
        stats.add_entry(static_cast<WordId>(r), s, {unit[cell], prior[cell]});
      }
    }
  }
  stats.set_diagonals(std::move(d1), std::move(d2), examples);
  return stats;
}

}  // namespace eigenprior
