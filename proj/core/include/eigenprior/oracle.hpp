#pragma once

#include <string>
#include <vector>

#include "eigenprior/accumulate.hpp"

namespace eigenprior {

// Brute-force reference for the chunk + accumulate pipeline: dense count
// arrays and a quadratic loop over example pairs. Slow by design; meant for
// tiny corpora in tests and `verify`.
CooccurrenceStats oracle_accumulate(const std::vector<std::string>& tokens,
                                    const Vocabulary& vocab, std::size_t k, std::size_t n,
                                    const PriorGraph& graph, std::size_t chunk_len);

}  // namespace eigenprior
