#include "eigenprior/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "eigenprior/errors.hpp"

namespace eigenprior {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_kept(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

unsigned char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c;
}

// Lowercases and boundary-trims one whitespace-free span. Empty result means
// the token is dropped.
std::string_view normalize(std::string_view raw, std::string& scratch) {
  scratch.resize(raw.size());
  std::transform(raw.begin(), raw.end(), scratch.begin(),
                 [](char c) { return static_cast<char>(ascii_lower(static_cast<unsigned char>(c))); });
  std::size_t begin = 0;
  std::size_t end = scratch.size();
  while (begin < end && !is_kept(static_cast<unsigned char>(scratch[begin]))) ++begin;
  while (end > begin && !is_kept(static_cast<unsigned char>(scratch[end - 1]))) --end;
  return std::string_view(scratch).substr(begin, end - begin);
}

template <typename Sink>
void split_tokens(std::string_view text, std::size_t base_offset, Sink&& sink) {
  if (const auto bad = find_invalid_utf8(text); bad != std::string_view::npos) {
    throw InputError("invalid UTF-8 at byte offset " + std::to_string(base_offset + bad));
  }
  std::string scratch;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      const auto token = normalize(text.substr(start, i - start), scratch);
      if (!token.empty()) sink(token);
    }
  }
}

struct RankedWord {
  const std::string* word;
  std::uint64_t count;
};

}  // namespace

OovPolicy parse_oov_policy(std::string_view name) {
  if (name == "unk") return OovPolicy::kMapToUnknown;
  if (name == "drop") return OovPolicy::kDrop;
  throw InputError("unknown OOV policy '" + std::string(name) + "' (expected unk|drop)");
}

std::string_view to_string(OovPolicy policy) {
  return policy == OovPolicy::kMapToUnknown ? "unk" : "drop";
}

std::size_t find_invalid_utf8(std::string_view text) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = bytes[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
      cp = c & 0x1F;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
      cp = c & 0x0F;
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t j = 1; j < len; ++j) {
      if ((bytes[i + j] & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (bytes[i + j] & 0x3F);
    }
    // Overlong forms, surrogates and values past U+10FFFF.
    if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

std::vector<std::string> tokenize(std::string_view text, std::size_t base_offset) {
  std::vector<std::string> out;
  split_tokens(text, base_offset, [&](std::string_view t) { out.emplace_back(t); });
  return out;
}

void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink) {
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    split_tokens(line, offset, sink);
    offset += line.size() + 1;
  }
}

void count_tokens(std::span<const std::string> tokens, TokenCounts& counts) {
  for (const auto& t : tokens) ++counts[t];
}

void merge_counts(TokenCounts& into, const TokenCounts& from) {
  for (const auto& [word, n] : from) into[word] += n;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) {
    throw InputError("vocabulary words/counts length mismatch");
  }
  if (words_.size() > std::numeric_limits<WordId>::max()) {
    throw InputError("vocabulary too large for 32-bit identifiers");
  }
  id_of_.reserve(words_.size());
  const std::size_t first_real = has_unknown() ? 1 : 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw InputError("empty word at id " + std::to_string(i));
    if (i >= first_real && words_[i] == kUnknownWord) {
      throw InputError("'<unk>' is only allowed at id 0");
    }
    if (!id_of_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw InputError("duplicate word '" + words_[i] + "' at id " + std::to_string(i));
    }
    if (i > first_real) {
      const bool ordered = counts_[i - 1] > counts_[i] ||
                           (counts_[i - 1] == counts_[i] && words_[i - 1] < words_[i]);
      if (!ordered) {
        throw InputError("vocabulary not sorted by (count desc, word asc) at id " +
                         std::to_string(i));
      }
    }
  }
}

const std::string& Vocabulary::word(WordId id) const {
  EIGENPRIOR_REQUIRE(id < words_.size(), "word id out of range");
  return words_[id];
}

std::uint64_t Vocabulary::count(WordId id) const {
  EIGENPRIOR_REQUIRE(id < counts_.size(), "word id out of range");
  return counts_[id];
}

bool Vocabulary::lookup(std::string_view word, WordId& id) const {
  const auto it = id_of_.find(word);
  if (it == id_of_.end()) return false;
  id = it->second;
  return true;
}

bool Vocabulary::contains(std::string_view word) const {
  WordId id;
  return lookup(word, id);
}

Vocabulary build_vocab(const TokenCounts& counts, std::size_t max_size, OovPolicy policy) {
  EIGENPRIOR_REQUIRE(max_size >= 1, "max_size must be >= 1");
  if (counts.empty()) throw InputError("empty corpus");

  std::vector<RankedWord> ranked;
  ranked.reserve(counts.size());
  for (const auto& [word, n] : counts) ranked.push_back({&word, n});
  const auto better = [](const RankedWord& a, const RankedWord& b) {
    return a.count != b.count ? a.count > b.count : *a.word < *b.word;
  };
  const std::size_t keep = std::min(max_size, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), better);

  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  words.reserve(keep + 1);
  freq.reserve(keep + 1);
  if (policy == OovPolicy::kMapToUnknown) {
    std::uint64_t oov = 0;
    for (std::size_t i = keep; i < ranked.size(); ++i) oov += ranked[i].count;
    words.emplace_back(kUnknownWord);
    freq.push_back(oov);
  }
  for (std::size_t i = 0; i < keep; ++i) {
    words.push_back(*ranked[i].word);
    freq.push_back(ranked[i].count);
  }
  return Vocabulary(std::move(words), std::move(freq));
}

Vocabulary build_vocab(std::span<const std::string> tokens, std::size_t max_size,
                       OovPolicy policy) {
  TokenCounts counts;
  count_tokens(tokens, counts);
  return build_vocab(counts, max_size, policy);
}

void write_vocab(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.words()[i] << '\t' << vocab.counts()[i] << '\n';
  }
}

Vocabulary read_vocab(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw InputError("vocabulary line " + std::to_string(line_no) +
                       ": expected word<TAB>count");
    }
    std::uint64_t n = 0;
    const std::string count_text = line.substr(tab + 1);
    std::size_t used = 0;
    try {
      n = std::stoull(count_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count_text.size() || count_text.front() == '-') {
      throw InputError("vocabulary line " + std::to_string(line_no) + ": bad count '" +
                       count_text + "'");
    }
    words.push_back(line.substr(0, tab));
    counts.push_back(n);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

void save_vocab(const std::string& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  write_vocab(out, vocab);
  if (!out) throw InputError("write failed: " + path);
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vocabulary: " + path);
  return read_vocab(in);
}

bool TokenMapper::map(std::string_view token, WordId& id) const {
  if (vocab_->lookup(token, id)) return true;
  if (vocab_->has_unknown()) {
    id = 0;
    return true;
  }
  return false;
}

std::vector<WordId> map_tokens(std::span<const std::string> tokens, const Vocabulary& vocab) {
  TokenMapper mapper(vocab);
  std::vector<WordId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    WordId id;
    if (mapper.map(t, id)) ids.push_back(id);
  }
  return ids;
}

std::vector<DocumentChunk> chunk(std::span<const WordId> ids, std::size_t chunk_len) {
  EIGENPRIOR_REQUIRE(chunk_len >= 1, "chunk_len must be >= 1");
  std::vector<DocumentChunk> chunks;
  const std::size_t count = ids.size() / chunk_len;
  chunks.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    const auto window = ids.subspan(c * chunk_len, chunk_len);
    chunks.push_back({std::vector<WordId>(window.begin(), window.end())});
  }
  return chunks;
}

Chunker::Chunker(std::size_t chunk_len, std::function<void(std::span<const WordId>)> sink)
    : chunk_len_(chunk_len), sink_(std::move(sink)) {
  EIGENPRIOR_REQUIRE(chunk_len >= 1, "chunk_len must be >= 1");
  buffer_.reserve(chunk_len);
}

void Chunker::push(WordId id) {
  buffer_.push_back(id);
  if (buffer_.size() == chunk_len_) {
    sink_(buffer_);
    buffer_.clear();
  }
}

void Fnv1a64::update(std::string_view bytes) {
  for (const char c : bytes) {
    state_ ^= static_cast<unsigned char>(c);
    state_ *= 0x100000001b3ULL;
  }
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace eigenprior
