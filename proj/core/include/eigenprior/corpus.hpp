#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eigenprior {

using WordId = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr std::size_t kDefaultChunkLength = 13;

enum class OovPolicy {
  kMapToUnknown,  // OOV tokens become id 0 (`<unk>`), chunk geometry preserved
  kDrop,          // OOV tokens are deleted from the stream before chunking
};

OovPolicy parse_oov_policy(std::string_view name);
std::string_view to_string(OovPolicy policy);

// Splits UTF-8 text on ASCII whitespace, lowercases ASCII letters and trims
// every byte outside [a-z0-9] from both token ends. Interior punctuation and
// non-ASCII bytes survive. Throws InputError on invalid UTF-8; the message
// names the byte offset (counted from `base_offset`).
std::vector<std::string> tokenize(std::string_view text, std::size_t base_offset = 0);

// Streams `in` line by line through the same rules as tokenize().
void for_each_token(std::istream& in, const std::function<void(std::string_view)>& sink);

// Returns the first invalid byte offset, or npos when `text` is valid UTF-8.
std::size_t find_invalid_utf8(std::string_view text);

using TokenCounts = std::unordered_map<std::string, std::uint64_t>;

void count_tokens(std::span<const std::string> tokens, TokenCounts& counts);
void merge_counts(TokenCounts& into, const TokenCounts& from);

// Word <-> dense id bijection with corpus frequencies.
//
// Real words are sorted by descending count, ties by byte-wise word order.
// When the vocabulary carries the `<unk>` sentinel it sits at id 0 and its
// count is the number of OOV occurrences seen while building; the ordering
// invariant then applies to ids [1, size).
class Vocabulary {
 public:
  Vocabulary() = default;

  // Takes words/counts as given; throws InputError if they violate the
  // identifier invariants (duplicates, ordering, misplaced `<unk>`).
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  bool has_unknown() const { return !words_.empty() && words_.front() == kUnknownWord; }

  const std::string& word(WordId id) const;
  std::uint64_t count(WordId id) const;
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // Sets `id` and returns true when `word` is in the vocabulary.
  bool lookup(std::string_view word, WordId& id) const;
  bool contains(std::string_view word) const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> id_of_;
};

// Keeps the `max_size` most frequent tokens. With kMapToUnknown the result
// has max_size + 1 entries at most (sentinel first). Throws InputError
// "empty corpus" when `counts` is empty.
Vocabulary build_vocab(const TokenCounts& counts, std::size_t max_size, OovPolicy policy);
Vocabulary build_vocab(std::span<const std::string> tokens, std::size_t max_size,
                       OovPolicy policy);

// Vocabulary file: `word<TAB>count` per line, id = 0-based line number.
void write_vocab(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocab(std::istream& in);
void save_vocab(const std::string& path, const Vocabulary& vocab);
Vocabulary load_vocab(const std::string& path);

// Maps token strings to ids. OOV tokens go to id 0 when the vocabulary has
// `<unk>`, otherwise they are dropped.
class TokenMapper {
 public:
  explicit TokenMapper(const Vocabulary& vocab) : vocab_(&vocab) {}
  // Returns false when the token was dropped.
  bool map(std::string_view token, WordId& id) const;

 private:
  const Vocabulary* vocab_;
};

std::vector<WordId> map_tokens(std::span<const std::string> tokens, const Vocabulary& vocab);

struct DocumentChunk {
  std::vector<WordId> tokens;
  bool operator==(const DocumentChunk&) const = default;
};

// Non-overlapping windows of exactly `chunk_len` ids; the short remainder is
// discarded.
std::vector<DocumentChunk> chunk(std::span<const WordId> ids, std::size_t chunk_len);

// Incremental form of chunk() for streamed corpora.
class Chunker {
 public:
  Chunker(std::size_t chunk_len, std::function<void(std::span<const WordId>)> sink);
  void push(WordId id);
  // Drops any buffered partial chunk; call between independent documents.
  void reset() { buffer_.clear(); }
  std::size_t chunk_length() const { return chunk_len_; }

 private:
  std::size_t chunk_len_;
  std::function<void(std::span<const WordId>)> sink_;
  std::vector<WordId> buffer_;
};

// 64-bit FNV-1a, used to fingerprint corpus bytes.
class Fnv1a64 {
 public:
  void update(std::string_view bytes);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t value);

}  // namespace eigenprior
