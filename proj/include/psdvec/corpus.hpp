#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace psdvec {

using WordId = std::uint32_t;

struct TokenizerOptions {
  bool lowercase = true;
  // Bytes >= 0x80 (any non-ASCII code point) count as word characters.
  bool keep_non_ascii = true;
};

// Lowercases and splits on runs of non-alphanumeric characters.
// Throws decode error on malformed UTF-8.
std::vector<std::string> tokenize(std::string_view raw_text, const TokenizerOptions& opts = {});

// Frequency-ordered vocabulary. Ranks are dense in [0, size()); rank 0 is the
// most frequent word, ties broken lexicographically ascending.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  // Returns -1 for out-of-vocabulary words.
  std::int64_t find(std::string_view word) const;
  WordId index_of(std::string_view word) const;  // throws oov

  // `word<TAB>count` lines in rank order.
  void write_tsv(std::ostream& out) const;
  static Vocabulary read_tsv(std::istream& in);

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

// Keeps tokens with frequency >= min_count, truncated to the max_size most
// frequent. Throws empty-corpus if nothing is left.
Vocabulary build_vocabulary(std::span<const std::string> tokens, std::uint64_t min_count,
                            std::size_t max_size);
Vocabulary build_vocabulary(const std::unordered_map<std::string, std::uint64_t>& frequencies,
                            std::uint64_t min_count, std::size_t max_size);

// A document after OOV removal; every id is < W.
using Document = std::vector<WordId>;

Document to_document(std::span<const std::string> tokens, const Vocabulary& vocab);

struct PairCount {
  WordId context;
  WordId focus;
  double count;

  bool operator==(const PairCount&) const = default;
};

// Sparse context->focus counts, sorted by (context, focus) with no duplicate
// keys and no zero entries.
class CooccurrenceCounts {
 public:
  CooccurrenceCounts() = default;
  CooccurrenceCounts(std::size_t vocab_size, int window, std::vector<PairCount> pairs,
                     std::vector<double> unigram_counts);

  std::size_t vocab_size() const { return unigram_counts_.size(); }
  int window() const { return window_; }
  double total_pairs() const { return total_pairs_; }
  double total_tokens() const { return total_tokens_; }
  const std::vector<PairCount>& pairs() const { return pairs_; }
  const std::vector<double>& unigram_counts() const { return unigram_counts_; }
  std::size_t nnz() const { return pairs_.size(); }

  // Offsets into pairs() such that row i occupies [row_begin(i), row_begin(i+1)).
  std::size_t row_begin(WordId context) const { return row_ptr_[context]; }
  double at(WordId context, WordId focus) const;

  CooccurrenceCounts merged(const CooccurrenceCounts& other) const;

  // TSV triplets `i<TAB>j<TAB>count` under a `#W=<W> c=<c> total=<total>` header.
  void write_tsv(std::ostream& out) const;
  // Unigram counts are not part of the TSV; supply them from the vocabulary.
  static CooccurrenceCounts read_tsv(std::istream& in, std::vector<double> unigram_counts);

  bool operator==(const CooccurrenceCounts& other) const {
    return window_ == other.window_ && pairs_ == other.pairs_ &&
           unigram_counts_ == other.unigram_counts_;
  }

 private:
  void index_rows();

  int window_ = 0;
  std::vector<PairCount> pairs_;
  std::vector<double> unigram_counts_;
  std::vector<std::size_t> row_ptr_;
  double total_pairs_ = 0.0;
  double total_tokens_ = 0.0;
};

// For each position t increments x(w[t-k], w[t]) for k = 1..min(c, t).
// Windows never cross document boundaries. Runs over `threads` shards.
CooccurrenceCounts count_cooccurrences(std::span<const Document> documents, std::size_t vocab_size,
                                       int window, unsigned threads = 1);

// Documents are separated by blank lines and by file boundaries.
void for_each_document(const std::vector<std::filesystem::path>& paths,
                       const std::function<void(std::string_view)>& visit);

}  // namespace psdvec
