#include "psdvec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "psdvec/error.hpp"

namespace psdvec {

namespace {

// Decodes one UTF-8 sequence starting at text[pos]. Returns the code point and
// advances pos; throws on malformed input.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    throw decode_error("invalid UTF-8 lead byte at offset " + std::to_string(pos));
  }
  if (pos + extra >= text.size()) {
    throw decode_error("truncated UTF-8 sequence at offset " + std::to_string(pos));
  }
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(text[pos + k]);
    if ((b & 0xC0) != 0x80) {
      throw decode_error("invalid UTF-8 continuation byte at offset " + std::to_string(pos + k));
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw decode_error("overlong or out-of-range UTF-8 sequence at offset " + std::to_string(pos));
  }
  pos += extra + 1;
  return cp;
}

// Latin-1 symbols, general punctuation and CJK punctuation split words.
bool is_unicode_separator(char32_t cp) {
  return (cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x206F) ||
         (cp >= 0x3000 && cp <= 0x303F) || cp == 0xFEFF;
}

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::uint64_t pair_key(WordId i, WordId j) { return (std::uint64_t{i} << 32) | j; }

std::vector<PairCount> sorted_pairs(const std::unordered_map<std::uint64_t, double>& table) {
  std::vector<PairCount> pairs;
  pairs.reserve(table.size());
  for (const auto& [key, count] : table) {
    pairs.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xFFFFFFFFu), count});
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairCount& a, const PairCount& b) {
    return a.context != b.context ? a.context < b.context : a.focus < b.focus;
  });
  return pairs;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw_text, const TokenizerOptions& opts) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < raw_text.size()) {
    const std::size_t start = pos;
    const auto c = static_cast<unsigned char>(raw_text[pos]);
    bool word_char = false;
    if (c < 0x80) {
      ++pos;
      word_char = is_ascii_alnum(c);
    } else {
      const char32_t cp = decode_utf8(raw_text, pos);
      word_char = opts.keep_non_ascii && !is_unicode_separator(cp);
    }
    if (word_char) {
      if (c < 0x80) {
        current.push_back(opts.lowercase && c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                                                  : static_cast<char>(c));
      } else {
        current.append(raw_text.substr(start, pos - start));
      }
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) {
    throw shape_error("vocabulary words/counts length mismatch");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (i > 0) {
      const bool ordered = counts_[i - 1] > counts_[i] ||
                           (counts_[i - 1] == counts_[i] && words_[i - 1] < words_[i]);
      if (!ordered) {
        throw invalid_argument("vocabulary not in frequency order at rank " + std::to_string(i) +
                               " ('" + words_[i] + "')");
      }
    }
    index_.emplace(words_[i], static_cast<WordId>(i));
  }
}

std::int64_t Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

WordId Vocabulary::index_of(std::string_view word) const {
  const auto id = find(word);
  if (id < 0) throw oov_error("word not in vocabulary: '" + std::string(word) + "'");
  return static_cast<WordId>(id);
}

void Vocabulary::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
}

Vocabulary Vocabulary::read_tsv(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw decode_error("vocabulary line " + std::to_string(lineno) + ": expected word<TAB>count");
    }
    std::uint64_t count = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc() || ptr != last) {
      throw decode_error("vocabulary line " + std::to_string(lineno) + ": bad count");
    }
    words.push_back(line.substr(0, tab));
    counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

Vocabulary build_vocabulary(const std::unordered_map<std::string, std::uint64_t>& frequencies,
                            std::uint64_t min_count, std::size_t max_size) {
  if (min_count < 1) throw invalid_argument("min_count must be >= 1");
  if (frequencies.empty()) throw empty_corpus("empty corpus: no tokens");
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (const auto& [word, count] : frequencies) {
    if (count >= min_count) entries.emplace_back(word, count);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (entries.size() > max_size) entries.resize(max_size);
  if (entries.empty()) {
    throw empty_corpus("empty vocabulary: no token reaches min_count=" + std::to_string(min_count));
  }
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(entries.size());
  counts.reserve(entries.size());
  for (auto& [word, count] : entries) {
    words.push_back(std::move(word));
    counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

Vocabulary build_vocabulary(std::span<const std::string> tokens, std::uint64_t min_count,
                            std::size_t max_size) {
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& t : tokens) ++freq[t];
  return build_vocabulary(freq, min_count, max_size);
}

Document to_document(std::span<const std::string> tokens, const Vocabulary& vocab) {
  Document doc;
  doc.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto id = vocab.find(t);
    if (id >= 0) doc.push_back(static_cast<WordId>(id));
  }
  return doc;
}

CooccurrenceCounts::CooccurrenceCounts(std::size_t vocab_size, int window,
                                       std::vector<PairCount> pairs,
                                       std::vector<double> unigram_counts)
    : window_(window), pairs_(std::move(pairs)), unigram_counts_(std::move(unigram_counts)) {
  if (unigram_counts_.size() != vocab_size) {
    throw shape_error("unigram count vector has length " + std::to_string(unigram_counts_.size()) +
                      ", expected W=" + std::to_string(vocab_size));
  }
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& p = pairs_[k];
    if (p.context >= vocab_size || p.focus >= vocab_size) {
      throw invalid_argument("pair (" + std::to_string(p.context) + "," + std::to_string(p.focus) +
                             ") outside vocabulary of size " + std::to_string(vocab_size));
    }
    if (!(p.count > 0.0)) throw invalid_argument("pair counts must be positive");
    if (k > 0) {
      const auto& q = pairs_[k - 1];
      if (!(q.context < p.context || (q.context == p.context && q.focus < p.focus))) {
        throw invalid_argument("pairs must be sorted by (context, focus) without duplicates");
      }
    }
    total_pairs_ += p.count;
  }
  for (const double u : unigram_counts_) {
    if (u < 0.0) throw invalid_argument("negative unigram count");
    total_tokens_ += u;
  }
  index_rows();
}

void CooccurrenceCounts::index_rows() {
  row_ptr_.assign(unigram_counts_.size() + 1, 0);
  for (const auto& p : pairs_) ++row_ptr_[p.context + 1];
  for (std::size_t i = 1; i < row_ptr_.size(); ++i) row_ptr_[i] += row_ptr_[i - 1];
}

double CooccurrenceCounts::at(WordId context, WordId focus) const {
  const auto first = pairs_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[context]);
  const auto last = pairs_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[context + 1]);
  const auto it = std::lower_bound(first, last, focus,
                                   [](const PairCount& p, WordId f) { return p.focus < f; });
  return (it != last && it->focus == focus) ? it->count : 0.0;
}

CooccurrenceCounts CooccurrenceCounts::merged(const CooccurrenceCounts& other) const {
  if (vocab_size() != other.vocab_size() || window_ != other.window_) {
    throw shape_error("cannot merge counts with different vocabulary size or window");
  }
  std::vector<PairCount> out;
  out.reserve(pairs_.size() + other.pairs_.size());
  auto a = pairs_.begin();
  auto b = other.pairs_.begin();
  const auto less = [](const PairCount& x, const PairCount& y) {
    return x.context != y.context ? x.context < y.context : x.focus < y.focus;
  };
  while (a != pairs_.end() || b != other.pairs_.end()) {
    if (b == other.pairs_.end() || (a != pairs_.end() && less(*a, *b))) {
      out.push_back(*a++);
    } else if (a == pairs_.end() || less(*b, *a)) {
      out.push_back(*b++);
    } else {
      out.push_back({a->context, a->focus, a->count + b->count});
      ++a;
      ++b;
    }
  }
  std::vector<double> unigrams(unigram_counts_);
  for (std::size_t i = 0; i < unigrams.size(); ++i) unigrams[i] += other.unigram_counts_[i];
  return CooccurrenceCounts(vocab_size(), window_, std::move(out), std::move(unigrams));
}

void CooccurrenceCounts::write_tsv(std::ostream& out) const {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "#W=" << vocab_size() << " c=" << window_ << " total=" << total_pairs_ << '\n';
  for (const auto& p : pairs_) out << p.context << '\t' << p.focus << '\t' << p.count << '\n';
  out.precision(old_precision);
}

CooccurrenceCounts CooccurrenceCounts::read_tsv(std::istream& in, std::vector<double> unigram_counts) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#W=", 0) != 0) {
    throw decode_error("counts file: missing '#W=<W> c=<c> total=<total>' header");
  }
  std::size_t vocab_size = 0;
  int window = 0;
  double total = 0.0;
  {
    std::istringstream header(line);
    std::string field;
    while (header >> field) {
      if (field.rfind("#W=", 0) == 0) vocab_size = std::stoull(field.substr(3));
      else if (field.rfind("c=", 0) == 0) window = std::stoi(field.substr(2));
      else if (field.rfind("total=", 0) == 0) total = std::stod(field.substr(6));
    }
  }
  std::vector<PairCount> pairs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    PairCount p{};
    const char* s = line.data();
    const char* e = s + line.size();
    auto r1 = std::from_chars(s, e, p.context);
    if (r1.ec != std::errc() || r1.ptr == e || *r1.ptr != '\t') {
      throw decode_error("counts line " + std::to_string(lineno) + ": malformed");
    }
    auto r2 = std::from_chars(r1.ptr + 1, e, p.focus);
    if (r2.ec != std::errc() || r2.ptr == e || *r2.ptr != '\t') {
      throw decode_error("counts line " + std::to_string(lineno) + ": malformed");
    }
    auto r3 = std::from_chars(r2.ptr + 1, e, p.count);
    if (r3.ec != std::errc() || r3.ptr != e) {
      throw decode_error("counts line " + std::to_string(lineno) + ": malformed count");
    }
    pairs.push_back(p);
  }
  CooccurrenceCounts counts(vocab_size, window, std::move(pairs), std::move(unigram_counts));
  if (counts.total_pairs() != total) {
    throw decode_error("counts file: header total does not match the sum of pair counts");
  }
  return counts;
}

CooccurrenceCounts count_cooccurrences(std::span<const Document> documents, std::size_t vocab_size,
                                       int window, unsigned threads) {
  if (window < 1) throw invalid_argument("window size c must be >= 1");
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(documents.size())));

  const auto count_shard = [&](std::size_t begin, std::size_t end) {
    std::unordered_map<std::uint64_t, double> table;
    std::vector<double> unigrams(vocab_size, 0.0);
    for (std::size_t d = begin; d < end; ++d) {
      const Document& doc = documents[d];
      for (std::size_t t = 0; t < doc.size(); ++t) {
        if (doc[t] >= vocab_size) {
          throw invalid_argument("document " + std::to_string(d) + " has id " +
                                 std::to_string(doc[t]) + " >= W");
        }
        unigrams[doc[t]] += 1.0;
        const std::size_t reach = std::min<std::size_t>(static_cast<std::size_t>(window), t);
        for (std::size_t k = 1; k <= reach; ++k) table[pair_key(doc[t - k], doc[t])] += 1.0;
      }
    }
    return CooccurrenceCounts(vocab_size, window, sorted_pairs(table), std::move(unigrams));
  };

  if (threads <= 1) return count_shard(0, documents.size());

  std::vector<CooccurrenceCounts> shards(threads);
  std::vector<std::exception_ptr> failures(threads);
  std::vector<std::thread> workers;
  const std::size_t per = (documents.size() + threads - 1) / threads;
  for (unsigned s = 0; s < threads; ++s) {
    workers.emplace_back([&, s] {
      try {
        const std::size_t begin = std::min(documents.size(), s * per);
        const std::size_t end = std::min(documents.size(), begin + per);
        shards[s] = count_shard(begin, end);
      } catch (...) {
        failures[s] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  CooccurrenceCounts total = std::move(shards[0]);
  for (unsigned s = 1; s < threads; ++s) total = total.merged(shards[s]);
  return total;
}

void for_each_document(const std::vector<std::filesystem::path>& paths,
                       const std::function<void(std::string_view)>& visit) {
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus file: " + path.string());
    std::string doc;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const bool blank = line.find_first_not_of(" \t") == std::string::npos;
      if (blank) {
        if (!doc.empty()) visit(doc);
        doc.clear();
      } else {
        if (!doc.empty()) doc.push_back('\n');
        doc += line;
      }
    }
    if (in.bad()) throw io_error("read failure on corpus file: " + path.string());
    if (!doc.empty()) visit(doc);
  }
}

}  // namespace psdvec
