#include "psdvec/embedding_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "psdvec/error.hpp"

namespace psdvec {

static_assert(std::endian::native == std::endian::little, "block format assumes a little-endian host");

namespace {

constexpr char kBlockMagic[8] = {'P', 'S', 'D', 'V', 'B', 'L', 'K', '1'};

void append_double(std::string& line, double v, int precision) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  line.append(buf, static_cast<std::size_t>(len));
}

std::string vector_line(const std::string& word, const MatrixXd& m, Index col, int precision) {
  std::string line = word;
  for (Index r = 0; r < m.rows(); ++r) {
    line.push_back(' ');
    append_double(line, m(r, col), precision);
  }
  line.push_back('\n');
  return line;
}

// Parses `word v_1 ... v_dim`; returns false on malformed input.
bool parse_vector_line(const std::string& line, Index dim, std::string& word, double* out) {
  const auto space = line.find(' ');
  if (space == std::string::npos || space == 0) return false;
  word = line.substr(0, space);
  const char* p = line.data() + space;
  const char* e = line.data() + line.size();
  for (Index r = 0; r < dim; ++r) {
    while (p < e && *p == ' ') ++p;
    const auto [next, ec] = std::from_chars(p, e, out[r]);
    if (ec != std::errc()) return false;
    p = next;
  }
  while (p < e && (*p == ' ' || *p == '\r')) ++p;
  return p == e;
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw decode_error("block file truncated in header");
  return v;
}

}  // namespace

void write_word2vec_text(std::ostream& out, const Embeddings& emb, int precision) {
  if (static_cast<Index>(emb.words.size()) != emb.vectors.cols()) {
    throw shape_error("embedding words and vectors disagree on W");
  }
  out << emb.words.size() << ' ' << emb.vectors.rows() << '\n';
  for (std::size_t i = 0; i < emb.words.size(); ++i) {
    out << vector_line(emb.words[i], emb.vectors, static_cast<Index>(i), precision);
  }
}

void write_word2vec_text(const std::filesystem::path& path, const Embeddings& emb, int precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write embeddings: " + path.string());
  write_word2vec_text(out, emb, precision);
  if (!out) throw io_error("write failure on " + path.string());
}

Embeddings read_word2vec_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw decode_error("embedding file is empty");
  std::istringstream header(line);
  std::size_t count = 0;
  Index dim = 0;
  if (!(header >> count >> dim) || dim < 1) {
    throw decode_error("embedding file: expected a 'W N' header line");
  }
  Embeddings emb;
  emb.words.reserve(count);
  emb.vectors.resize(dim, static_cast<Index>(count));
  std::string word;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw decode_error("embedding file: fewer rows than the header states");
    if (!parse_vector_line(line, dim, word, emb.vectors.col(static_cast<Index>(i)).data())) {
      throw decode_error("embedding file: malformed row " + std::to_string(i + 2));
    }
    emb.words.push_back(word);
  }
  return emb;
}

Embeddings read_word2vec_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open embeddings: " + path.string());
  return read_word2vec_text(in);
}

void write_block(std::ostream& out, const BlockHeader& h, const MatrixXd& block) {
  if (block.rows() != h.rows.size() || block.cols() != h.cols.size()) {
    throw shape_error("block dimensions do not match the header ranges");
  }
  out.write(kBlockMagic, sizeof kBlockMagic);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.kind));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.rows.begin));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.rows.end));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.cols.begin));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.cols.end));
  put<std::uint64_t>(out, h.vocab_size);
  put<double>(out, h.kappa);
  put<double>(out, h.c_cut);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = block;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!out) throw io_error("block write failed");
}

MatrixXd read_block(std::istream& in, BlockHeader& h) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kBlockMagic, sizeof magic) != 0) {
    throw decode_error("not a block file (bad magic)");
  }
  if (get<std::uint32_t>(in) != 1) throw decode_error("unsupported block format version");
  const auto kind = get<std::uint32_t>(in);
  if (kind > 3) throw decode_error("unknown block kind");
  h.kind = static_cast<BlockKind>(kind);
  h.rows.begin = static_cast<Index>(get<std::uint64_t>(in));
  h.rows.end = static_cast<Index>(get<std::uint64_t>(in));
  h.cols.begin = static_cast<Index>(get<std::uint64_t>(in));
  h.cols.end = static_cast<Index>(get<std::uint64_t>(in));
  h.vocab_size = get<std::uint64_t>(in);
  h.kappa = get<double>(in);
  h.c_cut = get<double>(in);
  if (h.rows.size() < 0 || h.cols.size() < 0) throw decode_error("block header has inverted ranges");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(h.rows.size(), h.cols.size());
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!in) throw decode_error("block file truncated in payload");
  return rm;
}

namespace {

std::string checkpoint_header(std::size_t w, Index dim, const std::string& tag) {
  std::string h = "#psdvec-checkpoint W=" + std::to_string(w) + " N=" + std::to_string(dim);
  if (!tag.empty()) h += " " + tag;
  return h;
}

}  // namespace

Checkpoint::Checkpoint(std::filesystem::path path, std::vector<std::string> words, Index dim, std::string tag)
    : path_(std::move(path)), words_(std::move(words)), dim_(dim), tag_(std::move(tag)) {
  if (tag_.find('\n') != std::string::npos) throw invalid_argument("checkpoint tag must be a single line");
  if (std::filesystem::exists(path_)) {
    load();
  } else {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw io_error("cannot create checkpoint: " + path_.string());
    out << checkpoint_header(words_.size(), dim_, tag_) << '\n';
  }
}

void Checkpoint::load() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint: " + path_.string());
  std::string line;
  if (!std::getline(in, line) || line != checkpoint_header(words_.size(), dim_, tag_)) {
    throw config_error("checkpoint " + path_.string() +
                       " belongs to a different vocabulary, rank or configuration; remove it to start over");
  }
  std::streamoff good_end = in.tellg();
  std::string word;
  while (std::getline(in, line)) {
    std::size_t k = 0;
    long long begin = 0;
    long long end = 0;
    if (std::sscanf(line.c_str(), "#group %zu %lld %lld", &k, &begin, &end) != 3 || begin < 0 ||
        end < begin || end > static_cast<long long>(words_.size())) {
      break;
    }
    MatrixXd vectors(dim_, end - begin);
    bool complete = true;
    for (long long i = begin; i < end; ++i) {
      // A line without its newline is a torn write.
      if (!std::getline(in, line) || in.eof() ||
          !parse_vector_line(line, dim_, word, vectors.col(static_cast<Index>(i - begin)).data()) ||
          word != words_[static_cast<std::size_t>(i)]) {
        complete = false;
        break;
      }
    }
    if (!complete) break;
    groups_[k] = std::move(vectors);
    ranges_[k] = {static_cast<Index>(begin), static_cast<Index>(end)};
    good_end = in.tellg();
    if (good_end < 0) break;
  }
  in.close();
  if (good_end >= 0 && static_cast<std::uintmax_t>(good_end) < std::filesystem::file_size(path_)) {
    std::filesystem::resize_file(path_, static_cast<std::uintmax_t>(good_end));
  }
}

void Checkpoint::append_group(std::size_t k, IndexRange range, const MatrixXd& vectors) {
  if (vectors.rows() != dim_ || vectors.cols() != range.size()) {
    throw shape_error("checkpoint group does not match its declared range");
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw io_error("cannot append to checkpoint: " + path_.string());
  std::string chunk = "#group " + std::to_string(k) + " " + std::to_string(range.begin) + " " +
                      std::to_string(range.end) + "\n";
  for (Index i = range.begin; i < range.end; ++i) {
    chunk += vector_line(words_[static_cast<std::size_t>(i)], vectors, i - range.begin, 17);
  }
  out << chunk;
  out.flush();
  if (!out) throw io_error("checkpoint write failed: " + path_.string());
  groups_[k] = vectors;
  ranges_[k] = range;
}

}  // namespace psdvec
