#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "psdvec/corpus.hpp"
#include "psdvec/error.hpp"

namespace fixture {

// Zipf-distributed random documents over ids [0, w); the final document lists
// every id once so all unigram counts are positive.
inline std::vector<psdvec::Document> zipf_documents(std::size_t w, std::size_t docs, std::size_t length,
                                                    std::mt19937_64& rng) {
  std::vector<double> weights(w);
  for (std::size_t i = 0; i < w; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::uint32_t> pick(weights.begin(), weights.end());
  std::vector<psdvec::Document> out(docs);
  for (auto& d : out) {
    d.resize(length);
    for (auto& t : d) t = pick(rng);
  }
  psdvec::Document all(w);
  for (std::size_t i = 0; i < w; ++i) all[i] = static_cast<psdvec::WordId>(i);
  out.push_back(all);
  return out;
}

inline std::shared_ptr<const psdvec::CooccurrenceCounts> zipf_counts(std::size_t w, std::size_t docs,
                                                                     std::size_t length, int window,
                                                                     std::mt19937_64& rng) {
  const auto d = zipf_documents(w, docs, length, rng);
  return std::make_shared<const psdvec::CooccurrenceCounts>(psdvec::count_cooccurrences(d, w, window));
}

inline std::string error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const psdvec::Error& e) {
    return e.kind();
  }
  return "";
}

}  // namespace fixture
