#include "psdvec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "psdvec/error.hpp"

namespace psdvec {

namespace {

using Json = nlohmann::ordered_json;

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw config_error("field '" + field + "': " + why);
  };
  if (max_vocab < 1) fail("max_vocab", "must be >= 1");
  if (window < 1) fail("window", "must be >= 1");
  if (!(kappa >= 0.0 && kappa <= 1.0)) fail("kappa", "must lie in [0, 1]");
  if (!(cut_fraction > 0.0 && cut_fraction < 1.0)) fail("cut_fraction", "must lie in (0, 1)");
  if (rank < 1) fail("rank", "must be >= 1");
  if (iterations < 1) fail("iterations", "must be >= 1");
  if (!std::isfinite(init_scale)) fail("init_scale", "must be finite");
  if (!(convergence_tol >= 0.0)) fail("convergence_tol", "must be >= 0");
  if (core_size < 1) fail("core_size", "must be >= 1");
  if (static_cast<std::size_t>(core_size) > max_vocab) fail("core_size", "exceeds max_vocab");
  if (block_size < 1) fail("block_size", "must be >= 1");
  if (regularization != "tiered" && regularization != "none") fail("regularization", "must be 'tiered' or 'none'");
  if (workdir.empty()) fail("workdir", "must not be empty");
}

unsigned PipelineConfig::thread_count() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string PipelineConfig::dump() const {
  Json j;
  j["corpus"] = corpus;
  j["min_count"] = min_count;
  j["max_vocab"] = max_vocab;
  j["window"] = window;
  j["kappa"] = kappa;
  j["cut_fraction"] = cut_fraction;
  j["rank"] = rank;
  j["iterations"] = iterations;
  j["init_scale"] = init_scale;
  j["convergence_tol"] = convergence_tol;
  j["core_size"] = core_size;
  j["block_size"] = block_size;
  j["regularization"] = regularization;
  j["workdir"] = workdir;
  j["similarity_datasets"] = similarity_datasets;
  j["analogy_datasets"] = analogy_datasets;
  j["diagnose_documents"] = diagnose_documents;
  j["seed"] = seed;
  j["threads"] = threads;
  return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::parse(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config must be a JSON object");
  PipelineConfig c;
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"corpus",          "min_count",      "max_vocab",           "window",
                                  "kappa",           "cut_fraction",   "rank",                "iterations",
                                  "init_scale",      "convergence_tol", "core_size",          "block_size",
                                  "regularization",  "workdir",        "similarity_datasets", "analogy_datasets",
                                  "diagnose_documents", "seed",        "threads"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw config_error("unknown field '" + key + "'");
    }
  }
  read_field(j, "corpus", c.corpus);
  read_field(j, "min_count", c.min_count);
  read_field(j, "max_vocab", c.max_vocab);
  read_field(j, "window", c.window);
  read_field(j, "kappa", c.kappa);
  read_field(j, "cut_fraction", c.cut_fraction);
  read_field(j, "rank", c.rank);
  read_field(j, "iterations", c.iterations);
  read_field(j, "init_scale", c.init_scale);
  read_field(j, "convergence_tol", c.convergence_tol);
  read_field(j, "core_size", c.core_size);
  read_field(j, "block_size", c.block_size);
  read_field(j, "regularization", c.regularization);
  read_field(j, "workdir", c.workdir);
  read_field(j, "similarity_datasets", c.similarity_datasets);
  read_field(j, "analogy_datasets", c.analogy_datasets);
  read_field(j, "diagnose_documents", c.diagnose_documents);
  read_field(j, "seed", c.seed);
  read_field(j, "threads", c.threads);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse(text.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void PipelineConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write config: " + path.string());
  out << dump();
  if (!out) throw io_error("write failure on " + path.string());
}

}  // namespace psdvec
