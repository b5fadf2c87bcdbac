#ifndef BOTMATCH_EMBEDDING_HPP
#define BOTMATCH_EMBEDDING_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "botmatch/error.hpp"

namespace botmatch {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Metric { cosine, euclidean };
enum class SpaceKind { content, network, fused, ranked };

constexpr std::string_view to_string(Metric m) {
  return m == Metric::cosine ? "cosine" : "euclidean";
}

constexpr std::string_view to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::content: return "content";
    case SpaceKind::network: return "network";
    case SpaceKind::fused: return "fused";
    case SpaceKind::ranked: return "ranked";
  }
  return "content";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "cosine") return Metric::cosine;
  if (s == "euclidean") return Metric::euclidean;
  return std::nullopt;
}

inline std::optional<SpaceKind> parse_kind(std::string_view s) {
  if (s == "content") return SpaceKind::content;
  if (s == "network") return SpaceKind::network;
  if (s == "fused") return SpaceKind::fused;
  if (s == "ranked") return SpaceKind::ranked;
  return std::nullopt;
}

/// Named N x D matrix of per-account vectors. Row i belongs to ids[i].
/// Ranked spaces have D = 1 and hold a score (higher = closer to the seeds).
struct EmbeddingSpace {
  std::string name;
  std::vector<std::string> ids;
  RowMatrix vectors;
  Metric metric = Metric::cosine;
  SpaceKind kind = SpaceKind::content;
  std::uint64_t seed = 0;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }

  void validate() const {
    if (vectors.cols() < 1) fail(ErrorKind::construction, "embedding space '" + name + "' has D = 0");
    if (static_cast<std::size_t>(vectors.rows()) != ids.size()) {
      fail(ErrorKind::construction, "embedding space '" + name + "' has " +
                                        std::to_string(vectors.rows()) + " rows but " +
                                        std::to_string(ids.size()) + " ids");
    }
    if (!vectors.allFinite()) {
      fail(ErrorKind::construction, "embedding space '" + name + "' has non-finite entries");
    }
    if (kind == SpaceKind::ranked && vectors.cols() != 1) {
      fail(ErrorKind::construction, "ranked space '" + name + "' must have D = 1");
    }
  }

  std::unordered_map<std::string, std::size_t> row_lookup() const {
    std::unordered_map<std::string, std::size_t> m;
    m.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], i);
    return m;
  }
};

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// "BME1 <name> <N> <D> <metric>" then one line per row:
/// "account_id v1 ... vD" with 9 significant digits. Ranked spaces write
/// "ranked" in the metric slot.
inline void write_embedding(std::ostream& out, const EmbeddingSpace& space) {
  space.validate();
  const std::string_view metric =
      space.kind == SpaceKind::ranked ? std::string_view("ranked") : to_string(space.metric);
  out << "BME1 " << space.name << ' ' << space.size() << ' ' << space.dim() << ' ' << metric
      << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.ids[i];
    for (Eigen::Index j = 0; j < space.vectors.cols(); ++j) {
      out << ' ' << format_g9(space.vectors(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::io, "failed writing embedding '" + space.name + "'");
}

/// Kind is not stored in the file; non-ranked spaces read back with
/// `default_kind`.
inline EmbeddingSpace read_embedding(std::istream& in, SpaceKind default_kind = SpaceKind::content) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorKind::format, "empty embedding file");
  std::istringstream hs(header);
  std::string magic, name, metric;
  std::size_t n = 0, d = 0;
  if (!(hs >> magic >> name >> n >> d >> metric) || magic != "BME1") {
    fail(ErrorKind::format, "bad embedding header: " + header);
  }
  EmbeddingSpace space;
  space.name = name;
  if (metric == "ranked") {
    space.kind = SpaceKind::ranked;
  } else if (auto m = parse_metric(metric)) {
    space.metric = *m;
    space.kind = default_kind;
  } else {
    fail(ErrorKind::format, "unknown metric '" + metric + "' in embedding header");
  }
  space.ids.resize(n);
  space.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail(ErrorKind::format, "embedding file truncated at row " + std::to_string(i));
    std::istringstream ls(line);
    if (!(ls >> space.ids[i])) fail(ErrorKind::format, "missing id at row " + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail(ErrorKind::format, "row " + std::to_string(i) + " has too few values");
      try {
        space.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(tok);
      } catch (const std::exception&) {
        fail(ErrorKind::format, "bad number '" + tok + "' at row " + std::to_string(i));
      }
    }
  }
  space.validate();
  return space;
}

/// Row-wise L2 normalization; zero rows stay zero.
inline RowMatrix normalize_rows(const RowMatrix& m) {
  RowMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace botmatch

#endif  // BOTMATCH_EMBEDDING_HPP
