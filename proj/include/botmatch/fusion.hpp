#ifndef BOTMATCH_FUSION_HPP
#define BOTMATCH_FUSION_HPP

#include <string>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/factorize.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/linalg.hpp"

namespace botmatch {

enum class FusionMethod { warm_start, concat };

struct FusionConfig {
  FusionMethod method = FusionMethod::warm_start;
  std::string content_space;
  std::string network_space;  // concat only
  double mix_weight = 0.5;
  int dim = 32;
};

/// Content vectors aligned to the graph's node order and brought to `dim`
/// columns: unchanged when dims agree, PCA scores when the content is wider,
/// zero-padded when it is narrower.
inline RowMatrix project_content(const CommGraph& g, const EmbeddingSpace& content, int dim) {
  const auto lookup = content.row_lookup();
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd aligned(n, content.vectors.cols());
  for (NodeId v = 0; v < g.size(); ++v) {
    auto it = lookup.find(g.id(v));
    if (it == lookup.end()) {
      fail(ErrorKind::alignment, "content space '" + content.name + "' has no vector for '" + g.id(v) + "'");
    }
    aligned.row(v) = content.vectors.row(static_cast<Eigen::Index>(it->second));
  }
  const auto width = aligned.cols();
  if (width == dim) return aligned;
  if (width < dim) {
    RowMatrix padded = RowMatrix::Zero(n, dim);
    padded.leftCols(width) = aligned;
    return padded;
  }
  return pca(aligned, dim).scores;
}

/// Graph factorization initialized from a content embedding.
inline FactorizeResult warm_start_factorize(const CommGraph& g, const EmbeddingSpace& content,
                                            const FactorizeOptions& opt) {
  auto init = project_content(g, content, opt.dim);
  auto result = graph_factorize(g, opt, init);
  result.space.name = "warmstart";
  result.space.kind = SpaceKind::fused;
  return result;
}

/// Rows [λ·â_i | (1−λ)·b̂_i] with â, b̂ the L2-normalized rows of a and b.
inline EmbeddingSpace concat_spaces(const EmbeddingSpace& a, const EmbeddingSpace& b, double mix) {
  if (!(mix >= 0.0 && mix <= 1.0)) fail(ErrorKind::config, "mix weight must be in [0, 1]");
  if (a.kind == SpaceKind::ranked || b.kind == SpaceKind::ranked) {
    fail(ErrorKind::config, "ranked spaces cannot be concatenated");
  }
  if (a.ids.size() != b.ids.size()) {
    fail(ErrorKind::alignment, "spaces '" + a.name + "' and '" + b.name + "' differ in size");
  }
  const auto b_lookup = b.row_lookup();
  const RowMatrix an = normalize_rows(a.vectors);
  const RowMatrix bn = normalize_rows(b.vectors);
  EmbeddingSpace out;
  out.name = "concat";
  out.ids = a.ids;
  out.vectors.resize(a.vectors.rows(), a.vectors.cols() + b.vectors.cols());
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    auto it = b_lookup.find(a.ids[i]);
    if (it == b_lookup.end()) {
      fail(ErrorKind::alignment, "space '" + b.name + "' has no vector for '" + a.ids[i] + "'");
    }
    const auto r = static_cast<Eigen::Index>(i);
    out.vectors.row(r).head(a.vectors.cols()) = mix * an.row(r);
    out.vectors.row(r).tail(b.vectors.cols()) = (1.0 - mix) * bn.row(static_cast<Eigen::Index>(it->second));
  }
  out.metric = Metric::cosine;
  out.kind = SpaceKind::fused;
  out.seed = a.seed;
  out.validate();
  return out;
}

}  // namespace botmatch

#endif  // BOTMATCH_FUSION_HPP
