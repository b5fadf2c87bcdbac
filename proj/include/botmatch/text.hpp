#ifndef BOTMATCH_TEXT_HPP
#define BOTMATCH_TEXT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "botmatch/error.hpp"

namespace botmatch {

using TermId = std::uint32_t;
using Document = std::vector<std::string>;

struct VocabOptions {
  std::size_t min_df = 2;
  double max_df_frac = 0.8;
  std::size_t max_terms = 50'000;
};

/// Term dictionary with document frequencies. Ids follow lexicographic term
/// order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs)
      : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
    for (std::size_t i = 0; i < terms_.size(); ++i) ids_.emplace(terms_[i], static_cast<TermId>(i));
  }

  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::string& term(TermId t) const { return terms_.at(t); }
  std::size_t df(TermId t) const { return df_.at(t); }
  const std::vector<std::string>& terms() const { return terms_; }

  std::optional<TermId> find(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, TermId> ids_;
};

/// Keeps terms with min_df <= df and df/N <= max_df_frac, then the
/// max_terms highest-df terms (ties broken lexicographically).
inline Vocabulary build_vocab(std::span<const Document> docs, const VocabOptions& opt = {}) {
  if (docs.empty()) fail(ErrorKind::config, "cannot build a vocabulary from zero documents");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : doc) {
      if (seen.insert(tok).second) ++df[tok];
    }
  }
  const double n = static_cast<double>(docs.size());
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df) {
    if (count < opt.min_df) continue;
    if (static_cast<double>(count) / n > opt.max_df_frac) continue;
    kept.emplace_back(term, count);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (kept.size() > opt.max_terms) kept.resize(opt.max_terms);
  std::sort(kept.begin(), kept.end());
  if (kept.empty()) {
    fail(ErrorKind::config, "vocabulary is empty (min_df=" + std::to_string(opt.min_df) +
                                ", max_df_frac=" + std::to_string(opt.max_df_frac) + ")");
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (auto& [t, c] : kept) {
    terms.push_back(std::move(t));
    freqs.push_back(c);
  }
  return Vocabulary(std::move(terms), std::move(freqs), docs.size());
}

enum class TermWeighting { tf, tfidf, binary };

constexpr std::string_view to_string(TermWeighting m) {
  switch (m) {
    case TermWeighting::tf: return "tf";
    case TermWeighting::tfidf: return "tfidf";
    case TermWeighting::binary: return "binary";
  }
  return "tf";
}

struct TermEntry {
  TermId term;
  double value;
  bool operator==(const TermEntry&) const = default;
};

/// Sparse N x V document-term matrix. Rows are sorted by term id.
class DocTermMatrix {
 public:
  DocTermMatrix() = default;
  DocTermMatrix(std::vector<std::vector<TermEntry>> rows, std::size_t n_terms, TermWeighting mode)
      : rows_(std::move(rows)), n_terms_(n_terms), mode_(mode) {
    norms_.reserve(rows_.size());
    for (const auto& r : rows_) {
      double s = 0.0;
      for (const auto& e : r) s += e.value * e.value;
      norms_.push_back(std::sqrt(s));
    }
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return n_terms_; }
  TermWeighting mode() const { return mode_; }
  std::span<const TermEntry> row(std::size_t i) const { return rows_[i]; }
  double norm(std::size_t i) const { return norms_[i]; }

  double value(std::size_t i, TermId t) const {
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), t,
                               [](const TermEntry& e, TermId id) { return e.term < id; });
    return (it != r.end() && it->term == t) ? it->value : 0.0;
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

 private:
  std::vector<std::vector<TermEntry>> rows_;
  std::vector<double> norms_;
  std::size_t n_terms_ = 0;
  TermWeighting mode_ = TermWeighting::tf;
};

/// tf = raw counts; tfidf = tf * (1 + ln(N / df)); binary = indicator.
/// Tokens outside the vocabulary are ignored.
inline DocTermMatrix count_matrix(std::span<const Document> docs, const Vocabulary& vocab,
                                  TermWeighting mode) {
  std::vector<std::vector<TermEntry>> rows(docs.size());
  const double n = static_cast<double>(vocab.n_docs());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::map<TermId, double> counts;
    for (const auto& tok : docs[d]) {
      if (auto t = vocab.find(tok)) counts[*t] += 1.0;
    }
    auto& row = rows[d];
    row.reserve(counts.size());
    for (const auto& [t, c] : counts) {
      double v = c;
      if (mode == TermWeighting::binary) {
        v = 1.0;
      } else if (mode == TermWeighting::tfidf) {
        v = c * (1.0 + std::log(n / static_cast<double>(vocab.df(t))));
      }
      row.push_back({t, v});
    }
  }
  return DocTermMatrix(std::move(rows), vocab.size(), mode);
}

/// "doc_id term_id value" lines, one per non-zero.
inline void write_tsv(std::ostream& out, const DocTermMatrix& m,
                      std::span<const std::string> doc_ids) {
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (const auto& e : m.row(i)) {
      std::snprintf(buf, sizeof buf, "%.9g", e.value);
      out << doc_ids[i] << '\t' << e.term << '\t' << buf << '\n';
    }
  }
}

}  // namespace botmatch

#endif  // BOTMATCH_TEXT_HPP
