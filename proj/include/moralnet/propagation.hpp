#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "moralnet/csv.hpp"
#include "moralnet/data_io.hpp"
#include "moralnet/error.hpp"
#include "moralnet/graph.hpp"
#include "moralnet/sparse.hpp"
#include "moralnet/statistics.hpp"

namespace moralnet {

using MoralVector = std::array<double, kDimensions>;

// |nodes| x 5 scores aligned to an AssociationGraph's node order.
struct MoralMatrix {
  std::vector<MoralVector> rows;

  MoralMatrix() = default;
  explicit MoralMatrix(std::size_t n) : rows(n, MoralVector{}) {}

  std::size_t size() const { return rows.size(); }

  std::vector<double> column(std::size_t d) const {
    std::vector<double> c(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) c[i] = rows[i][d];
    return c;
  }
  void set_column(std::size_t d, const std::vector<double>& c) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i][d] = c[i];
  }
  bool row_is_zero(std::size_t i) const {
    return std::all_of(rows[i].begin(), rows[i].end(), [](double v) { return v == 0.0; });
  }
};

struct SeedResult {
  MoralMatrix f0;
  std::vector<bool> is_seed;
  std::size_t seed_count = 0;
  // Lexicon words absent from the vocabulary (or carrying an all-zero vector).
  std::vector<std::string> ignored;
};

// Places each hard-lexicon vector on its vocabulary row; every other row is 0.
inline SeedResult seed_matrix(const AssociationGraph& g, const MoralLexicon& lexicon) {
  if (lexicon.kind != LexiconKind::hard) throw ValidationError("seed lexicon must be a hard lexicon");
  SeedResult s;
  s.f0 = MoralMatrix(g.size());
  s.is_seed.assign(g.size(), false);
  for (const auto& [word, values] : lexicon.entries) {
    auto i = g.find(word);
    MoralVector v{};
    for (std::size_t d = 0; d < kDimensions; ++d) v[d] = values[d].value_or(0.0);
    if (!i || std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
      s.ignored.push_back(word);
      continue;
    }
    s.f0.rows[*i] = v;
    s.is_seed[*i] = true;
    ++s.seed_count;
  }
  if (s.seed_count == 0) throw ValidationError("no seed lexicon word is in the graph vocabulary");
  return s;
}

// S = D^{-1/2} W D^{-1/2}, d = row sums of W. Isolated nodes keep empty rows.
inline CsrMatrix normalized_operator(const AssociationGraph& g) {
  const CsrMatrix& w = g.weights;
  std::vector<double> inv_sqrt(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double d = w.row_sum(i);
    if (d > 0) inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  return w.transform([&](std::size_t r, std::size_t c, double v) { return v * inv_sqrt[r] * inv_sqrt[c]; });
}

enum class PropagationMode { iterative, closed_form };

inline std::string_view to_string(PropagationMode m) {
  return m == PropagationMode::iterative ? "iterative" : "closed_form";
}

struct PropagationConfig {
  double alpha = 0.5;
  PropagationMode mode = PropagationMode::closed_form;
  int max_iterations = 1000;
  // Bound on the max-norm error of each returned column.
  double tolerance = 1e-8;
  bool parallel_columns = true;
};

inline void validate(const PropagationConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ValidationError("alpha must lie strictly inside (0, 1)");
  if (c.max_iterations < 1) throw ValidationError("max_iterations must be positive");
  if (!(c.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
}

struct ColumnSolve {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0;
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Fixed point of g <- alpha S g + f0, i.e. (I - alpha S)^{-1} f0. This is the
// recurrence F <- alpha S F + (1 - alpha) F0 rescaled by 1 / (1 - alpha).
// ||alpha S||_2 <= alpha, so alpha/(1-alpha) * ||step||_2 bounds the error.
inline ColumnSolve iterate_column(const CsrMatrix& s, const std::vector<double>& f0, const PropagationConfig& c) {
  ColumnSolve out;
  out.x = f0;
  std::vector<double> next(f0.size());
  const double factor = c.alpha / (1.0 - c.alpha);
  for (int it = 1; it <= c.max_iterations; ++it) {
    s.multiply(out.x, next);
    double step = 0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = c.alpha * next[i] + f0[i];
      step += (next[i] - out.x[i]) * (next[i] - out.x[i]);
    }
    out.x.swap(next);
    out.iterations = it;
    out.residual = factor * std::sqrt(step);
    if (out.residual < c.tolerance) return out;
  }
  throw ConvergenceError("iterative propagation did not converge in " + std::to_string(c.max_iterations) +
                             " iterations",
                         out.residual, out.iterations);
}

// Conjugate gradients on the SPD system (I - alpha S) x = f0. The spectrum
// lies in [1 - alpha, 1 + alpha], so ||r||_2 <= tol (1 - alpha) bounds the
// error by tol.
inline ColumnSolve conjugate_gradient_column(const CsrMatrix& s, const std::vector<double>& f0,
                                             const PropagationConfig& c) {
  const std::size_t n = f0.size();
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    s.multiply(v, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i] - c.alpha * out[i];
  };
  ColumnSolve out;
  out.x.assign(n, 0.0);
  std::vector<double> r = f0, p = f0, ap(n);
  double rr = 0;
  for (double v : r) rr += v * v;
  const double target = c.tolerance * (1.0 - c.alpha);
  out.residual = std::sqrt(rr);
  if (out.residual <= target) return out;
  for (int it = 1; it <= c.max_iterations; ++it) {
    apply(p, ap);
    double pap = 0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double step = rr / pap;
    double rr_next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += step * p[i];
      r[i] -= step * ap[i];
      rr_next += r[i] * r[i];
    }
    out.iterations = it;
    out.residual = std::sqrt(rr_next);
    if (out.residual <= target) {
      // Recompute the true residual so round-off drift cannot fake convergence.
      std::vector<double> check(n);
      apply(out.x, check);
      for (std::size_t i = 0; i < n; ++i) check[i] = f0[i] - check[i];
      out.residual = norm2(check);
      if (out.residual <= target) return out;
      r = check;
      rr_next = out.residual * out.residual;
      p = r;
      rr = rr_next;
      continue;
    }
    const double beta = rr_next / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_next;
  }
  throw ConvergenceError("conjugate gradient did not converge in " + std::to_string(c.max_iterations) +
                             " iterations",
                         out.residual, out.iterations);
}

}  // namespace detail

struct PropagationResult {
  MoralMatrix scores;
  PropagationMode mode = PropagationMode::closed_form;
  int iterations = 0;    // max over the five columns
  double residual = 0;   // max over the five columns
};

// F* = (I - alpha S)^{-1} F0, solved column by column. Isolated nodes keep
// their F0 row.
inline PropagationResult propagate(const AssociationGraph& g, const MoralMatrix& f0, const PropagationConfig& config) {
  validate(config);
  if (f0.size() != g.size()) throw ValidationError("F0 row count does not match the graph");
  const CsrMatrix s = normalized_operator(g);
  auto solve = [&](std::size_t d) {
    auto col = f0.column(d);
    return config.mode == PropagationMode::iterative ? detail::iterate_column(s, col, config)
                                                     : detail::conjugate_gradient_column(s, col, config);
  };
  std::vector<ColumnSolve> cols(kDimensions);
  if (config.parallel_columns) {
    std::vector<std::future<ColumnSolve>> jobs;
    for (std::size_t d = 0; d < kDimensions; ++d) jobs.push_back(std::async(std::launch::async, solve, d));
    for (std::size_t d = 0; d < kDimensions; ++d) cols[d] = jobs[d].get();
  } else {
    for (std::size_t d = 0; d < kDimensions; ++d) cols[d] = solve(d);
  }
  PropagationResult r;
  r.mode = config.mode;
  r.scores = MoralMatrix(g.size());
  for (std::size_t d = 0; d < kDimensions; ++d) {
    r.scores.set_column(d, cols[d].x);
    r.iterations = std::max(r.iterations, cols[d].iterations);
    r.residual = std::max(r.residual, cols[d].residual);
  }
  return r;
}

enum class SeedMode { subtract, exclude };

inline std::string_view to_string(SeedMode m) { return m == SeedMode::subtract ? "subtract" : "exclude"; }

struct SeedAdjusted {
  MoralMatrix scores;
  std::vector<bool> eval_mask;  // true: row takes part in evaluation
};

// Seeded rows (nonzero F0) either get F0 subtracted or are masked out.
inline SeedAdjusted subtract_seeds(const MoralMatrix& f_star, const MoralMatrix& f0, SeedMode mode = SeedMode::subtract) {
  if (f_star.size() != f0.size()) throw ValidationError("score matrices are not aligned");
  SeedAdjusted out{f_star, std::vector<bool>(f0.size(), true)};
  for (std::size_t i = 0; i < f0.size(); ++i) {
    if (f0.row_is_zero(i)) continue;
    if (mode == SeedMode::exclude) {
      out.eval_mask[i] = false;
    } else {
      for (std::size_t d = 0; d < kDimensions; ++d) out.scores.rows[i][d] -= f0.rows[i][d];
    }
  }
  return out;
}

// Mean over dimensions of the Spearman correlation between scores and gold
// values on the unmasked vocabulary words that carry a gold value. Dimensions
// with fewer than 3 pairs or zero variance are left out of the mean.
inline double mean_dimension_correlation(const AssociationGraph& g, const SeedAdjusted& adjusted,
                                         const MoralLexicon& gold) {
  double sum = 0;
  int used = 0;
  for (std::size_t d = 0; d < kDimensions; ++d) {
    std::vector<double> xs, ys;
    for (const auto& [word, values] : gold.entries) {
      auto i = g.find(word);
      if (!i || !adjusted.eval_mask[*i] || !values[d]) continue;
      xs.push_back(adjusted.scores.rows[*i][d]);
      ys.push_back(*values[d]);
    }
    if (xs.size() < 3) continue;
    auto c = stats::spearman(xs, ys);
    if (!c.defined()) continue;
    sum += c.rho;
    ++used;
  }
  return used ? sum / used : stats::kNaN;
}

struct AlphaTuning {
  double alpha = 0;
  std::vector<std::pair<double, double>> curve;  // (alpha, mean correlation)
};

inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i / 20.0);
  return grid;
}

// Picks the candidate alpha maximizing mean per-dimension Spearman against
// the tuning lexicon; ties go to the smaller alpha.
inline AlphaTuning tune_alpha(const AssociationGraph& g, const MoralMatrix& f0, const MoralLexicon& tuning,
                              std::vector<double> candidates, PropagationConfig config = {},
                              SeedMode seed_mode = SeedMode::subtract, const MoralLexicon* evaluation = nullptr) {
  if (candidates.empty()) throw ValidationError("alpha candidate list is empty");
  if (evaluation)
    for (const auto& [word, _] : tuning.entries)
      if (evaluation->contains(word))
        throw ValidationError("tuning lexicon overlaps the evaluation lexicon at '" + word + "'");
  if (std::none_of(tuning.entries.begin(), tuning.entries.end(),
                   [&](const auto& e) { return g.find(e.first).has_value(); }))
    throw ValidationError("no tuning lexicon word is in the graph vocabulary");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  AlphaTuning result;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double alpha : candidates) {
    config.alpha = alpha;
    auto prop = propagate(g, f0, config);
    double score = mean_dimension_correlation(g, subtract_seeds(prop.scores, f0, seed_mode), tuning);
    result.curve.emplace_back(alpha, score);
    if (!std::isnan(score) && score > best) {
      best = score;
      result.alpha = alpha;
      found = true;
    }
  }
  if (!found) result.alpha = candidates.front();
  return result;
}

// ---------------------------------------------------------------------------
// Global Moral Network files: `word,care,fairness,loyalty,authority,sanctity,is_seed`

struct GlobalMoralNetwork {
  std::vector<std::string> words;
  MoralMatrix scores;
  std::vector<bool> is_seed;

  std::size_t size() const { return words.size(); }
};

inline void write_gmn(std::ostream& out, const GlobalMoralNetwork& gmn) {
  csv::Row header{"word"};
  for (auto d : kDimensionNames) header.emplace_back(d);
  header.emplace_back("is_seed");
  csv::write_row(out, header);
  for (std::size_t i = 0; i < gmn.size(); ++i) {
    csv::Row row{gmn.words[i]};
    for (double v : gmn.scores.rows[i]) row.push_back(format_weight(v));
    row.push_back(gmn.is_seed[i] ? "1" : "0");
    csv::write_row(out, row);
  }
}

inline void write_gmn(const std::string& path, const GlobalMoralNetwork& gmn) {
  auto out = csv::open_output(path);
  write_gmn(out, gmn);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline GlobalMoralNetwork read_gmn(std::istream& in, const std::string& path = "<stream>") {
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row)) throw FormatError(path + ": empty file");
  detail::strip_bom(row);
  if (row.size() != 7 || normalize_token(row[0]) != "word" || normalize_token(row[6]) != "is_seed")
    throw FormatError(path + ": header must be word,care,fairness,loyalty,authority,sanctity,is_seed");
  GlobalMoralNetwork gmn;
  while (reader.next(row)) {
    if (detail::blank_row(row)) continue;
    const std::string where = csv::location(path, reader.line());
    if (row.size() != 7) throw FormatError(where + ": expected 7 fields");
    MoralVector v{};
    for (std::size_t d = 0; d < kDimensions; ++d) {
      auto x = csv::parse_real(row[1 + d]);
      if (!x) throw FormatError(where + ": non-numeric score");
      v[d] = *x;
    }
    gmn.words.push_back(normalize_token(row[0]));
    gmn.scores.rows.push_back(v);
    gmn.is_seed.push_back(trim(row[6]) == "1");
  }
  return gmn;
}

inline GlobalMoralNetwork read_gmn(const std::string& path) {
  auto in = csv::open_input(path);
  return read_gmn(in, path);
}

}  // namespace moralnet
