#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "moralnet/csv.hpp"
#include "moralnet/error.hpp"
#include "moralnet/tokens.hpp"

namespace moralnet {

// The five Moral Foundation dimensions, in the column order used everywhere.
inline constexpr std::size_t kDimensions = 5;
inline constexpr std::array<std::string_view, kDimensions> kDimensionNames = {
    "care", "fairness", "loyalty", "authority", "sanctity"};

enum class Source { human, llm };

inline std::string_view to_string(Source s) { return s == Source::human ? "human" : "llm"; }

inline constexpr std::size_t kMaxResponses = 3;

struct ResponseRecord {
  std::string cue;
  std::vector<std::string> responses;  // 0..3 normalized tokens
  Source source = Source::human;
  long long trial_id = 0;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct AssociationCorpus {
  std::vector<ResponseRecord> records;
  std::vector<RowError> errors;

  std::vector<std::string> cues() const {
    std::set<std::string> seen;
    for (const auto& r : records) seen.insert(r.cue);
    return {seen.begin(), seen.end()};
  }
};

struct ResponseParseOptions {
  // Cells equal (after normalization) to one of these are treated as empty,
  // for datasets that write e.g. "NA" instead of leaving the cell blank.
  std::vector<std::string> missing_tokens;
};

namespace detail {

inline void strip_bom(csv::Row& header) {
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
}

inline csv::Row read_header(csv::Reader& reader, const std::string& path) {
  csv::Row header;
  if (!reader.next(header)) throw FormatError(path + ": empty file, header row expected");
  strip_bom(header);
  return header;
}

inline bool blank_row(const csv::Row& row) {
  return std::all_of(row.begin(), row.end(), [](const std::string& f) { return trim(f).empty(); });
}

}  // namespace detail

// Reads `cue,R1,R2,R3` (extra columns allowed; an optional `trial_id` column
// is honored, otherwise trials are numbered per cue in file order).
inline AssociationCorpus parse_responses(std::istream& in, Source source,
                                         const std::string& path = "<stream>",
                                         const ResponseParseOptions& options = {}) {
  csv::Reader reader(in);
  csv::Row header = detail::read_header(reader, path);
  const int cue_col = csv::find_column(header, "cue");
  const std::array<int, kMaxResponses> resp_cols = {csv::find_column(header, "R1"),
                                                    csv::find_column(header, "R2"),
                                                    csv::find_column(header, "R3")};
  if (cue_col < 0 || std::any_of(resp_cols.begin(), resp_cols.end(), [](int c) { return c < 0; }))
    throw FormatError(path + ": header must contain cue,R1,R2,R3");
  const int trial_col = csv::find_column(header, "trial_id");

  std::unordered_set<std::string> missing;
  for (const auto& t : options.missing_tokens) missing.insert(normalize_token(t));

  AssociationCorpus corpus;
  std::unordered_map<std::string, long long> next_trial;
  csv::Row row;
  while (reader.next(row)) {
    if (detail::blank_row(row)) continue;
    auto cell = [&](int col) -> std::string {
      return col >= 0 && static_cast<std::size_t>(col) < row.size() ? normalize_token(row[col])
                                                                     : std::string();
    };
    ResponseRecord rec;
    rec.source = source;
    rec.cue = cell(cue_col);
    if (rec.cue.empty()) {
      corpus.errors.push_back({reader.line(), "empty cue"});
      continue;
    }
    for (int col : resp_cols) {
      std::string tok = cell(col);
      if (tok.empty() || missing.count(tok)) continue;
      rec.responses.push_back(std::move(tok));
    }
    if (trial_col >= 0) {
      auto id = csv::parse_integer(cell(trial_col));
      if (!id) {
        corpus.errors.push_back({reader.line(), "invalid trial_id"});
        continue;
      }
      rec.trial_id = *id;
    } else {
      rec.trial_id = next_trial[rec.cue]++;
    }
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

inline AssociationCorpus parse_responses(const std::string& path, Source source,
                                         const ResponseParseOptions& options = {}) {
  auto in = csv::open_input(path);
  return parse_responses(in, source, path, options);
}

inline void write_corpus(std::ostream& out, const AssociationCorpus& corpus) {
  csv::write_row(out, {"cue", "R1", "R2", "R3", "trial_id"});
  for (const auto& rec : corpus.records) {
    csv::Row row{rec.cue, "", "", "", std::to_string(rec.trial_id)};
    for (std::size_t i = 0; i < rec.responses.size() && i < kMaxResponses; ++i)
      row[1 + i] = rec.responses[i];
    csv::write_row(out, row);
  }
}

inline void write_corpus(const std::string& path, const AssociationCorpus& corpus) {
  auto out = csv::open_output(path);
  write_corpus(out, corpus);
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Moral lexicons

enum class LexiconKind { hard, soft };

using DimensionValues = std::array<std::optional<double>, kDimensions>;

// word -> per-dimension score. A missing (empty) cell means the word carries
// no value on that dimension; hard lexicons read it as 0.
struct MoralLexicon {
  LexiconKind kind = LexiconKind::hard;
  std::map<std::string, DimensionValues> entries;

  bool contains(const std::string& word) const { return entries.count(word) != 0; }
  std::size_t size() const { return entries.size(); }
};

inline MoralLexicon parse_moral_lexicon(std::istream& in, LexiconKind kind,
                                        const std::string& path = "<stream>") {
  csv::Reader reader(in);
  csv::Row header = detail::read_header(reader, path);
  const int word_col = csv::find_column(header, "word");
  std::array<int, kDimensions> cols{};
  for (std::size_t d = 0; d < kDimensions; ++d) cols[d] = csv::find_column(header, kDimensionNames[d]);
  if (word_col < 0 || std::any_of(cols.begin(), cols.end(), [](int c) { return c < 0; }))
    throw FormatError(path + ": header must be word,care,fairness,loyalty,authority,sanctity");

  MoralLexicon lex;
  lex.kind = kind;
  csv::Row row;
  while (reader.next(row)) {
    if (detail::blank_row(row)) continue;
    const std::string where = csv::location(path, reader.line());
    auto cell = [&](int col) -> std::string_view {
      return static_cast<std::size_t>(col) < row.size() ? trim(row[col]) : std::string_view();
    };
    std::string word = normalize_token(cell(word_col));
    if (word.empty()) throw FormatError(where + ": empty word");
    DimensionValues values;
    for (std::size_t d = 0; d < kDimensions; ++d) {
      std::string_view text = cell(cols[d]);
      if (text.empty()) {
        if (kind == LexiconKind::hard) values[d] = 0.0;
        continue;
      }
      auto v = csv::parse_real(text);
      if (!v || !std::isfinite(*v))
        throw FormatError(where + ": non-numeric " + std::string(kDimensionNames[d]) + " score '" +
                          std::string(text) + "'");
      const bool ok = kind == LexiconKind::hard ? (*v == -1.0 || *v == 0.0 || *v == 1.0)
                                                : (*v >= -1.0 && *v <= 1.0);
      if (!ok)
        throw FormatError(where + ": " + std::string(kDimensionNames[d]) + " score " +
                          std::string(text) + " out of range for " +
                          (kind == LexiconKind::hard ? "hard lexicon {-1,0,1}" : "soft lexicon [-1,1]"));
      values[d] = *v;
    }
    if (!lex.entries.emplace(word, values).second)
      throw FormatError(where + ": duplicate word '" + word + "'");
  }
  return lex;
}

inline MoralLexicon parse_moral_lexicon(const std::string& path, LexiconKind kind) {
  auto in = csv::open_input(path);
  return parse_moral_lexicon(in, kind, path);
}

// ---------------------------------------------------------------------------
// Scalar norm lexicons (arousal, concreteness)

enum class NormKind { arousal, concreteness };

struct NormLexicon {
  NormKind kind = NormKind::arousal;
  double scale_min = 1.0;
  double scale_max = 8.0;
  std::map<std::string, double> entries;

  const double* find(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

inline std::pair<double, double> default_scale(NormKind kind) {
  return kind == NormKind::arousal ? std::pair{1.0, 8.0} : std::pair{1.0, 5.0};
}

inline NormLexicon parse_norm_lexicon(std::istream& in, NormKind kind,
                                      const std::string& path = "<stream>",
                                      std::optional<std::pair<double, double>> scale = std::nullopt) {
  csv::Reader reader(in);
  csv::Row header = detail::read_header(reader, path);
  if (header.size() < 2 || csv::find_column(header, "word") != 0)
    throw FormatError(path + ": header must be word,score");
  NormLexicon lex;
  lex.kind = kind;
  std::tie(lex.scale_min, lex.scale_max) = scale.value_or(default_scale(kind));
  csv::Row row;
  while (reader.next(row)) {
    if (detail::blank_row(row)) continue;
    const std::string where = csv::location(path, reader.line());
    std::string word = normalize_token(row[0]);
    if (word.empty()) throw FormatError(where + ": empty word");
    auto v = row.size() > 1 ? csv::parse_real(row[1]) : std::nullopt;
    if (!v) throw FormatError(where + ": missing or non-numeric score");
    if (!(*v >= lex.scale_min && *v <= lex.scale_max))
      throw FormatError(where + ": score " + csv::format_real(*v) + " outside [" +
                        csv::format_real(lex.scale_min) + ", " + csv::format_real(lex.scale_max) + "]");
    if (!lex.entries.emplace(word, *v).second)
      throw FormatError(where + ": duplicate word '" + word + "'");
  }
  return lex;
}

inline NormLexicon parse_norm_lexicon(const std::string& path, NormKind kind,
                                      std::optional<std::pair<double, double>> scale = std::nullopt) {
  auto in = csv::open_input(path);
  return parse_norm_lexicon(in, kind, path, scale);
}

// ---------------------------------------------------------------------------
// Embedding tables

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::vector<std::string> words;
  std::vector<float> data;  // row-major, words.size() x dimension
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return words.size(); }
  const float* vector(std::size_t i) const { return data.data() + i * dimension; }
  std::optional<std::size_t> find(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? std::nullopt : std::optional(it->second);
  }

  // Returns false when the (normalized) word is already present; the first
  // occurrence wins.
  bool add(const std::string& word, const std::vector<float>& v, const std::string& where) {
    if (dimension == 0) dimension = v.size();
    if (v.size() != dimension || v.empty())
      throw FormatError(where + ": vector has " + std::to_string(v.size()) +
                        " components, expected " + std::to_string(dimension));
    if (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; }))
      throw FormatError(where + ": zero vector for '" + word + "'");
    if (index.count(word)) return false;
    index.emplace(word, words.size());
    words.push_back(word);
    data.insert(data.end(), v.begin(), v.end());
    return true;
  }
};

enum class EmbeddingFormat { csv, word2vec_binary };

// `word,v1,...,vD`, header row optional (detected by a first cell of "word").
// When `keep` is given, only those normalized words are loaded.
inline EmbeddingTable parse_embeddings_csv(std::istream& in, const std::string& path = "<stream>",
                                           const std::unordered_set<std::string>* keep = nullptr) {
  csv::Reader reader(in);
  EmbeddingTable table;
  csv::Row row;
  bool first = true;
  std::vector<float> v;
  while (reader.next(row)) {
    if (first) {
      first = false;
      detail::strip_bom(row);
      if (!row.empty() && normalize_token(row[0]) == "word") continue;
    }
    if (detail::blank_row(row)) continue;
    const std::string where = csv::location(path, reader.line());
    std::string word = normalize_token(row[0]);
    if (word.empty()) throw FormatError(where + ": empty word");
    if (keep && !keep->count(word)) continue;
    v.clear();
    for (std::size_t i = 1; i < row.size(); ++i) {
      auto x = csv::parse_real(row[i]);
      if (!x) throw FormatError(where + ": non-numeric component");
      v.push_back(static_cast<float>(*x));
    }
    table.add(word, v, where);
  }
  return table;
}

// Binary word2vec layout: ASCII header "<count> <dim>\n", then per entry the
// word, one space, `dim` little-endian float32 values, and an optional '\n'.
inline EmbeddingTable parse_embeddings_word2vec(std::istream& in, const std::string& path = "<stream>",
                                                const std::unordered_set<std::string>* keep = nullptr) {
  std::size_t count = 0, dim = 0;
  if (!(in >> count >> dim) || dim == 0) throw FormatError(path + ": bad word2vec header");
  in.get();  // newline after header
  EmbeddingTable table;
  table.dimension = dim;
  std::vector<float> v(dim);
  std::string word;
  for (std::size_t i = 0; i < count; ++i) {
    word.clear();
    int ch;
    while ((ch = in.get()) != EOF && ch != ' ') {
      if (ch != '\n') word.push_back(static_cast<char>(ch));
    }
    if (ch == EOF) throw FormatError(path + ": truncated at entry " + std::to_string(i));
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(dim * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(dim * sizeof(float)))
      throw FormatError(path + ": truncated vector at entry " + std::to_string(i));
    if (in.peek() == '\n') in.get();
    std::string norm = normalize_token(word);
    if (norm.empty() || (keep && !keep->count(norm))) continue;
    table.add(norm, v, path + ": entry " + std::to_string(i));
  }
  return table;
}

inline EmbeddingTable parse_embeddings(const std::string& path, EmbeddingFormat format,
                                       const std::unordered_set<std::string>* keep = nullptr) {
  auto in = csv::open_input(path);
  return format == EmbeddingFormat::csv ? parse_embeddings_csv(in, path, keep)
                                        : parse_embeddings_word2vec(in, path, keep);
}

// ---------------------------------------------------------------------------
// Token lists (vocabularies, cue subsets with optional labels such as POS)

struct TokenList {
  std::vector<std::string> tokens;  // normalized, first occurrence order, unique
  std::vector<std::string> labels;  // second column when present, else empty
};

inline TokenList read_token_list(std::istream& in, const std::string& path = "<stream>") {
  csv::Reader reader(in);
  csv::Row header = detail::read_header(reader, path);
  const std::string first = header.empty() ? "" : normalize_token(header[0]);
  if (first != "token" && first != "word" && first != "cue")
    throw FormatError(path + ": header must start with token, word, or cue");
  const bool labelled = header.size() > 1;
  TokenList list;
  std::unordered_set<std::string> seen;
  csv::Row row;
  while (reader.next(row)) {
    if (detail::blank_row(row)) continue;
    std::string tok = normalize_token(row[0]);
    if (tok.empty() || !seen.insert(tok).second) continue;
    list.tokens.push_back(tok);
    if (labelled) list.labels.push_back(row.size() > 1 ? std::string(trim(row[1])) : std::string());
  }
  return list;
}

inline TokenList read_token_list(const std::string& path) {
  auto in = csv::open_input(path);
  return read_token_list(in, path);
}

inline void write_token_list(const std::string& path, const std::vector<std::string>& tokens) {
  auto out = csv::open_output(path);
  csv::write_row(out, {"token"});
  for (const auto& t : tokens) csv::write_row(out, {t});
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace moralnet
