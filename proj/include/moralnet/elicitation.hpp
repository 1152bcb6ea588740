#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "moralnet/csv.hpp"
#include "moralnet/data_io.hpp"
#include "moralnet/error.hpp"
#include "moralnet/statistics.hpp"
#include "moralnet/tokens.hpp"

namespace moralnet {

// ---------------------------------------------------------------------------
// Prompting

inline constexpr std::string_view kSystemPrompt =
    "Background: On average, an adult knows about 40,000 words, but what do these words mean to people like "
    "you and me? You can help scientists understand how meaning is organized in our mental dictionary by "
    "playing the game of word associations. This game is easy: Just give the first three words that come to "
    "mind for a given cue word.\n"
    "\n"
    "Output Format: Output your response in the following format:\n"
    "\n"
    "response1, response2, response3\n"
    "\n"
    "Do not provide any additional context or explanations. Just the words as comma-separated values.";

struct ChatMessage {
  std::string role;
  std::string content;
};

inline std::array<ChatMessage, 2> build_prompt(std::string_view cue) {
  std::string c = normalize_token(cue);
  if (c.empty()) throw ValidationError("cue must be non-empty");
  return {ChatMessage{"system", std::string(kSystemPrompt)}, ChatMessage{"user", "Cue word: " + c}};
}

struct ParsedCompletion {
  std::vector<std::string> tokens;
  bool malformed = false;
  bool salvaged = false;  // a "...:" prefix was stripped
};

namespace detail {

// Letters, digits, spaces, hyphens, apostrophes; at least one letter and at
// most three space-separated words.
inline bool word_like(std::string_view tok) {
  bool letter = false;
  std::size_t words = tok.empty() ? 0 : 1;
  for (unsigned char c : tok) {
    if (std::isalpha(c) || c >= 0x80) letter = true;
    else if (c == ' ') ++words;
    else if (!std::isdigit(c) && c != '-' && c != '\'') return false;
  }
  return letter && words <= 3;
}

}  // namespace detail

// Comma-separated completion -> up to `max_responses` normalized tokens.
// Salvage rule: anything up to the last ':' is dropped first. Tokens that are
// not word-like are discarded; nothing left means malformed.
inline ParsedCompletion parse_completion(std::string_view text, std::size_t max_responses = kMaxResponses) {
  ParsedCompletion out;
  if (auto colon = text.rfind(':'); colon != std::string_view::npos) {
    text.remove_prefix(colon + 1);
    out.salvaged = true;
  }
  std::size_t start = 0;
  while (start <= text.size() && out.tokens.size() < max_responses) {
    std::size_t end = text.find_first_of(",\n", start);
    if (end == std::string_view::npos) end = text.size();
    std::string tok = normalize_token(text.substr(start, end - start));
    while (!tok.empty() && (tok.back() == '.' || tok.back() == '"')) tok.pop_back();
    while (!tok.empty() && tok.front() == '"') tok.erase(0, 1);
    tok = normalize_token(tok);
    if (!tok.empty() && detail::word_like(tok)) out.tokens.push_back(std::move(tok));
    start = end + 1;
  }
  out.malformed = out.tokens.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Endpoint abstraction

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
};

inline nlohmann::json to_json(const ChatRequest& r) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", r.model}, {"messages", msgs}, {"temperature", r.temperature}, {"n", 1}};
}

// One chat completion per call. Implementations must be safe to call from
// several threads at once and throw on failure.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct ElicitationConfig {
  std::string endpoint;
  std::string model;
  double temperature = 1.0;
  double max_temperature = 5.0;
  int repeats_per_cue = 100;
  int max_responses = 3;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int retry_backoff_ms = 500;
  int max_concurrent = 4;
};

inline void validate(const ElicitationConfig& c) {
  if (c.repeats_per_cue < 2) throw ValidationError("repeats per cue must be at least 2");
  if (c.max_responses < 1 || c.max_responses > static_cast<int>(kMaxResponses))
    throw ValidationError("max responses must be between 1 and 3");
  if (!(c.temperature >= 0.0 && c.temperature <= c.max_temperature))
    throw ValidationError("temperature must lie in [0, " + csv::format_real(c.max_temperature) + "]");
  if (c.max_retries < 0) throw ValidationError("max retries must be nonnegative");
  if (c.max_concurrent < 1) throw ValidationError("max concurrent requests must be positive");
  if (!(c.timeout_seconds > 0)) throw ValidationError("timeout must be positive");
}

struct ElicitationFiles {
  std::string checkpoint;  // resumable progress; empty disables
  std::string audit;       // raw completions as JSON lines; empty disables
};

struct ElicitationRun {
  AssociationCorpus corpus;
  std::map<std::string, std::string> cue_errors;  // cue -> last endpoint error
  std::vector<std::string> flagged_cues;          // > 50% malformed completions
  std::size_t completions = 0;
  std::size_t malformed = 0;
  std::size_t resumed = 0;  // records taken from the checkpoint

  double malformed_rate() const {
    return completions ? static_cast<double>(malformed) / static_cast<double>(completions) : 0.0;
  }
};

namespace detail {

struct CheckpointRecord {
  ResponseRecord record;
  bool malformed = false;
};

inline const csv::Row kCheckpointHeader = {"cue", "trial_id", "R1", "R2", "R3", "malformed"};

// Loads complete lines only and truncates a torn trailing line so appends
// start on a fresh line.
inline std::vector<CheckpointRecord> load_checkpoint(const std::string& path) {
  std::vector<CheckpointRecord> out;
  if (path.empty() || !std::filesystem::exists(path)) return out;
  std::string content;
  {
    auto in = csv::open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  const std::size_t last_nl = content.rfind('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != content.size()) {
    std::filesystem::resize_file(path, keep);
    content.resize(keep);
  }
  std::istringstream in(content);
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row)) return out;
  if (row != kCheckpointHeader) throw FormatError(path + ": not an elicitation checkpoint");
  while (reader.next(row)) {
    if (row.size() != kCheckpointHeader.size()) continue;
    auto id = csv::parse_integer(row[1]);
    if (!id || row[0].empty()) continue;
    CheckpointRecord c;
    c.record.cue = row[0];
    c.record.trial_id = *id;
    c.record.source = Source::llm;
    for (int i = 2; i < 5; ++i)
      if (!row[i].empty()) c.record.responses.push_back(row[i]);
    c.malformed = row[5] == "1";
    out.push_back(std::move(c));
  }
  return out;
}

inline void append_checkpoint(std::ofstream& out, const CheckpointRecord& c) {
  csv::Row row{c.record.cue, std::to_string(c.record.trial_id), "", "", "", c.malformed ? "1" : "0"};
  for (std::size_t i = 0; i < c.record.responses.size() && i < 3; ++i) row[2 + i] = c.record.responses[i];
  csv::write_row(out, row);
  out.flush();
}

}  // namespace detail

// Prompts every cue `repeats_per_cue` times. Trials already present in the
// checkpoint are not requested again. Output records are ordered by cue (as
// given) then trial id, independent of completion order.
inline ElicitationRun elicit_corpus(const std::vector<std::string>& cue_list, const ElicitationConfig& config,
                                    CompletionClient& client, const ElicitationFiles& files = {}) {
  validate(config);
  std::vector<std::string> cues;
  std::unordered_map<std::string, std::size_t> cue_order;
  for (const auto& raw : cue_list) {
    std::string c = normalize_token(raw);
    if (c.empty() || cue_order.count(c)) continue;
    cue_order.emplace(c, cues.size());
    cues.push_back(std::move(c));
  }

  std::vector<detail::CheckpointRecord> done;
  std::set<std::pair<std::string, long long>> have;
  for (auto& c : detail::load_checkpoint(files.checkpoint)) {
    if (!cue_order.count(c.record.cue) || c.record.trial_id < 0 || c.record.trial_id >= config.repeats_per_cue)
      continue;
    if (have.emplace(c.record.cue, c.record.trial_id).second) done.push_back(std::move(c));
  }
  ElicitationRun run;
  run.resumed = done.size();

  std::vector<std::pair<std::size_t, long long>> jobs;
  for (std::size_t ci = 0; ci < cues.size(); ++ci)
    for (long long t = 0; t < config.repeats_per_cue; ++t)
      if (!have.count({cues[ci], t})) jobs.emplace_back(ci, t);

  std::ofstream checkpoint, audit;
  std::uintmax_t audit_start = 0;
  std::vector<std::pair<std::size_t, std::string>> audit_lines;  // job index, line
  if (!files.checkpoint.empty()) {
    const bool fresh = !std::filesystem::exists(files.checkpoint) || std::filesystem::file_size(files.checkpoint) == 0;
    checkpoint.open(files.checkpoint, std::ios::binary | std::ios::app);
    if (!checkpoint) throw IoError("cannot open checkpoint '" + files.checkpoint + "'");
    if (fresh) csv::write_row(checkpoint, detail::kCheckpointHeader);
  }
  if (!files.audit.empty()) {
    if (std::filesystem::exists(files.audit)) audit_start = std::filesystem::file_size(files.audit);
    audit.open(files.audit, std::ios::binary | std::ios::app);
    if (!audit) throw IoError("cannot open audit log '" + files.audit + "'");
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      const auto [ci, trial] = jobs[j];
      const std::string& cue = cues[ci];
      auto prompt = build_prompt(cue);
      ChatRequest req{config.model, {prompt[0], prompt[1]}, config.temperature};
      std::optional<std::string> text;
      std::string error;
      for (int attempt = 0; attempt <= config.max_retries && !text; ++attempt) {
        if (attempt > 0 && config.retry_backoff_ms > 0)
          std::this_thread::sleep_for(std::chrono::milliseconds(config.retry_backoff_ms * attempt));
        try {
          text = client.complete(req);
        } catch (const std::exception& e) {
          error = e.what();
        }
      }
      std::lock_guard lock(mu);
      if (audit.is_open()) {
        nlohmann::json line = {{"cue", cue}, {"trial_id", trial}, {"temperature", config.temperature}};
        if (text) line["completion"] = *text;
        else line["error"] = error;
        audit << line.dump() << '\n' << std::flush;
        audit_lines.emplace_back(j, line.dump());
      }
      if (!text) {
        run.cue_errors[cue] = error;
        continue;
      }
      auto parsed = parse_completion(*text, static_cast<std::size_t>(config.max_responses));
      detail::CheckpointRecord c{{cue, parsed.tokens, Source::llm, trial}, parsed.malformed};
      if (checkpoint.is_open()) detail::append_checkpoint(checkpoint, c);
      done.push_back(std::move(c));
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrent), jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::sort(done.begin(), done.end(), [&](const auto& a, const auto& b) {
    const auto oa = cue_order.at(a.record.cue), ob = cue_order.at(b.record.cue);
    return oa != ob ? oa < ob : a.record.trial_id < b.record.trial_id;
  });
  // Files were appended in completion order; rewrite them in job order so
  // reruns are byte-identical regardless of concurrency.
  if (checkpoint.is_open()) {
    checkpoint.close();
    const std::string tmp = files.checkpoint + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      csv::write_row(out, detail::kCheckpointHeader);
      for (const auto& c : done) detail::append_checkpoint(out, c);
      if (!out) throw IoError("cannot write checkpoint '" + tmp + "'");
    }
    std::filesystem::rename(tmp, files.checkpoint);
  }
  if (audit.is_open()) {
    audit.close();
    std::sort(audit_lines.begin(), audit_lines.end());
    std::filesystem::resize_file(files.audit, audit_start);
    std::ofstream out(files.audit, std::ios::binary | std::ios::app);
    for (const auto& [_, line] : audit_lines) out << line << '\n';
    if (!out) throw IoError("cannot write audit log '" + files.audit + "'");
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_cue;  // malformed, total
  for (auto& c : done) {
    ++run.completions;
    auto& pc = per_cue[c.record.cue];
    ++pc.second;
    if (c.malformed) {
      ++run.malformed;
      ++pc.first;
    }
    run.corpus.records.push_back(std::move(c.record));
  }
  for (const auto& cue : cues) {
    auto it = per_cue.find(cue);
    if (it != per_cue.end() && 2 * it->second.first > it->second.second) run.flagged_cues.push_back(cue);
  }
  return run;
}

// ---------------------------------------------------------------------------
// Variability and robustness

// Distinct response types over all records of the given cues.
inline std::size_t variability(const AssociationCorpus& corpus, const std::vector<std::string>& cues) {
  std::unordered_set<std::string> wanted;
  for (const auto& c : cues) wanted.insert(normalize_token(c));
  std::unordered_set<std::string> types;
  for (const auto& rec : corpus.records)
    if (wanted.count(rec.cue))
      for (const auto& r : rec.responses)
        if (!r.empty()) types.insert(r);
  return types.size();
}

inline double spearman_brown(double r_half) { return 2.0 * r_half / (1.0 + r_half); }

namespace detail {

inline std::map<std::string, double> half_strengths(const std::vector<const ResponseRecord*>& trials) {
  std::map<std::string, double> counts;
  double total = 0;
  for (const auto* rec : trials)
    for (const auto& r : rec->responses) {
      counts[r] += 1;
      total += 1;
    }
  for (auto& [_, v] : counts) v /= total;
  return counts;
}

}  // namespace detail

// Spearman correlation of two halves' strengths over shared responses,
// corrected by Spearman-Brown. Empty when fewer than 3 responses are shared
// or the correlation is undefined.
inline std::optional<double> split_half_reliability(const std::vector<const ResponseRecord*>& half_a,
                                                    const std::vector<const ResponseRecord*>& half_b) {
  auto a = detail::half_strengths(half_a);
  auto b = detail::half_strengths(half_b);
  std::vector<double> xs, ys;
  for (const auto& [tok, s] : a)
    if (auto it = b.find(tok); it != b.end()) {
      xs.push_back(s);
      ys.push_back(it->second);
    }
  if (xs.size() < 3) return std::nullopt;
  auto r = stats::spearman(xs, ys);
  if (!r.defined() || r.rho <= -1.0) return std::nullopt;
  return spearman_brown(r.rho);
}

// One random split of the cue's trials into halves (the first gets the
// smaller half when the count is odd).
inline std::optional<double> split_half_reliability(const AssociationCorpus& corpus, const std::string& cue,
                                                    std::uint64_t seed) {
  const std::string c = normalize_token(cue);
  std::vector<const ResponseRecord*> trials;
  for (const auto& rec : corpus.records)
    if (rec.cue == c) trials.push_back(&rec);
  if (trials.size() < 2) throw ValidationError("cue '" + c + "' has fewer than 2 trials");
  std::mt19937_64 rng(seed);
  std::shuffle(trials.begin(), trials.end(), rng);
  const auto mid = trials.begin() + static_cast<std::ptrdiff_t>(trials.size() / 2);
  return split_half_reliability({trials.begin(), mid}, {mid, trials.end()});
}

struct ReliabilitySummary {
  double mean = stats::kNaN;  // over every defined (cue, split) value
  std::size_t cues_used = 0;
  std::vector<std::string> skipped;  // no split produced a defined value
};

inline ReliabilitySummary mean_reliability(const AssociationCorpus& corpus, const std::vector<std::string>& cues,
                                           std::uint64_t seed, int splits = 10) {
  std::map<std::string, std::size_t> trial_counts;
  for (const auto& rec : corpus.records) ++trial_counts[rec.cue];
  ReliabilitySummary s;
  std::vector<double> cue_means;
  std::mt19937_64 seeder(seed);
  for (const auto& raw : cues) {
    const std::string cue = normalize_token(raw);
    std::vector<double> vals;
    if (trial_counts[cue] >= 2)
      for (int k = 0; k < splits; ++k)
        if (auto r = split_half_reliability(corpus, cue, seeder())) vals.push_back(*r);
    if (vals.empty()) {
      s.skipped.push_back(cue);
      continue;
    }
    cue_means.push_back(stats::mean(vals));
  }
  s.cues_used = cue_means.size();
  s.mean = stats::mean(cue_means);
  return s;
}

// ---------------------------------------------------------------------------
// Temperature sweep

struct SweepPoint {
  double temperature = 0;
  bool ok = false;  // elicitation produced records
  std::size_t variability = 0;
  double reliability = stats::kNaN;
  double variability_gap = stats::kNaN;
  double reliability_gap = stats::kNaN;
  double objective = stats::kNaN;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ascending temperature
  double chosen_temperature = 0;
  std::size_t human_variability = 0;
  double human_reliability = stats::kNaN;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  int splits = 10;
  std::string checkpoint_dir;  // one checkpoint per temperature when set
};

// Objective = |var_llm - var_h| / var_h + |rel_llm - rel_h| / |rel_h|; a zero
// or undefined human value leaves that gap unnormalized. Lowest objective
// wins, ties to the lower temperature.
inline SweepResult sweep_temperature(const std::vector<std::string>& cues, std::vector<double> temperatures,
                                     const AssociationCorpus& human_ref, ElicitationConfig config,
                                     CompletionClient& client, const SweepOptions& options = {}) {
  if (temperatures.empty()) throw ValidationError("at least one temperature is required");
  std::sort(temperatures.begin(), temperatures.end());
  temperatures.erase(std::unique(temperatures.begin(), temperatures.end()), temperatures.end());
  SweepResult result;
  result.human_variability = variability(human_ref, cues);
  result.human_reliability = mean_reliability(human_ref, cues, options.seed, options.splits).mean;
  const double var_scale = result.human_variability ? static_cast<double>(result.human_variability) : 1.0;
  const double rel_scale =
      std::isnan(result.human_reliability) || result.human_reliability == 0 ? 1.0 : std::abs(result.human_reliability);

  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (double t : temperatures) {
    config.temperature = t;
    ElicitationFiles files;
    if (!options.checkpoint_dir.empty())
      files.checkpoint = (std::filesystem::path(options.checkpoint_dir) / ("sweep_t" + csv::format_real(t) + ".csv")).string();
    SweepPoint p;
    p.temperature = t;
    auto run = elicit_corpus(cues, config, client, files);
    p.ok = !run.corpus.records.empty();
    if (p.ok) {
      any = true;
      p.variability = variability(run.corpus, cues);
      p.reliability = mean_reliability(run.corpus, cues, options.seed, options.splits).mean;
      p.variability_gap = std::abs(static_cast<double>(p.variability) - static_cast<double>(result.human_variability));
      p.reliability_gap = std::abs(p.reliability - result.human_reliability);
      p.objective = p.variability_gap / var_scale + p.reliability_gap / rel_scale;
      if (!std::isnan(p.objective) && p.objective < best) {
        best = p.objective;
        result.chosen_temperature = t;
      }
    }
    result.points.push_back(p);
  }
  if (!any) throw Error("elicitation failed at every temperature");
  if (std::isinf(best))
    for (const auto& p : result.points)
      if (p.ok) {
        result.chosen_temperature = p.temperature;
        break;
      }
  return result;
}

}  // namespace moralnet
