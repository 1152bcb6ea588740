// moralnet: word-association moral network pipeline.
//
//   moralnet elicit           prompt an LLM endpoint for associations
//   moralnet sweep            pick a sampling temperature against human data
//   moralnet build-propagate  association graph -> seeded propagation -> GMN
//   moralnet evaluate         GMN vs soft lexicon, precision@k curves
//   moralnet analyze          morality rankings, divergence, lexicons, subgraphs
//   moralnet graph-stats      structural statistics of an association graph
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moralnet/http_client.hpp"
#include "moralnet/moralnet.hpp"

namespace fs = std::filesystem;
using namespace moralnet;

namespace {

struct Common {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string format = "csv";

  ReportFormat report_format() const { return format == "json" ? ReportFormat::json : ReportFormat::csv; }
  std::string path(const std::string& stem) const { return (fs::path(out_dir) / stem).string(); }
  std::string report_path(const std::string& stem) const { return path(stem + "." + format); }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-o,--out", c.out_dir, "Output directory (created if missing)")->required();
  app->add_option("--seed", c.seed, "Global RNG seed")->capture_default_str();
  app->add_option("--format", c.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void prepare_out(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec || !fs::is_directory(c.out_dir))
    throw ValidationError("--out: cannot create directory '" + c.out_dir + "'");
}

// Rethrows a validation failure with the offending flag named.
template <class F>
void check_flag(const std::string& flag, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    throw ValidationError(flag + ": " + e.what());
  }
}

Source parse_source(const std::string& s) { return s == "llm" ? Source::llm : Source::human; }

AssociationCorpus load_corpus(const std::string& path, Source source) {
  auto corpus = parse_responses(path, source);
  if (!corpus.errors.empty())
    std::cerr << "warning: " << path << ": skipped " << corpus.errors.size() << " malformed row(s); first at line "
              << corpus.errors.front().line << ": " << corpus.errors.front().message << "\n";
  if (corpus.records.empty()) throw ValidationError(path + ": corpus has no usable rows");
  return corpus;
}

std::vector<std::string> load_vocabulary(const std::string& path, const AssociationCorpus& corpus) {
  if (path.empty()) return corpus.cues();
  return read_token_list(path).tokens;
}

nlohmann::ordered_json real_or_null(double v) {
  return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(csv::round_real(v));
}

// ---------------------------------------------------------------------------
// elicit / sweep

struct ElicitArgs {
  std::string cues_path;
  ElicitationConfig config;
};

void add_elicitation_flags(CLI::App* app, ElicitArgs& a, bool with_temperature) {
  app->add_option("--cues", a.cues_path, "Cue list (header token|word|cue)")->required()->check(CLI::ExistingFile);
  app->add_option("--endpoint", a.config.endpoint, "Chat-completions URL")->required();
  app->add_option("--model", a.config.model, "Model name sent to the endpoint")->required();
  if (with_temperature)
    app->add_option("--temperature", a.config.temperature, "Sampling temperature")->capture_default_str();
  app->add_option("--max-temperature", a.config.max_temperature, "Upper bound accepted for temperatures")
      ->capture_default_str();
  app->add_option("--repeats", a.config.repeats_per_cue, "Prompts per cue")->capture_default_str();
  app->add_option("--max-responses", a.config.max_responses, "Responses kept per completion (1-3)")
      ->capture_default_str();
  app->add_option("--timeout", a.config.timeout_seconds, "Per-request timeout, seconds")->capture_default_str();
  app->add_option("--retries", a.config.max_retries, "Retries per failed request")->capture_default_str();
  app->add_option("--backoff-ms", a.config.retry_backoff_ms, "Linear retry backoff step, ms")->capture_default_str();
  app->add_option("--concurrency", a.config.max_concurrent, "Concurrent requests")->capture_default_str();
}

nlohmann::ordered_json to_json(const ElicitationConfig& c) {
  return {{"endpoint", c.endpoint},         {"model", c.model},
          {"temperature", c.temperature},   {"repeats_per_cue", c.repeats_per_cue},
          {"max_responses", c.max_responses}, {"max_retries", c.max_retries}};
}

void validate_elicitation(const ElicitArgs& a) {
  check_flag("--endpoint", [&] { split_endpoint(a.config.endpoint); });
  const auto& c = a.config;
  if (c.repeats_per_cue < 2) throw ValidationError("--repeats: must be at least 2");
  if (c.max_responses < 1 || c.max_responses > 3) throw ValidationError("--max-responses: must be between 1 and 3");
  if (!(c.temperature >= 0 && c.temperature <= c.max_temperature))
    throw ValidationError("--temperature: must lie in [0, " + csv::format_real(c.max_temperature) + "]");
  if (c.max_retries < 0) throw ValidationError("--retries: must be nonnegative");
  if (c.retry_backoff_ms < 0) throw ValidationError("--backoff-ms: must be nonnegative");
  if (c.max_concurrent < 1) throw ValidationError("--concurrency: must be positive");
  if (!(c.timeout_seconds > 0)) throw ValidationError("--timeout: must be positive");
}

std::vector<std::string> load_cues(const std::string& path) {
  auto cues = read_token_list(path).tokens;
  if (cues.empty()) throw ValidationError("--cues: '" + path + "' lists no cues");
  return cues;
}

int run_elicit(const Common& common, const ElicitArgs& a) {
  validate_elicitation(a);
  auto cues = load_cues(a.cues_path);
  prepare_out(common);
  HttpChatClient client(a.config.endpoint, api_key_from_env(), a.config.timeout_seconds);
  ElicitationFiles files{common.path("checkpoint.csv"), common.path("audit.jsonl")};
  auto run = elicit_corpus(cues, a.config, client, files);
  write_corpus(common.path("corpus.csv"), run.corpus);

  Manifest m{"elicit", common.seed};
  m.config = to_json(a.config);
  m.add_input("cues", a.cues_path);
  m.write(common.path("manifest.json"));

  std::cerr << "elicited " << run.corpus.records.size() << " records for " << cues.size() << " cues ("
            << run.resumed << " resumed); malformed rate " << csv::format_real(run.malformed_rate()) << "\n";
  for (const auto& cue : run.flagged_cues) std::cerr << "warning: cue '" << cue << "' is mostly malformed\n";
  for (const auto& [cue, err] : run.cue_errors) std::cerr << "error: cue '" << cue << "': " << err << "\n";
  if (!run.cue_errors.empty()) {
    std::cerr << run.cue_errors.size() << " cue(s) incomplete; rerun with the same --out to resume\n";
    return 2;
  }
  return 0;
}

struct SweepArgs {
  ElicitArgs elicit;
  std::string human_path;
  std::vector<double> temperatures{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  int splits = 10;
};

int run_sweep(const Common& common, const SweepArgs& a) {
  validate_elicitation(a.elicit);
  if (a.temperatures.empty()) throw ValidationError("--temperatures: at least one value required");
  for (double t : a.temperatures)
    if (!(t >= 0 && t <= a.elicit.config.max_temperature))
      throw ValidationError("--temperatures: " + csv::format_real(t) + " outside [0, " +
                            csv::format_real(a.elicit.config.max_temperature) + "]");
  if (a.splits < 1) throw ValidationError("--splits: must be positive");
  auto cues = load_cues(a.elicit.cues_path);
  auto human = load_corpus(a.human_path, Source::human);
  prepare_out(common);
  HttpChatClient client(a.elicit.config.endpoint, api_key_from_env(), a.elicit.config.timeout_seconds);
  SweepOptions opts{common.seed, a.splits, common.out_dir};
  auto result = sweep_temperature(cues, a.temperatures, human, a.elicit.config, client, opts);

  Report rep;
  rep.columns = {{"temperature", ColumnType::real},     {"ok", ColumnType::boolean},
                 {"variability", ColumnType::integer},  {"reliability", ColumnType::real},
                 {"variability_gap", ColumnType::real}, {"reliability_gap", ColumnType::real},
                 {"objective", ColumnType::real},       {"chosen", ColumnType::boolean}};
  for (const auto& p : result.points)
    rep.add_row({p.temperature, p.ok, static_cast<long long>(p.variability), p.reliability, p.variability_gap,
                 p.reliability_gap, p.objective, p.temperature == result.chosen_temperature});
  write_report(rep, common.report_path("sweep"), common.report_format());

  Manifest m{"sweep", common.seed};
  m.config = to_json(a.elicit.config);
  m.config.erase("temperature");
  m.config["temperatures"] = a.temperatures;
  m.config["splits"] = a.splits;
  m.add_input("cues", a.elicit.cues_path);
  m.add_input("human_corpus", a.human_path);
  m.write(common.path("manifest.json"));

  std::cout << "human variability " << result.human_variability << ", reliability "
            << csv::format_real(result.human_reliability) << "\n"
            << "chosen temperature " << csv::format_real(result.chosen_temperature) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// build-propagate

struct BuildArgs {
  std::string corpus_path;
  std::string source = "human";
  std::string vocabulary_path;
  std::string mfd_path;
  std::string tuning_path;
  std::string eval_path;
  double alpha = 0.5;
  CLI::Option* alpha_opt = nullptr;
  std::vector<double> alpha_grid = default_alpha_grid();
  std::string mode = "closed-form";
  int max_iterations = 1000;
  double tolerance = 1e-8;
  std::string symmetrization = "sum";
  std::string seed_mode = "subtract";
};

PropagationConfig propagation_config(const BuildArgs& a) {
  PropagationConfig c;
  c.alpha = a.alpha;
  c.mode = a.mode == "iterative" ? PropagationMode::iterative : PropagationMode::closed_form;
  c.max_iterations = a.max_iterations;
  c.tolerance = a.tolerance;
  return c;
}

int run_build(const Common& common, const BuildArgs& a) {
  const bool fixed = a.alpha_opt->count() > 0;
  if (fixed) check_flag("--alpha", [&] { validate(propagation_config(a)); });
  else if (a.tuning_path.empty())
    throw ValidationError("--tuning-lexicon: required unless --alpha is given");
  if (!fixed)
    for (double x : a.alpha_grid)
      if (!(x > 0 && x < 1)) throw ValidationError("--alpha-grid: values must lie in (0, 1)");
  if (a.max_iterations < 1) throw ValidationError("--max-iterations: must be positive");
  if (!(a.tolerance > 0)) throw ValidationError("--tolerance: must be positive");

  auto corpus = load_corpus(a.corpus_path, parse_source(a.source));
  auto vocabulary = load_vocabulary(a.vocabulary_path, corpus);
  auto mfd = parse_moral_lexicon(a.mfd_path, LexiconKind::hard);
  std::optional<MoralLexicon> tuning, evaluation;
  if (!a.tuning_path.empty()) tuning = parse_moral_lexicon(a.tuning_path, LexiconKind::soft);
  if (!a.eval_path.empty()) evaluation = parse_moral_lexicon(a.eval_path, LexiconKind::soft);
  prepare_out(common);

  const auto sym = a.symmetrization == "max" ? Symmetrization::max : Symmetrization::sum;
  auto graph = build_graph(corpus, vocabulary, sym);
  SeedResult seeds;
  check_flag("--mfd", [&] { seeds = seed_matrix(graph, mfd); });
  const SeedMode seed_mode = a.seed_mode == "exclude" ? SeedMode::exclude : SeedMode::subtract;

  PropagationConfig config = propagation_config(a);
  AlphaTuning tuned;
  if (!fixed) {
    check_flag("--tuning-lexicon", [&] {
      tuned = tune_alpha(graph, seeds.f0, *tuning, a.alpha_grid, config, seed_mode,
                         evaluation ? &*evaluation : nullptr);
    });
    config.alpha = tuned.alpha;
  }
  auto result = propagate(graph, seeds.f0, config);
  auto adjusted = subtract_seeds(result.scores, seeds.f0, seed_mode);

  GlobalMoralNetwork raw{graph.nodes, result.scores, seeds.is_seed};
  GlobalMoralNetwork gmn{graph.nodes, adjusted.scores, seeds.is_seed};
  write_gmn(common.path("gmn.csv"), gmn);
  write_gmn(common.path("gmn_raw.csv"), raw);
  write_graph(graph, common.path("graph_nodes.csv"), common.path("graph_edges.csv"));
  Report stats = stats_report();
  add_stats_row(stats, a.source, compute_stats(graph));
  write_report(stats, common.report_path("graph_stats"), common.report_format());

  nlohmann::ordered_json meta = {
      {"alpha", config.alpha},
      {"alpha_source", fixed ? "fixed" : "tuned"},
      {"mode", std::string(to_string(config.mode))},
      {"iterations", result.iterations},
      {"residual", real_or_null(result.residual)},
      {"seed_mode", std::string(to_string(seed_mode))},
      {"seed_count", seeds.seed_count},
      {"seeds_not_in_vocabulary", seeds.ignored.size()},
      {"nodes", graph.size()},
      {"edges", graph.edge_count()},
      {"seed", common.seed}};
  if (!fixed) {
    nlohmann::ordered_json curve = nlohmann::ordered_json::array();
    for (const auto& [x, score] : tuned.curve) curve.push_back({{"alpha", x}, {"mean_spearman", real_or_null(score)}});
    meta["tuning_curve"] = curve;
  }
  write_json(common.path("gmn.meta.json"), meta);

  Manifest m{"build-propagate", common.seed};
  m.config = {{"source", a.source},
              {"alpha", fixed ? nlohmann::ordered_json(a.alpha) : nlohmann::ordered_json(nullptr)},
              {"alpha_grid", fixed ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(a.alpha_grid)},
              {"mode", a.mode},
              {"max_iterations", a.max_iterations},
              {"tolerance", a.tolerance},
              {"symmetrization", a.symmetrization},
              {"seed_mode", a.seed_mode}};
  m.add_input("corpus", a.corpus_path);
  m.add_input("vocabulary", a.vocabulary_path);
  m.add_input("mfd", a.mfd_path);
  m.add_input("tuning_lexicon", a.tuning_path);
  m.add_input("evaluation_lexicon", a.eval_path);
  m.write(common.path("manifest.json"));

  std::cerr << "graph: " << graph.size() << " nodes, " << graph.edge_count() << " edges; " << seeds.seed_count
            << " seeds; alpha " << csv::format_real(config.alpha) << (fixed ? " (fixed)" : " (tuned)") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string gmn_path;
  std::string emfd_path;
  std::string seed_mode = "subtract";
  std::string candidate_path;
  std::string candidate_source = "llm";
  std::string reference_path;
  std::string reference_source = "human";
  std::string cues_path;
  std::string embeddings_path;
  std::string embeddings_format = "csv";
  std::size_t k = 10;
  std::size_t runs = 50;
};

void print_eval(const EvalReport& e) {
  std::printf("%-10s %6s %9s %9s %9s\n", "dimension", "n", "rho", "p", "MAG");
  for (std::size_t d = 0; d <= kDimensions; ++d) {
    const EvalRow& r = d < kDimensions ? e.dimensions[d] : e.overall;
    std::printf("%-10s %6zu %9s %9s %9s%s\n", r.name.c_str(), r.n, csv::format_real(csv::round_real(r.rho)).c_str(),
                csv::format_real(csv::round_real(r.p)).c_str(), csv::format_real(kMagBaseline[d]).c_str(),
                r.low_support ? "  (low support)" : "");
  }
}

int run_evaluate(const Common& common, const EvaluateArgs& a) {
  if (a.gmn_path.empty() && a.candidate_path.empty())
    throw ValidationError("--gmn or --candidate-corpus: nothing to evaluate");
  if (!a.gmn_path.empty() && a.emfd_path.empty()) throw ValidationError("--emfd: required with --gmn");
  if (a.candidate_path.empty() != a.reference_path.empty())
    throw ValidationError("--reference-corpus: --candidate-corpus and --reference-corpus go together");
  if (!a.embeddings_path.empty() && a.reference_path.empty())
    throw ValidationError("--embeddings: needs --reference-corpus");
  if (a.k < 1) throw ValidationError("--k: must be positive");
  if (a.runs < 1) throw ValidationError("--runs: must be positive");

  std::optional<GlobalMoralNetwork> gmn;
  std::optional<MoralLexicon> gold;
  if (!a.gmn_path.empty()) {
    gmn = read_gmn(a.gmn_path);
    gold = parse_moral_lexicon(a.emfd_path, LexiconKind::soft);
  }
  std::optional<AssociationCorpus> cand, ref;
  if (!a.candidate_path.empty()) {
    cand = load_corpus(a.candidate_path, parse_source(a.candidate_source));
    ref = load_corpus(a.reference_path, parse_source(a.reference_source));
  }
  std::optional<EmbeddingTable> table;
  if (!a.embeddings_path.empty())
    table = parse_embeddings(a.embeddings_path,
                             a.embeddings_format == "word2vec" ? EmbeddingFormat::word2vec_binary : EmbeddingFormat::csv);
  prepare_out(common);

  if (gmn) {
    std::vector<bool> mask;
    if (a.seed_mode == "exclude")
      for (bool s : gmn->is_seed) mask.push_back(!s);
    auto eval = evaluate_gmn(*gmn, mask, *gold);
    write_report(to_report(eval), common.report_path("evaluation"), common.report_format());
    print_eval(eval);
  }
  if (cand) {
    auto gc = build_graph(*cand, cand->cues());
    auto gr = build_graph(*ref, ref->cues());
    std::vector<std::string> cues;
    if (!a.cues_path.empty()) {
      cues = read_token_list(a.cues_path).tokens;
    } else {
      const auto rc = gr.nodes;
      std::set_intersection(gc.nodes.begin(), gc.nodes.end(), rc.begin(), rc.end(), std::back_inserter(cues));
    }
    if (cues.empty()) throw ValidationError("--cues: no cue shared by the candidate and reference corpora");
    auto curve = precision_at_k(gc, gr, cues, a.k, a.runs, common.seed);
    Report rep = to_report(curve, "candidate");
    std::optional<PrecisionCurve> emb;
    if (table) {
      emb = precision_at_k(*table, gr, cues, a.k);
      for (auto& row : to_report(*emb, "embedding").rows) rep.add_row(std::move(row));
    }
    write_report(rep, common.report_path("precision"), common.report_format());

    nlohmann::ordered_json summary = {
        {"cues_used", curve.cues_used},
        {"cues_skipped", curve.skipped_cues},
        {"mean_strength_correlation", real_or_null(curve.mean_strength_correlation)},
        {"correlation_cues", curve.correlation_cues},
        {"correlation_skipped", curve.correlation_skipped}};
    if (emb) summary["embedding_cues_skipped"] = emb->skipped_cues;
    write_json(common.path("precision_summary.json"), summary);
    std::printf("precision@1 %s, @%zu %s over %zu cues\n", csv::format_real(csv::round_real(curve.mean[0])).c_str(),
                a.k, csv::format_real(csv::round_real(curve.mean.back())).c_str(), curve.cues_used);
  }

  Manifest m{"evaluate", common.seed};
  m.config = {{"seed_mode", a.seed_mode}, {"k", a.k}, {"runs", a.runs},
              {"candidate_source", a.candidate_source}, {"reference_source", a.reference_source},
              {"embeddings_format", a.embeddings_format}};
  m.add_input("gmn", a.gmn_path);
  m.add_input("emfd", a.emfd_path);
  m.add_input("candidate_corpus", a.candidate_path);
  m.add_input("reference_corpus", a.reference_path);
  m.add_input("cues", a.cues_path);
  m.add_input("embeddings", a.embeddings_path);
  m.write(common.path("manifest.json"));
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string gmn_path;
  std::string corpus_path;
  std::string source = "human";
  std::string gmn_b_path;
  std::string corpus_b_path;
  std::string source_b = "llm";
  std::string arousal_path;
  std::string concreteness_path;
  double concreteness_threshold = 3.5;
  std::size_t top_n = 50;
  std::size_t divergence_top = 20;
  double significance = 0.05;
};

// Union, in first-seen order, of each side's top_n most negative words on d.
std::vector<std::string> concept_union(const std::vector<const GlobalMoralNetwork*>& gmns, std::size_t d,
                                       std::size_t top_n, bool& truncated) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto* g : gmns) {
    auto sel = top_negative(*g, d, top_n);
    truncated = truncated || sel.truncated;
    for (auto& w : sel.words)
      if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

int run_analyze(const Common& common, const AnalyzeArgs& a) {
  if (a.top_n < 1) throw ValidationError("--top-n: must be positive");
  if (a.divergence_top < 1) throw ValidationError("--divergence-top: must be positive");
  if (!(a.significance > 0 && a.significance < 1)) throw ValidationError("--significance: must lie in (0, 1)");
  if (!a.corpus_b_path.empty() && a.gmn_b_path.empty()) throw ValidationError("--corpus-b: needs --gmn-b");
  if ((!a.arousal_path.empty() || !a.concreteness_path.empty()) && a.corpus_path.empty())
    throw ValidationError("--corpus: required for lexicon analysis");

  auto gmn = read_gmn(a.gmn_path);
  std::optional<GlobalMoralNetwork> gmn_b;
  if (!a.gmn_b_path.empty()) gmn_b = read_gmn(a.gmn_b_path);
  std::optional<AssociationGraph> graph, graph_b;
  if (!a.corpus_path.empty()) {
    auto c = load_corpus(a.corpus_path, parse_source(a.source));
    graph = build_graph(c, c.cues());
  }
  if (!a.corpus_b_path.empty()) {
    auto c = load_corpus(a.corpus_b_path, parse_source(a.source_b));
    graph_b = build_graph(c, c.cues());
  }
  std::vector<std::pair<std::string, NormLexicon>> lexicons;
  if (!a.arousal_path.empty()) lexicons.emplace_back("arousal", parse_norm_lexicon(a.arousal_path, NormKind::arousal));
  if (!a.concreteness_path.empty())
    lexicons.emplace_back("concreteness", parse_norm_lexicon(a.concreteness_path, NormKind::concreteness));
  prepare_out(common);

  auto ranking = overall_morality(gmn);
  write_report(to_report(ranking), common.report_path("ranking"), common.report_format());
  if (ranking.degenerate) std::cerr << "warning: morality scores have zero MAD; normalized values are 0\n";
  if (gmn_b) {
    auto ranking_b = overall_morality(*gmn_b);
    write_report(to_report(ranking_b), common.report_path("ranking_b"), common.report_format());
    write_report(to_report(divergence(ranking, ranking_b, a.divergence_top)), common.report_path("divergence"),
                 common.report_format());
  }

  bool truncated = false;
  std::vector<const GlobalMoralNetwork*> sides{&gmn};
  if (gmn_b && graph_b) sides.push_back(&*gmn_b);
  for (const auto& [name, lex] : lexicons) {
    std::optional<double> threshold;
    if (name == "concreteness") threshold = a.concreteness_threshold;
    Report per_concept;
    std::vector<LexiconComparison> comparisons;
    for (std::size_t d = 0; d < kDimensions; ++d) {
      auto concepts = concept_union(sides, d, a.top_n, truncated);
      std::vector<std::string> in_graph;
      for (const auto& c : concepts)
        if (graph->find(c)) in_graph.push_back(c);
      auto rep = to_report(lexicon_analysis(*graph, in_graph, lex, threshold), std::string(kDimensionNames[d]));
      if (per_concept.columns.empty()) per_concept.columns = rep.columns, per_concept.key = rep.key;
      for (auto& row : rep.rows) per_concept.add_row(std::move(row));
      if (graph_b)
        comparisons.push_back(compare_lexicon(std::string(kDimensionNames[d]), *graph, *graph_b, concepts, lex,
                                              threshold, a.significance));
    }
    write_report(per_concept, common.report_path("lexicon_" + name), common.report_format());
    if (graph_b)
      write_report(to_report(comparisons), common.report_path("lexicon_" + name + "_comparison"),
                   common.report_format());
  }

  if (graph) {
    auto dims = compare_dimension_subgraphs(gmn, *graph, a.top_n);
    for (const auto& d : dims) truncated = truncated || d.truncated;
    write_report(to_report(dims), common.report_path("subgraphs"), common.report_format());
  }
  if (graph_b)
    write_report(to_report(compare_dimension_subgraphs(*gmn_b, *graph_b, a.top_n)), common.report_path("subgraphs_b"),
                 common.report_format());
  if (truncated)
    std::cerr << "warning: --top-n " << a.top_n << " exceeds the available concepts; all were used\n";

  Manifest m{"analyze", common.seed};
  m.config = {{"top_n", a.top_n},
              {"divergence_top", a.divergence_top},
              {"concreteness_threshold", a.concreteness_threshold},
              {"significance", a.significance},
              {"source", a.source},
              {"source_b", a.source_b}};
  m.add_input("gmn", a.gmn_path);
  m.add_input("corpus", a.corpus_path);
  m.add_input("gmn_b", a.gmn_b_path);
  m.add_input("corpus_b", a.corpus_b_path);
  m.add_input("arousal", a.arousal_path);
  m.add_input("concreteness", a.concreteness_path);
  m.write(common.path("manifest.json"));
  return 0;
}

// ---------------------------------------------------------------------------
// graph-stats

struct StatsArgs {
  std::string corpus_path;
  std::string source = "human";
  std::string vocabulary_path;
  std::string symmetrization = "sum";
  std::string label;
};

int run_graph_stats(const Common& common, const StatsArgs& a) {
  auto corpus = load_corpus(a.corpus_path, parse_source(a.source));
  auto vocabulary = load_vocabulary(a.vocabulary_path, corpus);
  prepare_out(common);
  auto graph = build_graph(corpus, vocabulary, a.symmetrization == "max" ? Symmetrization::max : Symmetrization::sum);
  const auto s = compute_stats(graph);
  Report rep = stats_report();
  add_stats_row(rep, a.label.empty() ? a.source : a.label, s);
  write_report(rep, common.report_path("graph_stats"), common.report_format());

  Manifest m{"graph-stats", common.seed};
  m.config = {{"source", a.source}, {"symmetrization", a.symmetrization}, {"label", a.label}};
  m.add_input("corpus", a.corpus_path);
  m.add_input("vocabulary", a.vocabulary_path);
  m.write(common.path("manifest.json"));
  std::printf("nodes %zu, edges %zu, density %s, diameter %zu\n", s.node_count, s.edge_count,
              csv::format_real(s.density).c_str(), s.diameter);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moral association networks from human and LLM word associations"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  const auto source_check = CLI::IsMember({"human", "llm"});

  ElicitArgs elicit;
  auto* elicit_cmd = app.add_subcommand("elicit", "Prompt an endpoint for word associations");
  add_common(elicit_cmd, common);
  add_elicitation_flags(elicit_cmd, elicit, true);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Choose a temperature matching human variability and reliability");
  add_common(sweep_cmd, common);
  add_elicitation_flags(sweep_cmd, sweep.elicit, false);
  sweep_cmd->add_option("--human-corpus", sweep.human_path, "Human association corpus")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--temperatures", sweep.temperatures, "Candidate temperatures")->delimiter(',');
  sweep_cmd->add_option("--splits", sweep.splits, "Random split-halves per cue")->capture_default_str();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-propagate", "Build the graph and propagate moral seeds");
  add_common(build_cmd, common);
  build_cmd->add_option("--corpus", build.corpus_path, "Association corpus CSV")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--source", build.source, "Corpus source")->check(source_check)->capture_default_str();
  build_cmd->add_option("--vocabulary", build.vocabulary_path, "Node vocabulary (default: the corpus cues)")
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--mfd", build.mfd_path, "Hard seed lexicon")->required()->check(CLI::ExistingFile);
  build.alpha_opt = build_cmd->add_option("--alpha", build.alpha, "Fixed propagation alpha; skips tuning");
  build_cmd->add_option("--tuning-lexicon", build.tuning_path, "Soft lexicon for alpha tuning")
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--evaluation-lexicon", build.eval_path, "Held-out lexicon that tuning must not overlap")
      ->check(CLI::ExistingFile);
  build_cmd->add_option("--alpha-grid", build.alpha_grid, "Alpha candidates for tuning")->delimiter(',');
  build_cmd->add_option("--mode", build.mode, "Solver")
      ->check(CLI::IsMember({"iterative", "closed-form"}))
      ->capture_default_str();
  build_cmd->add_option("--max-iterations", build.max_iterations, "Solver iteration cap")->capture_default_str();
  build_cmd->add_option("--tolerance", build.tolerance, "Solver max-norm error target")->capture_default_str();
  build_cmd->add_option("--symmetrization", build.symmetrization, "How W combines both directions")
      ->check(CLI::IsMember({"sum", "max"}))
      ->capture_default_str();
  build_cmd->add_option("--seed-mode", build.seed_mode, "Seed handling after propagation")
      ->check(CLI::IsMember({"subtract", "exclude"}))
      ->capture_default_str();

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a GMN against a soft lexicon; precision@k curves");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--gmn", eval.gmn_path, "GMN CSV from build-propagate")->check(CLI::ExistingFile);
  eval_cmd->add_option("--emfd", eval.emfd_path, "Soft gold lexicon")->check(CLI::ExistingFile);
  eval_cmd->add_option("--seed-mode", eval.seed_mode, "exclude drops seed rows from scoring")
      ->check(CLI::IsMember({"subtract", "exclude"}))
      ->capture_default_str();
  eval_cmd->add_option("--candidate-corpus", eval.candidate_path, "Corpus whose rankings are scored")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--candidate-source", eval.candidate_source)->check(source_check)->capture_default_str();
  eval_cmd->add_option("--reference-corpus", eval.reference_path, "Corpus supplying reference response sets")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--reference-source", eval.reference_source)->check(source_check)->capture_default_str();
  eval_cmd->add_option("--cues", eval.cues_path, "Cue subset (default: cues shared by both corpora)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--embeddings", eval.embeddings_path, "Embedding table for the neighbor baseline")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--embeddings-format", eval.embeddings_format)
      ->check(CLI::IsMember({"csv", "word2vec"}))
      ->capture_default_str();
  eval_cmd->add_option("--k", eval.k, "Largest k")->capture_default_str();
  eval_cmd->add_option("--runs", eval.runs, "Tie-shuffle runs")->capture_default_str();

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Rankings, divergence, lexicon and subgraph analyses");
  add_common(analyze_cmd, common);
  analyze_cmd->add_option("--gmn", analyze.gmn_path, "GMN CSV")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--corpus", analyze.corpus_path, "Corpus behind --gmn")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--source", analyze.source)->check(source_check)->capture_default_str();
  analyze_cmd->add_option("--gmn-b", analyze.gmn_b_path, "Second GMN to compare against")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--corpus-b", analyze.corpus_b_path, "Corpus behind --gmn-b")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--source-b", analyze.source_b)->check(source_check)->capture_default_str();
  analyze_cmd->add_option("--arousal", analyze.arousal_path, "Arousal norms")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--concreteness", analyze.concreteness_path, "Concreteness norms")
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--concreteness-threshold", analyze.concreteness_threshold)->capture_default_str();
  analyze_cmd->add_option("--top-n", analyze.top_n, "Most negative concepts per dimension")->capture_default_str();
  analyze_cmd->add_option("--divergence-top", analyze.divergence_top)->capture_default_str();
  analyze_cmd->add_option("--significance", analyze.significance, "t-test level")->capture_default_str();

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("graph-stats", "Structural statistics of an association graph");
  add_common(stats_cmd, common);
  stats_cmd->add_option("--corpus", stats.corpus_path)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--source", stats.source)->check(source_check)->capture_default_str();
  stats_cmd->add_option("--vocabulary", stats.vocabulary_path)->check(CLI::ExistingFile);
  stats_cmd->add_option("--symmetrization", stats.symmetrization)
      ->check(CLI::IsMember({"sum", "max"}))
      ->capture_default_str();
  stats_cmd->add_option("--label", stats.label, "Row label (default: the source)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*elicit_cmd) return run_elicit(common, elicit);
    if (*sweep_cmd) return run_sweep(common, sweep);
    if (*build_cmd) return run_build(common, build);
    if (*eval_cmd) return run_evaluate(common, eval);
    if (*analyze_cmd) return run_analyze(common, analyze);
    if (*stats_cmd) return run_graph_stats(common, stats);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
