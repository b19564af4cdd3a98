#include "enacode/pipeline.hpp"

#include "enacode/autocoder.hpp"
#include "enacode/io.hpp"
#include "enacode/numfmt.hpp"
#include "enacode/report.hpp"
#include "enacode/svg.hpp"
#include "enacode/topics.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <memory>

namespace enacode::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// config

void to_json(json& j, const RunConfig& c) {
  json columns{{"user_id", c.columns.user_id},
               {"timestamp", c.columns.timestamp},
               {"text", c.columns.text}};
  columns["entry_id"] = c.columns.entry_id ? json(*c.columns.entry_id) : json(nullptr);
  columns["semester"] = c.columns.semester ? json(*c.columns.semester) : json(nullptr);
  const auto& b = c.bands;
  j = json{{"v", kSchemaVersion},
           {"corpus", c.corpus},
           {"columns", columns},
           {"unit_key", to_string(c.unit_key)},
           {"preprocess", c.preprocess},
           {"topics",
            {{"k_range", c.topics.k_range},
             {"seed", c.topics.seed},
             {"iterations", c.topics.iterations},
             {"alpha", c.topics.alpha},
             {"beta", c.topics.beta},
             {"n_top", c.topics.n_top}}},
           {"scheme", c.scheme},
           {"reference", c.reference ? json(*c.reference) : json(nullptr)},
           {"ena", {{"accumulation", ena::to_string(c.accumulation)}}},
           {"agreement",
            {{"bands",
              {{"minimal", b.minimal},
               {"weak", b.weak},
               {"moderate", b.moderate},
               {"strong", b.strong},
               {"almost_perfect", b.almost_perfect}}}}},
           {"stats", {{"alternative", stats::to_string(c.alternative)}}}};
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* key,
                                           std::optional<std::string> fallback) {
  if (!j.contains(key))
    return fallback;
  if (j[key].is_null())
    return std::nullopt;
  return j[key].get<std::string>();
}

} // namespace

void from_json(const json& j, RunConfig& c) {
  if (!j.is_object())
    throw ConfigError("run config must be a JSON object");
  RunConfig d;
  try {
    c.corpus = j.value("corpus", d.corpus);
    if (j.contains("columns")) {
      const auto& m = j["columns"];
      c.columns.entry_id = optional_string(m, "entry_id", d.columns.entry_id);
      c.columns.user_id = m.value("user_id", d.columns.user_id);
      c.columns.timestamp = m.value("timestamp", d.columns.timestamp);
      c.columns.text = m.value("text", d.columns.text);
      c.columns.semester = optional_string(m, "semester", d.columns.semester);
    }
    c.unit_key = parse_unit_key(j.value("unit_key", to_string(d.unit_key)));
    c.preprocess = j.contains("preprocess") ? j["preprocess"].get<preprocess::Config>() : d.preprocess;
    if (j.contains("topics")) {
      const auto& t = j["topics"];
      c.topics.k_range = t.contains("k_range") && t["k_range"].is_number_integer()
                             ? std::to_string(t["k_range"].get<int>())
                             : t.value("k_range", d.topics.k_range);
      c.topics.seed = t.value("seed", d.topics.seed);
      c.topics.iterations = t.value("iterations", d.topics.iterations);
      c.topics.alpha = t.value("alpha", d.topics.alpha);
      c.topics.beta = t.value("beta", d.topics.beta);
      c.topics.n_top = t.value("n_top", d.topics.n_top);
    }
    c.scheme = j.value("scheme", d.scheme);
    c.reference = optional_string(j, "reference", d.reference);
    if (j.contains("ena"))
      c.accumulation =
          ena::parse_accumulation(j["ena"].value("accumulation", ena::to_string(d.accumulation)));
    if (j.contains("agreement") && j["agreement"].contains("bands")) {
      const auto& b = j["agreement"]["bands"];
      c.bands.minimal = b.value("minimal", d.bands.minimal);
      c.bands.weak = b.value("weak", d.bands.weak);
      c.bands.moderate = b.value("moderate", d.bands.moderate);
      c.bands.strong = b.value("strong", d.bands.strong);
      c.bands.almost_perfect = b.value("almost_perfect", d.bands.almost_perfect);
    }
    if (j.contains("stats"))
      c.alternative = stats::parse_alternative(
          j["stats"].value("alternative", stats::to_string(d.alternative)));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  topics::parse_k_range(c.topics.k_range);
  if (c.topics.iterations < 1)
    throw ConfigError("topics.iterations must be at least 1");
  if (c.topics.n_top < 1)
    throw ConfigError("topics.n_top must be at least 1");
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto c = j.get<RunConfig>();
  c.base_dir = fs::path(path).parent_path();
  return c;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i)
    hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// ---------------------------------------------------------------------------
// workspace

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

const char* kStopwordCopy = "stopwords.txt";

} // namespace

Workspace::Workspace(fs::path dir) : dir_(std::move(dir)) {}

bool Workspace::has(const std::string& name) const {
  return staged_.count(name) || fs::exists(dir_ / name);
}

std::string Workspace::read(const std::string& name) const {
  if (auto it = staged_.find(name); it != staged_.end())
    return it->second;
  return io::read_text((dir_ / name).string());
}

std::string Workspace::require(const std::string& name, const std::string& producer) const {
  if (!has(name))
    throw StageError(fmt::format("{} not found in {}; run `enacode {} --run-dir {}` first", name,
                                 dir_.string(), producer, dir_.string()));
  return read(name);
}

json Workspace::require_json(const std::string& name, const std::string& producer) const {
  const auto text = require(name, producer);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(name + ": " + e.what());
  }
}

void Workspace::put(const std::string& name, std::string data) { staged_[name] = std::move(data); }

void Workspace::put_json(const std::string& name, const json& j) { put(name, dump(j)); }

RunConfig Workspace::config() const { return require_json(files::config, "ingest").get<RunConfig>(); }

std::string run_id(const Workspace& ws) {
  json cfg = ws.config();
  for (const char* key : {"corpus", "scheme", "reference"})
    cfg.erase(key);
  cfg["preprocess"].erase("stopword_file");
  json inputs = json::object();
  for (const char* name : {files::corpus, files::input_scheme, files::reference, kStopwordCopy})
    if (ws.has(name))
      inputs[name] = sha256_hex(ws.read(name));
  const auto digest = sha256_hex(cfg.dump() + "\n" + inputs.dump());
  return digest.substr(0, 16);
}

void Workspace::commit(const std::vector<std::string>& stages) {
  fs::create_directories(dir_);
  for (const auto& [name, data] : staged_)
    io::write_text((dir_ / name).string(), data);
  staged_.clear();

  json manifest = json::object();
  if (fs::exists(dir_ / files::manifest)) {
    try {
      manifest = json::parse(io::read_text((dir_ / files::manifest).string()));
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  const auto now = utc_now();
  manifest["v"] = kSchemaVersion;
  manifest["tool_version"] = std::string(kToolVersion);
  if (!manifest.contains("created_at"))
    manifest["created_at"] = now;
  manifest["updated_at"] = now;
  if (has(files::config))
    manifest["run_id"] = run_id(*this);
  for (const auto& s : stages)
    manifest["stages"][s] = now;
  json artifacts = json::object();
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || name == files::manifest || name.ends_with(".tmp"))
      continue;
    artifacts[name] = sha256_hex(io::read_text(entry.path().string()));
  }
  manifest["artifacts"] = artifacts;
  io::write_text((dir_ / files::manifest).string(), dump(manifest));
}

// ---------------------------------------------------------------------------
// loaders

namespace {

fs::path resolve(const RunConfig& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

Corpus load_corpus(const Workspace& ws, const RunConfig& c) {
  ColumnMap m;
  if (c.columns.semester)
    m.semester = "semester";
  return ingest_csv_text(ws.require(files::corpus, "ingest"), m, c.unit_key).corpus;
}

preprocess::Config effective_preprocess(const Workspace& ws, const RunConfig& c) {
  auto p = c.preprocess;
  if (!p.stopword_file.empty())
    p.stopword_file = (ws.dir() / kStopwordCopy).string();
  return p;
}

preprocess::Normalizer make_normalizer(const Workspace& ws, const RunConfig& c, const Corpus& corpus) {
  const auto p = effective_preprocess(ws, c);
  return preprocess::Normalizer(p, p.entity_removal ? preprocess::EntityLexicon::build(corpus)
                                                    : preprocess::EntityLexicon{});
}

std::vector<preprocess::TokenStream> load_streams(const Workspace& ws) {
  return ws.require_json(files::tokens, "preprocess")
      .at("streams")
      .get<std::vector<preprocess::TokenStream>>();
}

autocoder::CodeScheme load_current_scheme(const Workspace& ws) {
  return ws.require_json(files::scheme, "code").get<autocoder::CodeScheme>();
}

CodedTable load_reference(const Workspace& ws) {
  if (!ws.has(files::reference))
    throw StageError("no reference coding in " + ws.dir().string() +
                     "; run `enacode agreement --reference <file> --run-dir " + ws.dir().string() +
                     "`");
  auto t = parse_coded_csv(ws.read(files::reference), Source::human);
  for (auto& r : t.rows)
    r.source = Source::human;
  t.provenance = Provenance::external;
  return t;
}

std::string config_hash(const Workspace& ws) { return sha256_hex(ws.require(files::config, "ingest")); }

} // namespace

// ---------------------------------------------------------------------------
// stages

void ingest(Workspace& ws, const RunConfig& config) {
  if (config.corpus.empty())
    throw ConfigError("no corpus given (--corpus or \"corpus\" in the config)");
  const auto result = ingest_csv(resolve(config, config.corpus).string(), config.columns, config.unit_key);
  ws.put(files::corpus, to_csv(result.corpus));
  json report = result.report;
  report["v"] = kSchemaVersion;
  report["units"] = result.corpus.unit_count();
  ws.put_json(files::ingest_report, report);

  store_config(ws, config,
               {!config.scheme.empty(), config.reference.has_value(),
                !config.preprocess.stopword_file.empty()});
}

void store_config(Workspace& ws, const RunConfig& config, InputCopies copies) {
  if (copies.scheme && !config.scheme.empty()) {
    const auto text = io::read_text(resolve(config, config.scheme).string());
    try {
      (void)json::parse(text).get<autocoder::CodeScheme>();
    } catch (const json::exception& e) {
      throw SchemaError(config.scheme + ": " + e.what());
    }
    ws.put(files::input_scheme, text);
  }
  if (copies.reference && config.reference) {
    const auto text = io::read_text(resolve(config, *config.reference).string());
    (void)parse_coded_csv(text, Source::human);
    ws.put(files::reference, text);
  }
  if (copies.stopwords && !config.preprocess.stopword_file.empty())
    ws.put(kStopwordCopy, io::read_text(resolve(config, config.preprocess.stopword_file).string()));
  ws.put_json(files::config, config);
}

void preprocess_stage(Workspace& ws) {
  const auto cfg = ws.config();
  const auto corpus = load_corpus(ws, cfg);
  const auto p = effective_preprocess(ws, cfg);
  const auto result = preprocess::run(corpus, p);
  const auto stopwords = p.stopword_file.empty()
                             ? std::string(preprocess::kStopwordListVersion)
                             : "file:sha256:" + sha256_hex(ws.read(kStopwordCopy));
  ws.put_json(files::tokens, json{{"v", kSchemaVersion}, {"streams", result.streams}});
  ws.put_json(files::vocab, result.vocabulary);
  json pc = cfg.preprocess;
  pc["stopword_list"] = stopwords;
  pc["v"] = kSchemaVersion;
  ws.put_json(files::preprocess_config, pc);
}

void topics_stage(Workspace& ws) {
  const auto cfg = ws.config();
  const auto streams = load_streams(ws);
  const auto vocab = ws.require_json(files::vocab, "preprocess").get<preprocess::Vocabulary>();
  const auto docs = topics::encode(streams, vocab);
  topics::LdaParams params;
  params.seed = cfg.topics.seed;
  params.iterations = cfg.topics.iterations;
  params.alpha = cfg.topics.alpha;
  params.beta = cfg.topics.beta;
  const auto selection =
      topics::select_k(docs, topics::parse_k_range(cfg.topics.k_range), params, cfg.topics.n_top);
  const auto& model = selection.selected();
  ws.put_json(files::model, model);
  ws.put(files::coherence, topics::coherence_csv(selection.report));
  const auto n_top = std::min<std::size_t>(cfg.topics.n_top, vocab.size());
  ws.put(files::topics, topics::summaries_csv(topics::summarize(model, vocab, n_top)));
}

int scheme_revision(const Workspace& ws) {
  if (!ws.has(files::scheme))
    return 0;
  return json::parse(ws.read(files::scheme)).value("revision", 0);
}

namespace {

void put_scheme(Workspace& ws, const autocoder::CodeScheme& scheme, int revision) {
  json j = scheme;
  j["v"] = kSchemaVersion;
  j["revision"] = revision;
  ws.put_json(files::scheme, j);
}

} // namespace

void code_stage(Workspace& ws) {
  if (!ws.has(files::input_scheme))
    throw StageError("no code scheme in " + ws.dir().string() +
                     "; run `enacode code --scheme <file> --run-dir " + ws.dir().string() + "`");
  const auto input = json::parse(ws.read(files::input_scheme)).get<autocoder::CodeScheme>();
  const auto summaries = topics::parse_summaries_csv(ws.require(files::topics, "topics"));
  const auto scheme = autocoder::derive_scheme(summaries, input.topic_map, input.codes);
  put_scheme(ws, scheme, scheme_revision(ws) + 1);
  recode(ws);
}

void recode(Workspace& ws) {
  const auto cfg = ws.config();
  const auto corpus = load_corpus(ws, cfg);
  const auto streams = load_streams(ws);
  const auto scheme = load_current_scheme(ws);
  const auto normalizer = make_normalizer(ws, cfg, corpus);
  ws.put(files::coded_lda,
         to_csv(autocoder::code_posts(corpus, streams, autocoder::lda_only(scheme), normalizer)));
  ws.put(files::coded, to_csv(autocoder::code_posts(corpus, streams, scheme, normalizer)));
}

namespace {

json kappa_document(const agreement::KappaReport& report, const std::string& coding) {
  json j{{"v", kSchemaVersion}, {"coding", coding}};
  j["per_code"] = report;
  return j;
}

} // namespace

void agreement_stage(Workspace& ws) {
  const auto cfg = ws.config();
  const auto human = load_reference(ws);
  const auto lda = parse_coded_csv(ws.require(files::coded_lda, "code"), Source::algorithm);
  const auto full = parse_coded_csv(ws.require(files::coded, "code"), Source::algorithm);
  const auto k_lda = agreement::compare(lda, human, cfg.bands);
  const auto k_full = agreement::compare(full, human, cfg.bands);
  ws.put(files::kappa_lda_csv, agreement::to_csv(k_lda));
  ws.put_json(files::kappa_lda_json, kappa_document(k_lda, "lda_only"));
  ws.put(files::kappa_csv, agreement::to_csv(k_full));
  ws.put_json(files::kappa_json, kappa_document(k_full, "lda_plus_instructor"));
}

void ena_stage(Workspace& ws) {
  const auto cfg = ws.config();
  const auto algorithm = parse_coded_csv(ws.require(files::coded, "code"), Source::algorithm);
  const auto merged = merge_tables(algorithm, load_reference(ws));
  ws.put(files::merged, to_csv(merged));

  const auto corpus = load_corpus(ws, cfg);
  const ena::PairOrder order(algorithm.codes);
  const auto raw = ena::accumulate(merged, order, ena::unit_resolver(cfg.unit_key, &corpus),
                                   cfg.accumulation);
  const auto space = ena::build_space(raw, order, cfg.accumulation);
  json sj = space;
  sj["v"] = kSchemaVersion;
  sj["unit_key"] = to_string(cfg.unit_key);
  ws.put_json(files::ena_space, sj);

  const auto g_alg = ena::group_network(space, Source::algorithm);
  const auto g_hum = ena::group_network(space, Source::human);
  const auto diff = ena::difference_network(g_alg, g_hum);
  json units = json::array();
  for (std::size_t u = 0; u < space.normalized.size(); ++u) {
    json g = ena::unit_network(space, u);
    g["id"] = space.normalized[u].unit_id;
    g["source"] = to_string(space.normalized[u].source);
    g["included"] = static_cast<bool>(space.included[u]);
    units.push_back(std::move(g));
  }
  ws.put_json(files::networks, json{{"v", kSchemaVersion},
                                    {"accumulation", ena::to_string(cfg.accumulation)},
                                    {"algorithm", g_alg},
                                    {"human", g_hum},
                                    {"difference", diff},
                                    {"units", units}});

  const auto meta = [&](const std::string& what) {
    return fmt::format("enacode {}; config sha256 {}; accumulation {}; network {}", kToolVersion,
                       config_hash(ws), ena::to_string(cfg.accumulation), what);
  };
  double scale = 0;
  for (const auto* g : {&g_alg, &g_hum})
    for (const auto& e : g->edges)
      scale = std::max(scale, std::abs(e.weight));
  svg::Style red, blue, diff_style;
  red.scale = blue.scale = scale;
  blue.color_a = blue.color_b;
  ws.put(files::svg_algorithm, svg::render_network(g_alg, meta("algorithm"), red));
  ws.put(files::svg_human, svg::render_network(g_hum, meta("human"), blue));
  ws.put(files::svg_difference, svg::render_network(diff, meta("algorithm - human"), diff_style));
}

void stats_stage(Workspace& ws) {
  const auto cfg = ws.config();
  const auto space = ws.require_json(files::ena_space, "ena");
  const auto& axes = space.at("axes");
  std::vector<stats::MannWhitneyResult> results;
  for (std::size_t k = 0; k < std::min<std::size_t>(2, axes.size()); ++k) {
    std::vector<double> human, algorithm;
    for (const auto& u : space.at("units")) {
      if (!u.at("included").get<bool>())
        continue;
      const double v = u.at("point").at(k).get<double>();
      (u.at("source").get<std::string>() == "human" ? human : algorithm).push_back(v);
    }
    auto r = stats::mann_whitney(human, algorithm, cfg.alternative);
    r.axis = axes[k].at("label").get<std::string>();
    r.label_a = "human";
    r.label_b = "algorithm";
    results.push_back(r);
  }
  ws.put_json(files::stats_json, json{{"v", kSchemaVersion},
                                      {"test", "mann_whitney"},
                                      {"alternative", stats::to_string(cfg.alternative)},
                                      {"results", results}});
  ws.put(files::stats_csv, stats::to_csv(results));
}

void report_stage(Workspace& ws) { ws.put(files::report, report::render_html(ws)); }

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"ingest", "preprocess", "topics", "code",
                                              "agreement", "ena", "stats", "report"};
  return names;
}

void run_stage(const fs::path& dir, const std::string& stage) {
  Workspace ws(dir);
  if (stage == "preprocess")
    preprocess_stage(ws);
  else if (stage == "topics")
    topics_stage(ws);
  else if (stage == "code")
    code_stage(ws);
  else if (stage == "agreement")
    agreement_stage(ws);
  else if (stage == "ena")
    ena_stage(ws);
  else if (stage == "stats")
    stats_stage(ws);
  else if (stage == "report")
    report_stage(ws);
  else
    throw ConfigError("unknown stage '" + stage + "'");
  ws.commit({stage});
}

void run_all(const fs::path& dir, const RunConfig& config) {
  {
    Workspace ws(dir);
    ingest(ws, config);
    ws.commit({"ingest"});
  }
  for (std::size_t s = 1; s < stage_names().size(); ++s)
    run_stage(dir, stage_names()[s]);
}

SchemeUpdate update_scheme(Workspace& ws, const json& scheme, int expected_revision) {
  const int current = scheme_revision(ws);
  if (current == 0)
    throw StageError("run has no scheme yet; run `enacode code` first");
  if (expected_revision != current)
    throw RevisionConflict(fmt::format("scheme revision is {}, request was based on {}; re-fetch "
                                       "the scheme",
                                       current, expected_revision));
  const auto cfg = ws.config();
  const auto corpus = load_corpus(ws, cfg);
  const auto normalizer = make_normalizer(ws, cfg, corpus);
  auto errors = autocoder::validate(scheme, &normalizer);
  if (!errors.empty())
    throw InvalidScheme(std::move(errors));

  SchemeUpdate update{current + 1, {"code"}};
  put_scheme(ws, scheme.get<autocoder::CodeScheme>(), update.revision);
  recode(ws);
  if (ws.has(files::reference)) {
    agreement_stage(ws);
    ena_stage(ws);
    stats_stage(ws);
    report_stage(ws);
    update.stages.insert(update.stages.end(), {"agreement", "ena", "stats", "report"});
  }
  return update;
}

std::vector<Excerpt> connection_excerpts(const Workspace& ws, const std::string& unit, Source source,
                                         const std::string& code_a, const std::string& code_b) {
  const auto cfg = ws.config();
  const auto merged = parse_coded_csv(ws.require(files::merged, "ena"), Source::human);
  const auto ia = merged.code_index(code_a);
  const auto ib = merged.code_index(code_b);
  const auto corpus = load_corpus(ws, cfg);
  const auto unit_of = ena::unit_resolver(cfg.unit_key, &corpus);

  std::optional<autocoder::Matcher> matcher;
  std::optional<preprocess::Normalizer> normalizer;
  std::map<EntryId, preprocess::TokenStream> streams;
  const auto scheme = load_current_scheme(ws);
  if (source == Source::algorithm) {
    normalizer.emplace(make_normalizer(ws, cfg, corpus));
    matcher.emplace(scheme, *normalizer);
    for (auto& s : load_streams(ws))
      streams.emplace(s.post_ref, std::move(s));
  }

  std::vector<Excerpt> out;
  for (const auto& row : merged.rows) {
    if (row.source != source || unit_of(row) != unit || !(row.flags[ia] || row.flags[ib]))
      continue;
    Excerpt e{row.entry_id, row.text, {}, {}};
    for (std::size_t c = 0; c < merged.codes.size(); ++c)
      if (row.flags[c])
        e.codes.push_back(merged.codes[c]);
    if (matcher) {
      const Post* post = corpus.find(row.entry_id);
      auto it = streams.find(row.entry_id);
      if (post && it != streams.end()) {
        const auto analyzed = normalizer->analyze(*post);
        const auto names = scheme.names();
        for (const auto& code : {code_a, code_b}) {
          const auto pos = std::find(names.begin(), names.end(), code) - names.begin();
          if (pos < static_cast<std::ptrdiff_t>(names.size()))
            if (auto hits = matcher->hits(static_cast<std::size_t>(pos), analyzed, it->second); !hits.empty())
              e.keywords[code] = std::move(hits);
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace enacode::pipeline
