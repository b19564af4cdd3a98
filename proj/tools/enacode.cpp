// enacode: command-line driver for the coding / ENA pipeline.

#include "enacode/error.hpp"
#include "enacode/io.hpp"
#include "enacode/pipeline.hpp"
#include "enacode/server.hpp"
#include "enacode/topics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace enacode;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, internal = 3 };

// Flags shared by `ingest` and `run`; unset flags keep the config file's values.
struct InputFlags {
  std::string config;
  std::optional<std::string> corpus, scheme, reference;
  std::optional<std::string> col_entry_id, col_user, col_timestamp, col_text, col_semester;
  bool no_entry_id = false;
  std::optional<std::string> unit_key;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config, "Run config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--corpus", corpus, "Discussion export (CSV)")->check(CLI::ExistingFile);
    cmd->add_option("--scheme", scheme, "Code scheme JSON")->check(CLI::ExistingFile);
    cmd->add_option("--reference", reference, "Reference (human) coding CSV")->check(CLI::ExistingFile);
    cmd->add_option("--col-entry-id", col_entry_id, "Header of the entry id column");
    cmd->add_flag("--no-entry-id", no_entry_id, "Assign entry ids 1..n instead of reading a column");
    cmd->add_option("--col-user", col_user, "Header of the user id column");
    cmd->add_option("--col-timestamp", col_timestamp, "Header of the timestamp column");
    cmd->add_option("--col-text", col_text, "Header of the post text column");
    cmd->add_option("--col-semester", col_semester, "Header of the semester column");
    cmd->add_option("--unit-key", unit_key, "Unit of analysis: user or user+semester");
  }

  pipeline::RunConfig resolve() const {
    pipeline::RunConfig c = config.empty() ? pipeline::RunConfig{} : pipeline::load_run_config(config);
    // with a config file, flag paths are made absolute so they do not
    // resolve against the file's directory
    auto path = [&](const std::string& p) {
      return config.empty() ? p : fs::absolute(p).lexically_normal().string();
    };
    if (corpus)
      c.corpus = path(*corpus);
    if (scheme)
      c.scheme = path(*scheme);
    if (reference)
      c.reference = path(*reference);
    if (col_entry_id)
      c.columns.entry_id = *col_entry_id;
    if (no_entry_id)
      c.columns.entry_id.reset();
    if (col_user)
      c.columns.user_id = *col_user;
    if (col_timestamp)
      c.columns.timestamp = *col_timestamp;
    if (col_text)
      c.columns.text = *col_text;
    if (col_semester)
      c.columns.semester = *col_semester;
    if (unit_key)
      c.unit_key = parse_unit_key(*unit_key);
    return c;
  }
};

struct TopicFlags {
  std::optional<std::string> k_range;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<double> alpha, beta;
  std::optional<std::size_t> n_top;

  void add(CLI::App* cmd) {
    cmd->add_option("--k-range", k_range, "Topic counts to try: K or LO..HI");
    cmd->add_option("--seed", seed, "Base RNG seed");
    cmd->add_option("--iterations", iterations, "Gibbs sweeps per model")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", alpha, "Document-topic prior (default 50/K)");
    cmd->add_option("--beta", beta, "Topic-word prior");
    cmd->add_option("--n-top", n_top, "Top words per topic")->check(CLI::PositiveNumber);
  }

  bool apply(pipeline::TopicsConfig& t) const {
    if (k_range) {
      topics::parse_k_range(*k_range);
      t.k_range = *k_range;
    }
    if (seed)
      t.seed = *seed;
    if (iterations)
      t.iterations = *iterations;
    if (alpha)
      t.alpha = *alpha;
    if (beta)
      t.beta = *beta;
    if (n_top)
      t.n_top = *n_top;
    return k_range || seed || iterations || alpha || beta || n_top;
  }
};

struct AnalysisFlags {
  std::optional<std::string> accumulation, alternative, unit_key;
  std::string preprocess_config;

  void add_ena(CLI::App* cmd, bool with_unit_key = true) {
    cmd->add_option("--accumulation", accumulation, "binary (default) or count");
    if (with_unit_key)
      cmd->add_option("--unit-key", unit_key, "Unit of analysis: user or user+semester");
  }
  void add_stats(CLI::App* cmd) {
    cmd->add_option("--alternative", alternative, "two_sided (default), greater or less");
  }
  void add_preprocess(CLI::App* cmd) {
    cmd->add_option("--preprocess-config", preprocess_config, "Preprocess config JSON")
        ->check(CLI::ExistingFile);
  }

  bool apply(pipeline::RunConfig& c) const {
    bool changed = false;
    if (accumulation) {
      c.accumulation = ena::parse_accumulation(*accumulation);
      changed = true;
    }
    if (alternative) {
      c.alternative = stats::parse_alternative(*alternative);
      changed = true;
    }
    if (unit_key) {
      c.unit_key = parse_unit_key(*unit_key);
      changed = true;
    }
    if (!preprocess_config.empty()) {
      c.preprocess = preprocess::load_config(preprocess_config);
      if (!c.preprocess.stopword_file.empty() && fs::path(c.preprocess.stopword_file).is_relative())
        c.preprocess.stopword_file =
            (fs::path(preprocess_config).parent_path() / c.preprocess.stopword_file).string();
      changed = true;
    }
    return changed;
  }
};

// Applies flag overrides to the stored config of an existing run.
void update_config(const fs::path& dir, const std::function<pipeline::InputCopies(pipeline::RunConfig&)>& edit) {
  pipeline::Workspace ws(dir);
  auto cfg = ws.config();
  const auto copies = edit(cfg);
  pipeline::store_config(ws, cfg, copies);
  ws.commit({});
}

service::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server)
    g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated qualitative coding with LDA keywords, kappa validation and epistemic "
               "network analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pipeline::kToolVersion));

  std::string run_dir;
  auto add_run_dir = [&](CLI::App* cmd) {
    cmd->add_option("--run-dir", run_dir, "Run directory holding the artifacts")->required();
  };

  InputFlags inputs;
  TopicFlags topic_flags;
  AnalysisFlags analysis;
  std::optional<std::string> scheme_flag, reference_flag;

  auto* ingest = app.add_subcommand("ingest", "Read a discussion export into the run directory");
  add_run_dir(ingest);
  inputs.add(ingest);
  analysis.add_preprocess(ingest);

  auto* prep = app.add_subcommand("preprocess", "Normalize posts, detect n-grams, build the vocabulary");
  add_run_dir(prep);
  analysis.add_preprocess(prep);

  auto* topics_cmd = app.add_subcommand("topics", "Fit LDA over a K range and pick K by coherence");
  add_run_dir(topics_cmd);
  topic_flags.add(topics_cmd);

  auto* code = app.add_subcommand("code", "Derive the code scheme and code every post");
  add_run_dir(code);
  code->add_option("--scheme", scheme_flag, "Code scheme JSON")->check(CLI::ExistingFile);

  auto* agree = app.add_subcommand("agreement", "Cohen's kappa against a reference coding");
  add_run_dir(agree);
  agree->add_option("--reference", reference_flag, "Reference (human) coding CSV")
      ->check(CLI::ExistingFile);

  auto* ena_cmd = app.add_subcommand("ena", "Accumulate networks and build the ENA space");
  add_run_dir(ena_cmd);
  analysis.add_ena(ena_cmd);

  auto* stats_cmd = app.add_subcommand("stats", "Mann-Whitney tests on the plotted axes");
  add_run_dir(stats_cmd);
  analysis.add_stats(stats_cmd);

  auto* report = app.add_subcommand("report", "Write report.html");
  add_run_dir(report);

  auto* run = app.add_subcommand("run", "Every stage from ingest to report");
  add_run_dir(run);
  inputs.add(run);
  topic_flags.add(run);
  analysis.add_ena(run, false);
  analysis.add_stats(run);
  analysis.add_preprocess(run);

  std::string root = ".";
  std::string host = "127.0.0.1";
  int port = -1;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Serve the JSON API over a directory of runs");
  serve->add_option("--root", root, "Directory holding run directories (or one run)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (default: ENACODE_PORT or 8080)");
  serve->add_option("--static", static_dir, "Directory served at / (workbench bundle)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::usage;
  }

  try {
    const fs::path dir(run_dir);
    if (*ingest) {
      auto cfg = inputs.resolve();
      analysis.apply(cfg);
      pipeline::Workspace ws(dir);
      pipeline::ingest(ws, cfg);
      ws.commit({"ingest"});
    } else if (*prep) {
      if (!analysis.preprocess_config.empty())
        update_config(dir, [&](pipeline::RunConfig& c) {
          analysis.apply(c);
          return pipeline::InputCopies{false, false, !c.preprocess.stopword_file.empty()};
        });
      pipeline::run_stage(dir, "preprocess");
    } else if (*topics_cmd) {
      update_config(dir, [&](pipeline::RunConfig& c) {
        topic_flags.apply(c.topics);
        return pipeline::InputCopies{};
      });
      pipeline::run_stage(dir, "topics");
    } else if (*code) {
      if (scheme_flag)
        update_config(dir, [&](pipeline::RunConfig& c) {
          c.scheme = *scheme_flag;
          return pipeline::InputCopies{true, false, false};
        });
      pipeline::run_stage(dir, "code");
    } else if (*agree) {
      if (reference_flag)
        update_config(dir, [&](pipeline::RunConfig& c) {
          c.reference = *reference_flag;
          return pipeline::InputCopies{false, true, false};
        });
      pipeline::run_stage(dir, "agreement");
    } else if (*ena_cmd || *stats_cmd) {
      update_config(dir, [&](pipeline::RunConfig& c) {
        analysis.apply(c);
        return pipeline::InputCopies{};
      });
      pipeline::run_stage(dir, *ena_cmd ? "ena" : "stats");
    } else if (*report) {
      pipeline::run_stage(dir, "report");
      std::cout << (dir / pipeline::files::report).string() << "\n";
    } else if (*run) {
      auto cfg = inputs.resolve();
      topic_flags.apply(cfg.topics);
      analysis.apply(cfg);
      pipeline::run_all(dir, cfg);
      std::cout << (dir / pipeline::files::report).string() << "\n";
    } else if (*serve) {
      service::Server server(root, static_dir.empty() ? std::nullopt
                                                      : std::optional<fs::path>(static_dir));
      const int bound = server.bind(host, port < 0 ? service::port_from_env() : port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      fmt::print(stderr, "enacode: serving {} on http://{}:{}\n", root, host, bound);
      server.listen();
    }
  } catch (const StageError& e) {
    fmt::print(stderr, "enacode: {}\n", e.what());
    return Exit::data;
  } catch (const Error& e) {
    fmt::print(stderr, "enacode: {}\n", e.what());
    return Exit::data;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "enacode: {}\n", e.what());
    return Exit::data;
  } catch (const std::exception& e) {
    fmt::print(stderr, "enacode: internal error: {}\n", e.what());
    return Exit::internal;
  }
  return Exit::ok;
}
