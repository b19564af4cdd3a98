// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include "enacode/autocoder.hpp"
#include "enacode/ena.hpp"
#include "enacode/pipeline.hpp"
#include "enacode/preprocess.hpp"
#include "enacode/rng.hpp"
#include "enacode/topics.hpp"

#include "planted.hpp"
#include "support.hpp"

#include <benchmark/benchmark.h>

using namespace enacode;

namespace {

// The sample corpus repeated until it has about `n` posts.
Corpus scaled_sample(std::size_t n) {
  const auto cfg = pipeline::load_run_config(testsupport::sample("run.json").string());
  const auto base = ingest_csv((cfg.base_dir / cfg.corpus).string(), cfg.columns).corpus;
  Corpus out;
  EntryId id = 1;
  while (out.posts.size() < n)
    for (const auto& p : base.posts) {
      auto copy = p;
      copy.entry_id = id++;
      out.posts.push_back(copy);
    }
  return out;
}

struct Coding {
  Corpus corpus;
  preprocess::Config config;
  preprocess::Result prep;
  autocoder::CodeScheme scheme;
  preprocess::Normalizer norm;

  Coding()
      : corpus(scaled_sample(2648)),
        config(pipeline::load_run_config(testsupport::sample("run.json").string()).preprocess),
        prep(preprocess::run(corpus, config)),
        scheme(autocoder::load_scheme(testsupport::sample("scheme.json").string())),
        norm(config, preprocess::EntityLexicon::build(corpus)) {}
};

const Coding& coding() {
  static const Coding c;
  return c;
}

template <bool Parallel> void BM_normalize_corpus(benchmark::State& state) {
  const auto& c = coding();
  for (auto _ : state) {
    auto out = Parallel ? preprocess::normalize_corpus(c.corpus, c.norm)
                        : preprocess::serial::normalize_corpus(c.corpus, c.norm);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.corpus.posts.size()));
}

template <bool Parallel> void BM_code_posts(benchmark::State& state) {
  const auto& c = coding();
  for (auto _ : state) {
    auto out = Parallel ? autocoder::code_posts(c.corpus, c.prep.streams, c.scheme, c.norm)
                        : autocoder::serial::code_posts(c.corpus, c.prep.streams, c.scheme, c.norm);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.corpus.posts.size()));
}

template <bool Parallel> void BM_select_k(benchmark::State& state) {
  static const auto planted = testsupport::planted_corpus(5, 100, 50, 2024);
  topics::LdaParams p;
  p.iterations = 100;
  const std::vector<int> ks = {2, 3, 4, 5, 6, 7, 8};
  for (auto _ : state) {
    auto out = Parallel ? topics::select_k(planted.docs, ks, p, 10)
                        : topics::serial::select_k(planted.docs, ks, p, 10);
    benchmark::DoNotOptimize(out);
  }
}

CodedTable random_table(std::size_t rows, int users) {
  CodedTable t;
  t.codes = {"effort", "beyondLS", "illusions", "retrieval-interleave"};
  Rng rng(3);
  for (std::size_t i = 0; i < rows; ++i) {
    CodedRow r{static_cast<EntryId>(i + 1), "s" + std::to_string(rng.below(users)), "", "", {},
               i % 2 ? Source::algorithm : Source::human};
    for (int c = 0; c < 4; ++c)
      r.flags.push_back(static_cast<std::uint8_t>(rng.uniform() < 0.4));
    t.rows.push_back(std::move(r));
  }
  return t;
}

template <bool Parallel> void BM_accumulate(benchmark::State& state) {
  static const auto table = random_table(2 * 2648, 25);
  const ena::PairOrder order(table.codes);
  const auto resolve = ena::unit_resolver(UnitKey::user);
  for (auto _ : state) {
    auto out = Parallel ? ena::accumulate(table, order, resolve, ena::Accumulation::count)
                        : ena::serial::accumulate(table, order, resolve, ena::Accumulation::count);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(table.rows.size()));
}

} // namespace

BENCHMARK(BM_normalize_corpus<false>)->Name("normalize_corpus/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_normalize_corpus<true>)->Name("normalize_corpus/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_code_posts<false>)->Name("code_posts/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_code_posts<true>)->Name("code_posts/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_select_k<false>)->Name("select_k/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_select_k<true>)->Name("select_k/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_accumulate<false>)->Name("accumulate/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_accumulate<true>)->Name("accumulate/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
