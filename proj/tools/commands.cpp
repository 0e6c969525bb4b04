// Copyright 2026 The deskscene Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "deskscene/digest.hpp"
#include "deskscene/evaluator.hpp"
#include "deskscene/fixture.hpp"
#include "deskscene/pipeline.hpp"
#include "deskscene/renderer.hpp"
#include "deskscene/repository.hpp"
#include "deskscene/similarity.hpp"
#include "deskscene/synthesis.hpp"
#include "deskscene/text.hpp"
#include "deskscene/validation.hpp"

namespace deskscene::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kWorkersEnv = "DESKSCENE_WORKERS";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, std::string_view text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("short write to '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

unsigned default_workers() {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(kWorkersEnv) + " must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> parse_sweep(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    const std::string t(trim(part));
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError("bad sweep value '" + t + "'");
    }
  }
  return out;
}

std::string flatten(std::string s) {
  for (char& c : s) {
    if (c == '\n') c = ';';
  }
  return s;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string repo;
  std::string protocol = "levels";
  std::string levels = "L1,L2,L3,L4,L5";
  std::string sweep;
  int per_point = 0;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
  std::string config;
  std::string background;
  std::string embeddings;
  bool keep_partial = false;
  bool no_images = false;

  std::optional<double> delta, visibility_floor, cascade_probability, tiling_probability,
      ambiguity_threshold;
  std::optional<int> max_attempts, max_scene_retries, max_seed_resamples, cascade_offset,
      occluders_above_count;
  std::vector<int> tiling_grid;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  app.add_option("--repo", a.repo, "Metadata manifest (manifest.json)")->required();
  app.add_option("--protocol", a.protocol, "levels | clutter | occlusion | similarity")
      ->check(CLI::IsMember({"levels", "clutter", "occlusion", "similarity"}));
  app.add_option("--levels", a.levels, "Comma-separated level names (SingleWindow allowed)");
  app.add_option("--sweep", a.sweep, "Comma-separated sweep values for a factor protocol");
  app.add_option("--per-point", a.per_point, "Scenes per level or sweep point")
      ->required()
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "Master seed");
  app.add_option("--out", a.out, "Run directory to create")->required();
  app.add_option("--workers", a.workers, "Parallel scene workers")->check(CLI::PositiveNumber);
  app.add_option("--config", a.config, "Synthesis config file (JSON)");
  app.add_option("--background", a.background, "2560x1440 wallpaper PNG");
  app.add_option("--embeddings", a.embeddings, "Element embeddings file");
  app.add_flag("--keep-partial", a.keep_partial, "Keep a failed run under <out>.partial");
  app.add_flag("--no-images", a.no_images, "Skip writing scene images");

  app.add_option("--delta", a.delta);
  app.add_option("--visibility-floor", a.visibility_floor);
  app.add_option("--max-attempts", a.max_attempts);
  app.add_option("--max-scene-retries", a.max_scene_retries);
  app.add_option("--max-seed-resamples", a.max_seed_resamples);
  app.add_option("--cascade-probability", a.cascade_probability);
  app.add_option("--tiling-probability", a.tiling_probability);
  app.add_option("--cascade-offset", a.cascade_offset);
  app.add_option("--tiling-grid", a.tiling_grid, "Columns and rows")->expected(2);
  app.add_option("--occluders-above-count", a.occluders_above_count);
  app.add_option("--ambiguity-threshold", a.ambiguity_threshold);
}

SynthesisConfig effective_config(const GenerateArgs& a) {
  SynthesisConfig cfg = a.config.empty() ? SynthesisConfig{} : load_config(a.config);
  if (a.delta) cfg.delta = *a.delta;
  if (a.visibility_floor) cfg.visibility_floor = *a.visibility_floor;
  if (a.max_attempts) cfg.max_attempts = *a.max_attempts;
  if (a.max_scene_retries) cfg.max_scene_retries = *a.max_scene_retries;
  if (a.max_seed_resamples) cfg.max_seed_resamples = *a.max_seed_resamples;
  if (a.cascade_probability) cfg.cascade_probability = *a.cascade_probability;
  if (a.tiling_probability) cfg.tiling_probability = *a.tiling_probability;
  if (a.cascade_offset) cfg.cascade_offset = *a.cascade_offset;
  if (a.tiling_grid.size() == 2) {
    cfg.tiling_columns = a.tiling_grid[0];
    cfg.tiling_rows = a.tiling_grid[1];
  }
  if (a.occluders_above_count) cfg.occluders_above_count = *a.occluders_above_count;
  if (a.ambiguity_threshold) cfg.ambiguity_threshold = *a.ambiguity_threshold;
  cfg.validate();
  return cfg;
}

fs::path normalized_out(const std::string& out) {
  fs::path p = fs::absolute(out).lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p;
}

int cmd_generate(const GenerateArgs& a, const std::string& command_line) {
  const std::string started = utc_now();
  const SynthesisConfig cfg = effective_config(a);
  const Repository repo = load_repository(a.repo);
  for (const auto& f : validate_repository(repo)) std::cerr << "warning: " << f.describe() << "\n";

  std::optional<EmbeddingTable> table;
  if (!a.embeddings.empty()) {
    table = EmbeddingTable::load(a.embeddings);
    for (const auto& f : check_embedding_coverage(*table, repo)) {
      std::cerr << "warning: " << f.describe() << "\n";
    }
  }
  const SimilarityIndex index(repo, table ? &*table : nullptr);

  std::vector<SceneRequest> requests;
  if (a.protocol == "levels") {
    std::vector<std::string> levels;
    for (const auto& l : split(a.levels, ',')) {
      if (!trim(l).empty()) levels.emplace_back(trim(l));
    }
    requests = protocol_two_requests(cfg, levels, a.per_point);
  } else {
    const std::vector<double> sweep = a.sweep.empty() ? default_sweep(a.protocol) : parse_sweep(a.sweep);
    requests = protocol_one_requests(cfg, a.protocol, sweep, a.per_point);
  }

  const fs::path out = normalized_out(a.out);
  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out))) {
    throw UsageError("output '" + out.string() + "' already exists and is not empty");
  }
  const fs::path staging = out.parent_path() / ("." + out.filename().string() + ".staging");
  fs::remove_all(staging);
  fs::create_directories(staging);

  try {
    Image background;
    std::string background_id;
    if (!a.background.empty()) {
      background = load_background(a.background);
      background_id = "file:" + sha256_file(a.background);
    }
    GenerationOptions opts;
    opts.seed = a.seed;
    opts.workers = a.workers > 0 ? a.workers : default_workers();
    if (!a.no_images) opts.out_dir = staging;
    opts.background = a.background.empty() ? nullptr : &background;
    opts.background_id = background_id;
    const std::size_t step = std::max<std::size_t>(1, requests.size() / 20);
    opts.progress = [step](std::size_t done, std::size_t total) {
      if (done % step == 0 || done == total) {
        std::cerr << "generated " << done << "/" << total << "\n";
      }
    };

    const GenerationResult result = generate_scenes(index, cfg, requests, opts);

    const std::string annotations = annotations_jsonl(result.records);
    write_text(staging / "annotations.jsonl", annotations);
    write_text(staging / "effective_config.json", to_json(cfg).dump(2) + "\n");

    Sha256 images_digest;
    if (!a.no_images) {
      for (const auto& r : result.records) {
        images_digest.update(r.image_path + " " + sha256_file(staging / r.image_path) + "\n");
      }
    }

    std::map<std::string, std::size_t> ambiguous;
    for (const auto& r : result.records) {
      if (r.spec.ambiguity_risk) ++ambiguous[r.spec.constraints.tag];
    }
    json manifest{
        {"format", "deskscene-run"},
        {"command", command_line},
        {"engine_version", std::string(kEngineVersion)},
        {"config_digest", config_digest(cfg)},
        {"repo_digest", repo.digest()},
        {"embeddings", a.embeddings.empty() ? json(nullptr)
                                            : json{{"path", a.embeddings},
                                                   {"model_tag", table->model_tag()},
                                                   {"sha256", sha256_file(a.embeddings)}}},
        {"background_id", result.records.empty() ? std::string{} : result.records[0].spec.background_id},
        {"master_seed", a.seed},
        {"protocol", a.protocol},
        {"workers", opts.workers},
        {"started_at", started},
        {"finished_at", utc_now()},
        {"scenes", result.records.size()},
        {"stats",
         {{"synth_calls", result.stats.synth_calls},
          {"infeasible", result.stats.infeasible},
          {"rejected", result.stats.rejected},
          {"ambiguity_flagged", ambiguous}}},
        {"annotations_sha256", sha256_hex(annotations)},
        {"images_sha256", a.no_images ? json(nullptr) : json(images_digest.finish())},
        {"outputs",
         {{"annotations", (out / "annotations.jsonl").string()},
          {"effective_config", (out / "effective_config.json").string()},
          {"images", a.no_images ? json(nullptr) : json((out / "images").string())}}},
    };
    write_text(staging / "run_manifest.json", manifest.dump(2) + "\n");

    if (fs::exists(out)) fs::remove(out);
    fs::rename(staging, out);
  } catch (...) {
    if (a.keep_partial) {
      const fs::path quarantine = out.string() + ".partial";
      fs::remove_all(quarantine);
      fs::rename(staging, quarantine);
      std::cerr << "partial output kept in " << quarantine.string() << "\n";
    } else {
      fs::remove_all(staging);
    }
    throw;
  }
  std::cout << (out / "annotations.jsonl").string() << "\n" << (out / "run_manifest.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string annotations;
  std::string predictions;
  std::string mode = "strict";
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto records = read_annotations(a.annotations);
  const auto predictions = load_predictions(a.predictions);
  const ScoreReport report = score(records, predictions, parse_score_mode(a.mode));
  std::cerr << report.table();
  if (a.out.empty()) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    write_text(a.out, report.to_json().dump(2) + "\n");
    std::cout << a.out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string repo;
  bool as_json = false;
};

int cmd_stats(const StatsArgs& a) {
  const Repository repo = load_repository(a.repo);
  const auto findings = validate_repository(repo);
  for (const auto& f : findings) std::cerr << "warning: " << f.describe() << "\n";
  const auto stats = repo.stats();
  if (a.as_json) {
    json j = json::object();
    for (DomainCategory c : kAllCategories) {
      auto it = stats.find(c);
      const CategoryStats s = it == stats.end() ? CategoryStats{} : it->second;
      j[std::string(to_string(c))] = {{"assets", s.assets}, {"elements", s.elements}};
    }
    std::cout << json{{"categories", j},
                      {"assets", repo.size()},
                      {"elements", repo.element_count()},
                      {"digest", repo.digest()}}
                     .dump(2)
              << "\n";
    return 0;
  }
  std::printf("%-16s %8s %9s\n", "category", "assets", "elements");
  for (DomainCategory c : kAllCategories) {
    auto it = stats.find(c);
    const CategoryStats s = it == stats.end() ? CategoryStats{} : it->second;
    std::printf("%-16s %8zu %9zu\n", std::string(to_string(c)).c_str(), s.assets, s.elements);
  }
  std::printf("%-16s %8zu %9zu\n", "total", repo.size(), repo.element_count());
  return 0;
}

// ---------------------------------------------------------------- validate-sample

struct ValidateArgs {
  std::string annotations;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int annotators = 1;
  std::string out;
  std::string aggregate;
  std::string report;
};

int cmd_validate_sample(const ValidateArgs& a, CLI::App& app) {
  if (!a.aggregate.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.aggregate)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("no worksheets (*.csv) in '" + a.aggregate + "'");
    if (app.count("--annotators") && files.size() != static_cast<std::size_t>(a.annotators)) {
      throw UsageError("expected " + std::to_string(a.annotators) + " worksheets, found " +
                       std::to_string(files.size()));
    }
    std::vector<Worksheet> sheets;
    for (const auto& f : files) sheets.push_back(load_worksheet(f));
    const ValidationReport rep = aggregate_validation(sheets);
    if (app.count("--n") && rep.scenes != a.n) {
      throw UsageError("worksheets cover " + std::to_string(rep.scenes) + " scenes, expected " +
                       std::to_string(a.n));
    }
    std::cout << rep.table();
    if (!a.report.empty()) write_text(a.report, rep.to_json().dump(2) + "\n");
    return 0;
  }
  if (a.annotations.empty() || a.out.empty() || !app.count("--n")) {
    throw UsageError("sampling needs --annotations, --n and --out (or use --aggregate DIR)");
  }
  if (a.annotators < 1) throw UsageError("--annotators must be at least 1");
  const auto records = read_annotations(a.annotations);
  const Worksheet w = sample_for_validation(records, a.n, a.seed);
  const std::string csv = worksheet_csv(w);
  const fs::path out = a.out;
  fs::create_directories(out);
  for (int k = 1; k <= a.annotators; ++k) {
    const fs::path p = out / ("annotator_" + std::to_string(k) + ".csv");
    write_text(p, csv);
    std::cout << p.string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- make-fixture

struct FixtureArgs {
  std::string out;
  int per_category = 2;
  std::uint64_t seed = 1;
  int embedding_dim = 0;
};

int cmd_make_fixture(const FixtureArgs& a) {
  FixtureOptions opts;
  opts.windows_per_category = a.per_category;
  opts.seed = a.seed;
  const fs::path manifest = write_fixture_repository(a.out, opts);
  std::cout << manifest.string() << "\n";
  if (a.embedding_dim > 0) {
    const Repository repo = load_repository(manifest);
    const fs::path emb = fs::path(a.out) / "embeddings.jsonl";
    hashed_embeddings(repo, a.embedding_dim).save(emb);
    std::cout << emb.string() << "\n";
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Multi-window desktop grounding scene synthesis and scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Synthesize, render and verify scenes");
  add_generate(*generate, gen);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against annotations");
  evaluate->add_option("--annotations", ev.annotations)->required();
  evaluate->add_option("--predictions", ev.predictions)->required();
  evaluate->add_option("--mode", ev.mode)->check(CLI::IsMember({"strict", "lenient"}));
  evaluate->add_option("--out", ev.out, "Write the report here instead of stdout");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Per-category asset and element counts");
  stats->add_option("--repo", st.repo)->required();
  stats->add_flag("--json", st.as_json);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate-sample", "Draw or aggregate validation worksheets");
  validate->add_option("--annotations", va.annotations);
  validate->add_option("--n", va.n);
  validate->add_option("--seed", va.seed);
  validate->add_option("--annotators", va.annotators);
  validate->add_option("--out", va.out, "Directory for blank worksheets");
  validate->add_option("--aggregate", va.aggregate, "Directory of filled worksheets");
  validate->add_option("--report", va.report, "JSON report path (aggregate mode)");

  FixtureArgs fx;
  auto* fixture = app.add_subcommand("make-fixture", "Write a small synthetic window repository");
  fixture->add_option("--out", fx.out)->required();
  fixture->add_option("--per-category", fx.per_category)->check(CLI::PositiveNumber);
  fixture->add_option("--seed", fx.seed);
  fixture->add_option("--embedding-dim", fx.embedding_dim, "Also write hashed embeddings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help and --version exit 0
  }

  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  try {
    if (*generate) return cmd_generate(gen, command_line);
    if (*evaluate) return cmd_evaluate(ev);
    if (*stats) return cmd_stats(st);
    if (*validate) return cmd_validate_sample(va, *validate);
    if (*fixture) return cmd_make_fixture(fx);
  } catch (const UsageError& e) {
    std::cerr << "deskscene: " << flatten(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "deskscene: " << flatten(e.what()) << "\n";
    return 1;
  }
  return 2;
}

}  // namespace deskscene::cli
