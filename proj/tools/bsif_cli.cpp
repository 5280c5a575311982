#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsif/encoder.hpp"
#include "bsif/error.hpp"
#include "bsif/evalkit.hpp"
#include "bsif/filtertrain.hpp"
#include "bsif/imgio.hpp"
#include "bsif/manifest.hpp"
#include "bsif/matcher.hpp"
#include "bsif/patches.hpp"
#include "bsif/rng.hpp"
#include "bsif/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace bsif;

namespace {

constexpr const char* kToolVersion = "bsif 1.0";
constexpr const char* kOutDirEnv = "BSIF_OUT_DIR";

struct Common {
  int max_shift = 16;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool strict_dims = false;
  std::string out;
};

void log(const std::string& msg) { std::cerr << "bsif: " << msg << '\n'; }

std::string hex(const Fingerprint& fp) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto b : fp) {
    s += digits[b >> 4];
    s += digits[b & 15];
  }
  return s;
}

fs::path output_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  throw PreconditionError(std::string("no output directory: pass --out or set ") + kOutDirEnv);
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

json base_config(const std::string& command, const Common& c) {
  json cfg;
  cfg["tool"] = kToolVersion;
  cfg["command"] = command;
  cfg["seed"] = c.seed;
  return cfg;
}

std::vector<Strategy> strategies_from(const std::string& name) {
  if (name == "all") return {kAllStrategies.begin(), kAllStrategies.end()};
  return {parse_strategy(name)};
}

std::vector<int> parse_sizes(const std::string& spec) {
  if (spec == "standard") return {kStandardSides.begin(), kStandardSides.end()};
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw PreconditionError("bad size '" + tok + "' in --sizes");
    }
  }
  if (out.empty()) throw PreconditionError("--sizes is empty");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void warn_shared_subjects(const DatasetManifest& m, const std::vector<std::string>& others, json& warnings) {
  for (const auto& other : others) {
    const auto shared = shared_subjects(m, load_manifest(other));
    if (shared.empty()) continue;
    const std::string msg = std::to_string(shared.size()) + " subject(s) also appear in " + other +
                            "; stages should use subject-disjoint data (first: " + shared.front() + ")";
    log("warning: " + msg);
    warnings.push_back(msg);
  }
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthConfig cfg;
};

int run_synth(const SynthArgs& a, const Common& c) {
  auto data = make_synthetic_dataset(a.cfg);
  const auto dir = output_dir(c);
  write_synthetic_dataset(data, dir);
  json report;
  report["config"] = base_config("synth", c);
  report["config"]["classes"] = a.cfg.classes;
  report["config"]["samples_per_class"] = a.cfg.samples_per_class;
  report["config"]["noise_sigma"] = a.cfg.noise_sigma;
  report["config"]["max_shift"] = a.cfg.max_shift;
  report["config"]["max_occlusion"] = a.cfg.max_occlusion;
  report["config"]["seed"] = a.cfg.seed;
  json images = json::array();
  for (std::size_t i = 0; i < data.images.size(); ++i)
    images.push_back({{"id", data.images[i].id}, {"class", data.labels[i]}, {"shift", data.shifts[i]}});
  report["images"] = std::move(images);
  write_json(dir / "synth_report.json", report);
  std::cout << json{{"manifest", (dir / "manifest.csv").generic_string()}, {"images", data.images.size()}}.dump()
            << '\n';
  return 0;
}

// ------------------------------------------------------- extract-patches

struct ExtractArgs {
  std::string manifest;
  std::string regions_dir;
  int random_regions = 0;
  int region_min = 20;
  int region_max = 64;
  std::string sizes = "standard";
  int count = 10;
  std::string source;
  std::vector<std::string> disjoint_from;
};

std::optional<double> optional_number(const std::string& cell, const std::string& what) {
  if (cell.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError("bad number '" + cell + "' in regions.csv column " + what);
}

BinaryGrid read_region(const fs::path& path, const std::optional<CircleParams>& circles) {
  RegionMask r{io::read_mask(path), path.filename().string()};
  if (circles) return normalize_region(r, *circles).grid;
  return r.grid;
}

// regions.csv: image,region,keep,pupil_x,pupil_y,pupil_r,iris_x,iris_y,iris_r
// `image` is the image file stem; circle columns empty means the region is
// already in normalized coordinates.
std::vector<RegionEntry> regions_from_csv(const fs::path& csv, const std::map<std::string, std::size_t>& by_stem,
                                          PatchSource source) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "image,region,keep,pupil_x,pupil_y,pupil_r,iris_x,iris_y,iris_r")
    throw DataError("regions.csv header must be image,region,keep,pupil_x,pupil_y,pupil_r,iris_x,iris_y,iris_r");
  std::vector<RegionEntry> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw DataError("regions.csv line " + std::to_string(lineno) + ": expected 9 columns");
    const auto it = by_stem.find(cells[0]);
    if (it == by_stem.end()) throw DataError("regions.csv line " + std::to_string(lineno) + ": unknown image " + cells[0]);
    std::optional<CircleParams> circles;
    std::vector<std::optional<double>> v;
    const char* names[] = {"pupil_x", "pupil_y", "pupil_r", "iris_x", "iris_y", "iris_r"};
    for (int k = 0; k < 6; ++k) v.push_back(optional_number(cells[3 + k], names[k]));
    const auto given = std::count_if(v.begin(), v.end(), [](const auto& o) { return o.has_value(); });
    if (given == 6) circles = CircleParams{*v[0], *v[1], *v[2], *v[3], *v[4], *v[5]};
    else if (given != 0)
      throw DataError("regions.csv line " + std::to_string(lineno) + ": give all six circle values or none");
    if (cells[2] != "0" && cells[2] != "1")
      throw DataError("regions.csv line " + std::to_string(lineno) + ": keep must be 0 or 1");
    out.push_back({it->second, read_region(csv.parent_path() / cells[1], circles), source, cells[2] == "1"});
  }
  return out;
}

// Without regions.csv, every <stem>.pgm / <stem>.<tag>.pgm (or .pbm) is a
// normalized region of the image with that stem.
std::vector<RegionEntry> regions_from_files(const fs::path& dir, const std::map<std::string, std::size_t>& by_stem,
                                            PatchSource source) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".pbm")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::size_t, fs::path>> matched;
  for (const auto& f : files) {
    const auto name = f.filename().string();
    const auto stem = name.substr(0, name.find('.'));
    const auto it = by_stem.find(stem);
    if (it == by_stem.end()) {
      log("warning: region file " + name + " matches no manifest image");
      continue;
    }
    matched.emplace_back(it->second, f);
  }
  std::stable_sort(matched.begin(), matched.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<RegionEntry> out;
  for (const auto& [idx, f] : matched) out.push_back({idx, read_region(f, std::nullopt), source, true});
  return out;
}

int run_extract(const ExtractArgs& a, const Common& c) {
  if (a.regions_dir.empty() == (a.random_regions == 0))
    throw PreconditionError("give exactly one of --regions DIR or --random-regions K");
  if (a.count < 1) throw PreconditionError("--count must be positive");
  const auto sides = parse_sizes(a.sizes);
  for (int s : sides)
    if (s < 3 || s % 2 == 0) throw PreconditionError("patch sizes must be odd and >= 3");
  const PatchSource source = a.source.empty() ? (a.random_regions > 0 ? PatchSource::Random : PatchSource::Annotation)
                                              : parse_patch_source(a.source);
  if (a.random_regions > 0 && source != PatchSource::Random)
    throw PreconditionError("--random-regions produces random-source patches");

  const auto manifest = load_manifest(a.manifest);
  json warnings = json::array();
  warn_shared_subjects(manifest, a.disjoint_from, warnings);
  std::vector<NormalizedIris> images;
  std::map<std::string, std::size_t> by_stem;
  for (const auto& r : manifest.records) {
    images.push_back(io::load_normalized_iris(r.image, r.mask, c.strict_dims));
    if (!by_stem.emplace(r.image.stem().string(), images.size() - 1).second)
      throw DataError("two manifest images share the stem " + r.image.stem().string());
  }

  std::vector<RegionEntry> regions;
  if (a.random_regions > 0) {
    for (std::size_t i = 0; i < images.size(); ++i)
      for (auto& g : random_regions(images[i].mask, a.random_regions, a.region_min, a.region_max,
                                    derive_seed(c.seed, {kTagPatches, 0xA11u, i})))
        regions.push_back({i, std::move(g), PatchSource::Random, true});
  } else {
    const fs::path dir = a.regions_dir;
    if (!fs::is_directory(dir)) throw PreconditionError("regions directory " + dir.string() + " does not exist");
    regions = fs::exists(dir / "regions.csv") ? regions_from_csv(dir / "regions.csv", by_stem, source)
                                              : regions_from_files(dir, by_stem, source);
  }
  if (regions.empty()) throw PreconditionError("no regions found: nothing to extract");

  const auto corpus = build_corpus(images, regions, sides, a.count, c.seed);
  const auto out = output_dir(c);
  fs::create_directories(out);
  json report;
  report["config"] = base_config("extract-patches", c);
  report["config"]["manifest"] = a.manifest;
  report["config"]["regions"] = a.regions_dir;
  report["config"]["random_regions"] = a.random_regions;
  report["config"]["region_min"] = a.region_min;
  report["config"]["region_max"] = a.region_max;
  report["config"]["sizes"] = sides;
  report["config"]["count"] = a.count;
  report["config"]["source"] = to_string(corpus.source);
  report["config"]["strict_dims"] = c.strict_dims;
  report["regions"] = regions.size();
  report["regions_used"] = corpus.regions_used;
  json files = json::array();
  for (const auto& [side, set] : corpus.by_side) {
    const std::string name = "patches_l" + std::to_string(side) + ".bsp";
    save_patch_set(set, out / name);
    files.push_back({{"l", side}, {"file", name}, {"patches", set.count()}});
  }
  report["corpora"] = files;
  for (const auto& w : corpus.warnings) {
    log("warning: " + w);
    warnings.push_back(w);
  }
  report["warnings"] = warnings;
  write_json(out / "patches_report.json", report);
  std::cout << json{{"corpora", files.size()}, {"regions_used", corpus.regions_used}}.dump() << '\n';
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string corpus;
  int n = 0;
  int l = 0;
  bool grid = false;
  int max_iterations = 200;
  double tolerance = 1e-4;
  std::string nonlinearity = "logcosh";
};

fs::path corpus_file(const fs::path& corpus, int l) {
  return fs::is_directory(corpus) ? corpus / ("patches_l" + std::to_string(l) + ".bsp") : corpus;
}

json training_json(const TrainingResult& r, const TrainingConfig& cfg, const std::string& corpus, const Common& c) {
  json j;
  j["config"] = base_config("train", c);
  j["config"]["corpus"] = corpus;
  j["config"]["n"] = cfg.n;
  j["config"]["l"] = cfg.l;
  j["config"]["max_iterations"] = cfg.max_iterations;
  j["config"]["tolerance"] = cfg.tolerance;
  j["config"]["nonlinearity"] = cfg.nonlinearity == Nonlinearity::LogCosh ? "logcosh" : "cube";
  j["bank_sha256"] = hex(fingerprint(r.bank));
  j["provenance"] = r.bank.provenance();
  j["patches"] = r.report.patch_count;
  j["iterations"] = r.report.iterations;
  j["converged"] = r.report.converged;
  j["whiteness_max_offdiagonal"] = r.report.max_offdiagonal;
  j["whiteness_max_diagonal_deviation"] = r.report.max_diagonal_deviation;
  j["filter_dc"] = filter_dc(r.bank);
  j["warnings"] = r.report.warnings;
  return j;
}

int run_train(const TrainArgs& a, const Common& c) {
  TrainingConfig base;
  base.seed = c.seed;
  base.max_iterations = a.max_iterations;
  base.tolerance = a.tolerance;
  if (a.nonlinearity == "logcosh") base.nonlinearity = Nonlinearity::LogCosh;
  else if (a.nonlinearity == "cube") base.nonlinearity = Nonlinearity::Cube;
  else throw PreconditionError("--nonlinearity must be logcosh or cube");

  std::map<int, std::vector<int>> plan;  // l -> counts
  if (a.grid) {
    if (a.n != 0 || a.l != 0) throw PreconditionError("--grid replaces --n and --l");
    for (const auto& p : standard_grid()) plan[p.l].push_back(p.n);
  } else {
    if (a.n == 0) throw PreconditionError("give --n and --l, or --grid");
    int l = a.l;
    if (l == 0) {
      if (fs::is_directory(a.corpus)) throw PreconditionError("--l is needed when --corpus is a directory");
      l = load_patch_set(a.corpus).side;
    }
    TrainingConfig probe = base;
    probe.n = a.n;
    probe.l = l;
    validate(probe);
    plan[l].push_back(a.n);
  }

  const auto out = output_dir(c);
  fs::create_directories(out);
  json banks = json::array();
  for (const auto& [l, counts] : plan) {
    const auto file = corpus_file(a.corpus, l);
    const auto patches = load_patch_set(file);
    if (patches.side != l)
      throw PreconditionError(file.string() + " holds patches of side " + std::to_string(patches.side) +
                              ", not " + std::to_string(l));
    log("training l = " + std::to_string(l) + " on " + std::to_string(patches.count()) + " patches");
    const auto results = train_filter_counts(patches, counts, base);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      TrainingConfig cfg = base;
      cfg.n = counts[k];
      cfg.l = l;
      const std::string stem = "bank_n" + std::to_string(cfg.n) + "_l" + std::to_string(l);
      io::save_filter_bank(results[k].bank, out / (stem + ".bsf"));
      write_json(out / (stem + ".json"), training_json(results[k], cfg, file.generic_string(), c));
      for (const auto& w : results[k].report.warnings) log("warning (" + stem + "): " + w);
      banks.push_back({{"file", stem + ".bsf"}, {"n", cfg.n}, {"l", l}, {"converged", results[k].report.converged}});
    }
  }
  std::cout << json{{"banks", banks}}.dump() << '\n';
  return 0;
}

// ----------------------------------------------------------------- encode

struct EncodeArgs {
  std::string manifest;
  std::string bank;
};

int run_encode(const EncodeArgs& a, const Common& c) {
  const auto manifest = load_manifest(a.manifest);
  const auto bank = io::load_filter_bank(a.bank);
  const auto out = output_dir(c);
  fs::create_directories(out);

  const auto& recs = manifest.records;
  std::map<std::string, std::size_t> stems;
  for (std::size_t i = 0; i < recs.size(); ++i)
    if (!stems.emplace(recs[i].image.stem().string(), i).second)
      throw DataError("two manifest images share the stem " + recs[i].image.stem().string());

  std::vector<std::string> errors(recs.size());
  const auto n = static_cast<std::ptrdiff_t>(recs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& r = recs[static_cast<std::size_t>(i)];
    try {
      const auto iris = io::load_normalized_iris(r.image, r.mask, true);
      io::save_template(encode(iris, bank), out / (r.image.stem().string() + ".bst"));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  json report;
  report["config"] = base_config("encode", c);
  report["config"]["manifest"] = a.manifest;
  report["config"]["bank"] = a.bank;
  report["bank_sha256"] = hex(fingerprint(bank));
  json templates = json::array(), failures = json::array();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto stem = recs[i].image.stem().string();
    if (errors[i].empty()) {
      templates.push_back(stem + ".bst");
    } else {
      log("error: " + stem + ": " + errors[i]);
      failures.push_back({{"image", stem}, {"error", errors[i]}});
    }
  }
  report["templates"] = templates;
  report["failures"] = failures;
  write_json(out / "encode_report.json", report);
  std::cout << json{{"encoded", templates.size()}, {"failed", failures.size()}}.dump() << '\n';
  return failures.empty() ? 0 : 3;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string a, b;
  std::string strategy = "hd-mean";
};

int run_compare(const CompareArgs& a, const Common& c) {
  const auto ta = io::load_template(a.a);
  const auto tb = io::load_template(a.b);
  if (ta.bank_fingerprint != tb.bank_fingerprint) log("warning: templates were produced by different filter banks");
  for (auto s : strategies_from(a.strategy)) {
    const auto r = score(ta, tb, s, ShiftRange{c.max_shift});
    json j;
    j["strategy"] = to_string(s);
    j["value"] = r.value;
    j["best_shift"] = r.best_shift ? json(*r.best_shift) : json(nullptr);
    j["valid_bits"] = r.valid_bits;
    std::cout << j.dump() << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------- eval

struct EvalArgs {
  std::string manifest;
  std::vector<std::string> banks;
  std::string grid;
  std::string strategy = "hd-mean";
  int bootstrap = 0;
  std::vector<std::string> compare;
  std::size_t permutations = 100000;
  std::vector<std::string> disjoint_from;
  std::string report;
};

json read_json(const fs::path& p) {
  const auto bytes = io::read_file(p);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw DataError("cannot parse " + p.string() + ": " + e.what());
  }
}

std::vector<double> bootstrap_values(const json& report, const std::string& path, const std::string& strategy) {
  if (!report.contains("results")) throw DataError(path + " is not an evaluation report");
  std::vector<const json*> candidates;
  for (const auto& r : report["results"])
    if (r.contains("bootstrap") && (strategy == "all" || r["strategy"] == strategy)) candidates.push_back(&r);
  if (candidates.empty()) throw DataError(path + " has no bootstrap results for strategy " + strategy);
  if (candidates.size() > 1)
    throw PreconditionError(path + " has several bootstrap results; pick one with --strategy");
  return (*candidates.front())["bootstrap"]["d_primes"].get<std::vector<double>>();
}

int run_compare_reports(const EvalArgs& a, const Common& c) {
  const auto da = bootstrap_values(read_json(a.compare[0]), a.compare[0], a.strategy);
  const auto db = bootstrap_values(read_json(a.compare[1]), a.compare[1], a.strategy);
  const auto m = compare_methods(da, db, a.permutations, c.seed);
  json j;
  j["config"] = base_config("eval --compare", c);
  j["config"]["reports"] = a.compare;
  j["config"]["strategy"] = a.strategy;
  j["config"]["permutations"] = a.permutations;
  j["f_statistic"] = m.f_statistic;
  j["p_value"] = m.p_value;
  j["permutations"] = m.permutations;
  j["exhaustive"] = m.exhaustive;
  std::cout << j.dump(2) << '\n';
  if (!a.report.empty()) write_json(a.report, j);
  return 0;
}

int run_eval(const EvalArgs& a, const Common& c) {
  if (!a.compare.empty()) {
    if (a.compare.size() != 2) throw PreconditionError("--compare takes two report files");
    return run_compare_reports(a, c);
  }
  if (a.manifest.empty()) throw PreconditionError("--manifest is required");
  if (a.banks.empty() == a.grid.empty()) throw PreconditionError("give --bank (repeatable) or --grid DIR");
  if (!a.grid.empty() && a.bootstrap > 0) throw PreconditionError("--bootstrap applies to --bank evaluations");
  if (a.bootstrap < 0) throw PreconditionError("--bootstrap must be non-negative");
  const auto strategies = strategies_from(a.strategy);
  const ShiftRange range{c.max_shift};
  validate(range);

  const auto manifest = load_manifest(a.manifest);
  json warnings = json::array();
  warn_shared_subjects(manifest, a.disjoint_from, warnings);
  std::vector<NormalizedIris> images;
  for (const auto& r : manifest.records) images.push_back(io::load_normalized_iris(r.image, r.mask, true));
  const auto pairs = make_pairs(manifest, c.seed);
  for (const auto& w : pairs.warnings) {
    log("warning: " + w);
    warnings.push_back(w);
  }

  std::vector<NamedBank> banks;
  if (!a.grid.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.grid))
      if (e.is_regular_file() && e.path().extension() == ".bsf") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw PreconditionError("no .bsf banks in " + a.grid);
    for (const auto& f : files) banks.push_back({f.stem().string(), io::load_filter_bank(f)});
  } else {
    for (const auto& b : a.banks) banks.push_back({fs::path(b).stem().string(), io::load_filter_bank(b)});
  }

  json report;
  report["config"] = base_config("eval", c);
  report["config"]["manifest"] = a.manifest;
  report["config"]["banks"] = a.banks;
  report["config"]["grid"] = a.grid;
  report["config"]["strategy"] = a.strategy;
  report["config"]["max_shift"] = c.max_shift;
  report["config"]["bootstrap"] = a.bootstrap;
  report["pairs"] = {{"genuine", pairs.genuine.size()}, {"impostor", pairs.impostor.size()}};

  if (!a.grid.empty()) {
    const auto cells = grid_search(images, pairs, banks, strategies, range);
    json ranking = json::array();
    for (const auto& cell : cells) ranking.push_back(to_json(cell));
    report["cells"] = cells.size();
    report["ranking"] = std::move(ranking);
  } else {
    json results = json::array();
    for (const auto& nb : banks) {
      const auto templates = encode_batch(images, nb.bank);
      for (auto s : strategies) {
        auto scores = collect_scores(templates, pairs, s, range);
        scores.bank_id = nb.id;
        json r = to_json(evaluate(scores));
        r["bank_sha256"] = hex(fingerprint(nb.bank));
        if (a.bootstrap > 0) {
          const auto boot = bootstrap_dprime(scores, a.bootstrap, c.seed);
          r["bootstrap"] = {{"sets", a.bootstrap}, {"d_primes", boot.d_primes}, {"summary", to_json(boot.summary)}};
        }
        results.push_back(std::move(r));
      }
    }
    report["results"] = std::move(results);
  }
  report["warnings"] = warnings;

  fs::path report_path = a.report;
  if (report_path.empty() && !c.out.empty()) report_path = fs::path(c.out) / "eval_report.json";
  if (report_path.empty())
    if (const char* env = std::getenv(kOutDirEnv); env && *env) report_path = fs::path(env) / "eval_report.json";
  if (!report_path.empty()) {
    if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
    write_json(report_path, report);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BSIF iris recognition: patch extraction, filter training, encoding, matching and evaluation"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--seed", common.seed, "Master random seed")->capture_default_str();
    sub->add_option("--jobs", common.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    if (with_out)
      sub->add_option("--out", common.out, std::string("Output directory (default: $") + kOutDirEnv + ")");
  };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic normalized-iris dataset");
  s_synth->add_option("--classes", synth.cfg.classes)->capture_default_str()->check(CLI::PositiveNumber);
  s_synth->add_option("--samples", synth.cfg.samples_per_class)->capture_default_str()->check(CLI::PositiveNumber);
  s_synth->add_option("--noise", synth.cfg.noise_sigma)->capture_default_str();
  s_synth->add_option("--max-occlusion", synth.cfg.max_occlusion)->capture_default_str();
  s_synth->add_option("--max-shift", synth.cfg.max_shift)->capture_default_str();
  add_common(s_synth, true);

  ExtractArgs ex;
  auto* s_ex = app.add_subcommand("extract-patches", "Sample square patches from regions of interest");
  s_ex->add_option("--manifest", ex.manifest, "Image manifest CSV")->required();
  s_ex->add_option("--regions", ex.regions_dir, "Directory of region masks (or regions.csv)");
  s_ex->add_option("--random-regions", ex.random_regions, "Random rectangular regions per image instead");
  s_ex->add_option("--region-min", ex.region_min)->capture_default_str();
  s_ex->add_option("--region-max", ex.region_max)->capture_default_str();
  s_ex->add_option("--sizes", ex.sizes, "Comma-separated odd sides, or 'standard' for the 12 grid sides")->capture_default_str();
  s_ex->add_option("--count", ex.count, "Patches per region and size")->capture_default_str();
  s_ex->add_option("--source", ex.source, "annotation, gaze or random");
  s_ex->add_option("--disjoint-from", ex.disjoint_from, "Manifests whose subjects must not reappear");
  s_ex->add_flag("--strict-dims", common.strict_dims, "Require 512x64 images");
  add_common(s_ex, true);

  TrainArgs tr;
  auto* s_tr = app.add_subcommand("train", "Learn BSIF filter banks with ICA");
  s_tr->add_option("--corpus", tr.corpus, "Patch corpus file or directory of patches_l<l>.bsp")->required();
  s_tr->add_option("--n", tr.n, "Number of filters");
  s_tr->add_option("--l", tr.l, "Filter side");
  s_tr->add_flag("--grid", tr.grid, "Train all 96 (n, l) configurations");
  s_tr->add_option("--max-iter", tr.max_iterations)->capture_default_str();
  s_tr->add_option("--tol", tr.tolerance)->capture_default_str();
  s_tr->add_option("--nonlinearity", tr.nonlinearity)->capture_default_str();
  add_common(s_tr, true);

  EncodeArgs en;
  auto* s_en = app.add_subcommand("encode", "Encode every manifest image into a template");
  s_en->add_option("--manifest", en.manifest)->required();
  s_en->add_option("--bank", en.bank)->required();
  add_common(s_en, true);

  CompareArgs cmp;
  auto* s_cmp = app.add_subcommand("compare", "Score two templates");
  s_cmp->add_option("template_a", cmp.a)->required();
  s_cmp->add_option("template_b", cmp.b)->required();
  s_cmp->add_option("--strategy", cmp.strategy, "hist-raw, hist-norm, hd-mean, hd-min, hd-max or all")
      ->capture_default_str();
  s_cmp->add_option("--max-shift", common.max_shift)->capture_default_str();
  add_common(s_cmp, false);

  EvalArgs ev;
  auto* s_ev = app.add_subcommand("eval", "Evaluate banks and strategies on genuine/impostor pairs");
  s_ev->add_option("--manifest", ev.manifest);
  s_ev->add_option("--bank", ev.banks, "Filter bank (repeatable)");
  s_ev->add_option("--grid", ev.grid, "Directory of banks to rank");
  s_ev->add_option("--strategy", ev.strategy)->capture_default_str();
  s_ev->add_flag("--all", [&](std::int64_t) { ev.strategy = "all"; }, "All five strategies");
  s_ev->add_option("--max-shift", common.max_shift)->capture_default_str();
  s_ev->add_option("--bootstrap", ev.bootstrap, "Bootstrap sets of d'")->capture_default_str();
  s_ev->add_option("--compare", ev.compare, "Two report files to test for a significant difference")
      ->expected(2);
  s_ev->add_option("--permutations", ev.permutations)->capture_default_str();
  s_ev->add_option("--disjoint-from", ev.disjoint_from, "Manifests whose subjects must not reappear");
  s_ev->add_option("--report", ev.report, "Also write the report to this file");
  add_common(s_ev, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (common.jobs > 0) omp_set_num_threads(common.jobs);

  try {
    if (*s_synth) {
      synth.cfg.seed = common.seed;
      return run_synth(synth, common);
    }
    if (*s_ex) return run_extract(ex, common);
    if (*s_tr) return run_train(tr, common);
    if (*s_en) return run_encode(en, common);
    if (*s_cmp) return run_compare(cmp, common);
    if (*s_ev) return run_eval(ev, common);
  } catch (const Error& e) {
    log("error: " + std::string(e.what()));
    switch (e.kind()) {
      case ErrorKind::Precondition: return 2;
      case ErrorKind::Data: return 3;
      case ErrorKind::Numeric: return 4;
    }
  } catch (const fs::filesystem_error& e) {
    log("error: " + std::string(e.what()));
    return 3;
  } catch (const json::exception& e) {
    log("error: " + std::string(e.what()));
    return 3;
  } catch (const std::exception& e) {
    log("internal error: " + std::string(e.what()));
    return 1;
  }
  return 0;
}
