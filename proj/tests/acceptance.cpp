// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "bsif/encoder.hpp"
#include "bsif/evalkit.hpp"
#include "bsif/filtertrain.hpp"
#include "bsif/imgio.hpp"
#include "bsif/matcher.hpp"
#include "bsif/patches.hpp"
#include "bsif/synth.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bsif;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and limits.
constexpr double kRotationSeconds = 60.0;
constexpr int kRotationImages = 50;
constexpr int kRotationShifts = 10;
constexpr int kToyTemplates = 1000;
constexpr double kChi2Tolerance = 1e-12;
constexpr double kIcaCorrelation = 0.95;
constexpr double kWhiteness = 1e-6;
constexpr double kGridSeconds = 30.0 * 60.0;
constexpr double kDPrimeExample = 4.242640687;
constexpr double kDPrimeTolerance = 1e-9;
constexpr double kEerTolerance = 1e-9;
constexpr double kMinEndToEndDPrime = 3.0;
constexpr int kBootstrapSets = 30;
constexpr double kPermutationTolerance = 1e-12;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

SynthDataset synth(int classes, int samples, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.classes = classes;
  cfg.samples_per_class = samples;
  cfg.seed = seed;
  return make_synthetic_dataset(cfg);
}

// Domain corpus: patches from the valid area of a synthetic set.
PatchSet domain_patches(const SynthDataset& data, int side, int per_image, std::uint64_t seed) {
  std::vector<RegionEntry> regions;
  for (std::size_t i = 0; i < data.images.size(); ++i)
    regions.push_back({i, data.images[i].mask, PatchSource::Random, true});
  const std::vector<int> sides{side};
  return build_corpus(data.images, regions, sides, per_image, seed).by_side.at(side);
}

FilterBank trained_bank(const SynthDataset& domain, int n, int l, std::uint64_t seed) {
  TrainingConfig cfg;
  cfg.n = n;
  cfg.l = l;
  cfg.seed = seed;
  return train_filters(domain_patches(domain, l, 400, seed), cfg).bank;
}

FilterBank random_orthonormal_bank(int n, int l, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(l * l, n);
  for (int i = 0; i < l * l; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(l * l, n);
  std::vector<double> c;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < l * l; ++i) c.push_back(q(i, j));
  return FilterBank(n, l, std::move(c), "random-orthonormal");
}

// ------------------------------------------------------------------ 1

void rotation_invariance() {
  const auto t0 = Clock::now();
  const auto bank = trained_bank(synth(10, 1, 901), 8, 9, 11);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> shift(-511, 511);
  int equal = 0, total = 0;
  for (int i = 0; i < kRotationImages; ++i) {
    NormalizedIris iris;
    iris.id = "r" + std::to_string(i);
    const auto tex = synth_texture(rng());
    iris.pixels = GrayImage(kIrisWidth, kIrisHeight);
    for (int y = 0; y < kIrisHeight; ++y)
      for (int x = 0; x < kIrisWidth; ++x)
        iris.pixels.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(tex.at(x, y)), 0L, 255L));
    iris.mask = BinaryGrid(kIrisWidth, kIrisHeight, 1);
    const auto h = histogram(encode(iris, bank));
    for (int k = 0; k < kRotationShifts; ++k) {
      NormalizedIris s = iris;
      s.pixels = shift_columns(iris.pixels, shift(rng));
      equal += histogram(encode(s, bank)) == h;
      ++total;
    }
  }
  const double secs = seconds_since(t0);
  report(1, "rotation invariance", equal == total && secs < kRotationSeconds,
         std::to_string(equal) + "/" + std::to_string(total) + " histograms identical, " + fmt(secs) + " s");
}

// ------------------------------------------------------------------ 2

void shift_compensation() {
  const auto data = synth(1, 1, 902);
  const auto bank = trained_bank(synth(10, 1, 903), 8, 9, 12);
  const auto t = encode(data.images[0], bank);
  int ok = 0;
  for (int k = -16; k <= 16; ++k) {
    const auto r = score_hd(t, shift_columns(t, k), Strategy::HDMean, {16});
    ok += r.value == 0.0 && r.best_shift == k;
  }
  report(2, "shift compensation", ok == 33, std::to_string(ok) + "/33 shifts give z = 0 at best_shift = k");
}

// ------------------------------------------------------------------ 3

void oracle_equivalence() {
  std::mt19937_64 rng(3);
  const int w = 16, h = 8, max_shift = 2;
  int agree = 0, compared = 0;
  for (int trial = 0; trial < kToyTemplates; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const double density = trial % 10 == 0 ? 0.05 : 0.75;
    std::bernoulli_distribution bit(0.5), valid(density);
    IrisTemplate t, p;
    std::vector<std::vector<int>> tc(n), pc(n);
    std::vector<int> tm(w * h), pm(w * h);
    for (auto* tpl : {&t, &p}) {
      tpl->planes.assign(n, BitPlane(w, h));
      tpl->mask = BitPlane(w, h);
    }
    for (int i = 0; i < n; ++i)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const bool a = bit(rng), b = bit(rng);
          t.planes[i].set(x, y, a);
          p.planes[i].set(x, y, b);
          tc[i].push_back(a);
          pc[i].push_back(b);
        }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        tm[y * w + x] = valid(rng);
        pm[y * w + x] = valid(rng);
        t.mask.set(x, y, tm[y * w + x]);
        p.mask.set(x, y, pm[y * w + x]);
      }
    for (auto [s, agg] : {std::pair{Strategy::HDMean, oracle::Agg::Mean}, std::pair{Strategy::HDMin, oracle::Agg::Min},
                          std::pair{Strategy::HDMax, oracle::Agg::Max}}) {
      const auto expected = oracle::naive_score(tc, tm, pc, pm, w, h, max_shift, agg);
      ++compared;
      if (!expected.valid) {
        try {
          score_hd(t, p, s, {max_shift});
        } catch (const NumericError&) {
          ++agree;
        }
        continue;
      }
      const auto got = score_hd(t, p, s, {max_shift});
      agree += got.value == expected.value && got.best_shift == expected.shift;
    }
  }

  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const std::size_t bins = std::size_t{1} << n;
    BsifHistogram a{n, std::vector<std::uint64_t>(bins), 0}, b{n, std::vector<std::uint64_t>(bins), 0};
    for (std::size_t i = 0; i < bins; ++i) {
      a.bins[i] = rng() % 300;
      b.bins[i] = rng() % 3 == 0 ? 0 : rng() % 300;
      a.total += a.bins[i];
      b.total += b.bins[i];
    }
    if (a.total == 0 || b.total == 0) continue;
    std::vector<double> va(a.bins.begin(), a.bins.end()), vb(b.bins.begin(), b.bins.end());
    const double raw = oracle::chi2(va, vb);
    worst = std::max(worst, std::abs(chi2_raw(a, b).value - raw) / std::max(1.0, std::abs(raw)));
    for (auto& v : va) v /= static_cast<double>(a.total);
    for (auto& v : vb) v /= static_cast<double>(b.total);
    worst = std::max(worst, std::abs(chi2_normalized(a, b).value - oracle::chi2(va, vb)));
  }
  report(3, "oracle equivalence", agree == compared && worst <= kChi2Tolerance,
         std::to_string(agree) + "/" + std::to_string(compared) + " HD scores exact on " +
             std::to_string(kToyTemplates) + " toy pairs; chi2 max deviation " + fmt(worst));
}

// ------------------------------------------------------------------ 4

void ica_whiteness_and_recovery() {
  std::mt19937_64 rng(4);
  const int d = 25, n = 5, m = 20000;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd s(n, m);
  for (int j = 0; j < m; ++j) {
    s(0, j) = u(rng);
    s(1, j) = (coin(rng) ? 1 : -1) * e(rng);
    s(2, j) = std::pow(u(rng), 3);
    s(3, j) = coin(rng) ? 1.0 : -1.0;
    s(4, j) = (coin(rng) ? 1 : -1) * e(rng) * e(rng);
  }
  Eigen::MatrixXd a(d, n);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = u(rng);
  Eigen::MatrixXd x = a * s;
  x.rowwise() -= x.colwise().mean().eval();  // DC-free like patch vectors
  const WhiteningBasis basis(x);
  TrainingConfig cfg;
  cfg.n = n;
  cfg.l = 5;
  cfg.seed = 4;
  const auto result = train_filters(basis, cfg);
  Eigen::MatrixXd f(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) f(i, k) = result.bank.filter(i)[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd y = f * basis.centered();
  double worst_corr = 1.0;
  std::set<int> used;
  for (int k = 0; k < n; ++k) {
    double best = 0;
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      const Eigen::RowVectorXd ci = y.row(i).array() - y.row(i).mean();
      const Eigen::RowVectorXd ck = s.row(k).array() - s.row(k).mean();
      const double c = std::abs(ci.dot(ck)) / std::sqrt(ci.squaredNorm() * ck.squaredNorm());
      if (c > best) best = c, arg = i;
    }
    used.insert(arg);
    worst_corr = std::min(worst_corr, best);
  }

  // whiteness on a texture corpus, recomputed from the bank
  const auto patches = domain_patches(synth(10, 1, 904), 9, 600, 5);
  TrainingConfig tc;
  tc.n = 8;
  tc.l = 9;
  tc.seed = 6;
  const auto trained = train_filters(patches, tc);
  Eigen::MatrixXd px = patch_matrix(patches);
  px.colwise() -= px.rowwise().mean().eval();
  Eigen::MatrixXd fb(8, 81);
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 81; ++k) fb(i, k) = trained.bank.filter(i)[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd r = fb * px;
  const double dev =
      ((r * r.transpose()) / static_cast<double>(r.cols()) - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff();
  const bool ok = worst_corr > kIcaCorrelation && used.size() == static_cast<std::size_t>(n) && dev < kWhiteness;
  report(4, "ICA whiteness and recovery", ok,
         "min |corr| " + fmt(worst_corr) + " over " + std::to_string(n) + " sources, covariance deviation " + fmt(dev));
}

// ------------------------------------------------------------------ 5

void grid_structure() {
  const auto t0 = Clock::now();
  const auto grid = standard_grid();
  std::set<std::pair<int, int>> expected, got;
  for (int l : {5, 7, 9, 11, 13, 15, 17, 19, 21, 27, 33, 39})
    for (int n = 5; n <= 12; ++n) expected.insert({n, l});
  for (const auto& p : grid) got.insert({p.n, p.l});
  const bool grid_ok = grid.size() == 96 && got == expected;

  const auto domain = synth(10, 2, 905);
  std::vector<NamedBank> banks;
  for (int l : {5, 7, 9, 11, 13, 15, 17, 19, 21, 27, 33, 39}) {
    TrainingConfig base;
    base.seed = 7;
    const int per_image = std::max(10 * l * l / 20 + 1, 200);
    const std::vector<int> counts{5, 6, 7, 8, 9, 10, 11, 12};
    const auto results = train_filter_counts(domain_patches(domain, l, per_image, 8), counts, base);
    for (const auto& r : results)
      banks.push_back({"bank_n" + std::to_string(r.bank.count()) + "_l" + std::to_string(l), r.bank});
  }
  const auto test = synth(5, 4, 906);
  const auto pairs = make_pairs(test.manifest, 9);
  const std::vector<Strategy> strategies(kAllStrategies.begin(), kAllStrategies.end());
  const auto cells = grid_search(test.images, pairs, banks, strategies, {16});
  std::size_t ok_cells = 0;
  bool ranked = true;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ok_cells += cells[i].ok;
    if (i > 0 && cells[i].ok && cells[i - 1].ok && cells[i - 1].d_prime < cells[i].d_prime) ranked = false;
    if (i > 0 && cells[i].ok && !cells[i - 1].ok) ranked = false;
  }
  const double secs = seconds_since(t0);
  report(5, "grid structure", grid_ok && cells.size() == 480 && ranked && secs < kGridSeconds,
         std::to_string(grid.size()) + " grid points, " + std::to_string(cells.size()) + " ranked cells (" +
             std::to_string(ok_cells) + " scored) on " + std::to_string(test.images.size()) + " images, best " +
             cells.front().bank_id + "/" + std::string(to_string(cells.front().strategy)) + ", " + fmt(secs) + " s");
}

// ------------------------------------------------------------------ 6

void metric_arithmetic() {
  ScoreSet ex;
  ex.genuine = {0.2, 0.3};
  ex.impostor = {0.5, 0.6};
  const double d = d_prime(ex);
  const bool example_ok = std::abs(d - kDPrimeExample) <= kDPrimeTolerance;

  std::mt19937_64 rng(6);
  double worst_eer = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::normal_distribution<double> g(0.3, 0.05), im(0.3 + 0.01 * (trial % 25), 0.04);
    ScoreSet s;
    const double q = trial % 3 == 0 ? 200.0 : 1e7;
    for (int k = 0, ng = 5 + static_cast<int>(rng() % 80); k < ng; ++k) s.genuine.push_back(std::round(g(rng) * q) / q);
    for (int k = 0, ni = 5 + static_cast<int>(rng() % 120); k < ni; ++k)
      s.impostor.push_back(std::round(im(rng) * q) / q);
    worst_eer = std::max(worst_eer, std::abs(eer(s).eer - oracle::eer_sweep(s.genuine, s.impostor)));
  }

  // Dyadic scores on power-of-two class sizes keep every operation exact.
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSet s;
    for (int k = 0; k < 8; ++k) s.genuine.push_back(static_cast<double>(rng() % 512) / 1024.0);
    for (int k = 0; k < 16; ++k) s.impostor.push_back(static_cast<double>(256 + rng() % 512) / 1024.0);
    const double base = d_prime(s);
    ScoreSet shifted = s, scaled = s, swapped;
    for (auto* v : {&shifted.genuine, &shifted.impostor})
      for (auto& x : *v) x += 1.0;
    for (auto* v : {&scaled.genuine, &scaled.impostor})
      for (auto& x : *v) x *= 4.0;
    swapped.genuine = s.impostor;
    swapped.impostor = s.genuine;
    exact += d_prime(shifted) == base && d_prime(scaled) == base && d_prime(swapped) == base;
  }
  report(6, "metric arithmetic", example_ok && worst_eer <= kEerTolerance && exact == 100,
         "d' example " + fmt(d) + ", EER max deviation " + fmt(worst_eer) + " on 100 sets, " + std::to_string(exact) +
             "/100 invariance sets exact");
}

// ------------------------------------------------------------------ 7

struct Discrimination {
  double d_prime;
  double eer;
};

Discrimination discriminate(const SynthDataset& data, const FilterBank& bank, const PairLists& pairs) {
  const auto templates = encode_batch(data.images, bank);
  const auto s = collect_scores(templates, pairs, Strategy::HDMean, {16});
  return {d_prime(s), eer(s).eer};
}

void end_to_end() {
  const auto test = synth(20, 4, 907);
  const auto domain = synth(20, 1, 908);
  const int n = 8, l = 9;
  const auto bank = trained_bank(domain, n, l, 13);
  const auto random = random_orthonormal_bank(n, l, 14);

  PairLists all;
  for (std::size_t i = 0; i < test.images.size(); ++i)
    for (std::size_t j = i + 1; j < test.images.size(); ++j)
      (test.labels[i] == test.labels[j] ? all.genuine : all.impostor).emplace_back(i, j);
  const auto trained_all = discriminate(test, bank, all);
  const auto random_all = discriminate(test, random, all);
  const auto protocol = make_pairs(test.manifest, 15);
  const auto trained_protocol = discriminate(test, bank, protocol);

  const bool ok = trained_all.eer == 0.0 && trained_all.d_prime > kMinEndToEndDPrime &&
                  trained_protocol.eer == 0.0 && trained_protocol.d_prime > kMinEndToEndDPrime &&
                  trained_all.d_prime >= random_all.d_prime;
  report(7, "end-to-end synthetic discrimination", ok,
         "all pairs (" + std::to_string(all.genuine.size()) + " genuine, " + std::to_string(all.impostor.size()) +
             " impostor): trained EER " + fmt(trained_all.eer) + " d' " + fmt(trained_all.d_prime) + ", random d' " +
             fmt(random_all.d_prime) + "; protocol pairs: EER " + fmt(trained_protocol.eer) + " d' " +
             fmt(trained_protocol.d_prime));
}

// ------------------------------------------------------------------ 8

int run_cli(const fs::path& dir, const std::string& args, const std::string& stdout_file) {
  const std::string cmd = "cd '" + dir.string() + "' && '" BSIF_CLI_PATH "' " + args + " > '" + stdout_file +
                          "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::vector<std::uint8_t>> snapshot(const fs::path& dir) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = io::read_file(e.path());
  return files;
}

void reproducibility() {
  const auto dir = fs::temp_directory_path() / "bsif_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"synth", "synth --classes 6 --samples 4 --seed 21 --out data"},
      {"extract-patches", "extract-patches --manifest data/manifest.csv --random-regions 4 --sizes 5,7 --count 100 "
                          "--seed 22 --out corpus"},
      {"train", "train --corpus corpus --n 6 --l 7 --seed 23 --out banks"},
      {"train-grid-slice", "train --corpus corpus/patches_l5.bsp --n 8 --seed 24 --out banks"},
      {"encode", "encode --manifest data/manifest.csv --bank banks/bank_n6_l7.bsf --out templates"},
      {"compare", "compare templates/c0_s0.bst templates/c1_s2.bst --strategy all"},
      {"eval", "eval --manifest data/manifest.csv --bank banks/bank_n6_l7.bsf --all --bootstrap 30 --seed 25 "
               "--report reports/eval_a.json"},
      {"eval-b", "eval --manifest data/manifest.csv --bank banks/bank_n8_l5.bsf --bootstrap 30 --seed 25 "
                 "--report reports/eval_b.json"},
      {"eval-grid", "eval --manifest data/manifest.csv --grid banks --all --seed 26 --report reports/grid.json"},
      {"eval-compare", "eval --compare reports/eval_a.json reports/eval_b.json --strategy hd-mean --permutations 5000 "
                       "--seed 27 --report reports/compare.json"},
  };
  fs::create_directories(dir / "stdout");
  std::vector<std::string> bad;
  std::map<std::string, std::vector<std::uint8_t>> first;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < commands.size(); ++k) {
      const auto& [name, args] = commands[k];
      const int rc = run_cli(dir, args, "stdout/" + std::to_string(k) + "_" + std::to_string(pass) + ".txt");
      if (rc != 0) bad.push_back(name + " exited " + std::to_string(rc));
    }
    if (pass == 0) first = snapshot(dir);
  }
  const auto second = snapshot(dir);
  std::size_t identical = 0, artifacts = 0;
  for (const auto& [name, bytes] : first) {
    if (name.starts_with("stdout/")) continue;
    ++artifacts;
    if (second.count(name) && second.at(name) == bytes) ++identical;
    else bad.push_back(name + " differs");
  }
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const auto a = first.at("stdout/" + std::to_string(k) + "_0.txt");
    const auto b = second.at("stdout/" + std::to_string(k) + "_1.txt");
    if (a != b) bad.push_back(commands[k].first + " stdout differs");
  }
  std::string detail = std::to_string(identical) + "/" + std::to_string(artifacts) + " artifacts and " +
                       std::to_string(commands.size()) + " stdout streams compared across reruns";
  if (!bad.empty()) detail += "; first problem: " + bad.front();
  report(8, "reproducibility", bad.empty() && artifacts > 0, detail);
}

// ------------------------------------------------------------------ 9

void bootstrap_and_significance() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.25, 0.04), im(0.45, 0.02);
  ScoreSet s;
  for (int k = 0; k < 200; ++k) s.genuine.push_back(g(rng));
  for (int k = 0; k < 400; ++k) s.impostor.push_back(im(rng));
  const auto a = bootstrap_dprime(s, kBootstrapSets, 31);
  const auto b = bootstrap_dprime(s, kBootstrapSets, 31);
  const bool boot_ok = a.d_primes.size() == static_cast<std::size_t>(kBootstrapSets) && a.d_primes == b.d_primes;

  double worst = 0;
  int exhaustive = 0;
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    const int na = 2 + static_cast<int>(rng() % 5), nb = 2 + static_cast<int>(rng() % 5);
    std::vector<double> x, y;
    for (int k = 0; k < na; ++k) x.push_back(nd(rng));
    for (int k = 0; k < nb; ++k) y.push_back(nd(rng) + 0.25 * (trial % 9));
    const auto r = compare_methods(x, y);
    exhaustive += r.exhaustive;
    worst = std::max(worst, std::abs(r.p_value - oracle::permutation_p(x, y)));
  }
  report(9, "bootstrap and significance", boot_ok && exhaustive == 200 && worst <= kPermutationTolerance,
         std::to_string(a.d_primes.size()) + " bootstrap d' values, reproducible: " +
             (a.d_primes == b.d_primes ? "yes" : "no") + "; permutation p max deviation " + fmt(worst) +
             " over 200 exhaustive cases");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  auto guard = [](int id, const char* name, auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, "rotation invariance", rotation_invariance);
  guard(2, "shift compensation", shift_compensation);
  guard(3, "oracle equivalence", oracle_equivalence);
  guard(4, "ICA whiteness and recovery", ica_whiteness_and_recovery);
  guard(5, "grid structure", grid_structure);
  guard(6, "metric arithmetic", metric_arithmetic);
  guard(7, "end-to-end synthetic discrimination", end_to_end);
  guard(8, "reproducibility", reproducibility);
  guard(9, "bootstrap and significance", bootstrap_and_significance);
  std::printf("%d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
  return failures;
}
