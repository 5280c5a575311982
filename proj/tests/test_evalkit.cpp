#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "bsif/evalkit.hpp"
#include "bsif/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bsif;

namespace {

ScoreSet scores(std::vector<double> g, std::vector<double> i) {
  ScoreSet s;
  s.genuine = std::move(g);
  s.impostor = std::move(i);
  return s;
}

DatasetManifest large_manifest() {
  // 453 irises (227 subjects, the last one with a single eye), each imaged
  // twice by each of two sensors.
  DatasetManifest m;
  int irises = 0;
  for (int subject = 0; irises < 453; ++subject)
    for (Eye eye : {Eye::Left, Eye::Right}) {
      if (irises == 453) break;
      ++irises;
      const std::string sid = "p" + std::to_string(subject);
      const std::string iris = sid + (eye == Eye::Left ? "L" : "R");
      for (const char* sensor : {"lg", "ad"})
        for (int k = 0; k < 2; ++k) {
          const std::string img = iris + "_" + sensor + std::to_string(k);
          m.records.push_back({img + ".pgm", img + "_mask.pgm", sid, eye, sensor, iris});
        }
    }
  return m;
}

}  // namespace

TEST_CASE("d-prime worked example") {
  CHECK(d_prime(scores({0.2, 0.3}, {0.5, 0.6})) == doctest::Approx(4.242640687119285).epsilon(1e-12));
  const auto st = score_stats(scores({0.2, 0.3}, {0.5, 0.6}));
  CHECK(st.var_g == doctest::Approx(0.005));
  CHECK(st.mean_i == doctest::Approx(0.55));
}

TEST_CASE("d-prime invariances") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.3, 0.05), im(0.45, 0.03);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreSet s;
    for (int k = 0; k < 40; ++k) s.genuine.push_back(g(rng));
    for (int k = 0; k < 70; ++k) s.impostor.push_back(im(rng));
    const double d = d_prime(s);
    CHECK(d_prime(scores(s.impostor, s.genuine)) == doctest::Approx(d).epsilon(1e-12));
    auto affine = s;
    for (auto* v : {&affine.genuine, &affine.impostor})
      for (auto& x : *v) x = 7.5 * x + 3.0;
    CHECK(d_prime(affine) == doctest::Approx(d).epsilon(1e-9));
    CHECK(d_prime(scores(s.genuine, s.genuine)) == 0.0);
  }
  CHECK_THROWS_AS(d_prime(scores({0.1, 0.1}, {0.5, 0.5})), NumericError);
  CHECK_THROWS_AS(d_prime(scores({0.1}, {0.5, 0.6})), PreconditionError);
}

TEST_CASE("EER examples") {
  CHECK(eer(scores({0.1, 0.2}, {0.8, 0.9})).eer == 0.0);
  CHECK(eer(scores({0.3, 0.6}, {0.3, 0.6})).eer == 0.5);
  CHECK(eer(scores({0.8, 0.9}, {0.1, 0.2})).eer == 1.0);
  // one genuine score above one impostor score
  const auto e = eer(scores({0.1, 0.2, 0.3, 0.7}, {0.4, 0.5, 0.6, 0.8}));
  CHECK(e.eer == doctest::Approx(0.25));
  CHECK_THROWS_AS(eer(scores({}, {0.1})), PreconditionError);
}

TEST_CASE("ROC points at every distinct score") {
  const auto pts = roc_points(scores({0.1, 0.3, 0.3}, {0.2, 0.3, 0.5}));
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].threshold == 0.1);
  CHECK(pts[0].far == 0.0);
  CHECK(pts[0].frr == doctest::Approx(2.0 / 3.0));
  CHECK(pts[2].threshold == 0.3);
  CHECK(pts[2].far == doctest::Approx(2.0 / 3.0));
  CHECK(pts[2].frr == 0.0);
  CHECK(pts[3].far == 1.0);
}

TEST_CASE("EER agrees with an exhaustive threshold sweep") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const double sep = 0.02 * (trial % 20);
    std::normal_distribution<double> g(0.3, 0.05), im(0.3 + sep, 0.04);
    const int ng = 5 + static_cast<int>(rng() % 60), ni = 5 + static_cast<int>(rng() % 90);
    ScoreSet s;
    // rounding creates ties within and across classes
    const double q = trial % 2 ? 100.0 : 1e6;
    for (int k = 0; k < ng; ++k) s.genuine.push_back(std::round(g(rng) * q) / q);
    for (int k = 0; k < ni; ++k) s.impostor.push_back(std::round(im(rng) * q) / q);
    const double got = eer(s).eer;
    INFO("trial " << trial);
    CHECK(std::abs(got - oracle::eer_sweep(s.genuine, s.impostor)) < 1e-9);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("pair generation on 453 irises") {
  const auto m = large_manifest();
  REQUIRE(m.records.size() == 453u * 4u);
  const auto pairs = make_pairs(m, 42);
  CHECK(pairs.genuine.size() == 906);
  CHECK(pairs.impostor.size() == 453);
  CHECK(pairs.warnings.empty());
  for (const auto& [a, b] : pairs.genuine) {
    CHECK(a != b);
    CHECK(m.records[a].iris_id == m.records[b].iris_id);
    CHECK(m.records[a].sensor == m.records[b].sensor);
  }
  std::set<IndexPair> seen;
  for (const auto& [a, b] : pairs.impostor) {
    CHECK(m.records[a].subject != m.records[b].subject);
    CHECK(m.records[a].sensor == m.records[b].sensor);
    CHECK(seen.insert({a, b}).second);
  }
  const auto again = make_pairs(m, 42);
  CHECK(again.genuine == pairs.genuine);
  CHECK(again.impostor == pairs.impostor);
  CHECK(make_pairs(m, 43).impostor != pairs.impostor);
}

TEST_CASE("pair generation edge cases") {
  DatasetManifest one;
  one.records.push_back({"a.pgm", "am.pgm", "s", Eye::Left, "A", "sL"});
  one.records.push_back({"b.pgm", "bm.pgm", "s", Eye::Left, "A", "sL"});
  one.records.push_back({"c.pgm", "cm.pgm", "s", Eye::Right, "B", "sR"});
  const auto p = make_pairs(one, 1);
  CHECK(p.genuine.size() == 1);
  CHECK(p.impostor.empty());
  CHECK(p.warnings.size() == 3);  // single-image group and two irises without partners

  DatasetManifest cross;
  cross.records.push_back({"a.pgm", "am.pgm", "s1", Eye::Left, "A", "s1L"});
  cross.records.push_back({"b.pgm", "bm.pgm", "s2", Eye::Left, "B", "s2L"});
  const auto c = make_pairs(cross, 1);
  // falls back to a different sensor, and the pair is not repeated
  CHECK(c.impostor.size() == 1);
  CHECK(c.warnings.size() == 3);
}

TEST_CASE("shared subjects") {
  DatasetManifest a, b;
  a.records.push_back({"1", "1m", "x", Eye::Left, "A", "xL"});
  a.records.push_back({"2", "2m", "y", Eye::Left, "A", "yL"});
  b.records.push_back({"3", "3m", "y", Eye::Left, "A", "yL"});
  b.records.push_back({"4", "4m", "z", Eye::Left, "A", "zL"});
  CHECK(shared_subjects(a, b) == std::vector<std::string>{"y"});
}

TEST_CASE("box summary") {
  const auto b = box_summary({9, 1, 8, 2, 7, 3, 6, 4, 5});
  CHECK(b.median == 5);
  CHECK(b.q1 == 3);
  CHECK(b.q3 == 7);
  CHECK(b.iqr == 4);
  CHECK(b.lower_fence == -3);
  CHECK(b.upper_fence == 13);
  CHECK(b.whisker_low == 1);
  CHECK(b.whisker_high == 9);
  CHECK(b.outliers.empty());
  const auto o = box_summary({1, 2, 3, 4, 100});
  CHECK(o.median == 3);
  CHECK(o.outliers == std::vector<double>{100});
  CHECK(o.whisker_high == 4);
  CHECK(box_summary({1, 2}).q1 == doctest::Approx(1.25));
  CHECK_THROWS_AS(box_summary({}), PreconditionError);
}

TEST_CASE("bootstrap of d-prime") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.25, 0.04), im(0.45, 0.02);
  ScoreSet s;
  for (int k = 0; k < 100; ++k) s.genuine.push_back(g(rng));
  for (int k = 0; k < 300; ++k) s.impostor.push_back(im(rng));
  const auto r = bootstrap_dprime(s, 30, 7);
  CHECK(r.d_primes.size() == 30);
  const double d = d_prime(s);
  for (double v : r.d_primes) {
    CHECK(std::isfinite(v));
    CHECK(std::abs(v - d) < 0.3 * d);
  }
  CHECK(bootstrap_dprime(s, 30, 7).d_primes == r.d_primes);
  CHECK(bootstrap_dprime(s, 30, 8).d_primes != r.d_primes);
  // set k does not depend on how many sets are drawn
  CHECK(bootstrap_dprime(s, 5, 7).d_primes == std::vector<double>(r.d_primes.begin(), r.d_primes.begin() + 5));
  CHECK(r.summary.q1 <= r.summary.median);
  CHECK(r.summary.median <= r.summary.q3);
  CHECK_THROWS_AS(bootstrap_dprime(scores({0.2, 0.2}, {0.4, 0.4}), 3, 1), NumericError);
  CHECK_THROWS_AS(bootstrap_dprime(s, 0, 1), PreconditionError);
}

TEST_CASE("ANOVA F and exact permutation p against enumeration") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 40; ++trial) {
    const int na = 2 + static_cast<int>(rng() % 5), nb = 2 + static_cast<int>(rng() % 5);
    std::vector<double> a, b;
    for (int k = 0; k < na; ++k) a.push_back(nd(rng));
    for (int k = 0; k < nb; ++k) b.push_back(nd(rng) + 0.2 * (trial % 7));
    CHECK(anova_f(a, b) == doctest::Approx(oracle::anova_f(a, b)).epsilon(1e-10));
    const auto r = compare_methods(a, b);
    CHECK(r.exhaustive);
    CHECK(r.p_value == doctest::Approx(oracle::permutation_p(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("method comparison edge cases") {
  const std::vector<double> a{0.41, 0.43, 0.45, 0.47, 0.44};
  const auto same = compare_methods(a, a);
  CHECK(same.f_statistic == 0.0);
  CHECK(same.p_value == 1.0);

  // three against three, fully separated: only the two extreme labelings
  // out of C(6,3) = 20 reach the observed F
  const std::vector<double> lo{1.0, 1.1, 1.2}, hi{5.0, 5.1, 5.2};
  const auto exact = compare_methods(lo, hi);
  CHECK(exact.exhaustive);
  CHECK(exact.permutations == 20);
  CHECK(exact.p_value == doctest::Approx(0.1));

  std::vector<double> g1, g2;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> jitter(0.0, 1e-3);
  for (int k = 0; k < 30; ++k) {
    g1.push_back(1.0 + jitter(rng));
    g2.push_back(5.0 + jitter(rng));
  }
  const auto sep = compare_methods(g1, g2, 100000, 2);
  CHECK_FALSE(sep.exhaustive);
  CHECK(sep.permutations == 100000);
  CHECK(sep.p_value <= 3e-5);
  CHECK(compare_methods(g1, g2, 1000, 9).p_value == compare_methods(g1, g2, 1000, 9).p_value);
  CHECK_THROWS_AS(compare_methods(std::vector<double>{1.0}, a), PreconditionError);
}

TEST_CASE("grid search over banks and strategies") {
  SynthConfig cfg;
  cfg.classes = 6;
  cfg.samples_per_class = 4;
  const auto data = make_synthetic_dataset(cfg);
  const auto pairs = make_pairs(data.manifest, 1);
  REQUIRE(pairs.genuine.size() == 12);

  const auto bank = testutil::random_dc_free_bank(6, 9, 2);
  // same filters in reverse order
  std::vector<double> rev;
  for (int i = bank.count() - 1; i >= 0; --i) rev.insert(rev.end(), bank.filter(i).begin(), bank.filter(i).end());
  std::vector<NamedBank> banks{{"base", bank},
                               {"reversed", FilterBank(6, 9, rev)},
                               {"small", testutil::random_dc_free_bank(5, 5, 3)},
                               {"too-tall", testutil::random_dc_free_bank(2, 65, 4)}};
  const std::vector<Strategy> strategies(kAllStrategies.begin(), kAllStrategies.end());
  const auto cells = grid_search(data.images, pairs, banks, strategies, {});
  REQUIRE(cells.size() == 20);

  auto find = [&](const std::string& id, Strategy s) {
    return *std::find_if(cells.begin(), cells.end(), [&](const GridCell& c) { return c.bank_id == id && c.strategy == s; });
  };
  for (auto s : {Strategy::HDMin, Strategy::HDMax}) CHECK(find("base", s).d_prime == find("reversed", s).d_prime);
  // the mean is summed in a different order
  CHECK(find("base", Strategy::HDMean).d_prime ==
        doctest::Approx(find("reversed", Strategy::HDMean).d_prime).epsilon(1e-12));
  for (auto s : strategies) {
    const auto c = find("too-tall", s);
    CHECK_FALSE(c.ok);
    CHECK_FALSE(c.error.empty());
  }
  for (std::size_t i = 0; i < 15; ++i) CHECK(cells[i].ok);
  for (std::size_t i = 1; i < 15; ++i) CHECK(cells[i - 1].d_prime >= cells[i].d_prime);
  for (std::size_t i = 15; i < 20; ++i) CHECK_FALSE(cells[i].ok);

  // direct evaluation of one cell agrees
  const auto templates = encode_batch(data.images, bank);
  const auto s = collect_scores(templates, pairs, Strategy::HDMin, {});
  CHECK(d_prime(s) == find("base", Strategy::HDMin).d_prime);

  const auto again = grid_search(data.images, pairs, banks, strategies, {});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(again[i].bank_id == cells[i].bank_id);
    CHECK(again[i].d_prime == cells[i].d_prime);
  }
}

TEST_CASE("ranking tie-breaks") {
  std::vector<GridCell> cells(4);
  cells[0].bank_id = "b";
  cells[0].n = 8, cells[0].l = 9, cells[0].ok = true, cells[0].d_prime = 2.0, cells[0].eer = 0.1;
  cells[1].bank_id = "a";
  cells[1].n = 7, cells[1].l = 9, cells[1].ok = true, cells[1].d_prime = 2.0, cells[1].eer = 0.1;
  cells[2].bank_id = "c";
  cells[2].n = 5, cells[2].l = 5, cells[2].ok = true, cells[2].d_prime = 2.0, cells[2].eer = 0.05;
  cells[3].bank_id = "d";
  cells[3].n = 5, cells[3].l = 5, cells[3].ok = false;
  rank_cells(cells);
  CHECK(cells[0].bank_id == "c");
  CHECK(cells[1].bank_id == "a");
  CHECK(cells[2].bank_id == "b");
  CHECK(cells[3].bank_id == "d");
}

TEST_CASE("evaluation report and json") {
  auto s = scores({0.2, 0.3, 0.25}, {0.5, 0.6, 0.55, 0.45});
  s.bank_id = "bank";
  const auto r = evaluate(s);
  CHECK(r.genuine_count == 3);
  CHECK(r.impostor_count == 4);
  CHECK(r.eer == 0.0);
  const auto j = to_json(r);
  CHECK(j["strategy"] == "hd-mean");
  CHECK(j["roc"].size() == 7);
  CHECK_FALSE(to_json(r, false).contains("roc"));
  CHECK(j.dump() == to_json(evaluate(s)).dump());
}
