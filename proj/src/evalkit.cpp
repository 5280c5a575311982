#include "bsif/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "bsif/encoder.hpp"
#include "bsif/error.hpp"
#include "bsif/rng.hpp"

namespace bsif {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double unbiased_var(std::span<const double> v, double mean) {
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Binomial coefficient, saturating at `cap`.
std::size_t choose_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  long double c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(c));
}

}  // namespace

ScoreStats score_stats(const ScoreSet& s) {
  if (s.genuine.size() < 2 || s.impostor.size() < 2)
    throw PreconditionError("d' needs at least two genuine and two impostor scores");
  ScoreStats st;
  st.mean_g = mean_of(s.genuine);
  st.mean_i = mean_of(s.impostor);
  st.var_g = unbiased_var(s.genuine, st.mean_g);
  st.var_i = unbiased_var(s.impostor, st.mean_i);
  return st;
}

double d_prime(const ScoreSet& s) {
  const auto st = score_stats(s);
  const double pooled = 0.5 * (st.var_g + st.var_i);
  if (!(pooled > 0)) throw NumericError("d' is undefined: both score classes have zero variance");
  return std::abs(st.mean_g - st.mean_i) / std::sqrt(pooled);
}

std::vector<RocPoint> roc_points(const ScoreSet& s) {
  if (s.genuine.empty() || s.impostor.empty()) throw PreconditionError("EER needs genuine and impostor scores");
  std::vector<double> g = s.genuine, im = s.impostor;
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  std::vector<double> thresholds;
  std::merge(g.begin(), g.end(), im.begin(), im.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> pts;
  pts.reserve(thresholds.size());
  std::size_t gi = 0, ii = 0;
  for (double t : thresholds) {
    while (gi < g.size() && g[gi] <= t) ++gi;
    while (ii < im.size() && im[ii] <= t) ++ii;
    pts.push_back({t, static_cast<double>(ii) / static_cast<double>(im.size()),
                   static_cast<double>(g.size() - gi) / static_cast<double>(g.size())});
  }
  return pts;
}

EerResult eer(const ScoreSet& s) {
  const auto pts = roc_points(s);
  // Below every score nothing is accepted: FAR = 0, FRR = 1.
  RocPoint prev{pts.front().threshold, 0.0, 1.0};
  for (const auto& cur : pts) {
    const double d_prev = prev.far - prev.frr;
    const double d_cur = cur.far - cur.frr;
    if (d_cur >= 0) {
      const double alpha = -d_prev / (d_cur - d_prev);
      return {prev.far + alpha * (cur.far - prev.far), prev.threshold + alpha * (cur.threshold - prev.threshold)};
    }
    prev = cur;
  }
  return {prev.far, prev.threshold};  // unreachable: the last point has FAR = 1, FRR = 0
}

PairLists make_pairs(const DatasetManifest& manifest, std::uint64_t seed) {
  PairLists out;
  const auto& recs = manifest.records;
  Rng rng(derive_seed(seed, {kTagPairs}));

  std::map<std::tuple<std::string, int, std::string>, std::vector<std::size_t>> groups;
  std::map<std::string, std::vector<std::size_t>> irises;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    groups[{recs[i].subject, static_cast<int>(recs[i].eye), recs[i].sensor}].push_back(i);
    irises[recs[i].iris_id].push_back(i);
  }

  for (const auto& [key, idx] : groups) {
    if (idx.size() < 2) {
      out.warnings.push_back("subject " + std::get<0>(key) + (std::get<1>(key) == 0 ? " L" : " R") + " sensor " +
                             std::get<2>(key) + " has a single image: no genuine pair");
      continue;
    }
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, idx.size() - 1)(rng);
    std::size_t b = std::uniform_int_distribution<std::size_t>(0, idx.size() - 2)(rng);
    if (b >= a) ++b;
    out.genuine.emplace_back(idx[std::min(a, b)], idx[std::max(a, b)]);
  }

  std::set<IndexPair> used;
  for (const auto& [iris, idx] : irises) {
    const std::size_t rep = idx[std::uniform_int_distribution<std::size_t>(0, idx.size() - 1)(rng)];
    std::vector<std::size_t> same_sensor, any_sensor;
    for (std::size_t j = 0; j < recs.size(); ++j) {
      if (recs[j].subject == recs[rep].subject) continue;
      any_sensor.push_back(j);
      if (recs[j].sensor == recs[rep].sensor) same_sensor.push_back(j);
    }
    bool paired = false;
    for (auto* candidates : {&same_sensor, &any_sensor}) {
      std::shuffle(candidates->begin(), candidates->end(), rng);
      for (std::size_t j : *candidates) {
        const IndexPair p{std::min(rep, j), std::max(rep, j)};
        if (used.insert(p).second) {
          out.impostor.push_back(p);
          paired = true;
          break;
        }
      }
      if (paired) break;
    }
    if (!paired) out.warnings.push_back("iris " + iris + " has no impostor partner");
  }
  return out;
}

std::vector<std::string> shared_subjects(const DatasetManifest& a, const DatasetManifest& b) {
  const auto sa = a.subjects(), sb = b.subjects();
  std::vector<std::string> out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return out;
}

BoxSummary box_summary(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("box summary of an empty list");
  std::sort(values.begin(), values.end());
  BoxSummary b;
  b.median = quantile(values, 0.5);
  b.q1 = quantile(values, 0.25);
  b.q3 = quantile(values, 0.75);
  b.iqr = b.q3 - b.q1;
  b.lower_fence = b.q1 - 1.5 * b.iqr;
  b.upper_fence = b.q3 + 1.5 * b.iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool low_set = false;
  for (double v : values) {
    if (v < b.lower_fence || v > b.upper_fence) {
      b.outliers.push_back(v);
      continue;
    }
    if (!low_set) {
      b.whisker_low = v;
      low_set = true;
    }
    b.whisker_high = v;
  }
  return b;
}

BootstrapResult bootstrap_dprime(const ScoreSet& s, int sets, std::uint64_t seed) {
  if (sets < 1) throw PreconditionError("bootstrap needs at least one set");
  if (s.genuine.empty() || s.impostor.empty()) throw PreconditionError("bootstrap needs genuine and impostor scores");
  BootstrapResult r;
  r.d_primes.reserve(static_cast<std::size_t>(sets));
  for (int k = 0; k < sets; ++k) {
    Rng rng(derive_seed(seed, {kTagBootstrap, static_cast<std::uint64_t>(k)}));
    ScoreSet resample;
    auto draw = [&](const std::vector<double>& src, std::vector<double>& dst) {
      std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
      dst.resize(src.size());
      for (auto& v : dst) v = src[pick(rng)];
    };
    draw(s.genuine, resample.genuine);
    draw(s.impostor, resample.impostor);
    r.d_primes.push_back(d_prime(resample));
  }
  r.summary = box_summary(r.d_primes);
  return r;
}

double anova_f(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw PreconditionError("ANOVA needs at least two values per group");
  const double ma = mean_of(a), mb = mean_of(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double m = (na * ma + nb * mb) / (na + nb);
  const double ssb = na * (ma - m) * (ma - m) + nb * (mb - m) * (mb - m);
  double ssw = 0;
  for (double x : a) ssw += (x - ma) * (x - ma);
  for (double x : b) ssw += (x - mb) * (x - mb);
  if (!(ssw > 0)) throw NumericError("ANOVA is undefined: zero within-group variance");
  return ssb / (ssw / (na + nb - 2.0));
}

MethodComparison compare_methods(std::span<const double> a, std::span<const double> b, std::size_t permutations,
                                 std::uint64_t seed) {
  MethodComparison r;
  r.f_statistic = anova_f(a, b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double cutoff = r.f_statistic - 1e-9 * std::max(1.0, std::abs(r.f_statistic));

  // Two-pass F per relabeling; sum-of-squares shortcuts lose the tiny
  // within-group variances of well separated groups.
  std::vector<double> ga, gb;
  auto relabeled_f = [&](auto in_a) {
    ga.clear();
    gb.clear();
    for (std::size_t i = 0; i < n; ++i) (in_a(i) ? ga : gb).push_back(pooled[i]);
    const double ma = mean_of(ga), mb = mean_of(gb);
    const double nad = static_cast<double>(ga.size()), nbd = static_cast<double>(gb.size());
    const double m = (nad * ma + nbd * mb) / (nad + nbd);
    const double ssb = nad * (ma - m) * (ma - m) + nbd * (mb - m) * (mb - m);
    double ssw = 0;
    for (double x : ga) ssw += (x - ma) * (x - ma);
    for (double x : gb) ssw += (x - mb) * (x - mb);
    if (!(ssw > 0)) return std::numeric_limits<double>::infinity();
    return ssb / (ssw / (nad + nbd - 2.0));
  };

  const std::size_t assignments = choose_capped(n, na, permutations);
  std::size_t hits = 0;
  if (assignments <= permutations) {
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(na), 1);
    std::size_t evaluated = 0;
    do {
      hits += relabeled_f([&](std::size_t i) { return mask[i] != 0; }) >= cutoff;
      ++evaluated;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    r.permutations = evaluated;
    r.exhaustive = true;
    r.p_value = static_cast<double>(hits) / static_cast<double>(evaluated);
  } else {
    Rng rng(derive_seed(seed, {kTagPermutation}));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<char> mask(n, 0);
    for (std::size_t k = 0; k < permutations; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      std::fill(mask.begin(), mask.end(), 0);
      for (std::size_t i = 0; i < na; ++i) mask[order[i]] = 1;
      hits += relabeled_f([&](std::size_t i) { return mask[i] != 0; }) >= cutoff;
    }
    r.permutations = permutations;
    r.p_value = static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
  }
  return r;
}

EvalReport evaluate(const ScoreSet& s) {
  EvalReport r;
  r.bank_id = s.bank_id;
  r.strategy = s.strategy;
  r.stats = score_stats(s);
  r.d_prime = d_prime(s);
  const auto e = eer(s);
  r.eer = e.eer;
  r.eer_threshold = e.threshold;
  r.genuine_count = s.genuine.size();
  r.impostor_count = s.impostor.size();
  r.roc = roc_points(s);
  return r;
}

ScoreSet collect_scores(std::span<const IrisTemplate> templates, const PairLists& pairs, Strategy strategy,
                        const ShiftRange& range) {
  std::vector<BsifHistogram> hists;
  if (!is_hamming(strategy)) {
    hists.reserve(templates.size());
    for (const auto& t : templates) hists.push_back(histogram(t));
  }
  ScoreSet s;
  s.strategy = strategy;
  s.genuine = score_pairs(templates, hists, pairs.genuine, strategy, range);
  s.impostor = score_pairs(templates, hists, pairs.impostor, strategy, range);
  const auto failed = [](const std::vector<double>& v) {
    return std::count_if(v.begin(), v.end(), [](double x) { return std::isnan(x); });
  };
  const auto bad = failed(s.genuine) + failed(s.impostor);
  if (bad > 0) throw NumericError(std::to_string(bad) + " comparisons could not be scored");
  return s;
}

std::vector<GridCell> grid_search(std::span<const NormalizedIris> images, const PairLists& pairs,
                                  std::span<const NamedBank> banks, std::span<const Strategy> strategies,
                                  const ShiftRange& range) {
  std::vector<GridCell> cells;
  cells.reserve(banks.size() * strategies.size());
  for (const auto& nb : banks) {
    std::vector<IrisTemplate> templates;
    std::string encode_error;
    try {
      templates = encode_batch(images, nb.bank);
    } catch (const Error& e) {
      encode_error = e.what();
    }
    for (Strategy st : strategies) {
      GridCell c;
      c.bank_id = nb.id;
      c.n = nb.bank.count();
      c.l = nb.bank.side();
      c.strategy = st;
      if (!encode_error.empty()) {
        c.error = "encoding failed: " + encode_error;
        cells.push_back(std::move(c));
        continue;
      }
      try {
        auto s = collect_scores(templates, pairs, st, range);
        c.d_prime = d_prime(s);
        const auto e = eer(s);
        c.eer = e.eer;
        c.eer_threshold = e.threshold;
        c.ok = true;
      } catch (const Error& e) {
        c.error = e.what();
      }
      cells.push_back(std::move(c));
    }
  }
  rank_cells(cells);
  return cells;
}

void rank_cells(std::vector<GridCell>& cells) {
  auto strategy_rank = [](Strategy s) {
    return static_cast<int>(std::find(kAllStrategies.begin(), kAllStrategies.end(), s) - kAllStrategies.begin());
  };
  std::sort(cells.begin(), cells.end(), [&](const GridCell& x, const GridCell& y) {
    if (x.ok != y.ok) return x.ok;
    if (x.ok) {
      if (x.d_prime != y.d_prime) return x.d_prime > y.d_prime;
      if (x.eer != y.eer) return x.eer < y.eer;
    }
    if (x.n != y.n) return x.n < y.n;
    if (x.l != y.l) return x.l < y.l;
    if (x.bank_id != y.bank_id) return x.bank_id < y.bank_id;
    return strategy_rank(x.strategy) < strategy_rank(y.strategy);
  });
}

nlohmann::ordered_json to_json(const EvalReport& r, bool include_roc) {
  nlohmann::ordered_json j;
  j["bank"] = r.bank_id;
  j["strategy"] = std::string(to_string(r.strategy));
  j["d_prime"] = r.d_prime;
  j["eer"] = r.eer;
  j["eer_threshold"] = r.eer_threshold;
  j["genuine_count"] = r.genuine_count;
  j["impostor_count"] = r.impostor_count;
  j["genuine_mean"] = r.stats.mean_g;
  j["impostor_mean"] = r.stats.mean_i;
  j["genuine_variance"] = r.stats.var_g;
  j["impostor_variance"] = r.stats.var_i;
  if (include_roc) {
    auto roc = nlohmann::ordered_json::array();
    for (const auto& p : r.roc) roc.push_back({p.threshold, p.far, p.frr});
    j["roc"] = std::move(roc);
  }
  return j;
}

nlohmann::ordered_json to_json(const BoxSummary& b) {
  nlohmann::ordered_json j;
  j["median"] = b.median;
  j["q1"] = b.q1;
  j["q3"] = b.q3;
  j["iqr"] = b.iqr;
  j["lower_fence"] = b.lower_fence;
  j["upper_fence"] = b.upper_fence;
  j["whisker_low"] = b.whisker_low;
  j["whisker_high"] = b.whisker_high;
  j["outliers"] = b.outliers;
  return j;
}

nlohmann::ordered_json to_json(const GridCell& c) {
  nlohmann::ordered_json j;
  j["bank"] = c.bank_id;
  j["n"] = c.n;
  j["l"] = c.l;
  j["strategy"] = std::string(to_string(c.strategy));
  j["ok"] = c.ok;
  if (c.ok) {
    j["d_prime"] = c.d_prime;
    j["eer"] = c.eer;
    j["eer_threshold"] = c.eer_threshold;
  } else {
    j["error"] = c.error;
  }
  return j;
}

}  // namespace bsif
