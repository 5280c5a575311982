#include "bsif/filtertrain.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "bsif/error.hpp"
#include "bsif/rng.hpp"

namespace bsif {

namespace {

// E[log cosh(z)] for z ~ N(0, 1).
constexpr double kGaussianLogCosh = 0.37456720749143807;

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// (W W^T)^(-1/2) W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace

std::vector<GridPoint> standard_grid() {
  std::vector<GridPoint> grid;
  grid.reserve(kStandardSides.size() * kStandardCounts.size());
  for (int l : kStandardSides)
    for (int n : kStandardCounts) grid.push_back({n, l});
  return grid;
}

void validate(const TrainingConfig& cfg) {
  if (cfg.l < 3 || cfg.l % 2 == 0) throw PreconditionError("filter side l must be odd and >= 3");
  if (cfg.n < 1 || cfg.n > kMaxFilters) throw PreconditionError("filter count n must be in [1, 16]");
  if (cfg.n > cfg.l * cfg.l - 1)
    throw PreconditionError("n = " + std::to_string(cfg.n) + " exceeds l*l - 1 = " + std::to_string(cfg.l * cfg.l - 1));
  if (cfg.max_iterations < 1) throw PreconditionError("max_iterations must be positive");
  if (!(cfg.tolerance > 0)) throw PreconditionError("tolerance must be positive");
}

Eigen::MatrixXd patch_matrix(const PatchSet& patches) {
  const Eigen::Index d = static_cast<Eigen::Index>(patches.side) * patches.side;
  const auto m = static_cast<Eigen::Index>(patches.count());
  Eigen::MatrixXd x(d, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto p = patches.patch(static_cast<std::size_t>(j));
    double mean = 0;
    for (auto v : p) mean += v;
    mean /= static_cast<double>(d);
    for (Eigen::Index i = 0; i < d; ++i) x(i, j) = static_cast<double>(p[static_cast<std::size_t>(i)]) - mean;
  }
  return x;
}

WhiteningBasis::WhiteningBasis(Eigen::MatrixXd samples) : centered_(std::move(samples)) {
  if (centered_.cols() < 2) throw NumericError("at least two patches are needed to estimate a covariance");
  const Eigen::VectorXd mean = centered_.rowwise().mean();
  centered_.colwise() -= mean;
  const Eigen::MatrixXd cov = (centered_ * centered_.transpose()) / static_cast<double>(centered_.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericError("covariance eigen-decomposition failed");
  // Eigen returns ascending order.
  eigenvalues_ = es.eigenvalues().reverse();
  eigenvectors_ = es.eigenvectors().rowwise().reverse();
}

Eigen::MatrixXd WhiteningBasis::whitening(int n) const {
  if (n < 1 || n > dimension()) throw PreconditionError("whitening dimension out of range");
  const double top = eigenvalues_(0);
  if (!(top > 0) || !(eigenvalues_(n - 1) > 1e-12 * top))
    throw NumericError("rank-deficient patch corpus: fewer than " + std::to_string(n) + " usable components");
  Eigen::MatrixXd k = eigenvectors_.leftCols(n).transpose();
  for (int i = 0; i < n; ++i) k.row(i) /= std::sqrt(eigenvalues_(i));
  return k;
}

IcaResult fast_ica(const Eigen::MatrixXd& whitened, Nonlinearity g, int max_iterations, double tolerance,
                   std::uint64_t seed) {
  const Eigen::Index n = whitened.rows();
  const double m = static_cast<double>(whitened.cols());
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = normal(rng);
  w = symmetric_decorrelation(w);

  IcaResult result;
  Eigen::MatrixXd gx(n, whitened.cols());
  Eigen::VectorXd g_prime_mean(n);
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd wx = w * whitened;
    if (g == Nonlinearity::LogCosh) {
      gx = wx.array().tanh().matrix();
      g_prime_mean = (1.0 - gx.array().square()).rowwise().mean().matrix();
    } else {
      gx = wx.array().cube().matrix();
      g_prime_mean = (3.0 * wx.array().square()).rowwise().mean().matrix();
    }
    Eigen::MatrixXd w_next = (gx * whitened.transpose()) / m - g_prime_mean.asDiagonal() * w;
    w_next = symmetric_decorrelation(w_next);
    const double lim = ((w_next * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = std::move(w_next);
    result.iterations = it;
    if (lim < tolerance) {
      result.converged = true;
      break;
    }
  }
  result.unmixing = std::move(w);
  return result;
}

TrainingResult train_filters(const WhiteningBasis& basis, const TrainingConfig& cfg) {
  validate(cfg);
  if (basis.dimension() != cfg.l * cfg.l) throw PreconditionError("patch side does not match the configured l");
  TrainingResult result;
  auto& report = result.report;
  report.patch_count = basis.samples();
  const std::size_t recommended = 10u * static_cast<std::size_t>(cfg.l) * cfg.l;
  if (report.patch_count < recommended)
    report.warnings.push_back("only " + std::to_string(report.patch_count) + " patches for l = " +
                              std::to_string(cfg.l) + " (recommended at least " + std::to_string(recommended) + ")");

  const Eigen::MatrixXd k = basis.whitening(cfg.n);
  const Eigen::MatrixXd z = k * basis.centered();
  const auto seed = derive_seed(cfg.seed, {kTagTraining, static_cast<std::uint64_t>(cfg.n),
                                           static_cast<std::uint64_t>(cfg.l)});
  const IcaResult ica = fast_ica(z, cfg.nonlinearity, cfg.max_iterations, cfg.tolerance, seed);
  report.iterations = ica.iterations;
  report.converged = ica.converged;
  if (!ica.converged) report.warnings.push_back("FastICA did not converge within max_iterations");

  Eigen::MatrixXd filters = ica.unmixing * k;
  // Project out any residual DC left by rounding; the data already lies in the
  // zero-sum subspace so the responses are unchanged.
  for (Eigen::Index i = 0; i < filters.rows(); ++i) filters.row(i).array() -= filters.row(i).mean();

  // Order by non-Gaussianity of the responses (negentropy proxy), strongest
  // first, then flip signs so the largest-magnitude coefficient is positive.
  const Eigen::MatrixXd responses = filters * basis.centered();
  std::vector<double> score(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < responses.cols(); ++j) s += log_cosh(responses(i, j));
    const double dev = s / static_cast<double>(responses.cols()) - kGaussianLogCosh;
    score[static_cast<std::size_t>(i)] = dev * dev;
  }
  std::vector<int> order(static_cast<std::size_t>(cfg.n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });

  const int d = cfg.l * cfg.l;
  std::vector<double> coeffs;
  coeffs.reserve(static_cast<std::size_t>(cfg.n) * d);
  Eigen::MatrixXd ordered(cfg.n, d);
  for (int r = 0; r < cfg.n; ++r) {
    Eigen::RowVectorXd f = filters.row(order[r]);
    Eigen::Index arg = 0;
    f.cwiseAbs().maxCoeff(&arg);
    if (f(arg) < 0) f = -f;
    ordered.row(r) = f;
    for (int c = 0; c < d; ++c) coeffs.push_back(f(c));
  }

  const Eigen::MatrixXd r = ordered * basis.centered();
  const Eigen::MatrixXd cov = (r * r.transpose()) / static_cast<double>(r.cols());
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.n; ++j) {
      if (i == j) report.max_diagonal_deviation = std::max(report.max_diagonal_deviation, std::abs(cov(i, i) - 1.0));
      else report.max_offdiagonal = std::max(report.max_offdiagonal, std::abs(cov(i, j)));
    }

  result.bank = FilterBank(cfg.n, cfg.l, std::move(coeffs),
                           std::string("ica:") + (cfg.nonlinearity == Nonlinearity::LogCosh ? "logcosh" : "cube"));
  return result;
}

TrainingResult train_filters(const PatchSet& patches, const TrainingConfig& cfg) {
  validate(cfg);
  if (patches.side != cfg.l) throw PreconditionError("patch side does not match the configured l");
  auto result = train_filters(WhiteningBasis(patch_matrix(patches)), cfg);
  result.bank.set_provenance("ica:" + to_string(patches.source));
  return result;
}

std::vector<TrainingResult> train_filter_counts(const PatchSet& patches, std::span<const int> counts,
                                                const TrainingConfig& base) {
  for (int n : counts) {
    TrainingConfig cfg = base;
    cfg.n = n;
    cfg.l = patches.side;
    validate(cfg);
  }
  const WhiteningBasis basis(patch_matrix(patches));
  std::vector<TrainingResult> results(counts.size());
  const auto jobs = static_cast<std::ptrdiff_t>(counts.size());
  // Jobs are independent and deterministic; the first failure is rethrown.
  std::vector<std::exception_ptr> errors(counts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < jobs; ++i) {
    try {
      TrainingConfig cfg = base;
      cfg.n = counts[static_cast<std::size_t>(i)];
      cfg.l = patches.side;
      results[i] = train_filters(basis, cfg);
      results[i].bank.set_provenance("ica:" + to_string(patches.source));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::vector<double> filter_dc(const FilterBank& bank) {
  std::vector<double> sums;
  for (int i = 0; i < bank.count(); ++i) {
    const auto f = bank.filter(i);
    sums.push_back(std::accumulate(f.begin(), f.end(), 0.0));
  }
  return sums;
}

}  // namespace bsif
