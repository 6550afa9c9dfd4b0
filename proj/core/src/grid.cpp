#include "nonlocal/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>

#include "nonlocal/errors.hpp"

namespace nonlocal {
namespace {

std::size_t gridSize(int n, int N) {
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= static_cast<std::size_t>(N);
  return total;
}

std::vector<int> multiIndex(std::size_t index, int n, int N) {
  std::vector<int> j(static_cast<std::size_t>(n));
  for (int a = n - 1; a >= 0; --a) {
    j[static_cast<std::size_t>(a)] = static_cast<int>(index % static_cast<std::size_t>(N));
    index /= static_cast<std::size_t>(N);
  }
  return j;
}

int signedFrequency(int j, int N) { return j <= N / 2 ? j : j - N; }

// FFTW's planner is not thread-safe.
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> forward(const std::vector<double>& values, int n,
                                          int N) {
  std::vector<std::complex<double>> buf(values.begin(), values.end());
  std::vector<int> dims(static_cast<std::size_t>(n), N);
  fftw_plan plan;
  {
    std::lock_guard lock(plannerMutex());
    plan = fftw_plan_dft(n, dims.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                         reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(plannerMutex());
    fftw_destroy_plan(plan);
  }
  return buf;
}

}  // namespace

Vec waveVector(std::size_t index, int n, int pointsPerAxis, double boxLength) {
  const auto j = multiIndex(index, n, pointsPerAxis);
  Vec xi(n);
  for (int a = 0; a < n; ++a) {
    xi[a] = 2.0 * std::numbers::pi *
            signedFrequency(j[static_cast<std::size_t>(a)], pointsPerAxis) / boxLength;
  }
  return xi;
}

PeriodicGrid::PeriodicGrid(int n, int pointsPerAxis, double boxLength,
                           std::vector<double> values)
    : n_(n), N_(pointsPerAxis), L_(boxLength), values_(std::move(values)) {
  if (n < 1) throw DomainError("grid dimension must be >= 1");
  if (pointsPerAxis < 2) throw DomainError("grid needs at least 2 points per axis");
  if (!(boxLength > 0.0)) throw DomainError("grid box length must be positive");
  if (values_.size() != gridSize(n, pointsPerAxis)) {
    throw DomainError("grid values must have N^n entries");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("grid value is not finite", v);
  }
}

PeriodicGrid PeriodicGrid::sample(const ScalarField& u, int n, int pointsPerAxis,
                                  double boxLength) {
  if (u.dimension() != n) throw DomainError("field dimension does not match grid");
  const std::size_t total = gridSize(n, pointsPerAxis);
  std::vector<double> values(total);
  PeriodicGrid shape(n, pointsPerAxis, boxLength, std::vector<double>(total, 0.0));
  for (std::size_t i = 0; i < total; ++i) values[i] = u(shape.point(i));
  return PeriodicGrid(n, pointsPerAxis, boxLength, std::move(values));
}

Vec PeriodicGrid::point(std::size_t index) const {
  const auto j = multiIndex(index, n_, N_);
  Vec x(n_);
  for (int a = 0; a < n_; ++a) x[a] = j[static_cast<std::size_t>(a)] * L_ / N_;
  return x;
}

double PeriodicGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double PeriodicGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }
double PeriodicGrid::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

ScalarField PeriodicGrid::interpolant(double dropBelow) const {
  const auto hat = forward(values_, n_, N_);
  const double scale = 1.0 / static_cast<double>(values_.size());
  double largest = 0.0;
  for (const auto& c : hat) largest = std::max(largest, std::abs(c));

  std::vector<Vec> freqs;
  std::vector<double> amps;
  std::vector<double> phases;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const auto j = multiIndex(i, n_, N_);
    // Pair k with -k; keep the representative that is lexicographically
    // smaller than its mirror image.
    std::vector<int> mirror(j.size());
    bool selfConjugate = true;
    for (std::size_t a = 0; a < j.size(); ++a) {
      mirror[a] = (N_ - j[a]) % N_;
      selfConjugate = selfConjugate && mirror[a] == j[a];
    }
    if (!selfConjugate && !(j < mirror)) continue;
    const double mag = std::abs(hat[i]);
    if (mag == 0.0 || mag < dropBelow * largest) continue;
    Vec xi(n_);
    for (int a = 0; a < n_; ++a) {
      // Nyquist stays at +N/2 so that cos(xi . x) interpolates (-1)^j.
      const int k = j[static_cast<std::size_t>(a)];
      xi[a] = 2.0 * std::numbers::pi * (k == N_ - k ? k : signedFrequency(k, N_)) / L_;
    }
    freqs.push_back(std::move(xi));
    if (selfConjugate) {
      amps.push_back(hat[i].real() * scale);
      phases.push_back(0.0);
    } else {
      amps.push_back(2.0 * mag * scale);
      phases.push_back(std::arg(hat[i]));
    }
  }
  if (freqs.empty()) return ScalarField::constant(n_, 0.0);
  Mat F(n_, static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t c = 0; c < freqs.size(); ++c) F.col(static_cast<Eigen::Index>(c)) = freqs[c];
  return ScalarField::cosineSum(std::move(F), std::move(amps), std::move(phases));
}

PeriodicGrid randomSmoothGrid(int n, int pointsPerAxis, double boxLength,
                              std::uint64_t seed, int maxMode) {
  if (maxMode < 1 || 2 * maxMode >= pointsPerAxis) {
    throw DomainError("random grid modes must satisfy 1 <= maxMode < N/2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  const int width = 2 * maxMode + 1;
  const std::size_t modes = gridSize(n, width);
  Mat F(n, static_cast<Eigen::Index>(modes));
  std::vector<double> amps(modes);
  std::vector<double> phases(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    const auto j = multiIndex(m, n, width);
    double k2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const int k = j[static_cast<std::size_t>(a)] - maxMode;
      F(a, static_cast<Eigen::Index>(m)) = 2.0 * std::numbers::pi * k / boxLength;
      k2 += static_cast<double>(k) * k;
    }
    amps[m] = k2 == 0.0 ? 0.0 : normal(rng) / (1.0 + k2);
    phases[m] = angle(rng);
  }
  const ScalarField u = ScalarField::cosineSum(std::move(F), std::move(amps), std::move(phases));
  PeriodicGrid raw = PeriodicGrid::sample(u, n, pointsPerAxis, boxLength);
  const double mean = raw.mean();
  const double osc = raw.oscillation();
  if (!(osc > 0.0)) throw DomainError("random grid degenerated to a constant");
  std::vector<double> values = raw.values();
  for (double& v : values) v = (v - mean) / osc;
  return PeriodicGrid(n, pointsPerAxis, boxLength, std::move(values));
}

struct SpectralOperator::Plans {
  std::vector<std::complex<double>> buffer;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

SpectralOperator::SpectralOperator(int n, int pointsPerAxis, double boxLength,
                                   const Multiplier& m)
    : n_(n), N_(pointsPerAxis), plans_(std::make_unique<Plans>()) {
  if (n < 1 || pointsPerAxis < 2 || !(boxLength > 0.0)) {
    throw DomainError("spectral operator needs n >= 1, N >= 2 and L > 0");
  }
  const std::size_t total = gridSize(n, pointsPerAxis);
  symbols_.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    symbols_[i] = m(waveVector(i, n, pointsPerAxis, boxLength));
    maxSymbol_ = std::max(maxSymbol_, std::abs(symbols_[i]));
  }
  plans_->buffer.resize(total);
  std::vector<int> dims(static_cast<std::size_t>(n), pointsPerAxis);
  auto* data = reinterpret_cast<fftw_complex*>(plans_->buffer.data());
  std::lock_guard lock(plannerMutex());
  plans_->forward = fftw_plan_dft(n, dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft(n, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralOperator::~SpectralOperator() {
  std::lock_guard lock(plannerMutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

std::vector<double> SpectralOperator::apply(const std::vector<double>& values) const {
  auto& buf = plans_->buffer;
  if (values.size() != buf.size()) throw DomainError("grid data has the wrong size");
  std::copy(values.begin(), values.end(), buf.begin());
  fftw_execute(plans_->forward);
  const double scale = 1.0 / static_cast<double>(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= symbols_[i] * scale;
  fftw_execute(plans_->backward);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace nonlocal
