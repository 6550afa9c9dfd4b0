#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nonlocal/field.hpp"
#include "nonlocal/operator.hpp"

namespace nonlocal {

/// Samples of a periodic function on the lattice (L/N) Z^n mod L, stored
/// row-major with the first axis slowest.
class PeriodicGrid {
 public:
  PeriodicGrid(int n, int pointsPerAxis, double boxLength,
               std::vector<double> values);
  static PeriodicGrid sample(const ScalarField& u, int n, int pointsPerAxis,
                             double boxLength);

  int dimension() const noexcept { return n_; }
  int pointsPerAxis() const noexcept { return N_; }
  double boxLength() const noexcept { return L_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  Vec point(std::size_t index) const;

  double min() const;
  double max() const;
  double oscillation() const { return max() - min(); }
  double mean() const;

  /// The trigonometric interpolant as a cosine sum; modes with amplitude
  /// below `dropBelow` times the largest one are omitted.
  ScalarField interpolant(double dropBelow = 0.0) const;

 private:
  int n_;
  int N_;
  double L_;
  std::vector<double> values_;
};

/// Smooth zero-mean periodic data with oscillation 1: random Fourier modes
/// with |k|_inf <= maxMode and amplitudes decaying like 1/(1+|k|^2).
PeriodicGrid randomSmoothGrid(int n, int pointsPerAxis, double boxLength,
                              std::uint64_t seed, int maxMode = 4);

/// Exact action of I on grid data through its Fourier multiplier.
class SpectralOperator {
 public:
  SpectralOperator(int n, int pointsPerAxis, double boxLength, const Multiplier& m);
  ~SpectralOperator();
  SpectralOperator(const SpectralOperator&) = delete;
  SpectralOperator& operator=(const SpectralOperator&) = delete;

  /// Iu on the grid; `values` must have N^n entries.
  std::vector<double> apply(const std::vector<double>& values) const;
  /// max over grid modes of |m(xi)|.
  double maxSymbol() const noexcept { return maxSymbol_; }
  /// m at the wave vectors of the grid in FFT order.
  const std::vector<double>& symbols() const noexcept { return symbols_; }

 private:
  struct Plans;
  int n_;
  int N_;
  std::vector<double> symbols_;
  double maxSymbol_ = 0.0;
  std::unique_ptr<Plans> plans_;
};

/// Wave vector 2 pi k / L of FFT-ordered multi-index `index`.
Vec waveVector(std::size_t index, int n, int pointsPerAxis, double boxLength);

}  // namespace nonlocal
