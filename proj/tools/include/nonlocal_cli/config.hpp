#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nonlocal/field.hpp"
#include "nonlocal/measure.hpp"
#include "nonlocal/rigidity.hpp"

namespace nonlocal::cli {

using Json = nlohmann::json;

/// An invalid configuration value; `path` is the JSON pointer of the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Typed access to one JSON object of the config. Missing optional keys are
/// written back with their default so the object ends up fully resolved.
class Section {
 public:
  Section(Json& node, std::string path);

  const std::string& path() const noexcept { return path_; }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const;

  Section child(const std::string& key);
  /// Creates an empty object when the key is missing.
  Section childOrEmpty(const std::string& key);
  Json& raw(const std::string& key);
  /// Writes `value` when the key is missing.
  void setDefault(const std::string& key, Json value);

  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  long integer(const std::string& key, std::optional<long> fallback = std::nullopt);
  std::uint64_t unsignedInteger(const std::string& key,
                                std::optional<std::uint64_t> fallback = std::nullopt);
  std::string text(const std::string& key,
                   std::optional<std::string> fallback = std::nullopt);
  Vec vector(const std::string& key, std::optional<int> size = std::nullopt);
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = std::nullopt);
  Mat matrix(const std::string& key, int rows, int cols);

  /// Throws ConfigError at `key` unless `ok`.
  void require(bool ok, const std::string& key, const std::string& message) const;

 private:
  Json* node_;
  std::string path_;
};

/// Top-level keys shared by every command.
struct Common {
  int dimension = 0;
  FractionalOrder s{0.5};
  std::uint64_t seed = 0;
  Tolerance tol;
};

Common parseCommon(Section& root);
SpectralMeasure parseMeasure(Section node, int n);
/// Field families: affine, constant, quadratic, cosine, cosineSum, purePower,
/// barrier, sum, translated, rotated; an optional "growth" object
/// {K, kappa} re-declares the growth bound.
ScalarField parseField(Section node, int n, FractionalOrder s, std::uint64_t seed);
Nonlinearity parseNonlinearity(Section node);

}  // namespace nonlocal::cli
