#include "nonlocal_cli/config.hpp"

#include <cmath>
#include <limits>

#include "nonlocal/barrier.hpp"
#include "nonlocal/errors.hpp"

namespace nonlocal::cli {
namespace {

std::string describe(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::boolean: return "a boolean";
    case Json::value_t::string: return "a string";
    case Json::value_t::array: return "an array";
    case Json::value_t::object: return "an object";
    default: return "a number";
  }
}

// Wraps library validation errors so they point at the config object.
template <typename F>
auto within(const Section& node, F&& build) {
  try {
    return build();
  } catch (const DomainError& e) {
    throw ConfigError(node.path(), e.what());
  }
}

double finiteNumber(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number, got " + describe(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

}  // namespace

ConfigError::ConfigError(const std::string& path, const std::string& message)
    : std::runtime_error("config " + (path.empty() ? std::string("/") : path) + ": " +
                         message),
      path_(path) {}

Section::Section(Json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node_->is_object()) {
    throw ConfigError(path_, "expected an object, got " + describe(*node_));
  }
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

Json& Section::raw(const std::string& key) {
  if (!has(key)) throw ConfigError(at(key), "required key is missing");
  return (*node_)[key];
}

void Section::setDefault(const std::string& key, Json value) {
  if (!has(key)) (*node_)[key] = std::move(value);
}

Section Section::child(const std::string& key) { return Section(raw(key), at(key)); }

Section Section::childOrEmpty(const std::string& key) {
  if (!has(key)) (*node_)[key] = Json::object();
  return child(key);
}

double Section::number(const std::string& key, std::optional<double> fallback) {
  if (!has(key) && fallback) (*node_)[key] = *fallback;
  return finiteNumber(raw(key), at(key));
}

long Section::integer(const std::string& key, std::optional<long> fallback) {
  if (!has(key) && fallback) (*node_)[key] = *fallback;
  const Json& j = raw(key);
  if (!j.is_number_integer()) {
    throw ConfigError(at(key), "expected an integer, got " + describe(j));
  }
  return j.get<long>();
}

std::uint64_t Section::unsignedInteger(const std::string& key,
                                       std::optional<std::uint64_t> fallback) {
  if (!has(key) && fallback) (*node_)[key] = *fallback;
  const Json& j = raw(key);
  if (!j.is_number_unsigned()) {
    throw ConfigError(at(key), "expected a nonnegative integer, got " + describe(j));
  }
  return j.get<std::uint64_t>();
}

std::string Section::text(const std::string& key, std::optional<std::string> fallback) {
  if (!has(key) && fallback) (*node_)[key] = *fallback;
  const Json& j = raw(key);
  if (!j.is_string()) throw ConfigError(at(key), "expected a string, got " + describe(j));
  return j.get<std::string>();
}

Vec Section::vector(const std::string& key, std::optional<int> size) {
  const Json& j = raw(key);
  if (!j.is_array()) throw ConfigError(at(key), "expected an array, got " + describe(j));
  if (size && static_cast<int>(j.size()) != *size) {
    throw ConfigError(at(key), "expected " + std::to_string(*size) + " entries, got " +
                                   std::to_string(j.size()));
  }
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = finiteNumber(j[i], at(key) + "/" + std::to_string(i));
  }
  return out;
}

std::vector<double> Section::numbers(const std::string& key,
                                     std::optional<std::vector<double>> fallback) {
  if (!has(key) && fallback) (*node_)[key] = *fallback;
  const Vec v = vector(key);
  return {v.begin(), v.end()};
}

Mat Section::matrix(const std::string& key, int rows, int cols) {
  const Json& j = raw(key);
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw ConfigError(at(key), "expected an array of " + std::to_string(rows) + " rows");
  }
  Mat out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string rowPath = at(key) + "/" + std::to_string(i);
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ConfigError(rowPath, "expected " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      out(i, c) = finiteNumber(row[static_cast<std::size_t>(c)], rowPath + "/" + std::to_string(c));
    }
  }
  return out;
}

void Section::require(bool ok, const std::string& key, const std::string& message) const {
  if (!ok) throw ConfigError(at(key), message);
}

Common parseCommon(Section& root) {
  Common c;
  const long n = root.integer("dimension");
  root.require(n >= 1 && n <= 64, "dimension", "must be an integer in [1, 64]");
  c.dimension = static_cast<int>(n);
  const double s = root.number("s");
  root.require(s > 0.0 && s < 1.0, "s", "must lie in (0, 1)");
  c.s = FractionalOrder(s);
  c.seed = root.unsignedInteger("seed", 0);
  Section tol = root.childOrEmpty("tolerance");
  c.tol.absTol = tol.number("abs", 1e-9);
  tol.require(c.tol.absTol > 0.0, "abs", "must be > 0");
  c.tol.relTol = tol.number("rel", 1e-9);
  tol.require(c.tol.relTol >= 0.0, "rel", "must be >= 0");
  return c;
}

SpectralMeasure parseMeasure(Section node, int n) {
  const std::string family = node.text("family");
  if (family == "atomic") {
    const Json& atoms = node.raw("atoms");
    if (!atoms.is_array()) throw ConfigError(node.at("atoms"), "expected an array");
    std::vector<Atom> list;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      Section a(node.raw("atoms")[i], node.at("atoms") + "/" + std::to_string(i));
      const Vec d = a.vector("direction", n);
      const double w = a.number("weight");
      a.require(w > 0.0, "weight", "must be > 0");
      list.push_back(within(a, [&] { return Atom{Direction(d), w}; }));
    }
    return within(node, [&] { return SpectralMeasure::atomic(n, std::move(list)); });
  }
  if (family == "uniform") {
    const double mass = node.number("mass", 1.0);
    node.require(mass > 0.0, "mass", "must be > 0");
    const long res = node.integer("resolution", 0);
    node.require(res >= 0, "resolution", "must be >= 0");
    return within(node, [&] { return SpectralMeasure::uniform(n, mass, static_cast<int>(res)); });
  }
  if (family == "density") {
    Section k = node.child("kernel");
    const std::string type = k.text("type");
    DensityKernel kernel;
    if (type == "constant") {
      kernel = ConstantKernel{k.number("value")};
    } else if (type == "axial") {
      kernel = AxialKernel{k.vector("axis", n), k.number("strength")};
    } else if (type == "tabulated") {
      kernel = TabulatedKernel{k.numbers("values")};
    } else {
      throw ConfigError(k.at("type"), "unknown kernel type '" + type +
                                          "' (constant, axial, tabulated)");
    }
    const long res = node.integer("resolution", 0);
    node.require(res >= 0, "resolution", "must be >= 0");
    return within(node, [&] {
      return SpectralMeasure::density(n, std::move(kernel), static_cast<int>(res));
    });
  }
  throw ConfigError(node.at("family"),
                    "unknown measure family '" + family + "' (atomic, uniform, density)");
}

ScalarField parseField(Section node, int n, FractionalOrder s, std::uint64_t seed) {
  const std::string family = node.text("family");
  auto build = [&]() -> ScalarField {
    if (family == "affine") {
      const Vec slope = node.vector("slope", n);
      return ScalarField::affine(slope, node.number("offset", 0.0));
    }
    if (family == "constant") return ScalarField::constant(n, node.number("value"));
    if (family == "quadratic") return ScalarField::quadratic(node.matrix("matrix", n, n));
    if (family == "cosine") {
      const Vec k = node.vector("frequency", n);
      const double a = node.number("amplitude", 1.0);
      return ScalarField::cosine(k, a, node.number("phase", 0.0));
    }
    if (family == "cosineSum") {
      Json& modes = node.raw("modes");
      if (!modes.is_array() || modes.empty()) {
        throw ConfigError(node.at("modes"), "expected a nonempty array");
      }
      Mat k(n, static_cast<Eigen::Index>(modes.size()));
      std::vector<double> amps;
      std::vector<double> phases;
      for (std::size_t i = 0; i < modes.size(); ++i) {
        Section m(modes[i], node.at("modes") + "/" + std::to_string(i));
        k.col(static_cast<Eigen::Index>(i)) = m.vector("frequency", n);
        amps.push_back(m.number("amplitude", 1.0));
        phases.push_back(m.number("phase", 0.0));
      }
      return ScalarField::cosineSum(k, amps, phases);
    }
    if (family == "purePower") {
      const double g = node.number("gamma");
      node.require(g > 0.0, "gamma", "must be > 0");
      return ScalarField::purePower(n, g);
    }
    if (family == "barrier") {
      const double g = node.number("gamma");
      node.require(g > 0.0 && g < s.order(), "gamma",
                   "barrier exponent must satisfy γ ∈ (0, 2s)");
      return buildBarrier(g, s, n).field();
    }
    if (family == "sum") {
      Json& terms = node.raw("terms");
      if (!terms.is_array() || terms.empty()) {
        throw ConfigError(node.at("terms"), "expected a nonempty array");
      }
      std::vector<ScalarField::Term> list;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        Section t(terms[i], node.at("terms") + "/" + std::to_string(i));
        const double w = t.number("weight", 1.0);
        list.push_back({w, parseField(t.child("field"), n, s, seed)});
      }
      return ScalarField::sum(std::move(list));
    }
    if (family == "translated") {
      const Vec shift = node.vector("shift", n);
      return parseField(node.child("field"), n, s, seed).translated(shift);
    }
    if (family == "rotated") {
      const Mat Q = node.matrix("matrix", n, n);
      return parseField(node.child("field"), n, s, seed).rotated(Q);
    }
    throw ConfigError(node.at("family"),
                      "unknown field family '" + family +
                          "' (affine, constant, quadratic, cosine, cosineSum, purePower, "
                          "barrier, sum, translated, rotated)");
  };
  ScalarField u = within(node, build);
  if (node.has("growth")) {
    Section g = node.child("growth");
    const double K = g.number("K");
    g.require(K >= 0.0, "K", "must be >= 0");
    const double kappa = g.number("kappa");
    g.require(kappa >= 0.0, "kappa", "must be >= 0");
    u = within(g, [&] { return u.withGrowth({K, kappa}, seed); });
  }
  return u;
}

Nonlinearity parseNonlinearity(Section node) {
  const std::string family = node.text("family");
  return within(node, [&] {
    if (family == "zero") return Nonlinearity::zero();
    if (family == "linear") {
      const double slope = node.number("slope");
      return Nonlinearity::linear(slope, node.number("offset", 0.0));
    }
    if (family == "cubic") return Nonlinearity::cubic(node.number("coefficient", 1.0));
    if (family == "arctan") return Nonlinearity::arctan(node.number("scale", 1.0));
    if (family == "piecewiseLinear") {
      Json& knots = node.raw("knots");
      if (!knots.is_array()) throw ConfigError(node.at("knots"), "expected an array");
      std::vector<std::pair<double, double>> list;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        const std::string path = node.at("knots") + "/" + std::to_string(i);
        if (!knots[i].is_array() || knots[i].size() != 2) {
          throw ConfigError(path, "expected an [x, y] pair");
        }
        list.emplace_back(finiteNumber(knots[i][0], path + "/0"),
                          finiteNumber(knots[i][1], path + "/1"));
      }
      return Nonlinearity::piecewiseLinear(std::move(list));
    }
    throw ConfigError(node.at("family"),
                      "unknown nonlinearity family '" + family +
                          "' (zero, linear, cubic, arctan, piecewiseLinear)");
  });
}

}  // namespace nonlocal::cli
