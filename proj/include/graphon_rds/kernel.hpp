#pragma once

// Standard kernels (graphons) on [0,1]^2, distortion maps and the
// transformed kernel built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/quadrature.hpp"

namespace graphon_rds {

inline void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " = " + std::to_string(x) + " is outside [0,1]");
  }
}

/// Two-block kernel: alpha on [0,gamma]^2, beta on (gamma,1]^2, delta elsewhere.
struct BlockParams {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.5;

  [[nodiscard]] constexpr double value(bool x_in_a, bool y_in_a) const {
    if (x_in_a && y_in_a) return alpha;
    if (!x_in_a && !y_in_a) return beta;
    return delta;
  }
  [[nodiscard]] constexpr bool in_a(double x) const { return x <= gamma; }

  /// Probabilities in [0,1] and gamma in (0,1).
  void validate() const {
    for (double p : {alpha, beta, delta}) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("block kernel value outside [0,1]");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("block boundary gamma outside (0,1)");
  }

  /// All four parameters strictly inside (0,1).
  void validate_strict() const {
    for (double p : {alpha, beta, delta, gamma}) {
      if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("block parameters must lie strictly inside (0,1)");
      }
    }
  }

  friend bool operator==(const BlockParams&, const BlockParams&) = default;
};

/// Monotone nondecreasing surjection tau: [0,1] -> [0,1], stored as a
/// piecewise-linear interpolant.
class DistortionMap {
 public:
  enum class Representation { kIdentity, kClosedFormBlock, kNumericCdf };

  static constexpr std::size_t kDefaultGridPoints = 4097;
  static constexpr double kInverseTolerance = 1e-12;

  static DistortionMap identity() {
    return DistortionMap(Representation::kIdentity, {0.0, 1.0}, {0.0, 1.0});
  }

  /// Linear on [0,gamma] and [gamma,1] with tau(gamma) = tau_gamma.
  static DistortionMap block(double gamma, double tau_gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("knot gamma outside (0,1)");
    require_unit(tau_gamma, "tau(gamma)");
    return DistortionMap(Representation::kClosedFormBlock, {0.0, gamma, 1.0},
                         {0.0, tau_gamma, 1.0});
  }

  /// Values of tau at the uniform grid i/(size-1).
  static DistortionMap from_grid_values(std::vector<double> values) {
    if (values.size() < 2) throw DomainError("numeric distortion map needs at least 2 points");
    std::vector<double> xs(values.size());
    const double step = 1.0 / static_cast<double>(values.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) * step;
    xs.back() = 1.0;
    return DistortionMap(Representation::kNumericCdf, std::move(xs), std::move(values));
  }

  /// Piecewise-linear interpolant through arbitrary knots (xs strictly
  /// increasing from 0 to 1).
  static DistortionMap from_knots(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.front() != 0.0 || xs.back() != 1.0) {
      throw DomainError("distortion map knots must span [0,1]");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (!(xs[i] > xs[i - 1])) throw DomainError("distortion map knots must increase");
    }
    return DistortionMap(Representation::kNumericCdf, std::move(xs), std::move(ys), false);
  }

  template <typename F>
  static DistortionMap numeric(F&& tau, std::size_t points = kDefaultGridPoints) {
    std::vector<double> values(points);
    for (std::size_t i = 0; i < points; ++i) {
      values[i] = tau(static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return from_grid_values(std::move(values));
  }

  [[nodiscard]] double operator()(double x) const {
    require_unit(x, "x");
    if (rep_ == Representation::kIdentity) return x;
    const std::size_t j = bracket(x);
    return lerp(j, x);
  }

  /// inf{u : tau(u) = v}.
  [[nodiscard]] double inverse(double v) const {
    require_unit(v, "v");
    if (rep_ == Representation::kIdentity) return v;
    const auto it = std::lower_bound(ys_.begin(), ys_.end(), v);
    const auto j = static_cast<std::size_t>(it - ys_.begin());
    if (j == 0 || ys_[j] == v) return xs_[j];
    double lo = xs_[j - 1];
    double hi = xs_[j];
    if (rep_ == Representation::kClosedFormBlock) {
      const double t = (v - ys_[j - 1]) / (ys_[j] - ys_[j - 1]);
      return std::clamp(lo + t * (hi - lo), lo, hi);
    }
    // tau(lo) < v <= tau(hi) holds on every iteration.
    while (hi - lo > kInverseTolerance) {
      const double mid = 0.5 * (lo + hi);
      if (lerp(j, mid) < v) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  [[nodiscard]] Representation representation() const { return rep_; }
  [[nodiscard]] std::span<const double> knots_x() const { return xs_; }
  [[nodiscard]] std::span<const double> knots_y() const { return ys_; }

 private:
  DistortionMap(Representation rep, std::vector<double> xs, std::vector<double> ys,
                bool uniform_grid = true)
      : rep_(rep), xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) throw DimensionError("distortion map knot mismatch");
    if (ys_.front() != 0.0 || ys_.back() != 1.0) {
      throw DomainError("distortion map must satisfy tau(0)=0 and tau(1)=1");
    }
    for (std::size_t i = 1; i < ys_.size(); ++i) {
      if (ys_[i] < ys_[i - 1]) {
        if (ys_[i - 1] - ys_[i] > 1e-12) throw DomainError("distortion map is not monotone");
        ys_[i] = ys_[i - 1];
      }
      require_unit(ys_[i], "tau value");
    }
    uniform_ = uniform_grid && rep_ == Representation::kNumericCdf;
  }

  // Index j >= 1 with xs_[j-1] <= x <= xs_[j].
  [[nodiscard]] std::size_t bracket(double x) const {
    if (uniform_) {
      const auto cells = static_cast<double>(xs_.size() - 1);
      return std::min<std::size_t>(static_cast<std::size_t>(x * cells) + 1, xs_.size() - 1);
    }
    const auto it = std::upper_bound(xs_.begin() + 1, xs_.end() - 1, x);
    return static_cast<std::size_t>(it - xs_.begin());
  }

  [[nodiscard]] double lerp(std::size_t j, double x) const {
    const double x0 = xs_[j - 1];
    const double x1 = xs_[j];
    const double t = (x - x0) / (x1 - x0);
    return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
  }

  Representation rep_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  bool uniform_ = false;
};

enum class KernelKind { kBlock, kTransformed, kGrid, kCustom };

namespace detail {
struct KernelRepr;
}

/// Symmetric measurable kernel [0,1]^2 -> [0,1]. Immutable, cheap to copy
/// (shared representation) and safe to evaluate concurrently.
class StandardKernel {
 public:
  using Function = std::function<double(double, double)>;

  static StandardKernel block(const BlockParams& params);
  /// Constant kernel; stored as a 1x1 grid.
  static StandardKernel constant(double p);
  /// Piecewise-constant kernel on a size x size uniform grid (row-major values).
  /// The matrix must already be symmetric; see kernel_io for symmetrisation.
  static StandardKernel grid(std::vector<double> values, std::size_t size, double sup_bound);
  /// `fn` must be symmetric with values in [0, sup_bound].
  static StandardKernel custom(Function fn, double sup_bound);
  static StandardKernel transformed(StandardKernel base, DistortionMap map);

  /// Checked evaluation.
  [[nodiscard]] double operator()(double x, double y) const {
    require_unit(x, "x");
    require_unit(y, "y");
    return eval(x, y);
  }

  /// Unchecked evaluation for inner loops; arguments must lie in [0,1].
  [[nodiscard]] double eval(double x, double y) const;

  [[nodiscard]] KernelKind kind() const;
  [[nodiscard]] double sup_bound() const;

  [[nodiscard]] const BlockParams* block_params() const;
  /// Base kernel and map of a transformed kernel; nullptr otherwise.
  [[nodiscard]] const StandardKernel* base() const;
  [[nodiscard]] const DistortionMap* map() const;
  /// Grid side length and values for grid kernels.
  [[nodiscard]] std::size_t grid_size() const;
  [[nodiscard]] std::span<const double> grid_values() const;

 private:
  explicit StandardKernel(std::shared_ptr<const detail::KernelRepr> repr)
      : repr_(std::move(repr)) {}
  std::shared_ptr<const detail::KernelRepr> repr_;
};

namespace detail {

struct BlockRepr {
  BlockParams params;
};

struct GridRepr {
  std::size_t size;
  std::vector<double> values;
  double sup;

  // Cells are (i/size, (i+1)/size], the first one closed at 0, matching the
  // closed lower block of BlockParams.
  [[nodiscard]] std::size_t cell(double x) const {
    const double scaled = std::ceil(x * static_cast<double>(size));
    return scaled <= 1.0 ? 0 : std::min(static_cast<std::size_t>(scaled) - 1, size - 1);
  }
};

struct CustomRepr {
  StandardKernel::Function fn;
  double sup;
};

struct TransformedRepr {
  StandardKernel base;
  DistortionMap map;
};

struct KernelRepr {
  std::variant<BlockRepr, TransformedRepr, GridRepr, CustomRepr> v;
};

}  // namespace detail

inline StandardKernel StandardKernel::block(const BlockParams& params) {
  params.validate();
  return StandardKernel(
      std::make_shared<const detail::KernelRepr>(detail::KernelRepr{detail::BlockRepr{params}}));
}

inline StandardKernel StandardKernel::constant(double p) {
  require_unit(p, "constant kernel value");
  return grid({p}, 1, p > 0.0 ? p : 1.0);
}

inline StandardKernel StandardKernel::grid(std::vector<double> values, std::size_t size,
                                           double sup_bound) {
  if (size == 0 || values.size() != size * size) {
    throw DimensionError("grid kernel needs size*size values");
  }
  if (!(sup_bound > 0.0 && sup_bound <= 1.0)) throw DomainError("sup_bound outside (0,1]");
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double v = values[i * size + j];
      require_unit(v, "grid kernel value");
      if (v > sup_bound) throw DomainError("grid kernel value exceeds declared sup_bound");
      if (v != values[j * size + i]) throw DomainError("grid kernel is not symmetric");
    }
  }
  return StandardKernel(std::make_shared<const detail::KernelRepr>(
      detail::KernelRepr{detail::GridRepr{size, std::move(values), sup_bound}}));
}

inline StandardKernel StandardKernel::custom(Function fn, double sup_bound) {
  if (!fn) throw DomainError("custom kernel needs a function");
  if (!(sup_bound > 0.0 && sup_bound <= 1.0)) throw DomainError("sup_bound outside (0,1]");
  return StandardKernel(std::make_shared<const detail::KernelRepr>(
      detail::KernelRepr{detail::CustomRepr{std::move(fn), sup_bound}}));
}

inline StandardKernel StandardKernel::transformed(StandardKernel base, DistortionMap map) {
  return StandardKernel(std::make_shared<const detail::KernelRepr>(
      detail::KernelRepr{detail::TransformedRepr{std::move(base), std::move(map)}}));
}

inline double StandardKernel::eval(double x, double y) const {
  return std::visit(
      [x, y](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, detail::BlockRepr>) {
          return r.params.value(r.params.in_a(x), r.params.in_a(y));
        } else if constexpr (std::is_same_v<T, detail::GridRepr>) {
          return r.values[r.cell(x) * r.size + r.cell(y)];
        } else if constexpr (std::is_same_v<T, detail::CustomRepr>) {
          return r.fn(x, y);
        } else {
          return r.base.eval(r.map.inverse(x), r.map.inverse(y));
        }
      },
      repr_->v);
}

inline KernelKind StandardKernel::kind() const {
  return static_cast<KernelKind>(repr_->v.index());
}

inline double StandardKernel::sup_bound() const {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, detail::BlockRepr>) {
          return std::max({r.params.alpha, r.params.beta, r.params.delta, 1e-300});
        } else if constexpr (std::is_same_v<T, detail::TransformedRepr>) {
          return r.base.sup_bound();
        } else {
          return r.sup;
        }
      },
      repr_->v);
}

inline const BlockParams* StandardKernel::block_params() const {
  const auto* b = std::get_if<detail::BlockRepr>(&repr_->v);
  return b ? &b->params : nullptr;
}

inline const StandardKernel* StandardKernel::base() const {
  const auto* t = std::get_if<detail::TransformedRepr>(&repr_->v);
  return t ? &t->base : nullptr;
}

inline const DistortionMap* StandardKernel::map() const {
  const auto* t = std::get_if<detail::TransformedRepr>(&repr_->v);
  return t ? &t->map : nullptr;
}

inline std::size_t StandardKernel::grid_size() const {
  const auto* g = std::get_if<detail::GridRepr>(&repr_->v);
  return g ? g->size : 0;
}

inline std::span<const double> StandardKernel::grid_values() const {
  const auto* g = std::get_if<detail::GridRepr>(&repr_->v);
  return g ? std::span<const double>(g->values) : std::span<const double>();
}

/// Piecewise-constant ("step") description of a kernel: cells
/// (breaks[i], breaks[i+1]] with a symmetric value matrix. Block, grid and
/// transforms of either have one; custom kernels do not.
struct StepForm {
  std::vector<double> breaks;  // 0 = b_0 <= b_1 <= ... <= b_m = 1
  std::vector<double> values;  // m x m, row-major

  [[nodiscard]] std::size_t cells() const { return breaks.size() - 1; }
  [[nodiscard]] double width(std::size_t i) const { return breaks[i + 1] - breaks[i]; }
  [[nodiscard]] double value(std::size_t i, std::size_t j) const {
    return values[i * cells() + j];
  }
  /// Cell containing x; the first cell is closed at 0.
  [[nodiscard]] std::size_t cell(double x) const {
    const auto it = std::lower_bound(breaks.begin() + 1, breaks.end() - 1, x);
    return static_cast<std::size_t>(it - breaks.begin()) - 1;
  }
};

inline std::optional<StepForm> step_form(const StandardKernel& k) {
  switch (k.kind()) {
    case KernelKind::kBlock: {
      const auto& p = *k.block_params();
      return StepForm{{0.0, p.gamma, 1.0}, {p.alpha, p.delta, p.delta, p.beta}};
    }
    case KernelKind::kGrid: {
      const std::size_t m = k.grid_size();
      StepForm s;
      s.breaks.resize(m + 1);
      for (std::size_t i = 0; i <= m; ++i) {
        s.breaks[i] = static_cast<double>(i) / static_cast<double>(m);
      }
      const auto v = k.grid_values();
      s.values.assign(v.begin(), v.end());
      return s;
    }
    case KernelKind::kTransformed: {
      auto inner = step_form(*k.base());
      if (!inner) return std::nullopt;
      // tau^{-1}(x) <= b  <=>  x <= tau(b) for continuous nondecreasing tau.
      for (double& b : inner->breaks) b = (*k.map())(b);
      return inner;
    }
    case KernelKind::kCustom:
      break;
  }
  return std::nullopt;
}

/// Block kernels, 1x1 and 2x2 grids, and their transforms as BlockParams.
/// A constant is read as a split at 1/2.
inline std::optional<BlockParams> block_equivalent(const StandardKernel& k) {
  if (const auto* p = k.block_params()) return *p;
  if (k.kind() == KernelKind::kGrid) {
    const auto v = k.grid_values();
    if (k.grid_size() == 1) return BlockParams{v[0], v[0], v[0], 0.5};
    if (k.grid_size() == 2) return BlockParams{v[0], v[3], v[1], 0.5};
    return std::nullopt;
  }
  if (k.kind() == KernelKind::kTransformed) {
    if (auto inner = block_equivalent(*k.base())) {
      inner->gamma = (*k.map())(inner->gamma);
      return inner;
    }
  }
  return std::nullopt;
}

inline StandardKernel transform_kernel(const StandardKernel& base, const DistortionMap& map) {
  return StandardKernel::transformed(base, map);
}

inline double generalized_inverse(const DistortionMap& map, double v) { return map.inverse(v); }

inline double eval_kernel(const StandardKernel& k, double x, double y) { return k(x, y); }

/// d(x) = integral of k(x, y) dy over [0,1].
inline double degree_function(const StandardKernel& k, double x) {
  require_unit(x, "x");
  if (auto s = step_form(k)) {
    const std::size_t i = s->cell(x);
    double d = 0.0;
    for (std::size_t j = 0; j < s->cells(); ++j) d += s->value(i, j) * s->width(j);
    return d;
  }
  return integrate([&](double y) { return k.eval(x, y); }, 0.0, 1.0, 1e-10);
}

/// Positivity of every degree. Exact for step-form kernels; for custom kernels
/// only the grid points i/(grid_size-1) are inspected, so a `true` result is
/// approximate there.
inline bool check_positive(const StandardKernel& k, std::size_t grid_size = 1025) {
  if (grid_size < 2) throw PreconditionError("check_positive needs grid_size >= 2");
  if (auto s = step_form(k)) {
    for (std::size_t i = 0; i < s->cells(); ++i) {
      if (s->width(i) <= 0.0) continue;
      double d = 0.0;
      for (std::size_t j = 0; j < s->cells(); ++j) d += s->value(i, j) * s->width(j);
      if (!(d > 0.0)) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_size - 1);
    if (!(degree_function(k, x) > 0.0)) return false;
  }
  return true;
}

/// Connectedness of a two-block kernel: every splitting set sees positive
/// cross mass exactly when the off-diagonal value is positive.
inline bool check_connected_block(const StandardKernel& k) {
  const auto* p = k.block_params();
  if (p == nullptr) {
    throw UnsupportedKernelError("connectedness is only decidable for block kernels");
  }
  return p->delta > 0.0;
}

}  // namespace graphon_rds
