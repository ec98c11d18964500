#pragma once

// JSON kernel specifications:
//   {"kind":"block","alpha":..,"beta":..,"delta":..,"gamma":..}
//   {"kind":"grid","values":[[..],..],"sup":..}
//   {"kind":"constant","p":..}

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "graphon_rds/errors.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/rng.hpp"

namespace graphon_rds {

inline constexpr double kSymmetryWarnThreshold = 1e-12;

/// Grid matrices are replaced by (M + M^T)/2; a warning goes to `warn` when the
/// input was asymmetric by more than 1e-12.
inline StandardKernel kernel_from_json(const nlohmann::json& j, std::ostream& warn = std::clog) {
  if (!j.is_object() || !j.contains("kind")) throw FormatError("kernel spec needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "block") {
      BlockParams p{j.at("alpha").get<double>(), j.at("beta").get<double>(),
                    j.at("delta").get<double>(), j.at("gamma").get<double>()};
      return StandardKernel::block(p);
    }
    if (kind == "constant") return StandardKernel::constant(j.at("p").get<double>());
    if (kind == "grid") {
      const auto& rows = j.at("values");
      const std::size_t m = rows.size();
      if (m == 0) throw FormatError("grid kernel has no rows");
      std::vector<double> raw(m * m);
      for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].size() != m) throw FormatError("grid kernel must be square");
        for (std::size_t c = 0; c < m; ++c) raw[i * m + c] = rows[i][c].get<double>();
      }
      double asym = 0.0;
      std::vector<double> sym(m * m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < m; ++c) {
          asym = std::max(asym, std::abs(raw[i * m + c] - raw[c * m + i]));
          sym[i * m + c] = 0.5 * (raw[i * m + c] + raw[c * m + i]);
        }
      }
      if (asym > kSymmetryWarnThreshold) {
        warn << "warning: grid kernel asymmetric by " << asym << "; symmetrised\n";
      }
      double sup = 0.0;
      if (j.contains("sup")) {
        sup = j.at("sup").get<double>();
      } else {
        throw FormatError("grid kernel must declare \"sup\"");
      }
      return StandardKernel::grid(std::move(sym), m, sup);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("kernel spec: ") + e.what());
  }
  throw FormatError("unknown kernel kind \"" + kind + "\"");
}

/// Inverse of kernel_from_json for block and grid kernels. Custom and
/// transformed kernels are described but cannot be reloaded.
inline nlohmann::json kernel_to_json(const StandardKernel& k) {
  switch (k.kind()) {
    case KernelKind::kBlock: {
      const auto& p = *k.block_params();
      return {{"kind", "block"}, {"alpha", p.alpha}, {"beta", p.beta},
              {"delta", p.delta}, {"gamma", p.gamma}};
    }
    case KernelKind::kGrid: {
      const std::size_t m = k.grid_size();
      const auto v = k.grid_values();
      if (m == 1) return {{"kind", "constant"}, {"p", v[0]}};
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < m; ++i) {
        rows.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i * m),
                                           v.begin() + static_cast<std::ptrdiff_t>((i + 1) * m)));
      }
      return {{"kind", "grid"}, {"values", rows}, {"sup", k.sup_bound()}};
    }
    case KernelKind::kTransformed:
      return {{"kind", "transformed"}, {"base", kernel_to_json(*k.base())}};
    case KernelKind::kCustom:
      break;
  }
  return {{"kind", "custom"}, {"sup", k.sup_bound()}};
}

/// Stable identifier used in trace headers and manifests.
inline std::uint64_t kernel_hash(const StandardKernel& k) {
  return fnv1a64(kernel_to_json(k).dump());
}

}  // namespace graphon_rds
