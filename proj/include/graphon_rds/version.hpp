#pragma once

#define GRAPHON_RDS_VERSION "0.1.0"

namespace graphon_rds {
inline constexpr const char* kVersion = GRAPHON_RDS_VERSION;
}
