#include "cdmacap/params.hpp"

#include "cdmacap/errors.hpp"

namespace cdmacap {

void SystemParams::validate() const {
  if (!(processing_gain > 0.0)) throw ConfigError("processing gain must be positive");
  if (!std::isfinite(sinr_target_db)) throw ConfigError("SINR target must be finite");
  if (!(pole_capacity() > 1.0)) throw ConfigError("pole capacity must exceed 1");
  if (!(desensitivity > 0.0)) throw ConfigError("desensitivity must be positive");
  if (!(power_factor > 0.0)) throw ConfigError("F must be positive or inf");
  if (!(outage_target > 0.0 && outage_target <= 1.0))
    throw ConfigError("outage target must lie in (0, 1]");
  if (!(region_side_m > 0.0) || !(hotspot_side_m > 0.0))
    throw ConfigError("region and hotspot sides must be positive");
  if (!(hotspot_side_m < region_side_m)) throw ConfigError("hotspot must be smaller than the region");
  const double half = region_side_m / 2.0;
  if (hotspot_offset_m - hotspot_side_m / 2.0 < -half || hotspot_offset_m + hotspot_side_m / 2.0 > half ||
      hotspot_side_m / 2.0 > half)
    throw ConfigError("hotspot square must lie inside the region");
  if (!(normalization_distance() > 0.0)) throw ConfigError("d_max must be positive");
  macro_base().validate(height_terminal_m);
  micro_base().validate(height_terminal_m);
}

}  // namespace cdmacap
