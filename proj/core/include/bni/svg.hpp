#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bni/discovery.hpp"
#include "bni/simgen.hpp"

namespace bni {

// One box per (scenario, method) showing the quartiles of AB, whiskers at
// 1.5 IQR clipped to the data, for a single effect kind.
void write_ab_boxplot_svg(std::ostream& out, const std::vector<AbRow>& rows, EffectKind kind,
                          const std::string& title);

// Coefficient with CI per covariate; significant rows drawn in a darker colour.
void write_forest_svg(std::ostream& out, const DiscoveryReport& report);

}  // namespace bni
