#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace lshape {

/// Receives non-fatal warnings (small p, lapsed 1-boundedness, ...). The
/// default sink writes to stderr.
using WarningSink = std::function<void(std::string_view)>;

/// Installs a sink and returns the previous one.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace lshape
