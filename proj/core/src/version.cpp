#include "riskev/version.hpp"

namespace riskev {

std::string_view version() noexcept { return RISKEV_VERSION; }

}  // namespace riskev
