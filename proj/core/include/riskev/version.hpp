#pragma once

#include <string_view>

namespace riskev {

std::string_view version() noexcept;

}  // namespace riskev
