#pragma once

#include <string>

#include "taskui/llm/provider.hpp"

namespace taskui {

// Instructions and response format for one request kind.
std::string system_prompt(RequestKind kind);
// The request as the model sees it.
std::string user_message(const ProviderRequest& r);

}  // namespace taskui
