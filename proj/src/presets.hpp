#pragma once
#include <string>

namespace stcg {

// Bundled model document by name, or nullptr.
const char* preset_text(const std::string& name);

}  // namespace stcg
