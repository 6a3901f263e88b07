#pragma once
#include <cstdint>
#include <optional>
#include <string>

namespace stcg {

using SymId = std::uint32_t;

struct SymbolInfo {
    std::string name;
    bool real = true;
};

// Process-wide interning table. Names are unique; realness is fixed at first use.
SymId intern_symbol(const std::string& name, bool real = true);
std::optional<SymId> find_symbol(const std::string& name);
const SymbolInfo& symbol_info(SymId id);
inline const std::string& symbol_name(SymId id) { return symbol_info(id).name; }

// Symbols with fixed meaning.
SymId sym_tau();
SymId sym_t();
SymId sym_eps();    // internal singular regulator
SymId sym_delta();  // ramp regulator

bool is_reserved_name(const std::string& name);
bool is_identifier(const std::string& s);

}  // namespace stcg
