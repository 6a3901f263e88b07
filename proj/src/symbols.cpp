#include "symbols.hpp"

#include <cctype>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "error.hpp"

namespace stcg {

namespace {

struct Table {
    std::shared_mutex mu;
    std::deque<SymbolInfo> infos;
    std::unordered_map<std::string, SymId> by_name;
};

Table& table() {
    static Table t;
    return t;
}

}  // namespace

SymId intern_symbol(const std::string& name, bool real) {
    Table& t = table();
    {
        std::shared_lock lk(t.mu);
        auto it = t.by_name.find(name);
        if (it != t.by_name.end()) {
            if (t.infos[it->second].real != real)
                fail(ErrorKind::Validation, "symbol '" + name + "' redeclared with different realness");
            return it->second;
        }
    }
    std::unique_lock lk(t.mu);
    auto it = t.by_name.find(name);
    if (it != t.by_name.end()) {
        if (t.infos[it->second].real != real)
            fail(ErrorKind::Validation, "symbol '" + name + "' redeclared with different realness");
        return it->second;
    }
    SymId id = static_cast<SymId>(t.infos.size());
    t.infos.push_back(SymbolInfo{name, real});
    t.by_name.emplace(name, id);
    return id;
}

std::optional<SymId> find_symbol(const std::string& name) {
    Table& t = table();
    std::shared_lock lk(t.mu);
    auto it = t.by_name.find(name);
    if (it == t.by_name.end()) return std::nullopt;
    return it->second;
}

const SymbolInfo& symbol_info(SymId id) {
    Table& t = table();
    std::shared_lock lk(t.mu);
    return t.infos.at(id);
}

SymId sym_tau() {
    static const SymId id = intern_symbol("tau");
    return id;
}
SymId sym_t() {
    static const SymId id = intern_symbol("t");
    return id;
}
SymId sym_eps() {
    static const SymId id = intern_symbol("eps_reg");
    return id;
}
SymId sym_delta() {
    static const SymId id = intern_symbol("delta_shift");
    return id;
}

bool is_reserved_name(const std::string& name) {
    return name == "i" || name == "f" || name == "conj" || name == "exp" || name == "pi" || name == "eps_reg";
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace stcg
