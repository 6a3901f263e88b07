#pragma once
#include <complex>
#include <string>
#include <unordered_map>

#include "error.hpp"
#include "symbols.hpp"

namespace stcg {

class Assignment {
public:
    void set(SymId s, std::complex<double> v) { v_[s] = v; }
    void set(const std::string& name, std::complex<double> v) { v_[intern_symbol(name, symbol_real_or_default(name))] = v; }
    bool has(SymId s) const { return v_.count(s) != 0; }
    std::complex<double> get(SymId s) const {
        auto it = v_.find(s);
        if (it == v_.end()) fail(ErrorKind::UnresolvedSymbol, "no value for symbol '" + symbol_name(s) + "'");
        return it->second;
    }
    void erase(SymId s) { v_.erase(s); }
    const std::unordered_map<SymId, std::complex<double>>& values() const { return v_; }

private:
    static bool symbol_real_or_default(const std::string& name) {
        auto id = find_symbol(name);
        return id ? symbol_info(*id).real : true;
    }
    std::unordered_map<SymId, std::complex<double>> v_;
};

}  // namespace stcg
