#ifndef PINCHLAB_SYMBOLS_HPP
#define PINCHLAB_SYMBOLS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pinchlab {

// Interned kinematic symbols. Ids are assigned in registration order and that
// order is the variable order of the graded-lex monomial order, so reading a
// diagram file deterministically fixes every canonical polynomial form
// derived from it.
using Sym = std::uint32_t;

Sym intern_symbol(const std::string& name);
const std::string& symbol_name(Sym s);
bool symbol_known(const std::string& name);
Sym lookup_symbol(const std::string& name); // throws SymbolError if unknown
std::size_t symbol_count();

// Test-only: forget all registrations (unit tests isolate their tables).
void reset_symbols_for_tests();

} // namespace pinchlab

#endif
