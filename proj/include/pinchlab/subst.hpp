#ifndef PINCHLAB_SUBST_HPP
#define PINCHLAB_SUBST_HPP

#include <map>

#include "pinchlab/quadext.hpp"

namespace pinchlab {

// Substitute scalars (not just polynomials) for symbols. Symbols absent from
// the map stay symbolic. Complements Poly::subs/RatFunc::subs, which only
// accept polynomial replacements.
RatFunc subst_scalar(const Poly& p, const std::map<Sym, RatFunc>& repl);
RatFunc subst_scalar(const RatFunc& f, const std::map<Sym, RatFunc>& repl);
QuadExt subst_scalar(const Poly& p, const std::map<Sym, QuadExt>& repl);
QuadExt subst_scalar(const RatFunc& f, const std::map<Sym, QuadExt>& repl);

} // namespace pinchlab

#endif
