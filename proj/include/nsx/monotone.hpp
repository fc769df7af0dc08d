#pragma once

#include "nsx/formula.hpp"
#include "nsx/typecheck.hpp"

namespace nsx {

// Polarity of a formula in one of its free de Bruijn variables (which must
// have type nat).  `Up` means: enlarging the variable can only turn the
// formula from false to true.  The analysis is compositional over the
// connectives with atom-level monotonicity taken from the relation table
// (builtins: le0/lt0; script relations carry declared annotations) and
// term-level monotonicity of the arithmetic primitives.
enum class Polarity { Const, Up, Down, Unknown };

Polarity flip(Polarity p);
Polarity join(Polarity a, Polarity b);

Polarity term_polarity(const TermPtr& t, int depth);
Polarity formula_polarity(const FormulaPtr& f, int depth, const RelTable& rels);

// The syntactic monotonicity certificate used by the monotone collapse: the
// matrix must be upward monotone (or constant) in the collapsed position.
bool monotone_up(const FormulaPtr& matrix, int depth, const RelTable& rels);

}  // namespace nsx
