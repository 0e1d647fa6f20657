#ifndef PINCHLAB_ERRORS_HPP
#define PINCHLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pinchlab {

// Every failure the library raises carries a stable kind tag; the CLI maps
// kinds to exit codes (input 2 / symbolic 3 / numeric 4).
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

// Input/validation failures (exit 2).
inline Error schema_error(const std::string& m) { return Error("SchemaError", m); }
inline Error shape_error(const std::string& m) { return Error("ShapeError", m); }
inline Error symbol_error(const std::string& m) { return Error("SymbolError", m); }
inline Error expr_error(const std::string& m) { return Error("ExprError", m); }
inline Error validation_error(const std::string& m) { return Error("ValidationError", m); }

// Symbolic failures (exit 3).
inline Error division_error(const std::string& m) { return Error("DivisionError", m); }
inline Error mixed_radicand(const std::string& m) { return Error("MixedRadicand", m); }
inline Error inconsistent_system(const std::string& m) { return Error("InconsistentSystem", m); }
inline Error unsupported_pinch(const std::string& m) { return Error("UnsupportedPinch", m); }
inline Error not_finite(const std::string& m) { return Error("NotFinite", m); }
inline Error degenerate_gram(const std::string& m) { return Error("DegenerateGram", m); }
inline Error normal_form_failure(const std::string& m) { return Error("NormalFormFailure", m); }
inline Error reduction_error(const std::string& m) { return Error("ReductionError", m); }

// Numeric failures (exit 4).
inline Error pole_at_point(const std::string& m) { return Error("PoleAtPoint", m); }
inline Error contour_ambiguous(const std::string& m) { return Error("ContourAmbiguous", m); }
inline Error not_positive_definite(const std::string& m) { return Error("NotPositiveDefinite", m); }
inline Error non_convergent(const std::string& m) { return Error("NonConvergent", m); }
inline Error insufficient_samples(const std::string& m) { return Error("InsufficientSamples", m); }
inline Error degenerate_samples(const std::string& m) { return Error("DegenerateSamples", m); }

} // namespace pinchlab

#endif
