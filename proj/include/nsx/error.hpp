#pragma once

#include <stdexcept>
#include <string>

namespace nsx {

// Every diagnostic the toolkit raises derives from Error; `kind()` is a
// stable machine-readable tag used by the CLI and the JSON reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct SyntaxError : Error {
  SyntaxError(size_t pos, const std::string& msg)
      : Error("SyntaxError", "at offset " + std::to_string(pos) + ": " + msg),
        position(pos) {}
  size_t position;
};

struct UnknownConstant : Error {
  explicit UnknownConstant(const std::string& name)
      : Error("UnknownConstant", name) {}
};

struct TypeMismatch : Error {
  explicit TypeMismatch(const std::string& msg) : Error("TypeMismatch", msg) {}
};

struct UnboundVariable : Error {
  explicit UnboundVariable(const std::string& name)
      : Error("UnboundVariable", name) {}
};

struct FuelExhausted : Error {
  explicit FuelExhausted(const std::string& msg)
      : Error("FuelExhausted", msg) {}
};

struct UnsupportedConnective : Error {
  explicit UnsupportedConnective(const std::string& msg)
      : Error("UnsupportedConnective", msg) {}
};

struct PatternMismatch : Error {
  explicit PatternMismatch(const std::string& msg)
      : Error("PatternMismatch", msg) {}
};

struct NonInternalMatrix : Error {
  explicit NonInternalMatrix(const std::string& msg)
      : Error("NonInternalMatrix", msg) {}
};

struct NonInternalParts : Error {
  explicit NonInternalParts(const std::string& msg)
      : Error("NonInternalParts", msg) {}
};

struct MonotonicityNotEstablished : Error {
  explicit MonotonicityNotEstablished(const std::string& msg)
      : Error("MonotonicityNotEstablished", msg) {}
};

struct PremiseMismatch : Error {
  explicit PremiseMismatch(const std::string& msg)
      : Error("PremiseMismatch", msg) {}
};

struct UnsupportedType : Error {
  explicit UnsupportedType(const std::string& msg)
      : Error("UnsupportedType", msg) {}
};

struct StepMismatch : Error {
  StepMismatch(int step, const std::string& msg)
      : Error("StepMismatch", "step " + std::to_string(step) + ": " + msg) {}
};

struct TaintedWitness : Error {
  explicit TaintedWitness(const std::string& msg)
      : Error("TaintedWitness", msg) {}
};

struct CertificateMissing : Error {
  explicit CertificateMissing(const std::string& msg)
      : Error("CertificateMissing", msg) {}
};

struct GoalShapeMismatch : Error {
  explicit GoalShapeMismatch(const std::string& msg)
      : Error("GoalShapeMismatch", msg) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg)
      : Error("ShapeMismatch", msg) {}
};

struct InvalidPartition : Error {
  explicit InvalidPartition(const std::string& msg)
      : Error("InvalidPartition", msg) {}
};

struct OracleFailure : Error {
  explicit OracleFailure(const std::string& msg)
      : Error("OracleFailure", msg) {}
};

struct ScriptError : Error {
  explicit ScriptError(const std::string& msg) : Error("ScriptError", msg) {}
};

}  // namespace nsx
