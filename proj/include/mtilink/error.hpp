#pragma once

#include <stdexcept>
#include <string>

namespace mtilink {

enum class Errc {
  // input data
  MalformedRow,
  ConflictingLabel,
  MissingStructure,
  IoError,
  DeserializeError,
  UnsupportedVersion,
  // indices and shapes
  IndexOutOfRange,
  ShapeMismatch,
  UnknownAttributeValue,
  EmptyGraph,
  // SMILES grammar
  UnbalancedParenthesis,
  UnclosedRingBond,
  UnknownAtomSymbol,
  InvalidCharge,
  InvalidBond,
  ValenceUnderflow,
  // sampling and statistics
  TooFewSamples,
  SingleClassDataset,
  InsufficientMissingEntries,
  ZeroDenominator,
  DegreeZero,
  // numerics
  NonFiniteValue,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::ConflictingLabel: return "ConflictingLabel";
    case Errc::MissingStructure: return "MissingStructure";
    case Errc::IoError: return "IoError";
    case Errc::DeserializeError: return "DeserializeError";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::UnknownAttributeValue: return "UnknownAttributeValue";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::UnbalancedParenthesis: return "UnbalancedParenthesis";
    case Errc::UnclosedRingBond: return "UnclosedRingBond";
    case Errc::UnknownAtomSymbol: return "UnknownAtomSymbol";
    case Errc::InvalidCharge: return "InvalidCharge";
    case Errc::InvalidBond: return "InvalidBond";
    case Errc::ValenceUnderflow: return "ValenceUnderflow";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::SingleClassDataset: return "SingleClassDataset";
    case Errc::InsufficientMissingEntries: return "InsufficientMissingEntries";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::DegreeZero: return "DegreeZero";
    case Errc::NonFiniteValue: return "NonFiniteValue";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

  // Numeric failures map to a distinct process exit status.
  bool numeric() const noexcept {
    return code_ == Errc::NonFiniteValue || code_ == Errc::ShapeMismatch ||
           code_ == Errc::ZeroDenominator || code_ == Errc::DegreeZero;
  }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace mtilink
