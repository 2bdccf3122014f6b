#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace verilocal {

enum class ErrorCode {
  Parse,
  Disconnected,
  SelfLoop,
  DuplicateEdge,
  BadNodeId,
  BadSupport,
  DimensionMismatch,
  NonPositiveMagnitude,
  InvalidModel,
  MixedGraphs,
  TooLarge,
  InternalUnbounded,
  CycleDetected,
  NotOptimal,
  CapExceeded,
  BudgetExceeded,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::BadNodeId: return "BadNodeId";
    case ErrorCode::BadSupport: return "BadSupport";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPositiveMagnitude: return "NonPositiveMagnitude";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::MixedGraphs: return "MixedGraphs";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InternalUnbounded: return "InternalUnbounded";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::NotOptimal: return "NotOptimal";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
  }
  return "Unknown";
}

/** Base exception for every failure raised by the library. */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/** Raised by validate_graph when the undirected skeleton has more than one component. */
class DisconnectedGraph : public Error {
 public:
  explicit DisconnectedGraph(std::vector<std::vector<int>> components)
      : Error(ErrorCode::Disconnected, describe(components)), components_(std::move(components)) {}

  const std::vector<std::vector<int>>& components() const noexcept { return components_; }

 private:
  static std::string describe(const std::vector<std::vector<int>>& components) {
    std::string out = "graph has " + std::to_string(components.size()) + " components:";
    for (const auto& comp : components) {
      out += " {";
      for (std::size_t k = 0; k < comp.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(comp[k]);
      }
      out += "}";
    }
    return out;
  }

  std::vector<std::vector<int>> components_;
};

}  // namespace verilocal
