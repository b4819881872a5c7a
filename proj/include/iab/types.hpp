#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace iab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

// An edge with a chosen direction. `forward` means tail = edge.a, head = edge.b.
struct OrientedEdge {
  EdgeId id = kNoEdge;
  bool forward = true;

  constexpr OrientedEdge reversed() const { return {id, !forward}; }
  constexpr OrientedEdge operator-() const { return reversed(); }
  friend constexpr bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct ConnectivityError : Error {
  using Error::Error;
};

struct NoBoundaryError : Error {
  using Error::Error;
};

struct UnknownVertexError : Error {
  using Error::Error;
};

struct SingularSystemError : Error {
  using Error::Error;
};

struct StepCapError : Error {
  using Error::Error;
};

struct ExtensionCapError : Error {
  using Error::Error;
};

struct IrreducibleError : Error {
  using Error::Error;
};

struct BudgetError : Error {
  using Error::Error;
};

struct OverflowError : Error {
  using Error::Error;
};

}  // namespace iab
