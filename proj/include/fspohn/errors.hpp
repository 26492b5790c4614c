#pragma once

#include <stdexcept>
#include <string>

namespace fspohn {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the documented validity range of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Request exceeds a configured table / size cap.
struct CapacityError : Error {
  using Error::Error;
};

// A truncated sum or integral cannot be certified below tolerance.
struct TruncationError : Error {
  using Error::Error;
};

// Configuration too close to the Weyl-chamber boundary for a stable drift.
struct NearBoundaryError : Error {
  using Error::Error;
};

// A branch whose conditioning degenerates for the given arguments.
struct IllConditionedError : Error {
  using Error::Error;
};

// Sampler failed to produce a valid draw (retry exhaustion etc.).
struct SamplerError : Error {
  using Error::Error;
};

// Not enough effective samples for the requested statistic.
struct StatisticsError : Error {
  using Error::Error;
};

// Non-finite intermediate or out-of-range probability value.
struct NumericError : Error {
  using Error::Error;
};

// Invalid CLI / study configuration.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace fspohn
