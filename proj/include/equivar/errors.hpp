#pragma once

#include <stdexcept>
#include <string>

namespace equivar {

// Base of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct UnknownName : Error { using Error::Error; };
struct NotCritical : Error { using Error::Error; };
struct DegenerateTransversal : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };

}  // namespace equivar
