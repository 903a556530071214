#pragma once

#include <stdexcept>
#include <string>

namespace cabfare {

/// Root of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in HTTP bodies and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string const& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  std::string const& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CABFARE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(std::string const& message) : Error(#Name, message) {} \
  }

// geo / input validation
CABFARE_DEFINE_ERROR(InvalidInput);

// routing
CABFARE_DEFINE_ERROR(RouteNotFound);
CABFARE_DEFINE_ERROR(ProviderUnavailable);

// fare engine
CABFARE_DEFINE_ERROR(InvalidRoute);
CABFARE_DEFINE_ERROR(InvalidScheme);
CABFARE_DEFINE_ERROR(RangeInverted);
CABFARE_DEFINE_ERROR(CurrencyMismatch);

// historical estimator
CABFARE_DEFINE_ERROR(UnreadableSource);
CABFARE_DEFINE_ERROR(EmptyDataset);
CABFARE_DEFINE_ERROR(NoDataInVicinity);

// comparison / persistence
CABFARE_DEFINE_ERROR(StorageFailure);

// experiment analysis
CABFARE_DEFINE_ERROR(DegenerateSeries);
CABFARE_DEFINE_ERROR(ZeroActual);
CABFARE_DEFINE_ERROR(ZeroDenominator);
CABFARE_DEFINE_ERROR(MismatchedJourney);
CABFARE_DEFINE_ERROR(EmptyTrajectory);

// configuration
CABFARE_DEFINE_ERROR(ConfigError);
CABFARE_DEFINE_ERROR(UnknownCity);

#undef CABFARE_DEFINE_ERROR

}  // namespace cabfare
