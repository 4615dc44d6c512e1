#pragma once

#include <stdexcept>
#include <string>

namespace mhl {

enum class Errc {
  UnknownId,           // requested id is not live in any cluster
  MismatchedClones,    // clones disagree on their constraint lists
  LastLeaf,            // attempt to remove the only leaf of a cluster
  EmptyGeneration,     // generator returned no hypotheses for a leaf
  ZeroMass,            // generator returned only zero probabilities
  InvalidProbability,  // negative or non-finite hypothesis probability
  SingularCovariance,  // innovation covariance is not positive definite
  SizeGuard,           // explicit enumeration exceeded its configured bound
  InvalidConfig,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::UnknownId: return "UnknownId";
    case Errc::MismatchedClones: return "MismatchedClones";
    case Errc::LastLeaf: return "LastLeaf";
    case Errc::EmptyGeneration: return "EmptyGeneration";
    case Errc::ZeroMass: return "ZeroMass";
    case Errc::InvalidProbability: return "InvalidProbability";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::SizeGuard: return "SizeGuard";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mhl
