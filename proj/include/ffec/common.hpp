#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ffec {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;
using i128 = __int128;

enum class Err : int {
  Ok = 0,
  NotPrime,
  ForbiddenCharacteristic,
  NoIrreducibleFound,
  NotCubeRootOfUnity,
  ZeroPolynomial,
  EvenCharacteristic,
  ConstantModulus,
  NoCubeRootsOfUnity,
  NonMinimalModel,
  IsotrivialCurve,
  NotMordellCurve,
  NotSquarefree,
  NotCoprimeToDiscriminant,
  NotCubefree,
  NotCoprimeToB,
  DegreeMismatch,
  BadPrimeUnsupported,
  BadPrime,
  DegreeDetectionFailed,
  UnsupportedPower,
  EvaluationAtRoot,
  SignSplitUndefined,
  EmptyFamily,
  MethodDisagreement,
  PolicyRequired,
  DegenerateDegree,
  ParseError,
  UnsupportedFeature,
  BadPolynomialLiteral,
  InvalidArgument,
  TooLarge,
  Internal,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err c, const std::string& msg)
      : std::runtime_error(std::string(err_name(c)) + ": " + msg), code_(c) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool ok, Err c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

std::string i128_str(i128 v);

}  // namespace ffec
