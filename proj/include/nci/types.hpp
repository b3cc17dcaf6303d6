#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nci {

// Row-major so that one batch item or one embedding row is contiguous.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Scalar = double;
using Matrix = MatrixX<Scalar>;
using RowVector = RowVectorX<Scalar>;

// Vocabulary rows of a compound's left and right constituent.
using IndexPair = std::array<std::size_t, 2>;

// A: NomBank-style arguments. B: PCEDT-style functors.
enum class Taxonomy { A, B };

inline const char* to_string(Taxonomy t) { return t == Taxonomy::A ? "A" : "B"; }
inline Taxonomy other(Taxonomy t) { return t == Taxonomy::A ? Taxonomy::B : Taxonomy::A; }
inline std::size_t column(Taxonomy t) { return t == Taxonomy::A ? 0 : 1; }

Taxonomy parse_taxonomy(const std::string& s);

// Every failure carries the module that raised it. The CLI maps InputError
// to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nci
