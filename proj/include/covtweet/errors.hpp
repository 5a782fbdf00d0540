#pragma once

#include <stdexcept>
#include <string>

namespace covtweet {

// Malformed input files, inconsistent datasets, bad lexicons.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or shape mismatches inside numerical routines.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covtweet
