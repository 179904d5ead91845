#ifndef MEDMAP_ERRORS_H_
#define MEDMAP_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medmap {

// Base class for every error the library raises. Callers that only care
// about "contract violation vs. I/O" can catch the two subclasses below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (records, tables, config values).
class ContractError : public Error {
 public:
  using Error::Error;
};

// A record-oriented input failed validation. `line()` is 1-based; 0 means
// the record did not come from a file.
class RecordError : public ContractError {
 public:
  RecordError(const std::string& source, std::size_t line,
               const std::string& what)
      : ContractError(Format(source, line, what)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& source, std::size_t line,
                            const std::string& what) {
    std::string out = source.empty() ? std::string("record") : source;
    if (line != 0) out += ":" + std::to_string(line);
    return out + ": " + what;
  }

  std::size_t line_;
};

// Inconsistent configuration, e.g. language mismatch between document,
// variant generator and knowledge source.
class ConfigError : public ContractError {
 public:
  using ContractError::ContractError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace medmap

#endif  // MEDMAP_ERRORS_H_
