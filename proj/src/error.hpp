#pragma once

#include <stdexcept>
#include <string>

namespace headgate {

// Error taxonomy shared by the core and the C API. The CLI maps these onto
// its exit codes, so additions here need a corresponding HG_* status.
enum class Err {
    NotFound,     // an input file or entry does not exist
    Io,           // the OS failed a read/write we expected to succeed
    Format,       // a file exists but its content violates its format
    Config,       // a configuration value is invalid or inconsistent
    Credentials,  // a required secret could not be resolved
    Judge,        // the judge gave up (transport or malformed replies)
    Eval,         // an evaluation run had to abort
    Invalid,      // bad argument at an API boundary
};

class HgError : public std::runtime_error {
  public:
    HgError(Err code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Err code() const { return code_; }

  private:
    Err code_;
};

}  // namespace headgate
