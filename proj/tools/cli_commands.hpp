#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dynsync/io.hpp"

namespace dynsync::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kIoFailure = 3,
  kEstimatorError = 4,
};

// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

// Manifest written next to every command's outputs.
Json make_manifest(std::string_view command, const Json& config, std::uint64_t seed, int threads,
                   const std::vector<std::string>& outputs);

}  // namespace dynsync::cli
