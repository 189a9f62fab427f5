#pragma once

#include <stdexcept>
#include <string>

namespace webkg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration values; surfaced as exit code 1 by the CLI.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed dataset, store, or replay files; exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

// Transport or protocol failure talking to an external model/service; exit code 3.
class BackendError : public Error {
public:
    using Error::Error;
};

}  // namespace webkg
