#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edgegen {

using UserId = std::size_t;
using Rng = std::mt19937_64;

// Error hierarchy. Every failure surfaced by the library derives from Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Link with zero or negative capacity; content cannot be delivered.
class UnservableLink : public Error {
public:
    using Error::Error;
};

// Decision oracle replied with something other than "local"/"offload".
class OracleProtocolError : public Error {
public:
    using Error::Error;
};

// Network failure or timeout while talking to a remote oracle.
class TransportError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class Decision { local, offload };
enum class TaskType { regular, quality_preferred };

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(TaskType t) noexcept;
Decision parse_decision(std::string_view text);
TaskType parse_task_type(std::string_view text);

// Independent random stream derived from (seed, stream). Streams with the same
// seed but different ids do not share state, so one consumer drawing more
// numbers never shifts another consumer's sequence.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t placement = 1;
inline constexpr std::uint64_t tasks = 2;
inline constexpr std::uint64_t policy = 3;
}  // namespace streams

}  // namespace edgegen
