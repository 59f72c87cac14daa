#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lanekeep {

struct ArchitectureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Forward cache does not belong to the parameters it is used with.
struct CacheError : std::logic_error {
  using std::logic_error::logic_error;
};

// Non-finite gradient, loss or network output during training.
struct TrainingDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrackError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EpisodeFinished : std::logic_error {
  using std::logic_error::logic_error;
};

struct FormatError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConnectionError : std::runtime_error {
  ConnectionError(const std::string& what, int attempts_made)
      : std::runtime_error(what), attempts(attempts_made) {}
  int attempts;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " at byte " + std::to_string(byte_offset)),
        offset_(byte_offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace lanekeep
