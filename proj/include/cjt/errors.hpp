// errors.hpp — exception types shared by the cjt library and CLI

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cjt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameters. `path` names the offending field
// ("model.n_sites", "sweep.points", ...) when one is known.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// A numerical procedure failed to produce a trustworthy result.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Some boson energy (local Delta_j or collective Delta_n) is not positive.
class UnstableBath : public SolverError {
 public:
  UnstableBath(std::string what_kind, int index, double energy)
      : SolverError("unstable bath: " + what_kind + " energy " + std::to_string(energy) +
                    " at index " + std::to_string(index) + " is not positive"),
        index_(index),
        energy_(energy) {}

  int index() const noexcept { return index_; }
  double energy() const noexcept { return energy_; }

 private:
  int index_;
  double energy_;
};

// Truncated Hilbert space larger than the configured cap.
class DimensionError : public Error {
 public:
  DimensionError(std::size_t requested, std::size_t cap)
      : Error("Hilbert space dimension " + std::to_string(requested) + " exceeds cap " +
              std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

}  // namespace cjt
