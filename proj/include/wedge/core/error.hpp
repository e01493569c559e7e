#pragma once

#include <stdexcept>
#include <string>

namespace wedge {

/// Violated precondition on an argument (dimensions, ranges, mode mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A FRAS or NNWT file failed validation while being read.
class CorruptFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weights file holds a different network kind than the one requested.
class KindMismatch : public CorruptFile {
 public:
  using CorruptFile::CorruptFile;
};

/// Thresholded difference image has too few active pixels to fit a contact.
class NoContact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyCloud : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, double learning_rate)
      : std::runtime_error("training diverged (NaN loss) at epoch " + std::to_string(epoch) +
                           " with learning rate " + std::to_string(learning_rate)),
        epoch_(epoch),
        learning_rate_(learning_rate) {}

  int epoch() const noexcept { return epoch_; }
  double learning_rate() const noexcept { return learning_rate_; }

 private:
  int epoch_;
  double learning_rate_;
};

/// Failure inside one stage of the reconstruction pipeline.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace wedge
