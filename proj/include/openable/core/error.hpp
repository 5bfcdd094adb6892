#pragma once

#include <stdexcept>
#include <string>

namespace openable {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NoPlaneFound : public Error {
 public:
  using Error::Error;
};

/// Missing file, malformed header, bad pose. Carries the offending frame when known.
class LoadError : public Error {
 public:
  explicit LoadError(const std::string& what, std::string frame_id = {})
      : Error(what), frame_id_(std::move(frame_id)) {}
  const std::string& frame_id() const { return frame_id_; }

 private:
  std::string frame_id_;
};

/// Interchange decoding failure; record_index is -1 when not tied to a record.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, int record_index = -1)
      : Error(what), record_index_(record_index) {}
  int record_index() const { return record_index_; }

 private:
  int record_index_;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class UnwrapError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

class ImportError : public Error {
 public:
  using Error::Error;
};

}  // namespace openable
