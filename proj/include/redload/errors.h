/*
 * Copyright (C) 2026 The redload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef REDLOAD_ERRORS_H_
#define REDLOAD_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace redload {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the trace reader. offset() is the byte offset (binary) or line
// number (text) where the bad record starts.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, uint64_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

class EncodeError : public Error {
 public:
  EncodeError(const std::string& what, uint64_t event_index)
      : Error("event " + std::to_string(event_index) + ": " + what),
        event_index_(event_index) {}
  uint64_t event_index() const { return event_index_; }

 private:
  uint64_t event_index_;
};

// The event stream is well-encoded but violates a semantic rule (unbalanced
// return, overlapping allocation, ...).
class MalformedTraceError : public Error {
 public:
  MalformedTraceError(const std::string& what, uint64_t event_index)
      : Error("malformed trace at event " + std::to_string(event_index) + ": " +
              what),
        event_index_(event_index) {}
  uint64_t event_index() const { return event_index_; }

 private:
  uint64_t event_index_;
};

// A component received an event its current state cannot accept. The
// analyzer rethrows it as MalformedTraceError with the event position.
class StateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A request exceeds what a brute-force component accepts.
class SizeError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace redload

#endif  // REDLOAD_ERRORS_H_
