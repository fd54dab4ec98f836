// include/posm/keyvalue.h

// Copyright 2026  The posm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef POSM_KEYVALUE_H_
#define POSM_KEYVALUE_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace posm {

/// Ordered `key = value` text document. Lines starting with '#' and blank
/// lines are ignored; later duplicates override earlier ones.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string &text, const std::string &origin = "<text>");
  static KeyValueFile load(const std::string &path);

  void set(const std::string &key, const std::string &value);
  void set(const std::string &key, double value);
  void set(const std::string &key, std::int64_t value);
  void set(const std::string &key, std::uint64_t value);

  bool has(const std::string &key) const;
  /// Throws InvalidArgument naming the key when absent or malformed.
  const std::string &get(const std::string &key) const;
  double get_double(const std::string &key) const;
  std::int64_t get_int(const std::string &key) const;
  std::uint64_t get_uint(const std::string &key) const;

  const std::vector<std::pair<std::string, std::string>> &entries() const { return entries_; }

  std::string str() const;
  void save(const std::string &path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_;
};

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

}  // namespace posm

#endif  // POSM_KEYVALUE_H_
