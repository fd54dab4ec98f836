// src/keyvalue.cc

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

#include "posm/keyvalue.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "posm/types.h"

namespace posm {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

KeyValueFile KeyValueFile::parse(const std::string &text, const std::string &origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": empty key");
    kv.set(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void KeyValueFile::set(const std::string &key, const std::string &value) {
  for (auto &e : entries_)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void KeyValueFile::set(const std::string &key, double value) { set(key, format_double(value)); }
void KeyValueFile::set(const std::string &key, std::int64_t value) {
  set(key, std::to_string(value));
}
void KeyValueFile::set(const std::string &key, std::uint64_t value) {
  set(key, std::to_string(value));
}

bool KeyValueFile::has(const std::string &key) const {
  for (const auto &e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string &KeyValueFile::get(const std::string &key) const {
  for (const auto &e : entries_)
    if (e.first == key) return e.second;
  throw InvalidArgument(origin_ + ": missing key '" + key + "'");
}

double KeyValueFile::get_double(const std::string &key) const {
  const std::string &v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  throw InvalidArgument(origin_ + ": key '" + key + "' is not a number: " + v);
}

std::int64_t KeyValueFile::get_int(const std::string &key) const {
  const std::string &v = get(key);
  try {
    std::size_t used = 0;
    const long long d = std::stoll(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  throw InvalidArgument(origin_ + ": key '" + key + "' is not an integer: " + v);
}

std::uint64_t KeyValueFile::get_uint(const std::string &key) const {
  const std::string &v = get(key);
  try {
    std::size_t used = 0;
    const unsigned long long d = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return d;
  } catch (const std::exception &) {
  }
  throw InvalidArgument(origin_ + ": key '" + key + "' is not an unsigned integer: " + v);
}

std::string KeyValueFile::str() const {
  std::string out;
  for (const auto &e : entries_) out += e.first + " = " + e.second + "\n";
  return out;
}

void KeyValueFile::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << str();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace posm
