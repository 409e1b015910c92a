// Copyright 2026 The NFCLM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nfclm/binary_io.h"

#include <bit>
#include <cstring>

#include "nfclm/error.h"

namespace nfclm {

void ByteWriter::PutU32(uint32_t v) {
  for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::PutU64(uint64_t v) {
  for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::PutF64(double v) { PutU64(std::bit_cast<uint64_t>(v)); }

void ByteWriter::PutString(std::string_view s) {
  PutU32(static_cast<uint32_t>(s.size()));
  out_.append(s);
}

std::string_view ByteReader::Take(size_t n) {
  if (data_.size() - offset_ < n) {
    Fail("unexpected end of data (need " + std::to_string(n) + " bytes)");
  }
  std::string_view out = data_.substr(offset_, n);
  offset_ += n;
  return out;
}

uint32_t ByteReader::GetU32() {
  std::string_view b = Take(4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
  return v;
}

uint64_t ByteReader::GetU64() {
  std::string_view b = Take(8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
  return v;
}

double ByteReader::GetF64() { return std::bit_cast<double>(GetU64()); }

std::string ByteReader::GetString() {
  uint32_t n = GetU32();
  return std::string(Take(n));
}

void ByteReader::ExpectHeader(std::string_view magic, uint32_t version) {
  if (data_.size() - offset_ < magic.size() ||
      data_.substr(offset_, magic.size()) != magic) {
    Fail("bad magic, expected '" + std::string(magic) + "'");
  }
  offset_ += magic.size();
  size_t at = offset_;
  uint32_t got = GetU32();
  if (got != version) {
    throw Error(ErrorKind::kVersionMismatch,
                "format version " + std::to_string(got) + " at byte offset " +
                    std::to_string(at) + ", expected " + std::to_string(version));
  }
}

void ByteReader::ExpectEnd() {
  if (!AtEnd()) Fail("trailing bytes");
}

void ByteReader::Fail(const std::string& what) const {
  throw Error(ErrorKind::kMalformedData,
              what + " at byte offset " + std::to_string(offset_));
}

}  // namespace nfclm
