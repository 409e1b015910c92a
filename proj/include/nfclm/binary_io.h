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

#ifndef NFCLM_BINARY_IO_H_
#define NFCLM_BINARY_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace nfclm {

// Little-endian fixed-width encoder shared by every binary component format.
class ByteWriter {
 public:
  void PutU32(uint32_t v);
  void PutI32(int32_t v) { PutU32(static_cast<uint32_t>(v)); }
  void PutU64(uint64_t v);
  void PutF64(double v);
  void PutBytes(std::string_view bytes) { out_.append(bytes); }
  void PutString(std::string_view s);

  const std::string& bytes() const { return out_; }
  std::string Release() { return std::move(out_); }

 private:
  std::string out_;
};

// Decoder counterpart. Every failure throws Error(kMalformedData) carrying the
// byte offset at which decoding stopped.
class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  uint32_t GetU32();
  int32_t GetI32() { return static_cast<int32_t>(GetU32()); }
  uint64_t GetU64();
  double GetF64();
  std::string GetString();
  // Checks a fixed magic tag followed by a u32 version.
  void ExpectHeader(std::string_view magic, uint32_t version);

  size_t offset() const { return offset_; }
  bool AtEnd() const { return offset_ == data_.size(); }
  void ExpectEnd();
  [[noreturn]] void Fail(const std::string& what) const;

 private:
  std::string_view Take(size_t n);

  std::string_view data_;
  size_t offset_ = 0;
};

}  // namespace nfclm

#endif  // NFCLM_BINARY_IO_H_
