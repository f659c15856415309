/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The DRRD Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "drrd/binary_io.hpp"

#include <array>
#include <bit>
#include <istream>
#include <limits>
#include <ostream>

#include "drrd/error.hpp"

namespace drrd {
namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> buf{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
  out.write(buf.data(), buf.size());
}

template <typename U>
U get_le(const std::array<char, sizeof(U)>& buf) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void BinaryWriter::bytes(std::string_view raw) { out_.write(raw.data(), static_cast<std::streamsize>(raw.size())); }
void BinaryWriter::u8(std::uint8_t v) { put_le(out_, v); }
void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v); }
void BinaryWriter::i64(std::int64_t v) { put_le(out_, std::bit_cast<std::uint64_t>(v)); }
void BinaryWriter::f64(double v) { put_le(out_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint32_t>::max()) throw DataError("string too long to serialize");
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s);
}

void BinaryWriter::f64s(std::span<const double> values) {
  for (const double v : values) f64(v);
}

void BinaryReader::read_raw(char* dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) throw DataError(context_ + ": truncated file");
}

std::string BinaryReader::bytes(std::size_t n) {
  std::string s(n, '\0');
  if (n > 0) read_raw(s.data(), n);
  return s;
}

std::uint8_t BinaryReader::u8() {
  std::array<char, 1> buf{};
  read_raw(buf.data(), buf.size());
  return get_le<std::uint8_t>(buf);
}

std::uint32_t BinaryReader::u32() {
  std::array<char, 4> buf{};
  read_raw(buf.data(), buf.size());
  return get_le<std::uint32_t>(buf);
}

std::uint64_t BinaryReader::u64() {
  std::array<char, 8> buf{};
  read_raw(buf.data(), buf.size());
  return get_le<std::uint64_t>(buf);
}

std::int64_t BinaryReader::i64() { return std::bit_cast<std::int64_t>(u64()); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const auto n = u32();
  return bytes(n);
}

void BinaryReader::f64s(std::span<double> out) {
  for (double& v : out) v = f64();
}

void BinaryReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof()) throw DataError(context_ + ": trailing bytes after payload");
}

}  // namespace drrd
