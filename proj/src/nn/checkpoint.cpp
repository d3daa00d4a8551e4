// Copyright 2026 The pano360 Authors
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

#include "nn/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace pano360::nn {

namespace {

constexpr char kMagic[8] = {'P', '3', '6', '0', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_str(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw DataError("checkpoint truncated");
  return v;
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw DataError("checkpoint truncated");
  return v;
}

std::string read_str(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  if (n > (1u << 20)) throw DataError("checkpoint string too long");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw DataError("checkpoint truncated");
  return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open for write: " + tmp);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
      write_str(os, k);
      write_str(os, v);
    }
    write_u32(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, blob] : ckpt.tensors) {
      write_str(os, name);
      const unsigned char dtype = static_cast<unsigned char>(blob.dtype);
      os.write(reinterpret_cast<const char*>(&dtype), 1);
      write_u32(os, static_cast<std::uint32_t>(blob.shape.size()));
      for (int d : blob.shape) write_u32(os, static_cast<std::uint32_t>(d));
      write_u64(os, blob.bytes.size());
      os.write(reinterpret_cast<const char*>(blob.bytes.data()),
               static_cast<std::streamsize>(blob.bytes.size()));
    }
    if (!os) throw DataError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DataError("atomic rename failed: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + path);
  if (read_u32(is) != kVersion) throw DataError("unsupported checkpoint version: " + path);

  Checkpoint ckpt;
  const std::uint32_t n_meta = read_u32(is);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = read_str(is);
    ckpt.meta[k] = read_str(is);
  }
  const std::uint32_t n_tensors = read_u32(is);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = read_str(is);
    CheckpointBlob blob;
    unsigned char dtype = 0;
    is.read(reinterpret_cast<char*>(&dtype), 1);
    if (!is || dtype > 1) throw DataError("bad tensor dtype in checkpoint: " + path);
    blob.dtype = dtype;
    const std::uint32_t ndim = read_u32(is);
    if (ndim > 8) throw DataError("bad tensor rank in checkpoint: " + path);
    blob.shape.resize(ndim);
    for (std::uint32_t d = 0; d < ndim; ++d) blob.shape[d] = static_cast<int>(read_u32(is));
    const std::uint64_t nbytes = read_u64(is);
    const std::size_t expect = blob.numel() * (blob.dtype == 0 ? 4 : 8);
    if (nbytes != expect) throw DataError("tensor byte-size mismatch in checkpoint: " + name);
    blob.bytes.resize(nbytes);
    is.read(reinterpret_cast<char*>(blob.bytes.data()), static_cast<std::streamsize>(nbytes));
    if (!is) throw DataError("checkpoint truncated: " + path);
    ckpt.tensors[name] = std::move(blob);
  }
  return ckpt;
}

}  // namespace pano360::nn
