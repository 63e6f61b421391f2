#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rdnet/info/dataset.hpp"
#include "rdnet/io/topology.hpp"

namespace rdnet::io {

// Dataset manifest:
//   {
//     "format_version": 1,
//     "sample_count": 512,
//     "columns": [["A", 1, 0], ..., "label:A"],
//     "dtype": "float32" | "int32",        // neuron columns; labels are int32
//     "storage": "matrix.bin",             // relative to the manifest
//     "storage_format": "binary" | "csv"   // optional, inferred from extension
//   }
// Binary storage is row-major little-endian with four bytes per cell. CSV
// storage has one row per sample, comma separated, no header.

using ColumnKey = info::Var;

enum class StorageFormat { binary, csv };
enum class NeuronDtype { float32, int32 };

struct DatasetManifest {
  std::size_t sample_count = 0;
  std::vector<ColumnKey> columns;
  NeuronDtype dtype = NeuronDtype::float32;
  std::string storage;
  StorageFormat format = StorageFormat::binary;
};

inline json column_to_json(const ColumnKey& c) {
  return c.is_label() ? json("label:" + c.task) : to_json(c.vertex);
}

inline ColumnKey column_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.rfind("label:", 0) != 0 || s.size() == 6) throw ParseError("column name must be 'label:<task>', got " + s);
    return info::Var::label(s.substr(6));
  }
  return info::Var::neuron(vertex_id_from_json(j));
}

inline json manifest_to_json(const DatasetManifest& m) {
  json cols = json::array();
  for (const auto& c : m.columns) cols.push_back(column_to_json(c));
  return json{{"format_version", kFormatVersion},
              {"sample_count", m.sample_count},
              {"columns", cols},
              {"dtype", m.dtype == NeuronDtype::float32 ? "float32" : "int32"},
              {"storage", m.storage},
              {"storage_format", m.format == StorageFormat::binary ? "binary" : "csv"}};
}

inline DatasetManifest manifest_from_json(const json& doc) {
  DatasetManifest m;
  try {
    if (doc.at("format_version") != kFormatVersion) throw ParseError("unsupported manifest format_version");
    m.sample_count = doc.at("sample_count").get<std::size_t>();
    for (const auto& c : doc.at("columns")) m.columns.push_back(column_from_json(c));
    const auto dtype = doc.value("dtype", std::string("float32"));
    if (dtype == "float32")
      m.dtype = NeuronDtype::float32;
    else if (dtype == "int32")
      m.dtype = NeuronDtype::int32;
    else
      throw ParseError("unknown dtype '" + dtype + "'");
    m.storage = doc.at("storage").get<std::string>();
    std::string fmt = doc.value("storage_format", std::string());
    if (fmt.empty()) fmt = std::filesystem::path(m.storage).extension() == ".csv" ? "csv" : "binary";
    if (fmt == "binary")
      m.format = StorageFormat::binary;
    else if (fmt == "csv")
      m.format = StorageFormat::csv;
    else
      throw ParseError("unknown storage_format '" + fmt + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed dataset manifest: ") + e.what());
  }
  if (m.sample_count == 0) throw ParseError("sample_count must be positive");
  if (info::VarSet(m.columns.begin(), m.columns.end()).size() != m.columns.size())
    throw ParseError("manifest lists a column twice");
  return m;
}

namespace detail {

inline std::uint32_t load_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_le32(std::uint32_t v, std::string& out) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
}

}  // namespace detail

/// Parses the sample matrix into columns; cells come back as doubles with
/// label cells holding exact int32 values.
inline info::ActivationDataset assemble_dataset(const DatasetManifest& m, const std::vector<std::vector<double>>& cols) {
  info::ActivationDataset ds(m.sample_count);
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    const auto& key = m.columns[c];
    if (key.is_label()) {
      std::vector<std::int32_t> labels(cols[c].begin(), cols[c].end());
      ds.add_label(key.task, std::move(labels));
    } else {
      ds.add_neuron(key.vertex, cols[c]);
    }
  }
  return ds;
}

inline info::ActivationDataset load_dataset(const std::filesystem::path& manifest_path) {
  const DatasetManifest m = manifest_from_json(read_json(manifest_path));
  const auto storage = manifest_path.parent_path() / m.storage;
  const std::size_t width = m.columns.size();
  std::vector<std::vector<double>> cols(width, std::vector<double>(m.sample_count));

  if (m.format == StorageFormat::binary) {
    const std::string bytes = read_text(storage);
    if (bytes.size() != 4 * width * m.sample_count)
      throw DataError(storage.string() + ": expected " + std::to_string(4 * width * m.sample_count) + " bytes, found " +
                      std::to_string(bytes.size()));
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t r = 0; r < m.sample_count; ++r)
      for (std::size_t c = 0; c < width; ++c, p += 4) {
        const std::uint32_t bits = detail::load_le32(p);
        if (m.columns[c].is_label() || m.dtype == NeuronDtype::int32)
          cols[c][r] = static_cast<double>(std::bit_cast<std::int32_t>(bits));
        else
          cols[c][r] = static_cast<double>(std::bit_cast<float>(bits));
      }
  } else {
    std::istringstream in(read_text(storage));
    std::string line;
    std::size_t r = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      if (r >= m.sample_count) throw DataError(storage.string() + ": more rows than sample_count");
      std::istringstream row(line);
      std::string cell;
      std::size_t c = 0;
      while (std::getline(row, cell, ',')) {
        if (c >= width) throw DataError(storage.string() + ": row " + std::to_string(r) + " is too wide");
        try {
          std::size_t used = 0;
          cols[c][r] = std::stod(cell, &used);
        } catch (const std::exception&) {
          throw DataError(storage.string() + ": bad cell '" + cell + "' at row " + std::to_string(r));
        }
        const bool integral = m.columns[c].is_label() || m.dtype == NeuronDtype::int32;
        if (integral && cols[c][r] != static_cast<double>(static_cast<std::int32_t>(cols[c][r])))
          throw DataError(storage.string() + ": cell is not an int32 at row " + std::to_string(r));
        if (!integral) cols[c][r] = static_cast<double>(static_cast<float>(cols[c][r]));
        ++c;
      }
      if (c != width) throw DataError(storage.string() + ": row " + std::to_string(r) + " has " + std::to_string(c) +
                                      " cells, expected " + std::to_string(width));
      ++r;
    }
    if (r != m.sample_count) throw DataError(storage.string() + ": found " + std::to_string(r) + " rows, expected " +
                                             std::to_string(m.sample_count));
  }
  return assemble_dataset(m, cols);
}

/// Writes `manifest_path` plus its matrix next to it. Neuron cells are stored
/// as float32, labels as int32.
inline void save_dataset(const std::filesystem::path& manifest_path, const info::ActivationDataset& data,
                         StorageFormat format = StorageFormat::binary) {
  DatasetManifest m;
  m.sample_count = data.sample_count();
  for (const auto& [id, col] : data.neuron_columns()) m.columns.push_back(info::Var::neuron(id));
  for (const auto& [task, col] : data.label_columns()) m.columns.push_back(info::Var::label(task));
  m.format = format;
  m.storage = manifest_path.stem().string() + (format == StorageFormat::binary ? ".bin" : ".csv");

  std::string body;
  for (std::size_t r = 0; r < m.sample_count; ++r) {
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
      const auto& key = m.columns[c];
      if (format == StorageFormat::binary) {
        if (key.is_label())
          detail::store_le32(std::bit_cast<std::uint32_t>(data.label(key.task)[r]), body);
        else
          detail::store_le32(std::bit_cast<std::uint32_t>(static_cast<float>(data.neuron(key.vertex)[r])), body);
      } else {
        if (c) body += ',';
        if (key.is_label()) {
          body += std::to_string(data.label(key.task)[r]);
        } else {
          char buf[64];
          auto res = std::to_chars(buf, buf + sizeof buf, static_cast<float>(data.neuron(key.vertex)[r]));
          body.append(buf, res.ptr);
        }
      }
    }
    if (format == StorageFormat::csv) body += '\n';
  }
  write_atomic(manifest_path.parent_path() / m.storage, body);
  write_atomic(manifest_path, manifest_to_json(m).dump(2) + "\n");
}

}  // namespace rdnet::io
