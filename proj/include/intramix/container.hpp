// Copyright 2026 The IntraMix Lab Authors.
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

#ifndef INTRAMIX_CONTAINER_HPP_
#define INTRAMIX_CONTAINER_HPP_

// Dataset container: a directory holding
//
//   meta.json     {"num_nodes": N, "feature_dim": F, "num_classes": C}
//   features.csv  N lines of F comma-separated decimals
//   edges.tsv     one undirected edge per line, "src<TAB>dst", src < dst
//   labels.csv    N lines "node_id,label" (label blank when unknown)
//   splits.json   {"train": [...], "validation": [...], "test": [...]}
//
// Writers emit shortest round-trip decimals, edges sorted, labels in node
// order, so a container is its own canonical serialization.

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "intramix/dataset.hpp"
#include "intramix/graph.hpp"

namespace intramix {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t line, std::string field, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) +
                           (field.empty() ? "" : " [" + field + "]") + ": " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

namespace detail {

inline void append_double(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  return res.ec == std::errc() && res.ptr == last;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.filename().string(), 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Lines without terminators; a trailing newline does not yield an empty line.
inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line number
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ParseError(name, line, "", e.what());
  }
}

template <typename T>
T json_count(const nlohmann::json& j, const std::string& file, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned()) {
    throw ParseError(file, 1, key, "missing or not a non-negative integer");
  }
  return j[key].get<T>();
}

}  // namespace detail

inline std::string serialize_meta(const Dataset& d) {
  nlohmann::ordered_json meta;
  meta["num_nodes"] = d.table.num_nodes();
  meta["feature_dim"] = d.table.feature_dim();
  meta["num_classes"] = d.table.num_classes;
  return meta.dump(2) + "\n";
}

inline std::string serialize_features(const Matrix& features) {
  std::string out;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
      if (d) out.push_back(',');
      detail::append_double(out, features(i, d));
    }
    out.push_back('\n');
  }
  return out;
}

inline std::string serialize_edges(const Graph& g) {
  std::string out;
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u);
    out.push_back('\t');
    out += std::to_string(e.v);
    out.push_back('\n');
  }
  return out;
}

inline std::string serialize_labels(const NodeTable& t) {
  std::string out;
  for (NodeId i = 0; i < t.num_nodes(); ++i) {
    out += std::to_string(i);
    out.push_back(',');
    if (t.labels[i]) out += std::to_string(*t.labels[i]);
    out.push_back('\n');
  }
  return out;
}

inline std::string serialize_splits(const SplitMasks& s) {
  nlohmann::ordered_json j;
  j["train"] = s.train;
  j["validation"] = s.validation;
  j["test"] = s.test;
  return j.dump() + "\n";
}

inline void save_container(const std::filesystem::path& dir, const Dataset& d) {
  d.table.validate();
  d.split.validate(d.table.num_nodes());
  if (d.graph.num_nodes() != d.table.num_nodes()) {
    throw std::invalid_argument("save_container: graph and table node counts differ");
  }
  std::filesystem::create_directories(dir);
  detail::write_file(dir / "meta.json", serialize_meta(d));
  detail::write_file(dir / "features.csv", serialize_features(d.table.features));
  detail::write_file(dir / "edges.tsv", serialize_edges(d.graph));
  detail::write_file(dir / "labels.csv", serialize_labels(d.table));
  detail::write_file(dir / "splits.json", serialize_splits(d.split));
}

/// Loads a container. Labeled nodes become gold, the rest unlabeled.
inline Dataset load_container(const std::filesystem::path& dir) {
  using detail::parse_number;
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError(dir.string(), 0, "", "not a container directory");
  }

  const auto meta = detail::parse_json_file(dir / "meta.json");
  const auto n = detail::json_count<std::size_t>(meta, "meta.json", "num_nodes");
  const auto f = detail::json_count<std::size_t>(meta, "meta.json", "feature_dim");
  const auto c = detail::json_count<int>(meta, "meta.json", "num_classes");
  if (c <= 0) throw ParseError("meta.json", 1, "num_classes", "must be positive");

  Dataset d;
  d.table.num_classes = c;
  d.table.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));

  {
    const std::string text = detail::read_file(dir / "features.csv");
    const auto lines = detail::lines_of(text);
    if (lines.size() != n) {
      throw ParseError("features.csv", lines.size() + 1, "",
                       "expected " + std::to_string(n) + " rows, found " +
                           std::to_string(lines.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto fields = detail::split_fields(lines[i], ',');
      if (fields.size() != f) {
        throw ParseError("features.csv", i + 1, "",
                         "expected " + std::to_string(f) + " values, found " +
                             std::to_string(fields.size()));
      }
      for (std::size_t k = 0; k < f; ++k) {
        double v = 0.0;
        if (!parse_number(fields[k], v)) {
          throw ParseError("features.csv", i + 1, "column " + std::to_string(k),
                           "not a decimal number: '" + std::string(fields[k]) + "'");
        }
        d.table.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
      }
    }
  }

  {
    const std::string text = detail::read_file(dir / "edges.tsv");
    const auto lines = detail::lines_of(text);
    std::vector<Edge> edges;
    edges.reserve(lines.size());
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const auto fields = detail::split_fields(lines[li], '\t');
      if (fields.size() != 2) {
        throw ParseError("edges.tsv", li + 1, "", "expected 'src<TAB>dst'");
      }
      NodeId u = 0;
      NodeId v = 0;
      if (!parse_number(fields[0], u)) throw ParseError("edges.tsv", li + 1, "src", "bad index");
      if (!parse_number(fields[1], v)) throw ParseError("edges.tsv", li + 1, "dst", "bad index");
      if (u >= v) throw ParseError("edges.tsv", li + 1, "", "require src < dst");
      if (v >= n) throw ParseError("edges.tsv", li + 1, "dst", "node index out of range");
      edges.push_back({u, v});
    }
    d.graph = build_graph(n, edges);
  }

  {
    const std::string text = detail::read_file(dir / "labels.csv");
    const auto lines = detail::lines_of(text);
    d.table.labels.assign(n, std::nullopt);
    std::vector<std::uint8_t> seen(n, 0);
    for (std::size_t li = 0; li < lines.size(); ++li) {
      const auto fields = detail::split_fields(lines[li], ',');
      if (fields.size() != 2) {
        throw ParseError("labels.csv", li + 1, "", "expected 'node_id,label'");
      }
      NodeId id = 0;
      if (!parse_number(fields[0], id) || id >= n) {
        throw ParseError("labels.csv", li + 1, "node_id", "bad or out-of-range node id");
      }
      if (seen[id]++) throw ParseError("labels.csv", li + 1, "node_id", "duplicate node id");
      if (fields[1].empty()) continue;
      ClassId label = 0;
      if (!parse_number(fields[1], label) || label < 0 || label >= c) {
        throw ParseError("labels.csv", li + 1, "label", "bad or out-of-range label");
      }
      d.table.labels[id] = label;
    }
    d.table.provenance.resize(n);
    for (NodeId i = 0; i < n; ++i) {
      d.table.provenance[i] = d.table.labels[i] ? Provenance::kGold : Provenance::kUnlabeled;
    }
  }

  {
    const auto j = detail::parse_json_file(dir / "splits.json");
    auto read_mask = [&](const char* key, std::vector<NodeId>& out) {
      if (!j.contains(key) || !j[key].is_array()) {
        throw ParseError("splits.json", 1, key, "missing index array");
      }
      for (const auto& v : j[key]) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() >= n) {
          throw ParseError("splits.json", 1, key, "bad node index");
        }
        out.push_back(v.get<NodeId>());
      }
    };
    read_mask("train", d.split.train);
    read_mask("validation", d.split.validation);
    read_mask("test", d.split.test);
    try {
      d.split.validate(n);
    } catch (const std::logic_error& e) {
      throw ParseError("splits.json", 1, "", e.what());
    }
  }
  return d;
}

}  // namespace intramix

#endif  // INTRAMIX_CONTAINER_HPP_
