#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "trayrec/errors.hpp"

namespace trayrec {

/// Raw feature vectors keyed by id. Vectors are stored exactly as produced by
/// the provider and normalized at the point of use.
struct FeatureStore {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  friend bool operator==(const FeatureStore&, const FeatureStore&) = default;

  bool contains(const std::string& id) const { return vectors.contains(id); }

  const std::vector<double>& at(const std::string& id) const {
    auto it = vectors.find(id);
    if (it == vectors.end()) {
      throw ValidationError("feature id \"" + id + "\" does not resolve in the feature store");
    }
    return it->second;
  }
};

namespace detail {

inline double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(context + ": bad numeric value \"" + std::string(text) + "\"");
  }
  return value;
}

inline void format_double(std::string& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace detail

/// Reads the line-oriented store format: a `D=<int>` header, then one record
/// per line, `id<TAB>v1,v2,...`.
inline FeatureStore load_feature_store(std::istream& source) {
  FeatureStore store;
  std::string line;
  if (!std::getline(source, line)) {
    throw ParseError("feature store is empty; expected a D=<int> header line");
  }
  if (line.rfind("D=", 0) != 0) {
    throw ParseError("feature store header must look like D=<int>, got \"" + line + "\"");
  }
  int dim = 0;
  {
    const char* first = line.data() + 2;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, dim);
    if (ec != std::errc() || ptr != last || dim <= 0) {
      throw ParseError("feature store header has a bad dimensionality: \"" + line + "\"");
    }
  }
  store.dim = static_cast<std::size_t>(dim);

  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError("feature store line " + std::to_string(line_no) +
                       " is not of the form id<TAB>values");
    }
    std::string id = line.substr(0, tab);
    if (store.vectors.contains(id)) {
      throw ParseError("feature store line " + std::to_string(line_no) + ": duplicate id \"" +
                       id + "\"");
    }
    std::vector<double> values;
    values.reserve(store.dim);
    std::string_view rest(line.data() + tab + 1, line.size() - tab - 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view token = rest.substr(0, comma);
      values.push_back(detail::parse_double(token, "feature store line " + std::to_string(line_no)));
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (values.size() != store.dim) {
      throw DimensionMismatchError("feature \"" + id + "\" has " +
                                   std::to_string(values.size()) + " values, expected " +
                                   std::to_string(store.dim));
    }
    store.vectors.emplace(std::move(id), std::move(values));
  }
  return store;
}

/// Writes the store in the documented format. Values use shortest
/// round-trip formatting, so load(save(s)) == s exactly.
inline void save_feature_store(const FeatureStore& store, std::ostream& sink) {
  std::string line = "D=" + std::to_string(store.dim) + "\n";
  sink.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (const auto& [id, values] : store.vectors) {
    line.clear();
    line += id;
    line += '\t';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i != 0) {
        line += ',';
      }
      detail::format_double(line, values[i]);
    }
    line += '\n';
    sink.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!sink) {
    throw IoError("failed to write feature store");
  }
}

}  // namespace trayrec
