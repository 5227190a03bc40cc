#pragma once

// CSV ingestion and emission.
//
//   sizes:            id,value
//   distances matrix: first row and first column hold ids, cell (i,j) = d_ij
//   distances long:   from,to,distance
//   DW bounds:        n,alpha,d_l,d_u

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "moransar/error.hpp"
#include "moransar/inference.hpp"
#include "moransar/matrix.hpp"
#include "moransar/spatial_data.hpp"
#include "moransar/tolerance.hpp"

namespace moransar::io {

enum class DistFormat { matrix, long_form };

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Splits one CSV record; double quotes group a field and "" escapes a quote.
inline std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

struct Record {
  std::size_t line = 0;  // 1-based
  std::vector<std::string> fields;
};

inline std::vector<Record> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    out.push_back({no, split_record(line)});
  }
  return out;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline void expect_header(const std::vector<Record>& recs, std::vector<std::string_view> names,
                          const std::filesystem::path& path) {
  if (recs.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file", 1);
  const auto& h = recs.front();
  bool ok = h.fields.size() == names.size();
  for (std::size_t k = 0; ok && k < names.size(); ++k) ok = lower(h.fields[k]) == names[k];
  if (!ok) {
    std::string want;
    for (auto n : names) want += (want.empty() ? "" : ",") + std::string(n);
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(h.line) + ": expected header " + want,
                h.line);
  }
}

inline double parse_number(const std::string& s, std::size_t line,
                           const std::filesystem::path& path) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || s.empty())
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line) + ": not a number '" + s + "'", line);
  return v;
}

}  // namespace detail

inline RawSizeVector load_sizes(const std::filesystem::path& path) {
  const auto recs = detail::read_records(path);
  detail::expect_header(recs, {"id", "value"}, path);
  RawSizeVector out;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < recs.size(); ++r) {
    const auto& rec = recs[r];
    if (rec.fields.size() != 2)
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(rec.line) + ": expected 2 fields",
                  rec.line);
    const std::string& id = rec.fields[0];
    if (id.empty())
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(rec.line) + ": empty id", rec.line);
    if (!seen.emplace(id, out.size()).second)
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + id + "'", rec.line);
    out.ids.push_back(id);
    out.values.push_back(detail::parse_number(rec.fields[1], rec.line, path));
  }
  if (out.size() < 2)
    throw Error(ErrorCode::ParseError, path.string() + ": need at least two rows");
  return out;
}

struct DistanceTable {
  std::vector<std::string> ids;
  Matrix<double> distances;
  double max_relative_asymmetry = 0.0;
};

inline DistanceTable load_distances(const std::filesystem::path& path, DistFormat format,
                                    SymmetryPolicy policy = SymmetryPolicy::automatic) {
  const auto recs = detail::read_records(path);
  if (recs.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file", 1);
  DistanceTable t;

  if (format == DistFormat::matrix) {
    const auto& header = recs.front().fields;
    if (header.size() < 3)
      throw Error(ErrorCode::ParseError, path.string() + ": header needs at least two ids", 1);
    t.ids.assign(header.begin() + 1, header.end());
    const std::size_t n = t.ids.size();
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < n; ++k)
      if (!col.emplace(t.ids[k], k).second)
        throw Error(ErrorCode::DuplicateId, "duplicate id '" + t.ids[k] + "'", recs.front().line);
    if (recs.size() - 1 != n)
      throw Error(ErrorCode::NonSquare,
                  path.string() + ": " + std::to_string(recs.size() - 1) + " rows for " +
                      std::to_string(n) + " columns");
    t.distances = Matrix<double>(n, n);
    std::vector<bool> filled(n, false);
    for (std::size_t r = 1; r < recs.size(); ++r) {
      const auto& rec = recs[r];
      if (rec.fields.size() != n + 1)
        throw Error(ErrorCode::NonSquare,
                    path.string() + ":" + std::to_string(rec.line) + ": expected " +
                        std::to_string(n + 1) + " fields",
                    rec.line);
      auto it = col.find(rec.fields[0]);
      if (it == col.end())
        throw Error(ErrorCode::IdMismatch,
                    "row id '" + rec.fields[0] + "' is not in the header", rec.line);
      if (filled[it->second])
        throw Error(ErrorCode::DuplicateId, "duplicate row '" + rec.fields[0] + "'", rec.line);
      filled[it->second] = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == it->second) continue;  // diagonal ignored
        t.distances(it->second, k) = detail::parse_number(rec.fields[k + 1], rec.line, path);
      }
    }
  } else {
    detail::expect_header(recs, {"from", "to", "distance"}, path);
    std::unordered_map<std::string, std::size_t> index;
    std::map<std::pair<std::size_t, std::size_t>, double> cell;
    for (std::size_t r = 1; r < recs.size(); ++r) {
      const auto& rec = recs[r];
      if (rec.fields.size() != 3)
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(rec.line) + ": expected 3 fields",
                    rec.line);
      auto id_of = [&](const std::string& id) {
        auto [it, fresh] = index.emplace(id, t.ids.size());
        if (fresh) t.ids.push_back(id);
        return it->second;
      };
      const std::size_t i = id_of(rec.fields[0]);
      const std::size_t j = id_of(rec.fields[1]);
      const double d = detail::parse_number(rec.fields[2], rec.line, path);
      if (i == j) continue;
      if (!cell.emplace(std::pair{i, j}, d).second)
        throw Error(ErrorCode::DuplicateId,
                    "pair " + rec.fields[0] + "," + rec.fields[1] + " listed twice", rec.line);
    }
    const std::size_t n = t.ids.size();
    if (n < 2) throw Error(ErrorCode::ParseError, path.string() + ": need at least two ids");
    t.distances = Matrix<double>(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        auto a = cell.find({i, j});
        auto b = cell.find({j, i});
        if (a == cell.end() && b == cell.end())
          throw Error(ErrorCode::MissingPair,
                      "no distance between '" + t.ids[i] + "' and '" + t.ids[j] + "'", i, j);
        const double dij = a != cell.end() ? a->second : b->second;
        const double dji = b != cell.end() ? b->second : a->second;
        t.distances(i, j) = dij;
        t.distances(j, i) = dji;
      }
  }

  const std::size_t n = t.ids.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = t.distances(i, j), b = t.distances(j, i);
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale == 0.0) continue;
      const double rel = std::abs(a - b) / scale;
      t.max_relative_asymmetry = std::max(t.max_relative_asymmetry, rel);
      if (policy == SymmetryPolicy::strict && rel > tol::kAsymmetry)
        throw Error(ErrorCode::AsymmetricInput,
                    "d(" + t.ids[i] + "," + t.ids[j] + ") != d(" + t.ids[j] + "," + t.ids[i] + ")",
                    i, j);
    }
  return t;
}

/// Reorders sizes to follow `ids`. IdMismatch unless both carry the same id set.
inline RawSizeVector align_sizes(const RawSizeVector& sizes, const std::vector<std::string>& ids) {
  if (sizes.ids.size() != sizes.values.size())
    throw Error(ErrorCode::InvalidArgument, "sizes need one id per value");
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < sizes.ids.size(); ++k) pos.emplace(sizes.ids[k], k);
  if (ids.size() != sizes.size())
    throw Error(ErrorCode::IdMismatch,
                std::to_string(sizes.size()) + " sizes but " + std::to_string(ids.size()) +
                    " ids in the distance table");
  RawSizeVector out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    auto it = pos.find(ids[k]);
    if (it == pos.end())
      throw Error(ErrorCode::IdMismatch, "distance id '" + ids[k] + "' has no size", k);
    out.ids.push_back(ids[k]);
    out.values.push_back(sizes.values[it->second]);
  }
  return out;
}

/// Bundled bounds plus every row of the file.
inline CriticalValueTable load_critical_values(const std::filesystem::path& path) {
  const auto recs = detail::read_records(path);
  detail::expect_header(recs, {"n", "alpha", "d_l", "d_u"}, path);
  CriticalValueTable table = CriticalValueTable::bundled();
  for (std::size_t r = 1; r < recs.size(); ++r) {
    const auto& rec = recs[r];
    if (rec.fields.size() != 4)
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(rec.line) + ": expected 4 fields",
                  rec.line);
    const double n = detail::parse_number(rec.fields[0], rec.line, path);
    if (!(n >= 2.0) || n != std::floor(n))
      throw Error(ErrorCode::ParseError, "n must be an integer >= 2", rec.line);
    table.add({static_cast<std::size_t>(n), detail::parse_number(rec.fields[1], rec.line, path),
               detail::parse_number(rec.fields[2], rec.line, path),
               detail::parse_number(rec.fields[3], rec.line, path)});
  }
  return table;
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::string sizes_csv(const RawSizeVector& sizes) {
  std::ostringstream os;
  os.precision(17);
  os << "id,value\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) os << sizes.ids.at(i) << ',' << sizes.values[i] << '\n';
  return os.str();
}

inline std::string distance_matrix_csv(const std::vector<std::string>& ids, const Matrix<double>& d) {
  std::ostringstream os;
  os.precision(17);
  os << "id";
  for (const auto& id : ids) os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    os << ids[i];
    for (std::size_t j = 0; j < ids.size(); ++j) os << ',' << d(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace moransar::io
