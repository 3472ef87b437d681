#include "simcache/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace simcache {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size())
    throw std::invalid_argument("malformed numeric field: " + text);
  return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("catalog file is empty: " + path.string());

  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "item_id" ||
      header.back() != "weight")
    throw std::runtime_error("bad catalog header in " + path.string());
  const int dim = static_cast<int>(header.size()) - 2;
  for (int k = 0; k < dim; ++k)
    if (header[1 + k] != "dim_" + std::to_string(k))
      throw std::runtime_error("bad catalog header in " + path.string());

  std::vector<std::pair<ItemId, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (static_cast<int>(f.size()) != dim + 2)
      throw std::runtime_error("catalog row has wrong field count: " + line);
    std::vector<double> values(dim + 1);
    for (int k = 0; k <= dim; ++k) values[k] = parse_double(f[1 + k]);
    rows.emplace_back(static_cast<ItemId>(std::stol(f[0])), std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("catalog has no items");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd emb(n, dim);
  Eigen::ArrayXd weights(n);
  std::vector<char> seen(rows.size(), 0);
  for (const auto& [id, values] : rows) {
    if (id < 0 || id >= n || seen[id])
      throw std::runtime_error("catalog ids must be a permutation of 0..N-1");
    seen[id] = 1;
    for (int k = 0; k < dim; ++k) emb(id, k) = values[k];
    weights[id] = values[dim];
  }
  return Catalog(std::move(emb), std::move(weights));
}

void save_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "item_id";
  for (int k = 0; k < catalog.dim(); ++k) out << ",dim_" << k;
  out << ",weight\n";
  for (ItemId n = 0; n < catalog.size(); ++n) {
    out << n;
    for (int k = 0; k < catalog.dim(); ++k)
      out << ',' << format_double(catalog.embeddings()(n, k));
    out << ',' << format_double(catalog.rates()[n]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::pair<ItemId, std::int64_t>> load_trace_counts(
    const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<ItemId, std::int64_t>> counts;
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"item_id", "count"})
    throw std::runtime_error("bad trace-count header in " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 2)
      throw std::runtime_error("bad trace-count row: " + line);
    counts.emplace_back(static_cast<ItemId>(std::stol(f[0])),
                        static_cast<std::int64_t>(std::stoll(f[1])));
  }
  return counts;
}

std::vector<ItemId> load_replay(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<ItemId> items;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    items.push_back(static_cast<ItemId>(std::stol(line)));
  }
  if (items.empty())
    throw std::runtime_error("replay file has no requests: " + path.string());
  return items;
}

}  // namespace simcache
