#include "trisieve/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace trisieve {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw DataError("row " + std::to_string(row) + ": cannot parse value '" + cell + "' in column '" +
                    column + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Dataset::validate() const {
  const Eigen::Index n = y.size();
  if (n < 1) {
    throw DataError("dataset has no observations");
  }
  if (d.size() != n || x.rows() != n || z.rows() != n) {
    throw DataError("dataset columns have inconsistent lengths");
  }
  if (static_cast<Eigen::Index>(x_names.size()) != x.cols() ||
      static_cast<Eigen::Index>(z_names.size()) != z.cols()) {
    throw DataError("dataset column names do not match the covariate matrices");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((y[i] != 0 && y[i] != 1) || (d[i] != 0 && d[i] != 1)) {
      throw DataError("row " + std::to_string(i + 1) + ": y and d must be 0 or 1");
    }
  }
  if (!x.allFinite() || !z.allFinite()) {
    throw DataError("covariates must be finite");
  }
}

bool Dataset::has_varying_instrument() const {
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (z.rows() > 0 && (z.col(j).array() != z(0, j)).any()) {
      return true;
    }
  }
  return false;
}

Eigen::VectorXd Dataset::x_means() const {
  if (x.rows() == 0) {
    return Eigen::VectorXd::Zero(x.cols());
  }
  return x.colwise().mean().transpose();
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.y.resize(m);
  out.d.resize(m);
  out.x.resize(m, x.cols());
  out.z.resize(m, z.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    out.y[i] = y[rows[i]];
    out.d[i] = d[rows[i]];
    out.x.row(i) = x.row(rows[i]);
    out.z.row(i) = z.row(rows[i]);
  }
  out.x_names = x_names;
  out.z_names = z_names;
  return out;
}

Dataset parse_csv(const std::string& text, const CsvColumns& columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("csv input is empty (a header row is required)");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 byte order mark
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::vector<std::string> header = split_line(line);
  auto find = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError("csv is missing required column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t yi = find(columns.y);
  const std::size_t di = find(columns.d);
  std::vector<std::string> xs = columns.x;
  std::vector<std::string> zs = columns.z;
  if (xs.empty()) {
    for (const auto& h : header) {
      if (!h.empty() && h[0] == 'x') {
        xs.push_back(h);
      }
    }
  }
  if (zs.empty()) {
    for (const auto& h : header) {
      if (!h.empty() && h[0] == 'z') {
        zs.push_back(h);
      }
    }
  }
  std::vector<std::size_t> xi;
  std::vector<std::size_t> zi;
  for (const auto& name : xs) {
    xi.push_back(find(name));
  }
  for (const auto& name : zs) {
    zi.push_back(find(name));
  }

  std::vector<int> yv;
  std::vector<int> dv;
  std::vector<double> xv;
  std::vector<double> zv;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    }
    auto binary = [&](std::size_t idx) {
      const double v = parse_number(cells[idx], row, header[idx]);
      if (v != 0.0 && v != 1.0) {
        throw DataError("row " + std::to_string(row) + ": column '" + header[idx] + "' must be 0 or 1");
      }
      return static_cast<int>(v);
    };
    yv.push_back(binary(yi));
    dv.push_back(binary(di));
    for (std::size_t j : xi) {
      xv.push_back(parse_number(cells[j], row, header[j]));
    }
    for (std::size_t j : zi) {
      zv.push_back(parse_number(cells[j], row, header[j]));
    }
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(yv.size());
  data.y = Eigen::Map<Eigen::VectorXi>(yv.data(), n);
  data.d = Eigen::Map<Eigen::VectorXi>(dv.data(), n);
  data.x.resize(n, static_cast<Eigen::Index>(xi.size()));
  data.z.resize(n, static_cast<Eigen::Index>(zi.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      data.x(i, j) = xv[static_cast<std::size_t>(i * data.x.cols() + j)];
    }
    for (Eigen::Index j = 0; j < data.z.cols(); ++j) {
      data.z(i, j) = zv[static_cast<std::size_t>(i * data.z.cols() + j)];
    }
  }
  data.x_names = xs;
  data.z_names = zs;
  data.validate();
  return data;
}

Dataset read_csv(const std::string& path, const CsvColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open csv file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), columns);
}

std::string to_csv(const Dataset& data) {
  std::string out = "y,d";
  for (const auto& n : data.x_names) {
    out += "," + n;
  }
  for (const auto& n : data.z_names) {
    out += "," + n;
  }
  out += "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out += std::to_string(data.y[i]) + "," + std::to_string(data.d[i]);
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      out += "," + format_double(data.x(i, j));
    }
    for (Eigen::Index j = 0; j < data.z.cols(); ++j) {
      out += "," + format_double(data.z(i, j));
    }
    out += "\n";
  }
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write csv file '" + path + "'");
  }
  out << to_csv(data);
}

}  // namespace trisieve
