#include "amlnewton/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include "amlnewton/error.hpp"

namespace amln {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what, static_cast<std::int64_t>(line));
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <class Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    const auto end = next == std::string::npos ? text.size() : next;
    ++line_no;
    fn(line_no, std::string_view(text).substr(pos, end - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
}

double map_label(double raw, Loss loss, std::size_t line) {
  if (loss == Loss::Logistic) {
    if (raw == 1.0) return 1.0;
    if (raw == -1.0 || raw == 0.0) return -1.0;
    throw Error(Errc::LabelDomainError,
                "line " + std::to_string(line) + ": label " + std::to_string(raw) + " invalid for logistic loss",
                static_cast<std::int64_t>(line));
  }
  if (raw < 0.0 || std::abs(raw - std::round(raw)) > 1e-9) {
    throw Error(Errc::LabelDomainError,
                "line " + std::to_string(line) + ": label " + std::to_string(raw) + " invalid for poisson loss",
                static_cast<std::int64_t>(line));
  }
  return raw;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset parse_libsvm_text(const std::string& text, Loss loss, std::optional<Index> n_features) {
  struct Row {
    double label;
    std::vector<std::pair<Index, double>> entries;
  };
  std::vector<Row> rows;
  Index max_index = 0;

  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') return;
    Row row{};
    std::size_t pos = 0;
    bool first = true;
    Index previous = 0;
    while (pos < line.size()) {
      const auto start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto stop = line.find_first_of(" \t", start);
      if (stop == std::string_view::npos) stop = line.size();
      const auto token = line.substr(start, stop - start);
      pos = stop;
      if (first) {
        const auto label = to_double(token);
        if (!label) parse_error(line_no, "non-numeric label '" + std::string(token) + "'");
        row.label = map_label(*label, loss, line_no);
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos) parse_error(line_no, "malformed pair '" + std::string(token) + "'");
      const auto idx = to_integer(token.substr(0, colon));
      const auto val = to_double(token.substr(colon + 1));
      if (!idx || *idx < 1) parse_error(line_no, "invalid index in '" + std::string(token) + "'");
      if (!val) parse_error(line_no, "non-numeric value in '" + std::string(token) + "'");
      if (*idx <= previous) parse_error(line_no, "indices must be strictly increasing");
      previous = static_cast<Index>(*idx);
      row.entries.emplace_back(previous - 1, *val);
    }
    max_index = std::max(max_index, previous);
    rows.push_back(std::move(row));
  });

  if (rows.empty()) parse_error(0, "no samples");
  Index n = max_index;
  if (n_features) {
    if (*n_features < max_index) {
      parse_error(0, "feature index " + std::to_string(max_index) + " exceeds n = " + std::to_string(*n_features));
    }
    n = *n_features;
  }
  if (n < 1) parse_error(0, "no features");

  Dataset data;
  data.features = Matrix::Zero(static_cast<Index>(rows.size()), n);
  data.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Index>(i);
    data.labels[r] = rows[i].label;
    for (const auto& [j, v] : rows[i].entries) data.features(r, j) = v;
  }
  return data;
}

Dataset parse_libsvm(const std::filesystem::path& path, Loss loss, std::optional<Index> n_features) {
  return parse_libsvm_text(read_file(path), loss, n_features);
}

std::string format_libsvm(const Dataset& data) {
  std::string out;
  for (Index i = 0; i < data.samples(); ++i) {
    out += format_double(data.labels[i]);
    for (Index j = 0; j < data.dims(); ++j) {
      const double v = data.features(i, j);
      if (v == 0.0) continue;
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_libsvm(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
  out << format_libsvm(data);
  if (!out) throw Error(Errc::IoError, "write to '" + path.string() + "' failed");
}

Dataset parse_csv_text(const std::string& text, int label_column, bool has_header, Loss loss) {
  std::vector<std::vector<double>> cells;
  std::vector<std::size_t> line_numbers;
  std::size_t width = 0;
  bool header_pending = has_header;

  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty()) return;
    if (header_pending) {
      header_pending = false;
      return;
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const auto cell = trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      const auto v = to_double(cell);
      if (!v) {
        parse_error(line_no, "column " + std::to_string(row.size()) + ": non-numeric cell '" + std::string(cell) + "'");
      }
      row.push_back(*v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cells.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      parse_error(line_no, "expected " + std::to_string(width) + " columns, found " + std::to_string(row.size()));
    }
    cells.push_back(std::move(row));
    line_numbers.push_back(line_no);
  });

  if (cells.empty()) parse_error(0, "no samples");
  if (label_column < 0 || static_cast<std::size_t>(label_column) >= width) {
    parse_error(0, "label column " + std::to_string(label_column) + " outside the " + std::to_string(width) +
                       " columns");
  }
  if (width < 2) parse_error(0, "need at least one feature column besides the label");

  Dataset data;
  data.features.resize(static_cast<Index>(cells.size()), static_cast<Index>(width - 1));
  data.labels.resize(static_cast<Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto r = static_cast<Index>(i);
    data.labels[r] = map_label(cells[i][static_cast<std::size_t>(label_column)], loss, line_numbers[i]);
    Index col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (static_cast<int>(j) == label_column) continue;
      data.features(r, col++) = cells[i][j];
    }
  }
  return data;
}

Dataset parse_csv(const std::filesystem::path& path, int label_column, bool has_header, Loss loss) {
  return parse_csv_text(read_file(path), label_column, has_header, loss);
}

Dataset generate_lowrank(Index d, Index n, Index rank, std::uint64_t seed, Loss loss) {
  if (d < 1 || n < 1 || rank < 1 || rank > std::min(d, n)) {
    throw Error(Errc::InvalidArgument, "generate_lowrank needs 1 <= rank <= min(d, n)");
  }
  auto rng = RngSpec{seed, 0}.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill = [&](Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    }
    return m;
  };
  const Matrix u = fill(d, rank);
  const Matrix v = fill(n, rank);

  Dataset data;
  data.features = (u * v.transpose()) / std::sqrt(static_cast<double>(rank));

  const Vector planted = gaussian_vector(n, rng, 1.0 / std::sqrt(static_cast<double>(n)));
  const Vector margin = data.features * planted;
  data.labels.resize(d);
  if (loss == Loss::Logistic) {
    for (Index i = 0; i < d; ++i) data.labels[i] = margin[i] + 0.5 * normal(rng) >= 0.0 ? 1.0 : -1.0;
  } else {
    for (Index i = 0; i < d; ++i) {
      std::poisson_distribution<long long> counts(std::exp(std::clamp(margin[i], -5.0, 3.0)));
      data.labels[i] = static_cast<double>(counts(rng));
    }
  }
  return data;
}

Standardization standardize(const Dataset& data) {
  if (data.samples() < 2) throw Error(Errc::InvalidArgument, "standardize needs at least 2 samples");
  Standardization out{data, data.features.colwise().mean().transpose(), Vector::Ones(data.dims())};
  const auto d = static_cast<double>(data.samples());
  for (Index j = 0; j < data.dims(); ++j) {
    auto col = out.data.features.col(j);
    col.array() -= out.mean[j];
    const double sd = std::sqrt(col.squaredNorm() / d);
    if (sd > 1e-12 * std::max(1.0, std::abs(out.mean[j]))) {
      out.scale[j] = sd;
      col /= sd;
    }
  }
  return out;
}

}  // namespace amln
