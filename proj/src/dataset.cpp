#include "celltree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "celltree/hash.hpp"

namespace celltree {

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

Dataset::Dataset(std::size_t d) : d_(d) {
  if (d_ == 0) throw std::invalid_argument("dataset dimension must be at least 1");
}

Dataset::Dataset(std::size_t d, std::vector<double> coords, std::vector<Label> labels)
    : d_(d), coords_(std::move(coords)), labels_(std::move(labels)) {
  if (d_ == 0) throw std::invalid_argument("dataset dimension must be at least 1");
  if (coords_.size() != labels_.size() * d_)
    throw std::invalid_argument("coordinate count is not n * d");
  for (double v : coords_)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite coordinate");
  for (Label y : labels_)
    if (y > 1) throw std::invalid_argument("label outside {0,1}");
}

namespace {

std::size_t infer_dim(std::span<const LabeledPoint> points) {
  if (points.empty()) throw std::invalid_argument("cannot infer dimension from no points");
  return points.front().x.size();
}

std::vector<double> flatten(std::span<const LabeledPoint> points, std::size_t d) {
  std::vector<double> out;
  out.reserve(points.size() * d);
  for (const auto& p : points) {
    if (p.x.size() != d) throw std::invalid_argument("point has wrong number of coordinates");
    out.insert(out.end(), p.x.begin(), p.x.end());
  }
  return out;
}

std::vector<Label> labels_of(std::span<const LabeledPoint> points) {
  std::vector<Label> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.y);
  return out;
}

}  // namespace

Dataset::Dataset(std::span<const LabeledPoint> points)
    : Dataset(infer_dim(points), flatten(points, infer_dim(points)), labels_of(points)) {}

LabeledPoint Dataset::point(std::size_t i) const {
  auto xs = x(i);
  return {{xs.begin(), xs.end()}, labels_[i]};
}

DataView DataView::all(const Dataset& data) {
  std::vector<PointIndex> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<PointIndex>(i);
  return DataView(data, std::move(idx), unchecked_tag{});
}

DataView::DataView(const Dataset& data, std::vector<PointIndex> indices)
    : data_(&data), index_(std::move(indices)) {
  for (std::size_t k = 0; k < index_.size(); ++k) {
    if (index_[k] >= data.size()) throw std::out_of_range("view index out of range");
    if (k > 0 && index_[k] <= index_[k - 1])
      throw std::invalid_argument("view indices must be strictly ascending");
  }
}

LabelCounts DataView::counts() const noexcept {
  LabelCounts c;
  for (PointIndex i : index_) {
    if (data_->y(i) == 1)
      ++c.count1;
    else
      ++c.count0;
  }
  return c;
}

DataView DataView::subview(std::vector<PointIndex> indices) const {
  return DataView(*data_, std::move(indices));
}

Dataset isolate(const DataView& view) {
  const std::size_t d = view.dim();
  std::vector<double> coords;
  std::vector<Label> labels;
  coords.reserve(view.size() * d);
  labels.reserve(view.size());
  for (PointIndex i : view.indices()) {
    auto xs = view.dataset().x(i);
    coords.insert(coords.end(), xs.begin(), xs.end());
    labels.push_back(view.dataset().y(i));
  }
  return Dataset(d, std::move(coords), std::move(labels));
}

std::vector<PointIndex> strict_rank(const DataView& view, std::size_t dim) {
  if (dim >= view.dim()) throw std::out_of_range("rank dimension out of range");
  std::vector<PointIndex> order(view.indices().begin(), view.indices().end());
  const Dataset& data = view.dataset();
  std::sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) {
    const double va = data.x(a, dim);
    const double vb = data.x(b, dim);
    return va < vb || (va == vb && a < b);
  });
  return order;
}

std::uint64_t fingerprint(const DataView& view) {
  Fnv1a h;
  h.u64(view.dim());
  h.u64(view.size());
  for (PointIndex i : view.indices()) {
    for (double v : view.dataset().x(i)) h.f64(v);
    h.u64(view.dataset().y(i));
  }
  return h.digest();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view f, double& out) {
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  if (f.empty()) return false;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
  return ec == std::errc{} && ptr == f.data() + f.size();
}

}  // namespace

Dataset parse_csv(std::string_view text) {
  std::vector<double> coords;
  std::vector<Label> labels;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool seen_first = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    auto fields = split_fields(line);
    if (!seen_first) {
      seen_first = true;
      columns = fields.size();
      if (columns < 2) throw CsvError(line_no, "need at least one feature column and a label");
      double probe = 0;
      const bool numeric =
          std::all_of(fields.begin(), fields.end(), [&](auto f) { return parse_double(f, probe); });
      if (!numeric) continue;  // header
    }
    if (fields.size() != columns)
      throw CsvError(line_no, "expected " + std::to_string(columns) + " columns, found " +
                                  std::to_string(fields.size()));
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      double v = 0;
      if (!parse_double(fields[c], v) || !std::isfinite(v))
        throw CsvError(line_no, "malformed value '" + std::string(fields[c]) + "' in column " +
                                    std::to_string(c + 1));
      coords.push_back(v);
    }
    double y = 0;
    if (!parse_double(fields.back(), y) || (y != 0.0 && y != 1.0))
      throw CsvError(line_no, "label must be 0 or 1, found '" + std::string(fields.back()) + "'");
    labels.push_back(static_cast<Label>(y));
  }
  if (!seen_first) throw CsvError(1, "empty file");
  return Dataset(columns - 1, std::move(coords), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.x(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, end - buf);
      out << ',';
    }
    out << static_cast<int>(data.y(i)) << '\n';
  }
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

}  // namespace celltree
