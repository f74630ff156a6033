#pragma once

// Datasets: IDX and CSV loaders, CSV writer, the planted synthetic
// matrix-regression task, and evaluation metrics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "scn2d/model.hpp"
#include "scn2d/random.hpp"

namespace scn2d {

struct Dataset {
  Inputs inputs;
  Matrix targets;                      ///< N x m
  std::optional<std::vector<int>> labels;  ///< class indices, when targets are one-hot
  std::string name;

  std::size_t count() const noexcept { return inputs.count(); }

  void validate() const {
    if (targets.rows() != inputs.count())
      throw ConsistencyError("dataset '" + name + "': " + std::to_string(inputs.count()) + " samples but " +
                             std::to_string(targets.rows()) + " target rows");
    if (labels && labels->size() != inputs.count())
      throw ConsistencyError("dataset '" + name + "': label count mismatch");
  }
};

inline Matrix one_hot(std::span<const int> labels, std::size_t classes) {
  Matrix t(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw ConsistencyError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(classes) + ")");
    t(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  return t;
}

/// Row-wise argmax; ties go to the lowest column index.
inline std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j)
      if (row[j] > row[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

// ---------------------------------------------------------------- IDX

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline std::uint32_t be32(std::string_view bytes, std::size_t at) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 3]));
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses an IDX image/label pair (unsigned-byte payloads). Pixels are scaled
/// by 1/255; labels become one-hot targets with `classes` columns (0 means
/// max label + 1).
inline Dataset parse_idx(std::string_view images, std::string_view labels, std::size_t classes = 0,
                         std::string name = "idx") {
  if (images.size() < 16) throw FormatError("IDX images: header truncated");
  if (detail::be32(images, 0) != kIdxImageMagic) throw FormatError("IDX images: bad magic number");
  if (labels.size() < 8) throw FormatError("IDX labels: header truncated");
  if (detail::be32(labels, 0) != kIdxLabelMagic) throw FormatError("IDX labels: bad magic number");

  const std::size_t n = detail::be32(images, 4);
  const std::size_t rows = detail::be32(images, 8);
  const std::size_t cols = detail::be32(images, 12);
  const std::size_t nl = detail::be32(labels, 4);
  if (n != nl)
    throw ConsistencyError("IDX: " + std::to_string(n) + " images but " + std::to_string(nl) + " labels");
  if (rows == 0 || cols == 0) throw FormatError("IDX images: zero image dimension");
  if (images.size() - 16 < n * rows * cols) throw FormatError("IDX images: payload truncated");
  if (labels.size() - 8 < n) throw FormatError("IDX labels: payload truncated");

  Matrix flat(n, rows * cols);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t base = 16 + s * rows * cols;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        flat(s, j * rows + i) = static_cast<unsigned char>(images[base + i * cols + j]) / 255.0;
  }
  std::vector<int> lab(n);
  int top = -1;
  for (std::size_t s = 0; s < n; ++s) {
    lab[s] = static_cast<unsigned char>(labels[8 + s]);
    top = std::max(top, lab[s]);
  }
  if (classes == 0) classes = static_cast<std::size_t>(top + 1);
  Dataset ds{Inputs(InputShape::grid(rows, cols), std::move(flat)), one_hot(lab, classes), std::move(lab),
             std::move(name)};
  ds.validate();
  return ds;
}

inline Dataset load_idx(const std::string& images_path, const std::string& labels_path, std::size_t classes = 0) {
  return parse_idx(detail::read_file(images_path), detail::read_file(labels_path), classes, images_path);
}

// ---------------------------------------------------------------- CSV

struct CsvOptions {
  std::size_t target_cols = 1;
  bool skip_header = false;
  std::size_t classes = 0;  ///< > 0: the single target column is a class index, one-hot encoded
};

/// Each row: the sample's column-major vec followed by the target columns.
/// Lines starting with '#' are comments.
inline Dataset parse_csv(std::string_view text, InputShape shape, const CsvOptions& opt, std::string name = "csv") {
  const std::size_t d = shape.size();
  const std::size_t width = d + opt.target_cols;
  if (opt.classes > 0 && opt.target_cols != 1) throw Error("csv: class labels need exactly one target column");

  std::vector<double> xs, ts;
  std::vector<int> labs;
  std::size_t line_no = 0, n = 0;
  bool header_pending = opt.skip_header;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t field = 0, start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view tok = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      double v = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
        throw FormatError("csv line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
      if (field < d)
        xs.push_back(v);
      else if (opt.classes > 0)
        labs.push_back(static_cast<int>(v));
      else
        ts.push_back(v);
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != width)
      throw FormatError("csv line " + std::to_string(line_no) + ": " + std::to_string(field) + " fields, expected " +
                        std::to_string(width));
    ++n;
  }
  if (n == 0) throw FormatError("csv: no data rows");
  Dataset ds;
  ds.name = std::move(name);
  ds.inputs = Inputs(shape, Matrix(n, d, std::move(xs)));
  if (opt.classes > 0) {
    ds.targets = one_hot(labs, opt.classes);
    ds.labels = std::move(labs);
  } else {
    ds.targets = Matrix(n, opt.target_cols, std::move(ts));
  }
  ds.validate();
  return ds;
}

inline Dataset load_csv(const std::string& path, InputShape shape, const CsvOptions& opt) {
  return parse_csv(detail::read_file(path), shape, opt, path);
}

inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

/// Writes `ds` in the layout parse_csv reads, preceded by the optional
/// comment line and a header row (read it back with skip_header = true).
inline std::string to_csv(const Dataset& ds, const std::string& comment = "") {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  const std::size_t d = ds.inputs.shape.size();
  for (std::size_t k = 0; k < d; ++k) out += (k ? ",x" : "x") + std::to_string(k);
  if (ds.labels) {
    out += ",label";
  } else {
    for (std::size_t q = 0; q < ds.targets.cols(); ++q) out += ",t" + std::to_string(q);
  }
  out += '\n';
  for (std::size_t i = 0; i < ds.count(); ++i) {
    auto x = ds.inputs.sample(i);
    for (std::size_t k = 0; k < d; ++k) {
      if (k) out += ',';
      out += format_double(x[k]);
    }
    if (ds.labels) {
      out += ',' + std::to_string((*ds.labels)[i]);
    } else {
      for (double t : ds.targets.row(i)) out += ',' + format_double(t);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- synthetic task

struct PlantedTarget {
  std::vector<TwoDNode> nodes;
  Vector coeffs;

  /// f(x) = sum_j c_j g(u_j^T x v_j + b_j) on one flattened sample.
  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += coeffs[j] * node_output(HiddenNode(nodes[j]), x);
    return s;
  }
};

struct SynthTask {
  Dataset train;
  Dataset test;
  PlantedTarget target;
};

/// N train and N test samples with d1 x d2 inputs ~ U[0,1] and targets from a
/// planted k-node 2D network (all planted parameters ~ U[-1,1]). Gaussian
/// noise of sd `noise_sd` is added to the train targets only.
inline SynthTask synth_matrix_regression(std::size_t n, std::size_t d1, std::size_t d2, std::size_t k,
                                         double noise_sd, std::uint64_t seed) {
  if (k == 0) throw Error("synth: k must be at least 1");
  if (n == 0 || d1 == 0 || d2 == 0) throw Error("synth: N, d1 and d2 must be positive");
  if (!(noise_sd >= 0.0)) throw Error("synth: noise_sd must be nonnegative");

  PlantedTarget target;
  {
    Rng rng = child_rng(seed, {0});
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
      TwoDNode node;
      node.u.resize(d1);
      node.v.resize(d2);
      for (auto& x : node.u) x = u(rng);
      for (auto& x : node.v) x = u(rng);
      node.b = u(rng);
      target.nodes.push_back(std::move(node));
      target.coeffs.push_back(u(rng));
    }
  }
  const auto shape = InputShape::grid(d1, d2);
  auto make = [&](std::uint64_t stream, bool noisy, const char* name) {
    Rng rng = child_rng(seed, {stream});
    Rng noise_rng = child_rng(seed, {stream, 1});
    std::uniform_real_distribution<double> pix(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, noise_sd > 0.0 ? noise_sd : 1.0);
    Matrix flat(n, d1 * d2);
    for (auto& x : flat.data()) x = pix(rng);
    Matrix t(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      t(i, 0) = target(flat.row(i));
      if (noisy && noise_sd > 0.0) t(i, 0) += noise(noise_rng);
    }
    return Dataset{Inputs(shape, std::move(flat)), std::move(t), std::nullopt, name};
  };
  SynthTask task{make(1, true, "synth-train"), make(2, false, "synth-test"), std::move(target)};
  return task;
}

// ---------------------------------------------------------------- metrics

/// Fraction of samples with |pred - actual| < theta (strict).
inline double ppa(std::span<const double> pred, std::span<const double> actual, double theta) {
  if (pred.size() != actual.size())
    throw ShapeError("ppa: " + std::to_string(pred.size()) + " predictions vs " + std::to_string(actual.size()));
  if (pred.empty()) return 0.0;
  std::size_t c = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (std::abs(pred[i] - actual[i]) < theta) ++c;
  return static_cast<double>(c) / static_cast<double>(pred.size());
}

inline double rmse(const Matrix& pred, const Matrix& actual) {
  if (pred.rows() != actual.rows() || pred.cols() != actual.cols())
    throw ShapeError("rmse: " + pred.shape_string() + " vs " + actual.shape_string());
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred.data()[k] - actual.data()[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

/// Share of rows whose argmax (lowest index on ties) equals the label.
inline double accuracy(const Matrix& pred, std::span<const int> labels) {
  if (pred.rows() != labels.size())
    throw ShapeError("accuracy: " + std::to_string(pred.rows()) + " predictions vs " + std::to_string(labels.size()));
  if (pred.cols() < 2) throw ShapeError("accuracy: need at least two output columns");
  if (labels.empty()) return 0.0;
  const auto cls = argmax_rows(pred);
  std::size_t c = 0;
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (cls[i] == labels[i]) ++c;
  return static_cast<double>(c) / static_cast<double>(labels.size());
}

}  // namespace scn2d
