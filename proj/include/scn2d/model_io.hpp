#pragma once

// Text container for trained networks. Layout is documented in FORMATS.md.
// Floats are written with std::to_chars shortest round-trip form, so reading
// a file back reproduces every double bit for bit.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "scn2d/model.hpp"

namespace scn2d {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::string_view kModelMagic = "scn2d-model";

namespace detail {

inline void put_double(std::string& out, double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, end);
}

inline void put_vector(std::string& out, std::span<const double> v) {
  for (double x : v) {
    out += ' ';
    put_double(out, x);
  }
}

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  std::size_t offset() const noexcept { return pos_; }

  std::string_view next(const char* what) {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(std::string("unexpected end of stream, expected ") + what, pos_);
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    last_ = start;
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view keyword) {
    auto tok = next(std::string(keyword).c_str());
    if (tok != keyword)
      throw ParseError("expected '" + std::string(keyword) + "', found '" + std::string(tok) + "'", last_);
  }

  double real(const char* what) {
    auto tok = next(what);
    double x = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(x))
      throw ParseError(std::string("bad number for ") + what + ": '" + std::string(tok) + "'", last_);
    return x;
  }

  std::uint64_t count(const char* what) {
    auto tok = next(what);
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw ParseError(std::string("bad integer for ") + what + ": '" + std::string(tok) + "'", last_);
    return x;
  }

  Vector reals(std::size_t n, const char* what) {
    Vector v(n);
    for (auto& x : v) x = real(what);
    return v;
  }

  std::size_t last() const noexcept { return last_; }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }
  void skip_space() {
    while (pos_ < text_.size()) {
      if (is_space(text_[pos_])) {
        ++pos_;
      } else if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

}  // namespace detail

inline std::string serialize(const Network& net) {
  std::string out;
  out += kModelMagic;
  out += "\nversion " + std::to_string(kModelFormatVersion);
  out += "\nbuilder " + builder_name(net.provenance().builder);
  out += "\nseed " + std::to_string(net.provenance().seed);
  out += "\nconfig_digest " + (net.provenance().config_digest.empty() ? std::string("-") : net.provenance().config_digest);
  out += "\nactivation sigmoid";
  const auto& s = net.input_shape();
  out += "\ninput_shape " + (s.is_matrix ? std::to_string(s.d1) + " " + std::to_string(s.d2) : std::to_string(s.d1) + " -");
  out += "\noutputs " + std::to_string(net.output_count());
  out += "\nnodes " + std::to_string(net.hidden_count());
  for (const auto& node : net.nodes()) {
    out += "\nnode ";
    if (const auto* n2 = std::get_if<TwoDNode>(&node)) {
      detail::put_double(out, n2->b);
      out += " u";
      detail::put_vector(out, n2->u);
      out += " v";
      detail::put_vector(out, n2->v);
    } else {
      const auto& n1 = std::get<OneDNode>(node);
      detail::put_double(out, n1.b);
      out += " w";
      detail::put_vector(out, n1.w);
    }
  }
  out += "\nbeta";
  for (std::size_t i = 0; i < net.beta().rows(); ++i) {
    out += '\n';
    auto row = net.beta().row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      detail::put_double(out, row[j]);
    }
  }
  out += "\nend\n";
  return out;
}

/// Parses a model container. Throws ParseError (with byte offset) on any
/// malformed or truncated input and VersionError on an unknown version.
inline Network deserialize(std::string_view text) {
  detail::TokenReader in(text);
  in.expect(kModelMagic);
  in.expect("version");
  const auto version = in.count("version");
  if (version != static_cast<std::uint64_t>(kModelFormatVersion))
    throw VersionError("model format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelFormatVersion) + ")");

  Provenance prov;
  in.expect("builder");
  {
    auto tok = in.next("builder name");
    try {
      prov.builder = parse_builder(std::string(tok));
    } catch (const FormatError&) {
      throw ParseError("unknown builder '" + std::string(tok) + "'", in.last());
    }
  }
  in.expect("seed");
  prov.seed = in.count("seed");
  in.expect("config_digest");
  prov.config_digest = std::string(in.next("config digest"));
  if (prov.config_digest == "-") prov.config_digest.clear();
  in.expect("activation");
  in.expect("sigmoid");

  in.expect("input_shape");
  const auto d1 = in.count("input dimension");
  InputShape shape;
  {
    auto tok = in.next("second input dimension");
    if (tok == "-") {
      shape = InputShape::flat(d1);
    } else {
      std::uint64_t d2 = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d2);
      if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError("bad input dimension '" + std::string(tok) + "'", in.last());
      shape = InputShape::grid(d1, d2);
    }
  }
  in.expect("outputs");
  const auto m = in.count("output count");
  in.expect("nodes");
  const auto l = in.count("node count");
  if (l > text.size()) throw ParseError("node count exceeds stream length", in.last());

  std::vector<HiddenNode> nodes;
  nodes.reserve(l);
  for (std::uint64_t j = 0; j < l; ++j) {
    in.expect("node");
    const double b = in.real("bias");
    auto kind = in.next("weight tag");
    if (kind == "u") {
      if (!shape.is_matrix) throw ParseError("2D node in a network with flat input shape", in.last());
      TwoDNode n;
      n.b = b;
      n.u = in.reals(shape.d1, "u entry");
      in.expect("v");
      n.v = in.reals(shape.d2, "v entry");
      nodes.emplace_back(std::move(n));
    } else if (kind == "w") {
      OneDNode n;
      n.b = b;
      n.w = in.reals(shape.size(), "w entry");
      nodes.emplace_back(std::move(n));
    } else {
      throw ParseError("unknown node tag '" + std::string(kind) + "'", in.last());
    }
  }
  in.expect("beta");
  Matrix beta(l, m);
  for (auto& x : beta.data()) x = in.real("beta entry");
  in.expect("end");
  if (!in.at_end()) throw ParseError("trailing data after 'end'", in.offset());

  try {
    return Network(shape, std::move(nodes), std::move(beta), std::move(prov));
  } catch (const Error& e) {
    throw ParseError(std::string("inconsistent network: ") + e.what(), in.offset());
  }
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << serialize(net);
  if (!f) throw Error("failed writing '" + path + "'");
}

inline Network load_network(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

}  // namespace scn2d
