#include "deal/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "deal/error.hpp"

namespace deal {

namespace {

constexpr const char* kHeader = "deal-checkpoint v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_triple(const std::array<double, 3>& t) {
  return fmt(t[0]) + ":" + fmt(t[1]) + ":" + fmt(t[2]);
}

std::array<double, 3> parse_triple(const std::string& s) {
  std::array<double, 3> out{};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t sep = s.find(':', start);
    const std::string tok = s.substr(start, sep == std::string::npos ? sep : sep - start);
    char* end = nullptr;
    out[static_cast<std::size_t>(i)] = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw ParseError("checkpoint: malformed triple \"" + s + "\"");
    if (i < 2) {
      if (sep == std::string::npos) throw ParseError("checkpoint: malformed triple \"" + s + "\"");
      start = sep + 1;
    }
  }
  return out;
}

void write_tensor(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << fmt(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_tensor(std::istream& in, Index rows, Index cols) {
  Matrix m(rows, cols);
  std::string line;
  for (Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError("checkpoint: truncated tensor data");
    const char* cursor = line.c_str();
    for (Index c = 0; c < cols; ++c) {
      char* end = nullptr;
      m(r, c) = std::strtod(cursor, &end);
      if (end == cursor) throw ParseError("checkpoint: malformed tensor row");
      cursor = end;
    }
  }
  return m;
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  out << kHeader << '\n';
  const HyperParams& hp = ckpt.hp;
  out << "hp gamma1 " << fmt(hp.gamma1) << '\n';
  out << "hp b1 " << fmt(hp.b1) << '\n';
  out << "hp gamma2 " << fmt(hp.gamma2) << '\n';
  out << "hp b2 " << fmt(hp.b2) << '\n';
  out << "hp beta " << fmt(hp.beta) << '\n';
  out << "hp theta " << fmt_triple(hp.theta) << '\n';
  out << "hp lambda " << fmt_triple(hp.lambda) << '\n';
  out << "hp align_mode " << (hp.align_mode == AlignMode::tight ? "tight" : "loose") << '\n';
  out << "hp batch_size " << hp.batch_size << '\n';
  out << "hp pos_frac " << fmt(hp.pos_frac) << '\n';
  out << "hp symmetrize_loose_align " << (hp.symmetrize_loose_align ? 1 : 0) << '\n';
  out << "hp elu_alpha " << fmt(ckpt.params.attr.elu_alpha) << '\n';

  for (std::size_t k = 0; k < ckpt.params.attr.layers.size(); ++k) {
    const auto& layer = ckpt.params.attr.layers[k];
    write_tensor(out, "attr.layer" + std::to_string(k) + ".weight", layer.weight);
    write_tensor(out, "attr.layer" + std::to_string(k) + ".bias", layer.bias);
  }
  write_tensor(out, "struct.directions", ckpt.params.structure.directions);
  write_tensor(out, "struct.scales", ckpt.params.structure.scales);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw ParseError("checkpoint: missing or unsupported header (expected \"" +
                     std::string(kHeader) + "\")");

  Checkpoint ckpt;
  std::map<std::string, Matrix> tensors;
  double elu_alpha = 1.0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "hp") {
      std::string key, value;
      fields >> key >> value;
      if (key == "gamma1") ckpt.hp.gamma1 = std::stod(value);
      else if (key == "b1") ckpt.hp.b1 = std::stod(value);
      else if (key == "gamma2") ckpt.hp.gamma2 = std::stod(value);
      else if (key == "b2") ckpt.hp.b2 = std::stod(value);
      else if (key == "beta") ckpt.hp.beta = std::stod(value);
      else if (key == "theta") ckpt.hp.theta = parse_triple(value);
      else if (key == "lambda") ckpt.hp.lambda = parse_triple(value);
      else if (key == "align_mode") ckpt.hp.align_mode = value == "tight" ? AlignMode::tight : AlignMode::loose;
      else if (key == "batch_size") ckpt.hp.batch_size = std::stoi(value);
      else if (key == "pos_frac") ckpt.hp.pos_frac = std::stod(value);
      else if (key == "symmetrize_loose_align") ckpt.hp.symmetrize_loose_align = value == "1";
      else if (key == "elu_alpha") elu_alpha = std::stod(value);
      else throw ParseError("checkpoint: unknown hp key \"" + key + "\"");
    } else if (tag == "tensor") {
      std::string name;
      Index rows = 0, cols = 0;
      fields >> name >> rows >> cols;
      if (name.empty() || rows <= 0 || cols <= 0)
        throw ParseError("checkpoint: malformed tensor header \"" + line + "\"");
      tensors.emplace(name, read_tensor(in, rows, cols));
    } else {
      throw ParseError("checkpoint: unexpected line \"" + line + "\"");
    }
  }

  ckpt.params.attr.elu_alpha = elu_alpha;
  for (std::size_t k = 0;; ++k) {
    const std::string base = "attr.layer" + std::to_string(k);
    auto w = tensors.find(base + ".weight");
    if (w == tensors.end()) break;
    auto b = tensors.find(base + ".bias");
    if (b == tensors.end()) throw ParseError("checkpoint: missing bias for " + base);
    AttrEncoderParams::Layer layer;
    layer.weight = w->second;
    layer.bias = b->second.col(0);
    ckpt.params.attr.layers.push_back(std::move(layer));
  }
  auto dirs = tensors.find("struct.directions");
  auto scales = tensors.find("struct.scales");
  if (ckpt.params.attr.layers.empty() || dirs == tensors.end() || scales == tensors.end())
    throw ParseError("checkpoint: missing required tensors");
  ckpt.params.structure.directions = dirs->second;
  ckpt.params.structure.scales = scales->second.col(0);

  ckpt.params.attr.validate();
  ckpt.params.structure.validate();
  return ckpt;
}

void write_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  write_checkpoint(ckpt, out);
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace deal
