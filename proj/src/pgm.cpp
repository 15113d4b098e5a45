#include "vgaze/pgm.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace vgaze {

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data()), img.size());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

int next_token(std::istream& in, const std::filesystem::path& path) {
  // Skips whitespace and '#' comment lines per the PNM grammar.
  int c = in.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = in.get();
    c = in.get();
  }
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty()) throw std::runtime_error("truncated PGM header: " + path.string());
  return std::stoi(tok);
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + path.string());
  const int w = next_token(in, path);
  const int h = next_token(in, path);
  const int maxval = next_token(in, path);
  if (w < 1 || h < 1 || maxval != 255)
    throw std::runtime_error("unsupported PGM (need maxval 255): " + path.string());
  GrayImage img(h, w);
  in.read(reinterpret_cast<char*>(img.data()), img.size());
  if (in.gcount() != img.size())
    throw std::runtime_error("truncated PGM data: " + path.string());
  return img;
}

}  // namespace vgaze
