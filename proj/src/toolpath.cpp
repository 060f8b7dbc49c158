#include "lpbf/toolpath.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace lpbf {

double Toolpath::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < moves.size(); ++i)
    len += distance(moves[i - 1].pos, moves[i].pos);
  return len;
}

double Toolpath::laser_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < moves.size(); ++i)
    if (moves[i].laser) len += distance(moves[i - 1].pos, moves[i].pos);
  return len;
}

int Toolpath::void_move_count() const {
  int n = 0;
  for (std::size_t i = 1; i < moves.size(); ++i)
    if (!moves[i].laser) ++n;
  return n;
}

std::vector<Segment> Toolpath::segments() const {
  std::vector<Segment> segs;
  segs.reserve(moves.size());
  for (std::size_t i = 1; i < moves.size(); ++i)
    segs.push_back({moves[i - 1].pos, moves[i].pos, moves[i].laser});
  return segs;
}

std::string Toolpath::to_json() const {
  nlohmann::json j;
  j["generator"] = generator;
  j["hatch_um"] = hatch * 1000.0;
  nlohmann::json ms = nlohmann::json::array();
  for (const Move& m : moves) {
    ms.push_back({{"i", m.point},
                  {"x_mm", m.pos.x},
                  {"y_mm", m.pos.y},
                  {"laser", m.laser ? 1 : 0}});
  }
  j["moves"] = std::move(ms);
  return j.dump();
}

Toolpath Toolpath::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Toolpath p;
  p.hatch = j.at("hatch_um").get<double>() / 1000.0;
  p.generator = j.value("generator", std::string{});
  for (const auto& m : j.at("moves")) {
    Move mv;
    mv.point = m.value("i", -1);
    mv.pos = {m.at("x_mm").get<double>(), m.at("y_mm").get<double>()};
    mv.laser = m.at("laser").get<int>() != 0;
    p.moves.push_back(mv);
  }
  return p;
}

void Toolpath::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write toolpath file: " + path);
  out << to_json() << "\n";
}

Toolpath Toolpath::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read toolpath file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

SensitiveRegions detect_sensitive_regions(const Toolpath& path, double coeff) {
  if (coeff <= 0.0) throw std::invalid_argument("sensitive coeff must be > 0");
  SensitiveRegions out;
  const double gate = coeff * path.hatch;
  double arc = 0.0;
  bool have_prev = false;
  double prev_arc = 0.0;
  for (std::size_t i = 1; i + 1 < path.moves.size(); ++i) {
    Vec2 in_dir = path.moves[i].pos - path.moves[i - 1].pos;
    Vec2 out_dir = path.moves[i + 1].pos - path.moves[i].pos;
    arc += in_dir.norm();
    if (!path.moves[i].laser || !path.moves[i + 1].laser) continue;
    if (in_dir.norm2() == 0.0 || out_dir.norm2() == 0.0) continue;
    double alpha = turning_angle_deg(in_dir, out_dir);
    if (alpha >= 90.0) continue;
    if (have_prev && arc - prev_arc <= gate * (1.0 + 1e-12)) {
      ++out.count;
      out.move_indices.push_back(static_cast<int>(i));
      out.locations.push_back(path.moves[i].pos);
    }
    have_prev = true;
    prev_arc = arc;
  }
  return out;
}

}  // namespace lpbf
