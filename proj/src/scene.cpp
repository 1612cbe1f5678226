#include "ame/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ame/errors.hpp"

namespace ame {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void check_pose(const Pose& pose, const std::string& who) {
  require(pose.orthonormality_error() <= 1e-10, who + ": pose orientation is not orthonormal");
}

void check_extent(const Extent& e, const std::string& who) {
  require(e.width >= 0.0 && e.height >= 0.0, who + ": extent must be non-negative");
}

void check_screen(const Screen& s, const std::string& who) {
  check_pose(s.pose, who);
  check_extent(s.extent, who);
  require(!s.image.empty(), who + ": image is empty");
  require(s.pattern.radiance >= 0.0, who + ": radiance must be non-negative");
}

void validate_element(const OpticalElement& el) {
  const std::string who = std::string(el.kind()) + " '" + el.id + "'";
  check_pose(el.pose(), who);
  std::visit(Overloaded{
                 [&](const ThinLens& e) {
                   require(e.focal_length != 0.0 && std::isfinite(e.focal_length), who + ": focal length must be nonzero");
                   require(e.aperture_diameter > 0.0, who + ": aperture must be positive");
                 },
                 [&](const HalfMirror& e) {
                   check_extent(e.extent, who);
                   require(e.reflectance > 0.0 && e.reflectance < 1.0, who + ": reflectance must be in (0,1)");
                 },
                 [&](const ConvexMirror& e) {
                   check_extent(e.extent, who);
                   require(e.magnification > 0.0, who + ": magnification must be positive");
                   require(e.is_flat() || e.reference_distance > 0.0, who + ": reference distance must be positive");
                 },
                 [&](const TmdPlate& e) {
                   check_extent(e.extent, who);
                   require(e.pitch >= 0.0, who + ": pitch must be non-negative");
                   require(e.mirror_ratio > 0.0, who + ": mirror ratio must be positive");
                   const ModeWeights& w = e.weights;
                   for (double p : {w.p_double, w.p_single, w.p_pass}) {
                     require(p >= 0.0 && p <= 1.0, who + ": mode weights must lie in [0,1]");
                   }
                   require(w.p_double + w.p_single + w.p_pass <= 1.0 + 1e-12, who + ": mode weights sum above 1");
                 },
                 [&](const Screen& e) { check_screen(e, who); },
                 [&](const Absorber& e) {
                   check_extent(e.extent, who);
                   require(e.hole_diameter >= 0.0, who + ": hole diameter must be non-negative");
                 },
             },
             el.body);
}

// ------------------------------------------------------------------ lexing

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '{' || c == '}' || c == '=') {
      out.push_back({std::string(1, c), line});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
             text[i] != '}' && text[i] != '=' && text[i] != '#') {
        ++i;
      }
      out.push_back({std::string(text.substr(start, i - start)), line});
    }
  }
  return out;
}

struct Value {
  std::string text;
  int line = 0;
};

/// Key/value pairs of one block, consumed as the block is interpreted so
/// that leftovers can be reported as unknown keys.
class Block {
 public:
  Block(std::string header, int line) : header_(std::move(header)), line_(line) {}

  void add(const Token& key, const Token& value) {
    if (!values_.emplace(key.text, Value{value.text, value.line}).second) {
      throw ParseError(key.line, "duplicate key '" + key.text + "'");
    }
  }

  int line() const { return line_; }

  std::optional<Value> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    Value v = it->second;
    values_.erase(it);
    return v;
  }

  Value need(const std::string& key) {
    auto v = take(key);
    if (!v) throw ValidationError(header_ + " (line " + std::to_string(line_) + "): missing '" + key + "'");
    return *v;
  }

  void finish() const {
    if (!values_.empty()) {
      const auto& [key, value] = *values_.begin();
      throw ParseError(value.line, "unknown key '" + key + "' in " + header_);
    }
  }

 private:
  std::string header_;
  int line_;
  std::map<std::string, Value> values_;
};

double to_number(const Value& v) {
  double out = 0.0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  if (!v.text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ParseError(v.line, "expected a number, got '" + v.text + "'");
  return out;
}

std::vector<double> to_numbers(const Value& v, std::size_t count) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v.text.size()) {
    const std::size_t comma = v.text.find(',', start);
    const std::size_t end = comma == std::string::npos ? v.text.size() : comma;
    out.push_back(to_number(Value{v.text.substr(start, end - start), v.line}));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != count) {
    throw ParseError(v.line, "expected " + std::to_string(count) + " comma-separated numbers, got '" + v.text + "'");
  }
  return out;
}

int to_int(const Value& v) {
  const double d = to_number(v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ParseError(v.line, "expected an integer, got '" + v.text + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& text, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ParseError(line, "expected true or false, got '" + text + "'");
}

std::pair<bool, bool> to_bool_pair(const Value& v) {
  const std::size_t comma = v.text.find(',');
  if (comma == std::string::npos) throw ParseError(v.line, "expected two comma-separated booleans");
  return {to_bool(v.text.substr(0, comma), v.line), to_bool(v.text.substr(comma + 1), v.line)};
}

Pose read_pose(Block& b) {
  Vec3 position;
  if (auto v = b.take("position")) {
    const auto n = to_numbers(*v, 3);
    position = {n[0], n[1], n[2]};
  }
  std::array<double, 9> r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  if (auto v = b.take("rotation")) {
    const auto n = to_numbers(*v, 9);
    std::copy(n.begin(), n.end(), r.begin());
  }
  try {
    return Pose::from_rotation(position, r);
  } catch (const std::invalid_argument& e) {
    throw ValidationError("block at line " + std::to_string(b.line()) + ": " + e.what());
  }
}

Extent read_extent(Block& b) {
  const auto n = to_numbers(b.need("extent"), 2);
  return {n[0], n[1]};
}

Screen read_screen(Block& b) {
  Screen s;
  s.pose = read_pose(b);
  s.extent = read_extent(b);
  if (auto v = b.take("pattern")) {
    const auto kind = pattern_from_string(v->text);
    if (!kind) throw ParseError(v->line, "unknown pattern '" + v->text + "'");
    s.pattern.kind = *kind;
  }
  if (auto v = b.take("pattern_px")) {
    const auto n = to_numbers(*v, 2);
    s.pattern.width_px = static_cast<int>(n[0]);
    s.pattern.height_px = static_cast<int>(n[1]);
  }
  if (auto v = b.take("pattern_cells")) s.pattern.cells = to_int(*v);
  if (auto v = b.take("radiance")) s.pattern.radiance = to_number(*v);
  if (auto v = b.take("flip_uv")) std::tie(s.flip_u, s.flip_v) = to_bool_pair(*v);
  s.image = make_pattern(s.pattern);
  return s;
}

EyeCamera read_eye(Block& b) {
  EyeCamera eye;
  eye.pose = read_pose(b);
  if (auto v = b.take("focal_length")) eye.focal_length = to_number(*v);
  if (auto v = b.take("aperture")) eye.aperture_diameter = to_number(*v);
  if (auto v = b.take("sensor")) {
    const auto n = to_numbers(*v, 3);
    eye.sensor = {static_cast<int>(n[0]), static_cast<int>(n[1]), n[2]};
  }
  eye.focus_distance = eye.focal_length;
  if (auto v = b.take("focus_distance")) eye.focus_distance = to_number(*v);
  return eye;
}

OpticalElement read_element(const std::string& kind, const std::string& id, Block& b, int line) {
  if (kind == "lens") {
    ThinLens e;
    e.pose = read_pose(b);
    e.focal_length = to_number(b.need("focal_length"));
    e.aperture_diameter = to_number(b.need("aperture"));
    return {id, e};
  }
  if (kind == "half_mirror") {
    HalfMirror e;
    e.pose = read_pose(b);
    e.extent = read_extent(b);
    if (auto v = b.take("reflectance")) e.reflectance = to_number(*v);
    return {id, e};
  }
  if (kind == "convex_mirror") {
    ConvexMirror e;
    e.pose = read_pose(b);
    e.extent = read_extent(b);
    e.magnification = to_number(b.need("magnification"));
    if (auto v = b.take("reference_distance")) e.reference_distance = to_number(*v);
    return {id, e};
  }
  if (kind == "tmd") {
    TmdPlate e;
    e.pose = read_pose(b);
    e.extent = read_extent(b);
    if (auto v = b.take("pitch")) e.pitch = to_number(*v);
    if (auto v = b.take("mirror_ratio")) e.mirror_ratio = to_number(*v);
    if (auto v = b.take("mode_weights")) {
      const auto n = to_numbers(*v, 3);
      e.weights = {n[0], n[1], n[2]};
    }
    if (auto v = b.take("polarizer")) e.polarizer = to_bool(v->text, v->line);
    if (auto v = b.take("angular_fill")) e.angular_fill = to_bool(v->text, v->line);
    return {id, e};
  }
  if (kind == "screen") return {id, read_screen(b)};
  if (kind == "absorber") {
    Absorber e;
    e.pose = read_pose(b);
    e.extent = read_extent(b);
    if (auto v = b.take("hole_diameter")) e.hole_diameter = to_number(*v);
    return {id, e};
  }
  throw ParseError(line, "unknown element kind '" + kind + "'");
}

// --------------------------------------------------------------- emitting

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string nums(std::initializer_list<double> xs) {
  std::string out;
  for (double x : xs) {
    if (!out.empty()) out += ',';
    out += num(x);
  }
  return out;
}

std::string boolean(bool b) { return b ? "true" : "false"; }

using Fields = std::map<std::string, std::string>;

void pose_fields(Fields& f, const Pose& p) {
  f["position"] = nums({p.position().x, p.position().y, p.position().z});
  const auto r = p.rotation();
  std::string rot;
  for (double x : r) {
    if (!rot.empty()) rot += ',';
    rot += num(x);
  }
  f["rotation"] = rot;
}

void screen_fields(Fields& f, const Screen& s) {
  pose_fields(f, s.pose);
  f["extent"] = nums({s.extent.width, s.extent.height});
  f["pattern"] = to_string(s.pattern.kind);
  f["pattern_px"] = nums({static_cast<double>(s.pattern.width_px), static_cast<double>(s.pattern.height_px)});
  f["pattern_cells"] = num(s.pattern.cells);
  f["radiance"] = num(s.pattern.radiance);
  f["flip_uv"] = boolean(s.flip_u) + "," + boolean(s.flip_v);
}

Fields element_fields(const OpticalElement& el) {
  Fields f;
  std::visit(Overloaded{
                 [&](const ThinLens& e) {
                   pose_fields(f, e.pose);
                   f["focal_length"] = num(e.focal_length);
                   f["aperture"] = num(e.aperture_diameter);
                 },
                 [&](const HalfMirror& e) {
                   pose_fields(f, e.pose);
                   f["extent"] = nums({e.extent.width, e.extent.height});
                   f["reflectance"] = num(e.reflectance);
                 },
                 [&](const ConvexMirror& e) {
                   pose_fields(f, e.pose);
                   f["extent"] = nums({e.extent.width, e.extent.height});
                   f["magnification"] = num(e.magnification);
                   f["reference_distance"] = num(e.reference_distance);
                 },
                 [&](const TmdPlate& e) {
                   pose_fields(f, e.pose);
                   f["extent"] = nums({e.extent.width, e.extent.height});
                   f["pitch"] = num(e.pitch);
                   f["mirror_ratio"] = num(e.mirror_ratio);
                   f["mode_weights"] = nums({e.weights.p_double, e.weights.p_single, e.weights.p_pass});
                   f["polarizer"] = boolean(e.polarizer);
                   f["angular_fill"] = boolean(e.angular_fill);
                 },
                 [&](const Screen& e) { screen_fields(f, e); },
                 [&](const Absorber& e) {
                   pose_fields(f, e.pose);
                   f["extent"] = nums({e.extent.width, e.extent.height});
                   f["hole_diameter"] = num(e.hole_diameter);
                 },
             },
             el.body);
  return f;
}

void emit_block(std::ostringstream& os, const std::string& header, const Fields& fields) {
  os << header << " {\n";
  for (const auto& [k, v] : fields) os << "  " << k << " = " << v << '\n';
  os << "}\n";
}

}  // namespace

// ------------------------------------------------------------------- Scene

Scene::Scene(std::vector<OpticalElement> elements, EyeCamera eye, std::optional<Screen> background)
    : elements_(std::move(elements)), eye_(std::move(eye)), background_(std::move(background)) {
  std::set<std::string> ids;
  for (const auto& el : elements_) {
    require(!el.id.empty(), "element id must not be empty");
    require(ids.insert(el.id).second, "duplicate element id '" + el.id + "'");
    validate_element(el);
  }
  check_pose(eye_.pose, "eye");
  require(eye_.focal_length > 0.0, "eye: focal length must be positive");
  require(eye_.aperture_diameter > 0.0, "eye: aperture must be positive");
  require(eye_.focus_distance > 0.0, "eye: focus distance must be positive");
  require(eye_.sensor.width_px > 0 && eye_.sensor.height_px > 0 && eye_.sensor.pixel_pitch > 0.0,
          "eye: sensor must have positive size");
  if (background_) check_screen(*background_, "background");
}

const OpticalElement* Scene::find(std::string_view id) const {
  for (const auto& el : elements_) {
    if (el.id == id) return &el;
  }
  return nullptr;
}

Scene Scene::with_eye(const EyeCamera& eye) const { return Scene(elements_, eye, background_); }

Scene Scene::with_element(const OpticalElement& replacement) const {
  auto elements = elements_;
  bool found = false;
  for (auto& el : elements) {
    if (el.id == replacement.id) {
      el = replacement;
      found = true;
    }
  }
  if (!found) throw ValidationError("no element with id '" + replacement.id + "'");
  return Scene(std::move(elements), eye_, background_);
}

// ----------------------------------------------------------------- parsing

Scene parse_scene(std::string_view text) {
  const auto tokens = tokenize(text);
  std::size_t i = 0;
  auto expect = [&](const std::string& what) -> const Token& {
    if (i >= tokens.size()) {
      throw ParseError(tokens.empty() ? 1 : tokens.back().line, "unexpected end of input, expected " + what);
    }
    return tokens[i++];
  };

  std::vector<OpticalElement> elements;
  std::optional<EyeCamera> eye;
  std::optional<Screen> background;
  int eye_count = 0;

  while (i < tokens.size()) {
    const Token head = tokens[i++];
    std::string kind;
    std::string id;
    if (head.text == "element") {
      kind = expect("element kind").text;
      id = expect("element id").text;
      if (kind == "{" || id == "{" || id == "}" || id == "=") throw ParseError(head.line, "element needs a kind and an id");
    } else if (head.text != "eye" && head.text != "background") {
      throw ParseError(head.line, "unexpected '" + head.text + "'");
    }
    const Token& open = expect("'{'");
    if (open.text != "{") throw ParseError(open.line, "expected '{', got '" + open.text + "'");

    Block block(head.text == "element" ? kind + " '" + id + "'" : head.text, head.line);
    while (true) {
      const Token& key = expect("'}'");
      if (key.text == "}") break;
      if (key.text == "{" || key.text == "=") throw ParseError(key.line, "expected a key, got '" + key.text + "'");
      const Token& eq = expect("'='");
      if (eq.text != "=") throw ParseError(eq.line, "expected '=' after '" + key.text + "'");
      const Token& value = expect("a value");
      if (value.text == "{" || value.text == "}" || value.text == "=" || value.line != key.line) {
        throw ParseError(key.line, "missing value for '" + key.text + "'");
      }
      block.add(key, value);
    }

    if (head.text == "eye") {
      ++eye_count;
      eye = read_eye(block);
    } else if (head.text == "background") {
      if (background) throw ValidationError("more than one background block");
      background = read_screen(block);
    } else {
      elements.push_back(read_element(kind, id, block, head.line));
    }
    block.finish();
  }

  if (eye_count != 1) throw ValidationError("scene needs exactly one eye block, found " + std::to_string(eye_count));
  return Scene(std::move(elements), *eye, std::move(background));
}

std::string serialize_scene(const Scene& scene) {
  std::ostringstream os;
  const EyeCamera& eye = scene.eye();
  Fields ef;
  pose_fields(ef, eye.pose);
  ef["focal_length"] = num(eye.focal_length);
  ef["aperture"] = num(eye.aperture_diameter);
  ef["sensor"] = nums({static_cast<double>(eye.sensor.width_px), static_cast<double>(eye.sensor.height_px),
                       eye.sensor.pixel_pitch});
  ef["focus_distance"] = num(eye.focus_distance);
  emit_block(os, "eye", ef);
  if (scene.background()) {
    Fields bf;
    screen_fields(bf, *scene.background());
    emit_block(os, "background", bf);
  }
  for (const auto& el : scene.elements()) {
    emit_block(os, std::string("element ") + el.kind() + " " + el.id, element_fields(el));
  }
  return os.str();
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

}  // namespace ame
