#include "mrad/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mrad/error.hpp"

namespace mrad {
namespace {

constexpr int kPlacementAttempts = 100;
constexpr double kMinAreaFraction = 0.001;
constexpr int kDecals = 10;

// Stream salts: layout, jitter, anomaly and the two noise fields draw from
// independent generators so toggling one feature leaves the others intact.
constexpr std::uint64_t kLayoutSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kJitterSalt = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kAnomalySalt = 0x94d049bb133111ebULL;
constexpr std::uint64_t kQueryNoiseSalt = 0x2545f4914f6cdd1dULL;
constexpr std::uint64_t kReferenceNoiseSalt = 0xd6e8feb86659fd93ULL;
constexpr std::uint64_t kShuffleSalt = 0x632be59bd9b4e019ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform [0, 1) hash of an integer lattice point.
double hash01(std::int64_t x, std::int64_t y, std::uint64_t salt) {
  const std::uint64_t h = splitmix64(salt ^ splitmix64(static_cast<std::uint64_t>(x) * 0x100000001b3ULL ^
                                                       static_cast<std::uint64_t>(y)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// mt19937_64 with portable uniform / normal transforms (the std distributions
// are implementation-defined, which would break cross-platform determinism).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Material { Blanket, Metal, SolarArray, Foil, Radiator, Painted };

struct Panel {
  double x0, y0, x1, y1;
  Material material;
  std::uint64_t salt;
  double shade;  // per-panel brightness variation
  Color tint = Color::Zero();  // Painted decals only

  bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

struct Glint {
  double x, y, radius;
};

struct Layout {
  std::vector<Panel> panels;
  std::vector<Glint> glints;
  Eigen::Vector2d light_dir;
  double light_lo = 0.35;
  double light_hi = 1.0;
  Eigen::Vector2d spot;
  Eigen::Vector2d tint_dir = Eigen::Vector2d(1, 0);  // warm to cool light
  double spot_sigma = 60.0;
  double spot_gain = 0.3;
  int width = 0;
  int height = 0;
};

Color texture(const Panel& p, std::int64_t tx, std::int64_t ty) {
  const double fine = hash01(tx, ty, p.salt) - 0.5;
  Color c;
  switch (p.material) {
    case Material::Blanket: {
      c = Color(0.86, 0.85, 0.80);
      const bool quilt = ((tx + ty) % 14 == 0) || (((tx - ty) % 14 + 14) % 14 == 0);
      if (quilt) c *= 0.72;
      c *= 1.0 + 0.08 * fine;
      break;
    }
    case Material::Metal: {
      c = Color(0.56, 0.57, 0.61);
      if (tx % 24 == 0 || ty % 24 == 0) c = Color(0.25, 0.25, 0.27);
      c *= 1.0 + 0.06 * fine;
      break;
    }
    case Material::SolarArray: {
      c = Color(0.08, 0.12, 0.32);
      if (tx % 9 == 0 || ty % 9 == 0) c = Color(0.36, 0.38, 0.46);
      c *= 1.0 + 0.10 * fine;
      break;
    }
    case Material::Foil: {
      c = Color(0.74, 0.58, 0.24);
      const double crinkle = hash01(tx / 4, ty / 4, p.salt ^ 0x5bd1e995ULL) - 0.5;
      c *= 1.0 + 0.35 * crinkle + 0.05 * fine;
      break;
    }
    case Material::Painted: {
      c = p.tint;
      if (tx % 31 == 0 || ty % 31 == 0) c *= 0.6;
      c *= 1.0 + 0.06 * fine;
      break;
    }
    case Material::Radiator: {
      c = Color(0.92, 0.92, 0.95);
      if (ty % 6 < 2) c *= 0.78;
      c *= 1.0 + 0.04 * fine;
      break;
    }
  }
  return c * p.shade;
}

double illumination(const Layout& layout, double x, double y) {
  const double diag = std::hypot(layout.width, layout.height);
  const Eigen::Vector2d centred(x - 0.5 * layout.width, y - 0.5 * layout.height);
  const double t = std::clamp(0.5 + centred.dot(layout.light_dir) / diag, 0.0, 1.0);
  const double d2 = (Eigen::Vector2d(x, y) - layout.spot).squaredNorm();
  const double spot = layout.spot_gain * std::exp(-0.5 * d2 / (layout.spot_sigma * layout.spot_sigma));
  return layout.light_lo + (layout.light_hi - layout.light_lo) * t + spot;
}

Color light_tint(const Layout& layout, double x, double y) {
  const double diag = std::hypot(layout.width, layout.height);
  const Eigen::Vector2d centred(x - 0.5 * layout.width, y - 0.5 * layout.height);
  const double t = std::clamp(0.5 + 1.5 * centred.dot(layout.tint_dir) / diag, 0.0, 1.0);
  const Color warm(1.0, 0.93, 0.80), cool(0.78, 0.88, 1.0);
  return (1.0 - t) * warm + t * cool;
}

// Topmost panel containing the scene point, or null for black space.
const Panel* panel_at(const Layout& layout, double x, double y) {
  for (auto it = layout.panels.rbegin(); it != layout.panels.rend(); ++it) {
    if (it->contains(x, y)) return &*it;
  }
  return nullptr;
}

// Noise-free radiance at scene point (x, y); black space is exactly zero.
Color shade(const Layout& layout, double x, double y, bool& on_structure) {
  const Panel* panel = panel_at(layout, x, y);
  on_structure = panel != nullptr;
  if (!panel) return Color::Zero();
  const auto tx = static_cast<std::int64_t>(std::floor(x));
  const auto ty = static_cast<std::int64_t>(std::floor(y));
  Color c = texture(*panel, tx, ty).cwiseProduct(light_tint(layout, x, y)) * illumination(layout, x, y);
  for (const Glint& g : layout.glints) {
    const double d = std::hypot(x - g.x, y - g.y);
    if (d < g.radius) c = c.cwiseMax(Color::Constant(0.97 - 0.1 * d / g.radius));
  }
  return c.cwiseMin(1.0).cwiseMax(0.0);
}

Layout make_layout(const SceneParams& params) {
  Rng rng(splitmix64(params.seed ^ kLayoutSalt));
  Layout layout;
  layout.width = params.width;
  layout.height = params.height;
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  layout.light_dir = Eigen::Vector2d(std::cos(angle), std::sin(angle));
  layout.light_lo = rng.uniform(0.3, 0.45);
  layout.light_hi = rng.uniform(0.85, 1.05);
  layout.spot = Eigen::Vector2d(rng.uniform(0, params.width), rng.uniform(0, params.height));
  layout.spot_sigma = rng.uniform(0.1, 0.25) * params.width;
  layout.spot_gain = rng.uniform(0.1, 0.4);
  const double tint_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  layout.tint_dir = Eigen::Vector2d(std::cos(tint_angle), std::sin(tint_angle));

  const double W = params.width;
  const double H = params.height;
  const double target = 1.0 - params.background_fraction;
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(params.width) * params.height, 0);
  std::size_t covered_count = 0;
  const auto total = static_cast<double>(covered.size());
  const std::array livery{Color(0.80, 0.22, 0.16), Color(0.25, 0.62, 0.30), Color(0.22, 0.55, 0.80),
                          Color(0.92, 0.62, 0.15), Color(0.72, 0.30, 0.68)};
  constexpr std::array materials{Material::Blanket, Material::Metal, Material::SolarArray,
                                 Material::Foil, Material::Radiator};
  while (static_cast<double>(covered_count) < target * total && layout.panels.size() < 200) {
    const double pw = rng.uniform(0.10, 0.45) * W;
    const double ph = rng.uniform(0.08, 0.35) * H;
    const double x0 = std::floor(rng.uniform(-0.1 * pw, W - 0.9 * pw));
    const double y0 = std::floor(rng.uniform(-0.1 * ph, H - 0.9 * ph));
    Panel p{x0, y0, x0 + std::round(pw), y0 + std::round(ph),
            materials[static_cast<std::size_t>(rng.integer(0, materials.size() - 1))], rng.next(),
            rng.uniform(0.85, 1.1)};
    layout.panels.push_back(p);
    for (int y = std::max(0, static_cast<int>(p.y0)); y < std::min(params.height, static_cast<int>(p.y1)); ++y) {
      for (int x = std::max(0, static_cast<int>(p.x0)); x < std::min(params.width, static_cast<int>(p.x1)); ++x) {
        auto& c = covered[static_cast<std::size_t>(y) * params.width + x];
        if (!c) {
          c = 1;
          ++covered_count;
        }
      }
    }
  }
  if (!layout.panels.empty()) {
    const std::size_t hosts = layout.panels.size();
    // small coloured markings give the global statistics some saturated hues
    for (int i = 0; i < kDecals; ++i) {
      const Panel& host = layout.panels[static_cast<std::size_t>(rng.integer(0, static_cast<int>(hosts) - 1))];
      const double dw = std::min(host.x1 - host.x0, std::round(rng.uniform(6, 24)));
      const double dh = std::min(host.y1 - host.y0, std::round(rng.uniform(4, 16)));
      const double x0 = std::floor(rng.uniform(host.x0, host.x1 - dw));
      const double y0 = std::floor(rng.uniform(host.y0, host.y1 - dh));
      Panel d{x0, y0, x0 + dw, y0 + dh, Material::Painted, rng.next(), rng.uniform(0.9, 1.1)};
      d.tint = livery[static_cast<std::size_t>(rng.integer(0, livery.size() - 1))];
      layout.panels.push_back(d);
    }
    const int glints = rng.integer(2, 6);
    for (int i = 0; i < glints; ++i) {
      const Panel& host = layout.panels[static_cast<std::size_t>(rng.integer(0, static_cast<int>(layout.panels.size()) - 1))];
      layout.glints.push_back({rng.uniform(host.x0, host.x1), rng.uniform(host.y0, host.y1),
                               rng.uniform(1.5, 4.0)});
    }
  }
  return layout;
}

// Rasterised anomaly footprint in query pixel coordinates.
struct Planted {
  std::vector<std::pair<int, int>> pixels;
  Color color;
};

bool inside_shape(AnomalyShape shape, double dx, double dy, double a, double b, double cos_t,
                  double sin_t) {
  const double u = cos_t * dx + sin_t * dy;
  const double v = -sin_t * dx + cos_t * dy;
  if (shape == AnomalyShape::Blob) return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
  return std::abs(u) <= a && std::abs(v) <= b;
}

Planted place_anomaly(const SceneParams& params, const AnomalySpec& spec,
                      const std::vector<std::uint8_t>& structure) {
  Rng rng(splitmix64(params.seed ^ kAnomalySalt));
  const double area = spec.area_fraction * params.width * params.height;
  const std::array palette{Color(0.95, 0.15, 0.10), Color(0.15, 0.85, 0.25),
                               Color(0.90, 0.20, 0.85), Color(0.10, 0.80, 0.95),
                               Color(0.98, 0.55, 0.05)};
  const Color target = palette[static_cast<std::size_t>(rng.integer(0, palette.size() - 1))];
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    double a, b;
    if (spec.shape == AnomalyShape::Blob) {
      const double aspect = rng.uniform(1.0, 2.0);
      b = std::sqrt(area / (std::numbers::pi * aspect));
      a = aspect * b;
    } else {
      const double aspect = rng.uniform(2.0, 4.0);
      b = 0.5 * std::sqrt(area / aspect);  // half width
      a = aspect * b;                      // half length
    }
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double reach = a + 1.0;
    const double cx = rng.uniform(reach, params.width - reach);
    const double cy = rng.uniform(reach, params.height - reach);
    if (!(params.width > 2 * reach && params.height > 2 * reach)) break;

    Planted planted;
    planted.color = target;
    std::size_t on_structure = 0;
    for (int y = std::max(0, static_cast<int>(cy - reach)); y <= std::min(params.height - 1, static_cast<int>(cy + reach)); ++y) {
      for (int x = std::max(0, static_cast<int>(cx - reach)); x <= std::min(params.width - 1, static_cast<int>(cx + reach)); ++x) {
        if (inside_shape(spec.shape, x + 0.5 - cx, y + 0.5 - cy, a, b, cos_t, sin_t)) {
          planted.pixels.emplace_back(x, y);
          on_structure += structure[static_cast<std::size_t>(y) * params.width + x];
        }
      }
    }
    if (!planted.pixels.empty() && 2 * on_structure >= planted.pixels.size()) return planted;
  }
  throw GenerationError("cannot place anomaly for seed " + std::to_string(params.seed) + " after " +
                        std::to_string(kPlacementAttempts) + " attempts");
}

}  // namespace

void SceneParams::validate() const {
  if (width < 8 || height < 8) throw std::invalid_argument("scene must be at least 8x8");
  if (!(background_fraction >= 0.0 && background_fraction <= 1.0)) {
    throw std::invalid_argument("background_fraction must lie in [0, 1]");
  }
  if (anomaly) {
    if (!(anomaly->area_fraction >= kMinAreaFraction && anomaly->area_fraction < 0.5)) {
      throw std::invalid_argument("anomaly area_fraction must lie in [0.001, 0.5)");
    }
    if (!(anomaly->contrast > 0.0 && anomaly->contrast <= 1.0)) {
      throw std::invalid_argument("anomaly contrast must lie in (0, 1]");
    }
  }
  if (!(jitter.translation_px >= 0.0)) throw std::invalid_argument("translation_px must be >= 0");
  if (!(jitter.gain >= 0.0 && jitter.gain < 1.0)) throw std::invalid_argument("gain must lie in [0, 1)");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
}

Scene generate_scene(const SceneParams& params) {
  params.validate();
  const Layout layout = make_layout(params);

  Rng jitter(splitmix64(params.seed ^ kJitterSalt));
  const double shift_x = jitter.uniform(-1.0, 1.0) * params.jitter.translation_px;
  const double shift_y = jitter.uniform(-1.0, 1.0) * params.jitter.translation_px;
  const double gain = 1.0 + params.jitter.gain * jitter.uniform(-1.0, 1.0);

  const int w = params.width;
  const int h = params.height;
  Scene scene;
  scene.reference = ImageRGB(w, h);
  scene.query = ImageRGB(w, h);
  scene.mask = LabelMask(w, h, Label::Background);
  std::vector<std::uint8_t> structure(static_cast<std::size_t>(w) * h, 0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool ref_on = false, query_on = false;
      scene.reference(x, y) = shade(layout, x + 0.5, y + 0.5, ref_on);
      scene.query(x, y) = shade(layout, x + 0.5 - shift_x, y + 0.5 - shift_y, query_on);
      if (query_on) {
        scene.mask(x, y) = Label::Foreground;
        structure[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  }

  if (params.anomaly) {
    const Planted planted = place_anomaly(params, *params.anomaly, structure);
    const double c = params.anomaly->contrast;
    for (const auto& [x, y] : planted.pixels) {
      const double lit = illumination(layout, x + 0.5, y + 0.5);
      const double grain = 1.0 + 0.06 * (hash01(x, y, params.seed ^ kAnomalySalt) - 0.5);
      const Color object = (planted.color * lit * grain).cwiseMin(1.0);
      scene.query(x, y) = (1.0 - c) * scene.query(x, y) + c * object;
      scene.mask(x, y) = Label::Anomaly;
    }
    scene.is_anomalous = !planted.pixels.empty();
  }

  Rng query_noise(splitmix64(params.seed ^ kQueryNoiseSalt));
  Rng reference_noise(splitmix64(params.seed ^ kReferenceNoiseSalt));
  const double sigma = params.noise_sigma;
  for (std::size_t i = 0; i < scene.query.size(); ++i) {
    Color q = scene.query[i] * gain;
    Color r = scene.reference[i];
    if (sigma > 0.0) {
      for (int k = 0; k < 3; ++k) {
        q[k] += sigma * query_noise.normal();
        r[k] += sigma * reference_noise.normal();
      }
    }
    scene.query[i] = q.cwiseMax(0.0).cwiseMin(1.0);
    scene.reference[i] = r.cwiseMax(0.0).cwiseMin(1.0);
  }
  return scene;
}

std::vector<SceneParams> plan_suite(int count, double anomalous_fraction, std::uint64_t base_seed,
                                    const SceneParams& base) {
  if (count < 2) throw std::invalid_argument("suite needs at least 2 scenes, got " + std::to_string(count));
  if (!(anomalous_fraction > 0.0 && anomalous_fraction < 1.0)) {
    throw std::invalid_argument("anomalous_fraction must lie strictly between 0 and 1");
  }
  const auto anomalous = static_cast<std::size_t>(std::ceil(anomalous_fraction * count));
  if (anomalous == 0 || anomalous >= static_cast<std::size_t>(count)) {
    throw std::invalid_argument("anomalous_fraction leaves one class empty");
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle(splitmix64(base_seed ^ kShuffleSalt));
  for (std::size_t i = order.size() - 1; i > 0; --i) {  // Fisher-Yates
    std::swap(order[i], order[static_cast<std::size_t>(shuffle.next() % (i + 1))]);
  }
  std::vector<SceneParams> plan(static_cast<std::size_t>(count), base);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    plan[i].seed = base_seed + i;
    plan[i].anomaly.reset();
  }
  for (std::size_t k = 0; k < anomalous; ++k) {
    SceneParams& p = plan[order[k]];
    AnomalySpec spec = base.anomaly.value_or(AnomalySpec{});
    spec.shape = (splitmix64(p.seed) & 1) ? AnomalyShape::Bar : AnomalyShape::Blob;
    p.anomaly = spec;
  }
  return plan;
}

std::vector<Scene> generate_suite(int count, double anomalous_fraction, std::uint64_t base_seed,
                                  const SceneParams& base) {
  std::vector<Scene> scenes;
  for (const SceneParams& p : plan_suite(count, anomalous_fraction, base_seed, base)) {
    scenes.push_back(generate_scene(p));
  }
  return scenes;
}

std::string scene_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", index);
  return buf;
}

void export_suite(std::span<const SceneParams> plan, const std::filesystem::path& root) {
  std::error_code ec;
  for (const char* sub : {"query", "reference", "mask"}) {
    std::filesystem::create_directories(root / sub, ec);
    if (ec) throw IoError("cannot create '" + (root / sub).string() + "': " + ec.message());
  }
  std::ofstream labels(root / "labels.csv", std::ios::binary | std::ios::trunc);
  if (!labels) throw IoError("cannot open '" + (root / "labels.csv").string() + "' for writing");
  labels << "filename,label\n";
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Scene scene = generate_scene(plan[i]);
    const std::string file = scene_name(i) + ".png";
    save_image(scene.query, root / "query" / file);
    save_image(scene.reference, root / "reference" / file);
    if (scene.is_anomalous) save_label_mask(scene.mask, root / "mask" / file);
    labels << file << ',' << (scene.is_anomalous ? "anomalous" : "normal") << '\n';
  }
  if (!labels) throw IoError("failed writing labels.csv");
}

}  // namespace mrad
