#include "gscope/svg.hpp"

#include <cstdio>
#include <sstream>

namespace gscope::cli {

namespace {

using cplx = std::complex<double>;

constexpr double kSize = 640.0;
constexpr double kPad = 20.0;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Window coordinates to canvas pixels; the imaginary axis points up.
struct Mapper {
  const locus::Window& w;
  double sx() const { return (kSize - 2.0 * kPad) / (w.re_max - w.re_min); }
  double sy() const { return (kSize - 2.0 * kPad) / (w.im_max - w.im_min); }
  double x(double re) const { return kPad + (re - w.re_min) * sx(); }
  double y(double im) const { return kSize - kPad - (im - w.im_min) * sy(); }
};

}  // namespace

std::string render_svg(const AnalysisResult& r) {
  const locus::Window& w = r.config.image;
  Mapper m{w};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
     << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " "
     << kSize << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" fill=\"#ffffff\"/>\n";
  os << "<rect x=\"" << num(kPad) << "\" y=\"" << num(kPad) << "\" width=\""
     << num(kSize - 2 * kPad) << "\" height=\"" << num(kSize - 2 * kPad)
     << "\" fill=\"none\" stroke=\"#888888\"/>\n";

  // Axes, when they cross the window.
  if (w.re_min < 0.0 && w.re_max > 0.0)
    os << "<line x1=\"" << num(m.x(0)) << "\" y1=\"" << num(kPad)
       << "\" x2=\"" << num(m.x(0)) << "\" y2=\"" << num(kSize - kPad)
       << "\" stroke=\"#dddddd\"/>\n";
  if (w.im_min < 0.0 && w.im_max > 0.0)
    os << "<line x1=\"" << num(kPad) << "\" y1=\"" << num(m.y(0))
       << "\" x2=\"" << num(kSize - kPad) << "\" y2=\"" << num(m.y(0))
       << "\" stroke=\"#dddddd\"/>\n";

  // Loops first so markers stay visible on top.
  for (std::size_t i = 0; i < r.monodromy.generators.size(); ++i) {
    const auto& loop = r.monodromy.generators[i].loop;
    os << "<ellipse cx=\"" << num(m.x(loop.center.real())) << "\" cy=\""
       << num(m.y(loop.center.imag())) << "\" rx=\"" << num(loop.radius * m.sx())
       << "\" ry=\"" << num(loop.radius * m.sy())
       << "\" fill=\"none\" stroke=\"#3366cc\" stroke-width=\"1.5\"/>\n";
    cplx dir = loop.center - loop.base;
    double len = std::abs(dir);
    cplx entry = len > 0.0 ? loop.center - dir / len * loop.radius : loop.base;
    os << "<line x1=\"" << num(m.x(loop.base.real())) << "\" y1=\""
       << num(m.y(loop.base.imag())) << "\" x2=\"" << num(m.x(entry.real()))
       << "\" y2=\"" << num(m.y(entry.imag()))
       << "\" stroke=\"#3366cc\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  }

  // Branch-locus representatives inside the image window.
  int shown = 0;
  for (std::size_t i = 0; i < r.locus.values.size(); ++i) {
    cplx v = r.locus.values[i];
    if (!w.contains(v)) continue;
    ++shown;
    os << "<circle cx=\"" << num(m.x(v.real())) << "\" cy=\""
       << num(m.y(v.imag()))
       << "\" r=\"4\" fill=\"#cc3333\"><title>critical value " << i
       << "</title></circle>\n";
  }

  if (r.roots) {
    double bx = m.x(r.base_point.real()), by = m.y(r.base_point.imag());
    os << "<path d=\"M " << num(bx - 5) << " " << num(by) << " L " << num(bx)
       << " " << num(by - 5) << " L " << num(bx + 5) << " " << num(by)
       << " L " << num(bx) << " " << num(by + 5)
       << " Z\" fill=\"#228833\"><title>base point</title></path>\n";
  }

  if (r.locus.values.empty())
    os << "<text x=\"" << num(kPad + 8) << "\" y=\"" << num(kPad + 20)
       << "\" font-family=\"monospace\" font-size=\"13\" fill=\"#555555\">"
          "no critical values in the domain window</text>\n";
  else if (shown == 0)
    os << "<text x=\"" << num(kPad + 8) << "\" y=\"" << num(kPad + 20)
       << "\" font-family=\"monospace\" font-size=\"13\" fill=\"#555555\">"
          "all critical values lie outside the image window</text>\n";

  os << "</svg>\n";
  return os.str();
}

}  // namespace gscope::cli
