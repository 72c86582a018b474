#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli/cli.hpp"
#include "rpwy/errors.hpp"
#include "rpwy/sweep_io.hpp"

namespace rpwy::cli {
namespace {

constexpr std::size_t kOverlayPoints = 200;
constexpr double kEnvelopeM1 = 0.32;
constexpr double kEnvelopeM05 = 0.015;

struct Axis {
  double lo, hi;
  bool log;
  double px0, px1;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return px0 + (x - a) / (b - a) * (px1 - px0);
  }
};

Axis fit_axis(const std::vector<double>& v, bool log, double px0, double px1) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v) {
    if (log && !(x > 0.0)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!std::isfinite(lo)) {
    lo = log ? 1e-3 : 0.0;
    hi = 1.0;
  }
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10.0;
  } else {
    lo = std::min(lo, 0.0);
    if (hi <= lo) hi = lo + 1.0;
  }
  return {lo, hi, log, px0, px1};
}

void panel(std::ostringstream& svg, double ox, const char* title, const char* ylabel, const std::vector<double>& x,
           const std::vector<double>& y, bool log, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& curves) {
  const double w = 360, h = 300, left = ox + 60, top = 30;
  std::vector<double> all_x = x, all_y = y;
  Axis ax = fit_axis(all_x, log, left, left + w);
  Axis ay = fit_axis(all_y, log, top + h, top);
  if (!log) {
    const double hi = std::max(ax.hi, ay.hi);
    ax.hi = ay.hi = hi;
  }
  svg << "<rect x='" << left << "' y='" << top << "' width='" << w << "' height='" << h
      << "' fill='none' stroke='black'/>\n";
  svg << "<text x='" << left + w / 2 << "' y='" << top - 10 << "' text-anchor='middle'>" << title << "</text>\n";
  svg << "<text x='" << left + w / 2 << "' y='" << top + h + 35 << "' text-anchor='middle'>C_ST</text>\n";
  svg << "<text x='" << ox + 15 << "' y='" << top + h / 2 << "' transform='rotate(-90 " << ox + 15 << ' '
      << top + h / 2 << ")' text-anchor='middle'>" << ylabel << "</text>\n";
  svg << "<text x='" << left << "' y='" << top + h + 15 << "' font-size='10'>" << format_real(ax.lo) << "</text>\n";
  svg << "<text x='" << left + w << "' y='" << top + h + 15 << "' font-size='10' text-anchor='end'>"
      << format_real(ax.hi) << "</text>\n";
  svg << "<text x='" << left - 4 << "' y='" << top + h << "' font-size='10' text-anchor='end'>" << format_real(ay.lo)
      << "</text>\n";
  svg << "<text x='" << left - 4 << "' y='" << top + 10 << "' font-size='10' text-anchor='end'>"
      << format_real(ay.hi) << "</text>\n";
  auto inside = [&](double xv, double yv) {
    if (log && (!(xv > 0.0) || !(yv > 0.0))) return false;
    return xv >= ax.lo && xv <= ax.hi && yv >= ay.lo && yv <= ay.hi;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!inside(x[i], y[i])) continue;
    svg << "<circle cx='" << ax.map(x[i]) << "' cy='" << ay.map(y[i]) << "' r='1.5' fill='steelblue'/>\n";
  }
  const char* colors[] = {"crimson", "darkorange", "seagreen"};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    svg << "<polyline fill='none' stroke='" << colors[c % 3] << "' points='";
    for (std::size_t i = 0; i < curves[c].first.size(); ++i) {
      const double xv = curves[c].first[i], yv = curves[c].second[i];
      if (inside(xv, yv)) svg << ax.map(xv) << ',' << ay.map(yv) << ' ';
    }
    svg << "'/>\n";
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

}  // namespace

PlotSeries build_plot_series(const std::vector<RunResult>& runs) {
  PlotSeries s;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : runs) {
    if (r.flag != RunFlag::Ok) continue;
    s.run_index.push_back(r.run_index);
    s.c_st.push_back(r.c_st);
    s.two_dy2.push_back(2.0 * r.uncertainty * r.uncertainty);
    s.ratio.push_back(r.ratio);
    if (r.c_st > 0.0) {
      lo = std::min(lo, r.c_st);
      hi = std::max(hi, r.c_st);
    }
  }
  if (std::isfinite(lo)) {
    for (std::size_t i = 0; i < kOverlayPoints; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kOverlayPoints - 1);
      s.overlay_x.push_back(x);
      s.overlay_identity.push_back(x);
      s.overlay_m1.push_back(kEnvelopeM1 / x);
      s.overlay_m05.push_back(kEnvelopeM05 / std::sqrt(x));
    }
  }
  return s;
}

std::string render_svg(const PlotSeries& s) {
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='380' font-family='sans-serif' font-size='12'>\n";
  panel(svg, 0, "bound: 2 dY^2 vs C_ST", "2 dY^2", s.c_st, s.two_dy2, false, {{s.overlay_x, s.overlay_identity}});
  std::vector<double> rx, ry;
  for (std::size_t i = 0; i < s.c_st.size(); ++i) {
    if (std::isfinite(s.ratio[i])) {
      rx.push_back(s.c_st[i]);
      ry.push_back(s.ratio[i]);
    }
  }
  panel(svg, 450, "sensitivity: Y dY / |dY/dB| vs C_ST", "ratio", rx, ry, true,
        {{s.overlay_x, s.overlay_m1}, {s.overlay_x, s.overlay_m05}});
  svg << "</svg>\n";
  return svg.str();
}

int cmd_plotdata(const PlotdataConfig& cfg, std::ostream& out) {
  const auto runs = read_sweep_csv(cfg.in);
  const PlotSeries s = build_plot_series(runs);
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.out_dir.string() + ": " + ec.message());

  std::ostringstream bound, ratio, overlay;
  bound << "run_index,c_st,two_dY2\n";
  ratio << "run_index,c_st,ratio\n";
  for (std::size_t i = 0; i < s.c_st.size(); ++i) {
    bound << s.run_index[i] << ',' << format_real(s.c_st[i]) << ',' << format_real(s.two_dy2[i]) << '\n';
    if (std::isfinite(s.ratio[i])) {
      ratio << s.run_index[i] << ',' << format_real(s.c_st[i]) << ',' << format_real(s.ratio[i]) << '\n';
    }
  }
  overlay << "c_st,identity,envelope_m1,envelope_m05\n";
  for (std::size_t i = 0; i < s.overlay_x.size(); ++i) {
    overlay << format_real(s.overlay_x[i]) << ',' << format_real(s.overlay_identity[i]) << ','
            << format_real(s.overlay_m1[i]) << ',' << format_real(s.overlay_m05[i]) << '\n';
  }
  write_text(cfg.out_dir / "bound_panel.csv", bound.str());
  write_text(cfg.out_dir / "ratio_panel.csv", ratio.str());
  write_text(cfg.out_dir / "overlays.csv", overlay.str());
  if (cfg.svg) write_text(cfg.out_dir / "scatter.svg", render_svg(s));
  out << "points = " << s.c_st.size() << '\n' << "out_dir = " << cfg.out_dir.string() << '\n';
  return kOk;
}

}  // namespace rpwy::cli
