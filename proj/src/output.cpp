#include "spindrift/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace spindrift {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<TrajectoryRecord> make_records(const Trajectory& traj,
                                           const FieldModel& model,
                                           const SpinSettings& spin) {
  std::vector<TrajectoryRecord> out;
  out.reserve(traj.samples.size());
  double phi_prev = 0.0;
  bool first = true;
  for (const auto& st : traj.samples) {
    TrajectoryRecord r{};
    r.t = st.t;
    r.x = st.x[0];
    r.y = st.x[1];
    r.z = st.x[2];
    r.rho = std::hypot(st.x[0], st.x[1]);
    double phi = (r.rho > 0.0) ? std::atan2(st.x[1], st.x[0]) : phi_prev;
    if (!first) {
      // unwrap: keep the angle continuous across the +-pi cut
      while (phi - phi_prev > M_PI) phi -= 2.0 * M_PI;
      while (phi - phi_prev < -M_PI) phi += 2.0 * M_PI;
    }
    phi_prev = phi;
    first = false;
    r.phi = phi;
    r.vx = st.v[0];
    r.vy = st.v[1];
    r.vz = st.v[2];
    r.gamma = st.gamma;
    const FieldSample f = model.sample({st.t, st.x});
    const Invariants inv = field_invariants(f);
    const EigenMode m = mode_at(model, spin, st.t, st.x);
    r.mass_ratio = (m.branch != 0) ? m.mass_ratio : 1.0;
    // lambda^2 of the minus pair: Delta^2 - 2i E.B
    r.lambda2_re = inv.delta2_be;
    r.lambda2_im = -2.0 * inv.e_dot_b;
    const ConservedPair cp = conserved_quantities(st, model, r.mass_ratio);
    r.l_conserved = cp.l;
    r.p_conserved = cp.p;
    r.s_real = st.s_real;
    r.s_imag = st.s_imag;
    out.push_back(r);
  }
  return out;
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectoryRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "# spindrift trajectory csv v1\n";
  f << "t,x,y,z,rho,phi,vx,vy,vz,gamma,mass_ratio,lambda2_re,lambda2_im,"
       "L,P,s_real,s_imag\n";
  for (const auto& r : records) {
    f << format_double(r.t) << ',' << format_double(r.x) << ','
      << format_double(r.y) << ',' << format_double(r.z) << ','
      << format_double(r.rho) << ',' << format_double(r.phi) << ','
      << format_double(r.vx) << ',' << format_double(r.vy) << ','
      << format_double(r.vz) << ',' << format_double(r.gamma) << ','
      << format_double(r.mass_ratio) << ',' << format_double(r.lambda2_re)
      << ',' << format_double(r.lambda2_im) << ','
      << format_double(r.l_conserved) << ',' << format_double(r.p_conserved)
      << ',' << format_double(r.s_real) << ',' << format_double(r.s_imag)
      << '\n';
  }
}

namespace {

struct Frame {
  double x0, x1, y0, y1;      // data range
  double px0, px1, py0, py1;  // pixel viewport

  double mx(double x) const {
    const double r = (x1 - x0) != 0.0 ? (x1 - x0) : 1.0;
    return px0 + (x - x0) / r * (px1 - px0);
  }
  double my(double y) const {
    const double r = (y1 - y0) != 0.0 ? (y1 - y0) : 1.0;
    return py1 - (y - y0) / r * (py1 - py0);
  }
};

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void axes(std::ofstream& f, const Frame& fr, const std::string& title,
          const std::string& xlabel, const std::string& ylabel) {
  f << "<rect x=\"" << fr.px0 << "\" y=\"" << fr.py0 << "\" width=\""
    << fr.px1 - fr.px0 << "\" height=\"" << fr.py1 - fr.py0
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  f << "<text x=\"" << 0.5 * (fr.px0 + fr.px1) << "\" y=\"18\" "
    << "text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  f << "<text x=\"" << 0.5 * (fr.px0 + fr.px1) << "\" y=\"" << fr.py1 + 32
    << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  f << "<text x=\"14\" y=\"" << 0.5 * (fr.py0 + fr.py1)
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
    << 0.5 * (fr.py0 + fr.py1) << ")\">" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = fr.x0 + k * (fr.x1 - fr.x0) / 4.0;
    const double fy = fr.y0 + k * (fr.y1 - fr.y0) / 4.0;
    f << "<text x=\"" << fr.mx(fx) << "\" y=\"" << fr.py1 + 14
      << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_short(fx)
      << "</text>\n";
    f << "<text x=\"" << fr.px0 - 4 << "\" y=\"" << fr.my(fy) + 3
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_short(fy)
      << "</text>\n";
  }
}

}  // namespace

void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<Series>& series) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int W = 720, H = 480;
  Frame fr{0, 1, 0, 1, 64, W - 24, 32, H - 48};
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        fr.x0 = fr.x1 = s.x[i];
        fr.y0 = fr.y1 = s.y[i];
        any = true;
      }
      fr.x0 = std::min(fr.x0, s.x[i]);
      fr.x1 = std::max(fr.x1, s.x[i]);
      fr.y0 = std::min(fr.y0, s.y[i]);
      fr.y1 = std::max(fr.y1, s.y[i]);
    }
  if (fr.y0 == fr.y1) {
    fr.y0 -= 1.0;
    fr.y1 += 1.0;
  }
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\">\n";
  axes(f, fr, title, xlabel, ylabel);
  int li = 0;
  for (const auto& s : series) {
    f << "<polyline fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      f << fmt_short(fr.mx(s.x[i])) << ',' << fmt_short(fr.my(s.y[i])) << ' ';
    f << "\"/>\n";
    f << "<text x=\"" << fr.px0 + 8 << "\" y=\"" << fr.py0 + 16 + 14 * li
      << "\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
      << "</text>\n";
    ++li;
  }
  f << "</svg>\n";
}

namespace {

// Blue-white-red diverging map on [-1, 1].
std::string diverging_color(double u) {
  u = std::clamp(u, -1.0, 1.0);
  int r, g, b;
  if (u < 0) {
    r = static_cast<int>(255 * (1.0 + u));
    g = static_cast<int>(255 * (1.0 + u));
    b = 255;
  } else {
    r = 255;
    g = static_cast<int>(255 * (1.0 - u));
    b = static_cast<int>(255 * (1.0 - u));
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const std::vector<double>& values, int nx, int ny,
                       double x0, double x1, double y0, double y1) {
  if (static_cast<int>(values.size()) != nx * ny)
    throw std::invalid_argument("write_heatmap_svg: size mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  const int W = 560, H = 560;
  Frame fr{x0, x1, y0, y1, 64, W - 24, 32, H - 48};
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\">\n";
  const double cw = (fr.px1 - fr.px0) / nx;
  const double ch = (fr.py1 - fr.py0) / ny;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double v = values[iy * nx + ix] / vmax;
      f << "<rect x=\"" << fmt_short(fr.px0 + ix * cw) << "\" y=\""
        << fmt_short(fr.py1 - (iy + 1) * ch) << "\" width=\""
        << fmt_short(cw + 0.5) << "\" height=\"" << fmt_short(ch + 0.5)
        << "\" fill=\"" << diverging_color(v) << "\"/>\n";
    }
  axes(f, fr, title, "x (c/w)", "y (c/w)");
  f << "</svg>\n";
}

}  // namespace spindrift
