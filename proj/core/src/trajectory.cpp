#include "cavityxy/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cavityxy {

std::string_view to_string(Phase p) {
  return p == Phase::Ferromagnetic ? "FERROMAGNETIC" : "PARAMAGNETIC";
}

void Trajectory::reserve(std::size_t n) {
  t.reserve(n);
  x.reserve(n);
  y.reserve(n);
  z.reserve(n);
  energy.reserve(n);
}

void Trajectory::push(double time, double xn, double yn, double zn, double e) {
  t.push_back(time);
  x.push_back(xn);
  y.push_back(yn);
  z.push_back(zn);
  energy.push_back(e);
}

void Trajectory::push(double time, double xn, double yn, double zn, double e,
                      std::complex<double> beta) {
  push(time, xn, yn, zn, e);
  beta_re.push_back(beta.real());
  beta_im.push_back(beta.imag());
}

std::vector<double> output_grid(double t_final, double dt_out) {
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (!(dt_out > 0.0)) throw std::invalid_argument("dt_out must be > 0");
  const auto n = static_cast<std::size_t>(std::floor(t_final / dt_out + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * dt_out);
  if (t_final - grid.back() > 1e-9 * dt_out) grid.push_back(t_final);
  return grid;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const bool cav = tr.has_cavity_columns();
  os << "t_s,x_norm,y_norm,z_norm,energy";
  if (cav) os << ",beta_re,beta_im,n_sim,n_phys_shot";
  os << "\r\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    os << format_double(tr.t[i]) << ',' << format_double(tr.x[i]) << ','
       << format_double(tr.y[i]) << ',' << format_double(tr.z[i]) << ','
       << format_double(tr.energy[i]);
    if (cav) {
      const double br = i < tr.beta_re.size() ? tr.beta_re[i] : 0.0;
      const double bi = i < tr.beta_im.size() ? tr.beta_im[i] : 0.0;
      os << ',' << format_double(br) << ',' << format_double(bi) << ',' << tr.n_sim << ','
         << format_double(tr.n_phys);
    }
    os << "\r\n";
  }
}

}  // namespace cavityxy
