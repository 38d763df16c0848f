#include "stokes_prox/prox.hpp"

#include <algorithm>
#include <cmath>

#include "stokes_prox/errors.hpp"

namespace stokes_prox {

std::vector<double> soft_threshold(std::span<const double> v, double t) {
  if (!(t >= 0.0)) throw ParameterError("soft_threshold: threshold must be >= 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

std::vector<double> prox_conjugate(std::span<const double> y, double sigma, const ProxOracle& prox_g) {
  if (!(sigma > 0.0)) throw ParameterError("prox_conjugate: sigma must be > 0");
  std::vector<double> scaled(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = y[i] / sigma;
  const auto p = prox_g(scaled, 1.0 / sigma);
  if (p.size() != y.size()) throw DimensionError("prox_conjugate: oracle changed the length");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - sigma * p[i];
  return out;
}

void project_linf_ball_inplace(std::span<double> y, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("project_linf_ball: radius must be >= 0");
  for (auto& v : y) v = std::clamp(v, -lambda, lambda);
}

std::vector<double> project_linf_ball(std::span<const double> y, double lambda) {
  std::vector<double> out(y.begin(), y.end());
  project_linf_ball_inplace(out, lambda);
  return out;
}

ProxOracle l1_prox(double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("l1_prox: weight must be >= 0");
  return [lambda](std::span<const double> v, double t) { return soft_threshold(v, t * lambda); };
}

namespace {

// Shared kernel of project_soc and the stack version; t and z are updated in
// place. Returns false when the input was already in the cone.
template <class ZRange>
bool project_cone(double& t, ZRange& z) {
  double rho2 = 0.0;
  for (double v : z) rho2 += v * v;
  const double rho = std::sqrt(rho2);
  if (rho <= t) return false;
  if (rho <= -t) {
    t = 0.0;
    for (auto& v : z) v = 0.0;
    return true;
  }
  const double top = 0.5 * (t + rho);
  const double scale = top / rho;
  for (auto& v : z) v *= scale;
  t = top;
  return true;
}

}  // namespace

ConeSlice project_soc(const ConeSlice& slice) {
  ConeSlice out = slice;
  project_cone(out.t, out.z);
  return out;
}

void project_soc_stack_inplace(ChannelStack& x) {
  const std::size_t comps = x.channels();
  if (comps < 2) throw ConfigError("project_soc_stack: the epigraph constraint needs L >= 2");
  const std::size_t n = x.pixels();
  auto values = x.values();
  std::vector<double> z(comps - 1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 1; c < comps; ++c) z[c - 1] = values[c * n + p];
    double t = values[p];
    if (!project_cone(t, z)) continue;
    values[p] = t;
    for (std::size_t c = 1; c < comps; ++c) values[c * n + p] = z[c - 1];
  }
}

ChannelStack project_soc_stack(const ChannelStack& x) {
  ChannelStack out = x;
  project_soc_stack_inplace(out);
  return out;
}

}  // namespace stokes_prox
