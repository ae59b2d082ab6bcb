#include "ctops/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ctops {
namespace {

void require_projection(HalfInteger j, HalfInteger m, const char* what) {
  if (j.twice() < 0) throw std::invalid_argument(std::string(what) + ": negative spin");
  if (m.abs() > j || !same_parity(j, m)) {
    throw std::invalid_argument(std::string(what) + ": projection " + m.to_string() + " invalid for spin " +
                                j.to_string());
  }
}

constexpr double kRescaleAbove = 1e250;

// Coefficients of the Schulten–Gordon recursion for the 3j symbol
// (F I J; -M m_I m_J) as a function of F.
struct Recursion {
  double i, j, mi, mj, m;

  double a(double f) const {
    const double t = (f * f - (i - j) * (i - j)) * ((i + j + 1.0) * (i + j + 1.0) - f * f) * (f * f - m * m);
    return t > 0.0 ? std::sqrt(t) : 0.0;
  }
  double b(double f) const {
    return -(2.0 * f + 1.0) * (-m * (i * (i + 1.0) - j * (j + 1.0)) - f * (f + 1.0) * (mj - mi));
  }
};

void rescale(std::vector<double>& v, std::size_t from, std::size_t to) {
  for (std::size_t k = from; k <= to; ++k) v[k] /= kRescaleAbove;
}

}  // namespace

SubspaceSpec SubspaceSpec::symmetric(HalfInteger spin) { return {spin, spin, HalfInteger{}}; }

void SubspaceSpec::validate() const {
  if (spin_i.twice() < 0 || spin_j.twice() < 0) throw std::invalid_argument("SubspaceSpec: negative spin");
  if (m_f.abs() > spin_i + spin_j) throw std::invalid_argument("SubspaceSpec: |m_f| exceeds spin_i + spin_j");
  if (!same_parity(m_f, spin_i + spin_j)) {
    throw std::invalid_argument("SubspaceSpec: m_f must differ from spin_i + spin_j by an integer");
  }
}

HalfInteger SubspaceSpec::min_mj() const { return std::max(-spin_j, m_f - spin_i); }
HalfInteger SubspaceSpec::max_mj() const { return std::min(spin_j, m_f + spin_i); }
int SubspaceSpec::dimension() const { return (max_mj() - min_mj()).twice() / 2 + 1; }
HalfInteger SubspaceSpec::min_f() const { return std::max((spin_i - spin_j).abs(), m_f.abs()); }

std::vector<double> clebsch_gordan_series(HalfInteger spin_i, HalfInteger m_i, HalfInteger spin_j, HalfInteger m_j) {
  require_projection(spin_i, m_i, "clebsch_gordan");
  require_projection(spin_j, m_j, "clebsch_gordan");
  const HalfInteger m_total = m_i + m_j;
  const HalfInteger f_min = std::max((spin_i - spin_j).abs(), m_total.abs());
  const HalfInteger f_max = spin_i + spin_j;
  const std::size_t n = static_cast<std::size_t>((f_max - f_min).twice() / 2 + 1);
  if (n == 1) return {1.0};

  const Recursion rec{spin_i.value(), spin_j.value(), m_i.value(), m_j.value(), m_total.value()};
  const double f0 = f_min.value();
  auto f_at = [&](std::size_t k) { return f0 + static_cast<double>(k); };

  // Forward sweep from F_min while |f| grows (classically forbidden side).
  std::vector<double> fw(n, 0.0);
  fw[0] = 1.0;
  if (f_min.twice() == 0) {
    // I = J, M = 0: the F = 0 equation is empty; seed from the closed-form ratio
    // ⟨1 0|I m; I -m⟩ / ⟨0 0|I m; I -m⟩ = m √3 / √(I(I+1)), divided by √3 for the 3j symbol.
    fw[1] = rec.mi / std::sqrt(rec.i * (rec.i + 1.0));
  } else {
    fw[1] = -rec.b(f0) * fw[0] / (f0 * rec.a(f0 + 1.0));
  }
  std::size_t k = 1;
  while (k < n - 1 && std::abs(fw[k]) > std::abs(fw[k - 1])) {
    const double f = f_at(k);
    fw[k + 1] = -(rec.b(f) * fw[k] + (f + 1.0) * rec.a(f) * fw[k - 1]) / (f * rec.a(f + 1.0));
    ++k;
    if (std::abs(fw[k]) > kRescaleAbove) rescale(fw, 0, k);
  }
  const std::size_t match = k;

  std::vector<double> g(n, 0.0);
  if (match == n - 1) {
    g = fw;
  } else {
    // Backward sweep from F_max down to match - 1; the two overlap points fix the scale.
    std::vector<double> bw(n, 0.0);
    bw[n - 1] = 1.0;
    const double fmax = f_at(n - 1);
    bw[n - 2] = -rec.b(fmax) * bw[n - 1] / ((fmax + 1.0) * rec.a(fmax));
    for (std::size_t q = n - 2; q > match - 1; --q) {
      const double f = f_at(q);
      bw[q - 1] = -(rec.b(f) * bw[q] + f * rec.a(f + 1.0) * bw[q + 1]) / ((f + 1.0) * rec.a(f));
      if (std::abs(bw[q - 1]) > kRescaleAbove) rescale(bw, q - 1, n - 1);
    }
    const double num = fw[match - 1] * bw[match - 1] + fw[match] * bw[match];
    const double den = fw[match - 1] * fw[match - 1] + fw[match] * fw[match];
    const double scale = num / den;
    for (std::size_t q = 0; q + 1 < match; ++q) g[q] = fw[q] * scale;
    for (std::size_t q = match - 1; q < n; ++q) g[q] = bw[q];
  }

  // 3j → CG up to an F-independent sign, then normalise and fix the sign by
  // positivity of the stretched (F = I + J) coefficient.
  double peak = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    g[q] *= std::sqrt(2.0 * f_at(q) + 1.0);
    peak = std::max(peak, std::abs(g[q]));
  }
  double norm2 = 0.0;
  for (double& v : g) {
    v /= peak;
    norm2 += v * v;
  }
  const double norm = std::copysign(std::sqrt(norm2), g[n - 1]);
  for (double& v : g) v /= norm;
  return g;
}

double clebsch_gordan(HalfInteger spin_i, HalfInteger m_i, HalfInteger spin_j, HalfInteger m_j, HalfInteger f,
                      HalfInteger m_total) {
  require_projection(spin_i, m_i, "clebsch_gordan");
  require_projection(spin_j, m_j, "clebsch_gordan");
  if (f.twice() < 0 || !same_parity(f, spin_i + spin_j)) {
    throw std::invalid_argument("clebsch_gordan: F = " + f.to_string() + " has the wrong parity");
  }
  if (!same_parity(m_total, f)) throw std::invalid_argument("clebsch_gordan: M has the wrong parity");
  if (m_total != m_i + m_j) return 0.0;
  const HalfInteger f_min = std::max((spin_i - spin_j).abs(), m_total.abs());
  if (f < f_min || f > spin_i + spin_j) return 0.0;
  const auto series = clebsch_gordan_series(spin_i, m_i, spin_j, m_j);
  return series[static_cast<std::size_t>((f - f_min).twice() / 2)];
}

CGBlock cg_block(const SubspaceSpec& spec) {
  spec.validate();
  const int d = spec.dimension();
  CGBlock block;
  block.matrix.resize(d, d);
  for (int r = 0; r < d; ++r) block.f_values.push_back(spec.min_f() + HalfInteger::from_int(r));
  for (int c = 0; c < d; ++c) {
    const auto column = clebsch_gordan_series(spec.spin_i, spec.mi(c), spec.spin_j, spec.mj(c));
    for (int r = 0; r < d; ++r) block.matrix(r, c) = column[r];
  }
  return block;
}

Eigen::VectorXd op_f_squared(const SubspaceSpec& spec) {
  spec.validate();
  const int d = spec.dimension();
  Eigen::VectorXd out(d);
  for (int r = 0; r < d; ++r) {
    const double f = (spec.min_f() + HalfInteger::from_int(r)).value();
    out[r] = f * (f + 1.0);
  }
  return out;
}

Eigen::VectorXd op_j_z(const SubspaceSpec& spec) {
  spec.validate();
  const int d = spec.dimension();
  Eigen::VectorXd out(d);
  for (int c = 0; c < d; ++c) out[c] = spec.mj(c).value();
  return out;
}

Eigen::VectorXd op_i_dot_j(const SubspaceSpec& spec) {
  const double i = spec.spin_i.value();
  const double j = spec.spin_j.value();
  return ((op_f_squared(spec).array() - i * (i + 1.0) - j * (j + 1.0)) * 0.5).matrix();
}

// Cache layout: 8-byte magic, int32 {2I, 2J, 2M_F, d}, then d*d doubles column-major.
namespace {
constexpr std::array<char, 8> kCgMagic{'C', 'T', 'O', 'P', 'S', 'C', 'G', '1'};
}

std::filesystem::path cg_cache_path(const std::filesystem::path& dir, const SubspaceSpec& spec) {
  return dir / ("cg_" + std::to_string(spec.spin_i.twice()) + "_" + std::to_string(spec.spin_j.twice()) + "_" +
                std::to_string(spec.m_f.twice()) + ".bin");
}

void save_cg_block(const std::filesystem::path& file, const SubspaceSpec& spec, const CGBlock& block) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CG cache " + file.string());
  const std::array<std::int32_t, 4> header{spec.spin_i.twice(), spec.spin_j.twice(), spec.m_f.twice(),
                                           static_cast<std::int32_t>(block.matrix.rows())};
  out.write(kCgMagic.data(), kCgMagic.size());
  out.write(reinterpret_cast<const char*>(header.data()), sizeof(header));
  out.write(reinterpret_cast<const char*>(block.matrix.data()),
            static_cast<std::streamsize>(sizeof(double) * block.matrix.size()));
}

std::optional<CGBlock> load_cg_block(const std::filesystem::path& file, const SubspaceSpec& spec) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  std::array<std::int32_t, 4> header{};
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(header.data()), sizeof(header));
  if (!in || magic != kCgMagic) return std::nullopt;
  const int d = spec.dimension();
  if (header[0] != spec.spin_i.twice() || header[1] != spec.spin_j.twice() || header[2] != spec.m_f.twice() ||
      header[3] != d) {
    return std::nullopt;
  }
  CGBlock block;
  block.matrix.resize(d, d);
  in.read(reinterpret_cast<char*>(block.matrix.data()), static_cast<std::streamsize>(sizeof(double) * d * d));
  if (!in) return std::nullopt;
  for (int r = 0; r < d; ++r) block.f_values.push_back(spec.min_f() + HalfInteger::from_int(r));
  return block;
}

CGBlock cached_cg_block(const SubspaceSpec& spec, const std::optional<std::filesystem::path>& dir) {
  if (!dir) return cg_block(spec);
  const auto file = cg_cache_path(*dir, spec);
  if (auto hit = load_cg_block(file, spec)) return *std::move(hit);
  CGBlock block = cg_block(spec);
  std::error_code ec;
  std::filesystem::create_directories(*dir, ec);
  if (!ec) save_cg_block(file, spec, block);
  return block;
}

}  // namespace ctops
