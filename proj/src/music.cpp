#include "sparsemusic/music.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sparsemusic {

namespace {

// Relative floor below which a singular value counts as zero for the gap rule.
constexpr double kZeroFloor = 1e-13;

std::string spectrum_listing(const RVector& sv) {
  std::ostringstream out;
  out << "[";
  for (Eigen::Index i = 0; i < sv.size(); ++i) out << (i ? ", " : "") << sv(i);
  out << "]";
  return out.str();
}

}  // namespace

SpectralDecomposition decompose(const CMatrix& y, const RankRule& rule) {
  if (y.size() == 0) throw std::invalid_argument("decompose: empty data matrix");
  Eigen::BDCSVD<CMatrix> svd(y, Eigen::ComputeFullU);
  SpectralDecomposition dec;
  dec.singular_values = svd.singularValues();
  dec.left = svd.matrixU();
  const RVector& sv = dec.singular_values;
  const auto k_max = static_cast<std::size_t>(sv.size());
  if (!(sv(0) > 0.0)) throw DomainError("decompose: data matrix is zero");

  auto ratio_at = [&](std::size_t k) {  // sigma_k / sigma_{k+1}, k 1-based
    if (k >= k_max) return std::numeric_limits<double>::infinity();
    const double next = sv(static_cast<Eigen::Index>(k));
    if (next <= kZeroFloor * sv(0)) return std::numeric_limits<double>::infinity();
    return sv(static_cast<Eigen::Index>(k - 1)) / next;
  };

  if (rule.kind == RankRule::Kind::fixed) {
    if (rule.s > static_cast<std::size_t>(y.rows()))
      throw std::invalid_argument("decompose: fixed rank exceeds the row count");
    dec.rank = rule.s;
  } else {
    std::size_t best = 0;
    double best_ratio = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      if (sv(static_cast<Eigen::Index>(k - 1)) <= kZeroFloor * sv(0)) break;
      // The trailing "gap" at k = min(n,m) only exists when rows exceed it.
      if (k == k_max && k_max == static_cast<std::size_t>(y.rows())) break;
      const double r = ratio_at(k);
      if (r > rule.tol && r > best_ratio) {
        best = k;
        best_ratio = r;
      }
    }
    if (best == 0)
      throw DomainError("decompose: ambiguous rank, no singular value ratio exceeds " +
                        std::to_string(rule.tol) + "; spectrum " + spectrum_listing(sv));
    dec.rank = best;
  }
  const auto n = y.rows();
  const auto r = static_cast<Eigen::Index>(dec.rank);
  dec.q1 = dec.left.leftCols(r);
  dec.q2 = dec.left.rightCols(n - r);
  dec.gap = dec.rank == 0 ? std::numeric_limits<double>::infinity() : ratio_at(dec.rank);
  return dec;
}

ImagingResult imaging_function(const SpectralDecomposition& dec, const CMatrix& phi_ext) {
  if (dec.q2.cols() == 0) throw DomainError("imaging: empty noise space (rank equals n)");
  if (phi_ext.rows() != dec.q2.rows())
    throw std::invalid_argument("imaging: steering vectors do not match the data row count");
  const auto N = phi_ext.cols();
  RVector p2all(N);
  if (dec.q1.cols() < dec.q2.cols()) {
    // Cheaper through the signal space; columns near a peak lose accuracy to
    // cancellation there, so those are redone against Q2 directly.
    const CMatrix sig = dec.q1.adjoint() * phi_ext;
    for (Eigen::Index j = 0; j < N; ++j) {
      const double cn2 = phi_ext.col(j).squaredNorm();
      if (!(cn2 > 0.0)) throw std::invalid_argument("imaging: zero steering vector");
      p2all(j) = 1.0 - sig.col(j).squaredNorm() / cn2;
      if (p2all(j) < 1e-2) p2all(j) = (dec.q2.adjoint() * phi_ext.col(j)).squaredNorm() / cn2;
    }
  } else {
    const CMatrix proj = dec.q2.adjoint() * phi_ext;
    for (Eigen::Index j = 0; j < N; ++j) {
      const double cn2 = phi_ext.col(j).squaredNorm();
      if (!(cn2 > 0.0)) throw std::invalid_argument("imaging: zero steering vector");
      p2all(j) = proj.col(j).squaredNorm() / cn2;
    }
  }
  ImagingResult img;
  img.values.resize(N);
  img.projector_norms.resize(N);
  img.capped.assign(static_cast<std::size_t>(N), false);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double p2 = p2all(j);
    img.projector_norms(j) = std::sqrt(p2);
    if (p2 < 1.0 / kImagingCap) {
      img.values(j) = kImagingCap;
      img.capped[static_cast<std::size_t>(j)] = true;
    } else {
      img.values(j) = 1.0 / p2;
    }
  }
  return img;
}

ImagingResult imaging_function(const SpectralDecomposition& dec, const SensingPair& pair) {
  return imaging_function(dec, pair.phi_ext);
}

IndexSet top_peaks(ImagingResult& img, std::size_t s) {
  const auto N = static_cast<std::size_t>(img.projector_norms.size());
  if (s > N) throw std::invalid_argument("top_peaks: s exceeds the grid size");
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    const double na = img.projector_norms(static_cast<Eigen::Index>(a));
    const double nb = img.projector_norms(static_cast<Eigen::Index>(b));
    return na < nb || (na == nb && a < b);
  };
  std::stable_sort(order.begin(), order.end(), less);
  IndexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  img.ties_broken = s > 0 && s < N &&
                    img.projector_norms(static_cast<Eigen::Index>(order[s - 1])) ==
                        img.projector_norms(static_cast<Eigen::Index>(order[s]));
  std::sort(out.begin(), out.end());
  img.recovered_support = out;
  img.rule = "top-s-peaks";
  return out;
}

std::string to_string(ThresholdRule::Kind kind) {
  switch (kind) {
    case ThresholdRule::Kind::gamma: return "gamma";
    case ThresholdRule::Kind::ric: return "ric";
    case ThresholdRule::Kind::fixed: return "fixed";
  }
  return "fixed";
}

ThresholdRule::Kind threshold_kind_from_string(const std::string& name) {
  if (name == "gamma") return ThresholdRule::Kind::gamma;
  if (name == "ric") return ThresholdRule::Kind::ric;
  if (name == "fixed") return ThresholdRule::Kind::fixed;
  throw std::invalid_argument("unknown threshold rule '" + name + "' (gamma|ric|fixed)");
}

double threshold_value(const ThresholdRule& rule) {
  switch (rule.kind) {
    case ThresholdRule::Kind::fixed:
      return 128.0 / 25.0;
    case ThresholdRule::Kind::gamma:
      if (!(rule.gamma > 0.0))
        throw DomainError("threshold: Gamma_S = 0 gives an infinite threshold; recovery impossible");
      return 2.0 / (rule.gamma * rule.gamma);
    case ThresholdRule::Kind::ric: {
      const double dm = rule.delta_minus;
      const double dp = rule.delta_plus;
      const double lower = 1.0 - dm * (1.0 + dp) / (2.0 + dp - dm);
      if (!(lower > 0.0)) throw DomainError("threshold: RIC bound is vacuous (delta^- too large)");
      return 2.0 / (lower * lower);
    }
  }
  return 128.0 / 25.0;
}

IndexSet threshold_support(ImagingResult& img, const ThresholdRule& rule) {
  const double tau = threshold_value(rule);
  IndexSet out;
  for (Eigen::Index j = 0; j < img.values.size(); ++j)
    if (img.values(j) >= tau) out.push_back(static_cast<std::size_t>(j));
  img.recovered_support = out;
  img.rule = "threshold(" + to_string(rule.kind) + ")";
  img.threshold_value = tau;
  return out;
}

IndexSet neighborhood(const Grid& grid, const IndexSet& support, double radius) {
  IndexSet out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t q : support) {
      if ((grid.point(j) - grid.point(q)).norm() <= radius * (1.0 + 1e-12)) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

GridlessResult gridless_support(ImagingResult& img, const Grid& grid, double radius,
                                const ThresholdRule& rule, const std::optional<IndexSet>& truth) {
  if (radius < 0.0) throw std::invalid_argument("gridless_support: radius must be nonnegative");
  GridlessResult out;
  out.theta = threshold_support(img, rule);
  img.rule = "gridless(" + to_string(rule.kind) + ")";
  if (truth) {
    auto& c = out.certificate;
    c.checked = true;
    c.no_false_alarms = true;
    for (std::size_t j : out.theta) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t q : *truth) best = std::min(best, (grid.point(j) - grid.point(q)).norm());
      c.max_distance = std::max(c.max_distance, best);
      if (best > radius * (1.0 + 1e-12)) c.no_false_alarms = false;
    }
    c.contains_support = std::includes(out.theta.begin(), out.theta.end(), truth->begin(), truth->end());
  }
  return out;
}

AmplitudeFit invert_amplitudes(const CMatrix& y, const CMatrix& phi, const CMatrix& psi) {
  if (phi.cols() != psi.cols()) throw std::invalid_argument("invert_amplitudes: column count mismatch");
  if (phi.rows() != y.rows() || psi.rows() != y.cols())
    throw std::invalid_argument("invert_amplitudes: dimension mismatch with data");
  const auto s = phi.cols();
  const auto n = y.rows();
  const auto m = y.cols();
  AmplitudeFit fit;
  if (s == 0) {
    fit.residual = y.norm();
    return fit;
  }
  // vec(phi_j psi_j^*) as design columns.
  CMatrix design(n * m, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const CMatrix outer = phi.col(j) * psi.col(j).adjoint();
    design.col(j) = Eigen::Map<const CVector>(outer.data(), n * m);
  }
  Eigen::JacobiSVD<CMatrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  fit.condition = sv(s - 1) > 0.0 ? sv(0) / sv(s - 1) : std::numeric_limits<double>::infinity();
  if (!(fit.condition < 1e10))
    throw DomainError("invert_amplitudes: restricted system is rank deficient (condition " +
                      std::to_string(fit.condition) + ")");
  const CVector rhs = Eigen::Map<const CVector>(y.data(), n * m);
  const CVector xi = svd.solve(rhs);
  fit.amplitudes.assign(xi.data(), xi.data() + s);
  fit.residual = (design * xi - rhs).norm();
  return fit;
}

void write_imaging_csv(const std::string& path, const Grid& grid, const ImagingResult& img,
                       const IndexSet& truth) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "x,y,z,J,in_support\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Vec3& p = grid.point(j);
    const bool in = std::binary_search(truth.begin(), truth.end(), j);
    out << p.x() << ',' << p.y() << ',' << p.z() << ',' << img.values(static_cast<Eigen::Index>(j))
        << ',' << (in ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("error writing " + path);
}

void write_heatmap_pgm(const std::string& path, const Grid& grid, const ImagingResult& img) {
  if (!grid.is_planar_lattice()) throw std::invalid_argument("heatmap: grid is not a planar lattice");
  const std::size_t side = grid.side();
  const RVector logj = img.values.array().log10();
  const double lo = logj.minCoeff();
  const double hi = logj.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << side << ' ' << side << "\n255\n";
  // Rows run over p2 from top (largest) to bottom, columns over p1.
  for (std::size_t r = 0; r < side; ++r) {
    const std::size_t p2 = side - r;
    for (std::size_t p1 = 1; p1 <= side; ++p1) {
      const double v = (logj(static_cast<Eigen::Index>(grid.index(p1, p2))) - lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  if (!out) throw std::runtime_error("error writing " + path);
}

}  // namespace sparsemusic
