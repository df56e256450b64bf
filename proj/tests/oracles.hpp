#pragma once

// Brute-force evaluators used as test oracles. Nothing here calls into the
// library; each one recomputes its quantity from the raw definition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t n) { return Dense(n, std::vector<double>(n, 0.0)); }

// Symmetric random graph, zero diagonal, weights in [lo, hi).
inline Dense random_graph(std::mt19937_64& gen, std::size_t n, double density = 1.0, double lo = 0.0,
                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dense w = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(gen) < density) w[i][j] = w[j][i] = lo + (hi - lo) * u(gen);
  return w;
}

inline std::vector<double> flatten(const Dense& w) {
  std::vector<double> out;
  for (const auto& row : w) out.insert(out.end(), row.begin(), row.end());
  return out;
}

// cut(A,B)/assoc(A,V) + cut(A,B)/assoc(B,V) by double summation over node pairs.
inline double discrete_ncut(const Dense& w, const std::vector<std::uint8_t>& side) {
  const std::size_t n = w.size();
  double cut = 0.0, assoc_a = 0.0, assoc_b = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (side[i] && !side[j]) cut += w[i][j];
      if (side[i]) assoc_a += w[i][j];
      if (!side[i]) assoc_b += w[i][j];
    }
  return cut / assoc_a + cut / assoc_b;
}

// Soft Ncut from explicit double sums.
inline double soft_ncut(const Dense& w, const std::vector<double>& s) {
  const std::size_t n = w.size();
  double num_a = 0.0, num_b = 0.0, den_a = 0.0, den_b = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      num_a += w[i][j] * s[i] * (1.0 - s[j]);
      num_b += w[i][j] * (1.0 - s[i]) * s[j];
      den_a += w[i][j] * s[i];
      den_b += w[i][j] * (1.0 - s[i]);
    }
  return num_a / den_a + num_b / den_b;
}

// Sum over unordered pairs i<j of w_ij (s_i - s_j)^2.
inline double gtv(const Dense& w, const std::vector<double>& s) {
  double v = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) v += w[i][j] * (s[i] - s[j]) * (s[i] - s[j]);
  return v;
}

// Sum of squares of (block mean of fine) - coarse.
inline double sr(const std::vector<double>& fine, std::size_t fh, std::size_t fw, const std::vector<double>& coarse,
                 std::size_t ch, std::size_t cw) {
  const std::size_t r = fh / ch;
  double v = 0.0;
  for (std::size_t by = 0; by < ch; ++by)
    for (std::size_t bx = 0; bx < cw; ++bx) {
      double sum = 0.0;
      for (std::size_t dy = 0; dy < r; ++dy)
        for (std::size_t dx = 0; dx < r; ++dx) sum += fine[(by * r + dy) * fw + bx * r + dx];
      const double d = sum / static_cast<double>(r * r) - coarse[by * cw + bx];
      v += d * d;
    }
  return v;
}

// Central differences of f at x, step h.
inline std::vector<double> numeric_grad(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-12) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

// Cosine similarity of raw vectors, thresholded: >tau -> 1, else eps; diagonal 0.
inline Dense semantic(const std::vector<std::vector<double>>& feats, double tau, double eps) {
  const std::size_t n = feats.size();
  Dense w = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t c = 0; c < feats[i].size(); ++c) {
        dot += feats[i][c] * feats[j][c];
        ni += feats[i][c] * feats[i][c];
        nj += feats[j][c] * feats[j][c];
      }
      w[i][j] = dot / (std::sqrt(ni) * std::sqrt(nj)) > tau ? 1.0 : eps;
    }
  return w;
}

inline double accuracy(const std::vector<std::uint8_t>& p, const std::vector<std::uint8_t>& g) {
  double hit = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if ((p[i] != 0) == (g[i] != 0)) hit += 1.0;
  return hit / static_cast<double>(p.size());
}

inline double iou(const std::vector<std::uint8_t>& p, const std::vector<std::uint8_t>& g) {
  double inter = 0.0, uni = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] && g[i]) inter += 1.0;
    if (p[i] || g[i]) uni += 1.0;
  }
  return uni == 0.0 ? 1.0 : inter / uni;
}

// F_beta at each of the 256 thresholds k/255 evaluated separately; returns (max, first argmax).
inline std::pair<double, double> max_f_beta(const std::vector<double>& soft, const std::vector<std::uint8_t>& g,
                                            double beta_sq) {
  double best = -1.0, best_t = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double t = k / 255.0;
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < soft.size(); ++i) {
      const bool p = soft[i] > t;
      if (p && g[i]) tp += 1.0;
      if (p && !g[i]) fp += 1.0;
      if (!p && g[i]) fn += 1.0;
    }
    const double prec = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
    const double rec = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    const double f = beta_sq * prec + rec > 0.0 ? (1.0 + beta_sq) * prec * rec / (beta_sq * prec + rec) : 0.0;
    if (f > best) {
      best = f;
      best_t = t;
    }
  }
  return {best, best_t};
}

struct Box {
  long x0, y0, x1, y1;
};

// Inclusive boxes, IoU by counting covered cells.
inline double box_iou(const Box& a, const Box& b) {
  const long xlo = std::min(a.x0, b.x0), xhi = std::max(a.x1, b.x1);
  const long ylo = std::min(a.y0, b.y0), yhi = std::max(a.y1, b.y1);
  double inter = 0.0, uni = 0.0;
  for (long y = ylo; y <= yhi; ++y)
    for (long x = xlo; x <= xhi; ++x) {
      const bool in_a = x >= a.x0 && x <= a.x1 && y >= a.y0 && y <= a.y1;
      const bool in_b = x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1;
      if (in_a && in_b) inter += 1.0;
      if (in_a || in_b) uni += 1.0;
    }
  return inter / uni;
}

struct Blob {
  std::size_t pixels = 0;
  Box box{0, 0, 0, 0};
};

// Recursive 4-connected flood fill, components in raster order of first pixel.
inline std::vector<Blob> flood_fill(const std::vector<std::uint8_t>& m, std::size_t h, std::size_t w) {
  std::vector<int> seen(h * w, 0);
  std::vector<Blob> blobs;
  std::function<void(long, long, Blob&)> fill = [&](long y, long x, Blob& b) {
    if (y < 0 || x < 0 || y >= static_cast<long>(h) || x >= static_cast<long>(w)) return;
    const auto i = static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x);
    if (!m[i] || seen[i]) return;
    seen[i] = 1;
    ++b.pixels;
    b.box = {std::min(b.box.x0, x), std::min(b.box.y0, y), std::max(b.box.x1, x), std::max(b.box.y1, y)};
    fill(y, x + 1, b);
    fill(y, x - 1, b);
    fill(y + 1, x, b);
    fill(y - 1, x, b);
  };
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      if (m[y * w + x] && !seen[y * w + x]) {
        Blob b;
        b.box = {static_cast<long>(x), static_cast<long>(y), static_cast<long>(x), static_cast<long>(y)};
        fill(static_cast<long>(y), static_cast<long>(x), b);
        blobs.push_back(b);
      }
  return blobs;
}

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& gen, std::size_t n, double p = 0.5) {
  std::bernoulli_distribution bit(p);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = bit(gen) ? 1 : 0;
  return v;
}

inline std::vector<double> random_unit(std::mt19937_64& gen, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

}  // namespace oracle
