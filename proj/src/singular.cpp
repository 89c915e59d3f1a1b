#include "gspt/singular.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "gspt/errors.hpp"
#include "gspt/ode.hpp"
#include "gspt/parallel.hpp"

namespace gspt {

const char* to_string(Stability s) { return s == Stability::attracting ? "attracting" : "repelling"; }

const char* to_string(JumpClass j) {
  switch (j) {
    case JumpClass::jump_off: return "off";
    case JumpClass::jump_on: return "on";
    default: return "none";
  }
}

const char* to_string(SingularityKind k) {
  switch (k) {
    case SingularityKind::unstable_focus: return "unstable_focus";
    case SingularityKind::unstable_node: return "unstable_node";
    case SingularityKind::stable_focus: return "stable_focus";
    case SingularityKind::stable_node: return "stable_node";
    case SingularityKind::saddle: return "saddle";
    default: return "center_degenerate";
  }
}

namespace {

void require_on_manifold(const ModelSpec& m, const Vec2& z, const char* op) {
  const double fv = m.f(z);
  if (!(std::fabs(fv) < kOnManifoldTol)) {
    std::ostringstream os;
    os << op << ": point " << z << " is not on the critical manifold (f = " << fv << ")";
    throw PreconditionError(os.str());
  }
}

void require_hyperbolic(const ModelSpec& m, const Vec2& z, double lam, const char* op) {
  if (!(std::fabs(lam) > kOnManifoldTol)) {
    std::ostringstream os;
    os << op << ": point " << z << " is not normally hyperbolic (lambda = " << lam << ")";
    throw PreconditionError(os.str());
  }
  (void)m;
}

int sign_of(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

}  // namespace

double nontrivial_eigenvalue(const ModelSpec& model, const Vec2& z) {
  require_on_manifold(model, z, "nontrivial_eigenvalue");
  return model.lambda(z);
}

Vec2 project_to_manifold(const ModelSpec& model, const Vec2& z0, double tol) {
  Vec2 z = z0;
  for (int it = 0; it < 60; ++it) {
    const double fv = model.f(z);
    if (std::fabs(fv) <= tol) return z;
    const Vec2 g = model.grad_f(z);
    const double gg = dot(g, g);
    if (!(gg > 1e-300) || !std::isfinite(fv)) break;
    z -= (fv / gg) * g;
  }
  if (std::fabs(model.f(z)) <= 10 * tol) return z;
  std::ostringstream os;
  os << "projection onto the critical manifold failed from " << z0;
  throw ConvergenceError(os.str());
}

// ---------------------------------------------------------------------------
// critical curve

namespace {

// Contact locations along an arc: bisection at strict sign changes, plus samples where
// |lambda| is below threshold. `sign_change` tells whether lambda switches sign there.
struct ArcContact {
  std::size_t after = 0;  // sample index preceding (or equal to) the contact
  bool at_sample = false;
  Vec2 location;
  bool sign_change = false;
};

Vec2 refine_contact(const ModelSpec& m, const Vec2& a, const Vec2& b) {
  auto point = [&](double s) { return project_to_manifold(m, a + s * (b - a)); };
  auto g = [&](double s) { return m.lambda(point(s)); };
  const double ga = g(0.0), gb = g(1.0);
  const double s = brent_root(g, 0.0, 1.0, ga, gb, 1e-15);
  return point(s);
}

std::vector<ArcContact> scan_arc(const ModelSpec& m, const std::vector<CurveSample>& s) {
  std::vector<ArcContact> out;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (sign_of(s[i].lambda, kLambdaZeroTol) == 0) {
      // run of near-zero samples: one contact at the run's smallest |lambda|
      std::size_t j = i, best = i;
      while (j < n && sign_of(s[j].lambda, kLambdaZeroTol) == 0) {
        if (std::fabs(s[j].lambda) < std::fabs(s[best].lambda)) best = j;
        ++j;
      }
      const int left = i > 0 ? sign_of(s[i - 1].lambda, kLambdaZeroTol) : 0;
      const int right = j < n ? sign_of(s[j].lambda, kLambdaZeroTol) : 0;
      out.push_back({best, true, s[best].z, left != 0 && right != 0 && left != right});
      i = j;
      continue;
    }
    if (i + 1 < n) {
      const int a = sign_of(s[i].lambda, kLambdaZeroTol), b = sign_of(s[i + 1].lambda, kLambdaZeroTol);
      if (a != 0 && b != 0 && a != b) out.push_back({i, false, refine_contact(m, s[i].z, s[i + 1].z), true});
    }
    ++i;
  }
  return out;
}

// Marching-squares edge key.
using EdgeKey = long long;

}  // namespace

CriticalCurve trace_critical_curve(const ModelSpec& model, const Window& w, int resolution) {
  if (!w.valid()) throw PreconditionError("trace_critical_curve: window must be finite and nonempty");
  if (resolution < 16) throw PreconditionError("trace_critical_curve: resolution must be >= 16");
  const int R = resolution;
  const double dx = w.width() / R, dy = w.height() / R;
  auto node = [&](int i, int j) { return Vec2{w.x_min + i * dx, w.y_min + j * dy}; };

  // node values, row-parallel
  std::vector<double> val(static_cast<std::size_t>((R + 1) * (R + 1)));
  parallel_for(static_cast<std::size_t>(R + 1), [&](std::size_t j) {
    for (int i = 0; i <= R; ++i)
      val[j * (R + 1) + i] = model.f(node(i, static_cast<int>(j)));
  });
  auto v = [&](int i, int j) { return val[static_cast<std::size_t>(j * (R + 1) + i)]; };
  auto pos = [&](int i, int j) { return v(i, j) >= 0.0; };

  auto hkey = [&](int i, int j) -> EdgeKey { return 2LL * (static_cast<EdgeKey>(j) * (R + 1) + i); };
  auto vkey = [&](int i, int j) -> EdgeKey { return 2LL * (static_cast<EdgeKey>(j) * (R + 1) + i) + 1; };

  std::map<EdgeKey, Vec2> roots;
  CriticalCurve curve;
  auto edge_root = [&](EdgeKey k) -> Vec2 {
    auto it = roots.find(k);
    if (it != roots.end()) return it->second;
    const EdgeKey base = k / 2;
    const int i = static_cast<int>(base % (R + 1)), j = static_cast<int>(base / (R + 1));
    const Vec2 a = node(i, j);
    const Vec2 b = (k % 2 == 0) ? node(i + 1, j) : node(i, j + 1);
    const double fa = v(i, j), fb = (k % 2 == 0) ? v(i + 1, j) : v(i, j + 1);
    auto g = [&](double s) { return model.f(a + s * (b - a)); };
    const double s = brent_root(g, 0.0, 1.0, fa, fb, 1e-15);
    Vec2 z = a + s * (b - a);
    if (std::fabs(model.f(z)) > kRootTol) z = project_to_manifold(model, z);
    const Vec2 gr = model.grad_f(z);
    if (norm(gr) < 1e-8) {
      std::ostringstream os;
      os << "grad f nearly vanishes at root " << z << " (critical manifold not regularly embedded)";
      curve.violations.push_back(os.str());
    }
    roots.emplace(k, z);
    return z;
  };

  std::map<EdgeKey, std::vector<EdgeKey>> adj;
  auto link = [&](EdgeKey a, EdgeKey b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };

  for (int j = 0; j < R; ++j) {
    for (int i = 0; i < R; ++i) {
      const bool bl = pos(i, j), br = pos(i + 1, j), tr = pos(i + 1, j + 1), tl = pos(i, j + 1);
      const EdgeKey eb = hkey(i, j), er = vkey(i + 1, j), et = hkey(i, j + 1), el = vkey(i, j);
      std::vector<EdgeKey> cut;
      if (bl != br) cut.push_back(eb);
      if (br != tr) cut.push_back(er);
      if (tr != tl) cut.push_back(et);
      if (tl != bl) cut.push_back(el);
      if (cut.size() == 2) {
        link(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const bool centre = model.f(node(i, j) + Vec2{0.5 * dx, 0.5 * dy}) >= 0.0;
        // cut off the corners whose sign differs from the centre
        if (bl != centre) link(el, eb);
        if (br != centre) link(eb, er);
        if (tr != centre) link(er, et);
        if (tl != centre) link(et, el);
      }
    }
  }

  std::map<EdgeKey, bool> seen;
  auto walk = [&](EdgeKey start, bool closed) {
    Arc arc;
    arc.closed = closed;
    EdgeKey prev = -1, cur = start;
    while (true) {
      seen[cur] = true;
      arc.samples.push_back({edge_root(cur), 0.0});
      EdgeKey next = -1;
      for (EdgeKey nb : adj[cur])
        if (nb != prev && !seen[nb]) {
          next = nb;
          break;
        }
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
    // drop coincident consecutive samples (roots at grid nodes)
    std::vector<CurveSample> clean;
    for (const auto& s : arc.samples)
      if (clean.empty() || distance(clean.back().z, s.z) > 1e-14) clean.push_back(s);
    arc.samples = std::move(clean);
    if (!arc.samples.empty()) curve.arcs.push_back(std::move(arc));
  };
  for (const auto& [k, nb] : adj)
    if (nb.size() == 1 && !seen[k]) walk(k, false);
  for (const auto& [k, nb] : adj)
    if (!seen[k]) walk(k, true);

  for (std::size_t a = 0; a < curve.arcs.size(); ++a) {
    auto& arc = curve.arcs[a];
    for (auto& s : arc.samples) s.lambda = model.lambda(s.z);

    // split at strict sign changes; tangential zeros stay inside a branch
    const auto contacts = scan_arc(model, arc.samples);
    Branch cur;
    cur.arc = a;
    std::size_t ci = 0;
    auto flush = [&](Branch& b) {
      double mean = 0.0;
      for (const auto& s : b.samples) mean += s.lambda;
      b.stability = mean < 0.0 ? Stability::attracting : Stability::repelling;
      if (b.samples.size() >= 2) curve.branches.push_back(b);
      b.samples.clear();
    };
    for (std::size_t i = 0; i < arc.samples.size(); ++i) {
      while (ci < contacts.size() && contacts[ci].after < i) ++ci;
      const bool here = ci < contacts.size() && contacts[ci].after == i && contacts[ci].sign_change;
      if (here && contacts[ci].at_sample) {
        cur.samples.push_back({arc.samples[i].z, 0.0});
        flush(cur);
        cur.samples.push_back({arc.samples[i].z, 0.0});
        continue;
      }
      cur.samples.push_back(arc.samples[i]);
      if (here) {
        const CurveSample c{contacts[ci].location, model.lambda(contacts[ci].location)};
        cur.samples.push_back(c);
        flush(cur);
        cur.samples.push_back(c);
      }
    }
    flush(cur);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// N-singularities

std::vector<NSingularity> find_N_singularities(const ModelSpec& model, const Window& w,
                                               std::string* diagnostic) {
  if (!w.valid()) throw PreconditionError("find_N_singularities: window must be finite and nonempty");
  constexpr int kSeeds = 16;
  std::vector<NSingularity> out;
  int converged = 0;
  for (int j = 0; j < kSeeds; ++j) {
    for (int i = 0; i < kSeeds; ++i) {
      Vec2 z{w.x_min + (i + 0.5) * w.width() / kSeeds, w.y_min + (j + 0.5) * w.height() / kSeeds};
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const Vec2 n = model.N(z);
        if (!is_finite(n)) break;
        if (norm(n) < 1e-13) {
          ok = true;
          break;
        }
        const Mat2 J = model.n_field.jac(z);
        const double det = J.det();
        if (!(std::fabs(det) > 1e-14 * std::max(1.0, J.max_abs() * J.max_abs()))) break;
        const Vec2 step{(J.d * n.x - J.b * n.y) / det, (-J.c * n.x + J.a * n.y) / det};
        z -= step;
        if (norm(step) < 1e-15 * std::max(1.0, norm(z))) {
          ok = norm(model.N(z)) < 1e-10;
          break;
        }
      }
      if (!ok || !w.contains(z) || !(norm(model.N(z)) < 1e-9)) continue;
      ++converged;
      bool dup = false;
      for (const auto& s : out) dup = dup || distance(s.location, z) < 1e-7;
      if (dup) continue;
      NSingularity s;
      s.location = z;
      const Mat2 Dh = model.f(z) * model.n_field.jac(z);
      s.trace = Dh.trace();
      s.det = Dh.det();
      const double scale = std::max(1.0, Dh.max_abs() * Dh.max_abs());
      if (std::fabs(s.det) < 1e-12 * scale) {
        s.kind = SingularityKind::center_degenerate;
      } else if (s.det < 0.0) {
        s.kind = SingularityKind::saddle;
      } else if (std::fabs(s.trace) < 1e-12 * std::sqrt(scale)) {
        s.kind = SingularityKind::center_degenerate;
      } else {
        const bool focus = s.trace * s.trace - 4.0 * s.det < 0.0;
        if (s.trace > 0.0)
          s.kind = focus ? SingularityKind::unstable_focus : SingularityKind::unstable_node;
        else
          s.kind = focus ? SingularityKind::stable_focus : SingularityKind::stable_node;
      }
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](const NSingularity& a, const NSingularity& b) {
    return a.location.x != b.location.x ? a.location.x < b.location.x : a.location.y < b.location.y;
  });
  if (diagnostic) {
    *diagnostic = converged == 0 ? "Newton on N did not converge to a point in the window from any of "
                                   "the 256 grid seeds"
                                 : "";
  }
  return out;
}

// ---------------------------------------------------------------------------
// contact points

namespace {

// lambda along S, parameterised by the graph coordinate through F
struct GraphLambda {
  const ModelSpec& m;
  Vec2 F;
  bool swapped;

  Vec2 point(double s) const {
    // Newton in the free coordinate, seeded at F
    Vec2 z = swapped ? Vec2{F.x, F.y + s} : Vec2{F.x + s, F.y};
    for (int it = 0; it < 60; ++it) {
      const double fv = m.f(z);
      if (std::fabs(fv) < 1e-14) break;
      const Vec2 g = m.grad_f(z);
      const double d = swapped ? g.x : g.y;
      if (d == 0.0) throw DomainError("contact_order: critical manifold is not a local graph");
      if (swapped)
        z.x -= fv / d;
      else
        z.y -= fv / d;
    }
    return z;
  }
  double operator()(double s) const { return m.lambda(point(s)); }
};

double derivative(const GraphLambda& g, int n, double h) {
  switch (n) {
    case 1: return (g(h) - g(-h)) / (2 * h);
    case 2: return (g(h) - 2 * g(0.0) + g(-h)) / (h * h);
    default: return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h);
  }
}

// Richardson extrapolation of the O(h^2) central differences
double richardson(const GraphLambda& g, int n, double h) {
  const double d1 = derivative(g, n, h), d2 = derivative(g, n, 0.5 * h);
  return d2 + (d2 - d1) / 3.0;
}

bool graph_over_y(const ModelSpec& m, const Vec2& z) {
  const Vec2 g = m.grad_f(z);
  return std::fabs(g.y) < std::fabs(g.x);
}

}  // namespace

int contact_order(const ModelSpec& model, const Vec2& F) {
  require_on_manifold(model, F, "contact_order");
  const double lam = model.lambda(F);
  if (!(std::fabs(lam) < 1e-7)) {
    std::ostringstream os;
    os << "contact_order: lambda(F) = " << lam << " is not zero at " << F;
    throw PreconditionError(os.str());
  }
  const GraphLambda g{model, F, graph_over_y(model, F)};
  constexpr double h = 2e-3;
  for (int n = 1; n <= 3; ++n)
    if (std::fabs(richardson(g, n, h)) > kDerivativeTol) return n;
  throw PreconditionError("contact order > 3, unsupported");
}

ContactClass classify_contact(const ModelSpec& model, const Vec2& F, int order) {
  ContactClass out;
  if (order != 1) return out;
  const Vec2 n = model.N(F), g = model.G(F, 0.0), gf = model.grad_f(F);
  const double det = cross(n, g);
  const double fg = dot(gf, g);
  const bool r1 = std::fabs(det) > kLambdaZeroTol, r2 = std::fabs(fg) > kLambdaZeroTol;
  if (r1 != r2) {
    std::ostringstream os;
    os << "classify_contact: regularity tests disagree at " << F << " (det(N|G) = " << det
       << ", <grad f, G> = " << fg << ")";
    throw ConsistencyError(os.str());
  }
  out.regular = r1;
  if (!out.regular) return out;

  // which side of F along S is attracting
  const Vec2 t = Vec2{gf.y, -gf.x} / norm(gf);
  constexpr double probe = 1e-4;
  const double lp = model.lambda(project_to_manifold(model, F + probe * t));
  const double lm = model.lambda(project_to_manifold(model, F - probe * t));
  if (lp * lm >= 0.0) return out;  // tangential: no attracting side
  const Vec2 ta = lp < 0.0 ? t : -t;
  const Vec2 D = desingularised_rhs(model, F);
  out.jump_class = dot(D, ta) < 0.0 ? JumpClass::jump_off : JumpClass::jump_on;
  return out;
}

std::vector<ContactPoint> find_contact_points(const ModelSpec& model, const CriticalCurve& curve) {
  if (curve.empty()) throw PreconditionError("find_contact_points: critical curve is empty");
  std::vector<ContactPoint> out;
  for (const auto& arc : curve.arcs) {
    for (const auto& c : scan_arc(model, arc.samples)) {
      bool dup = false;
      for (const auto& p : out) dup = dup || distance(p.location, c.location) < 1e-7;
      if (dup) continue;
      ContactPoint cp;
      cp.location = c.location;
      cp.order = contact_order(model, c.location);
      const ContactClass cls = classify_contact(model, c.location, cp.order);
      cp.regular = cls.regular;
      cp.jump_class = c.sign_change ? cls.jump_class : JumpClass::none;
      out.push_back(cp);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// projection and reduced flows

Mat2 projection(const ModelSpec& model, const Vec2& z) {
  require_on_manifold(model, z, "projection");
  const Vec2 n = model.N(z), gf = model.grad_f(z);
  const double lam = dot(gf, n);
  require_hyperbolic(model, z, lam, "projection");
  return Mat2::identity() - (1.0 / lam) * Mat2::outer(n, gf);
}

Vec2 reduced_rhs(const ModelSpec& model, const Vec2& z) {
  require_on_manifold(model, z, "reduced_rhs");
  const Vec2 n = model.N(z), gf = model.grad_f(z), g = model.G(z, 0.0);
  const double lam = dot(gf, n);
  require_hyperbolic(model, z, lam, "reduced_rhs");
  const Vec2 rp2 = (cross(n, g) / lam) * Vec2{-gf.y, gf.x};
  const Vec2 rp1 = g - (dot(gf, g) / lam) * n;
  const double amp = std::max(1.0, norm(n) * norm(gf) / std::fabs(lam));
  if (norm(rp1 - rp2) > 1e-10 * (1.0 + norm(g)) * amp * std::max(1.0, norm(rp2))) {
    std::ostringstream os;
    os << "reduced_rhs: projected and determinant forms disagree at " << z;
    throw ConsistencyError(os.str());
  }
  return rp2;
}

Vec2 desingularised_rhs(const ModelSpec& model, const Vec2& z) {
  require_on_manifold(model, z, "desingularised_rhs");
  const Vec2 gf = model.grad_f(z);
  return cross(model.N(z), model.G(z, 0.0)) * Vec2{gf.y, -gf.x};
}

// ---------------------------------------------------------------------------
// rectification

Rectified::Rectified(const ModelSpec& model, const Vec2& z0) : model_(&model) {
  const Vec2 g = model.grad_f(z0);
  if (!is_finite(g) || norm(g) == 0.0) throw DomainError("rectify: grad f vanishes at the base point");
  swapped_ = std::fabs(g.y) < 1e-6 * norm(g);
  last_ = swapped_ ? z0.x : z0.y;
}

Vec2 Rectified::to_plane(double s, double u) const {
  double w = last_;
  for (int it = 0; it < 80; ++it) {
    const Vec2 z = swapped_ ? Vec2{w, s} : Vec2{s, w};
    const double r = model_->f(z) - u;
    if (!std::isfinite(r)) break;
    if (std::fabs(r) <= 1e-14 * (1.0 + std::fabs(u))) {
      last_ = w;
      return z;
    }
    const Vec2 g = model_->grad_f(z);
    const double d = swapped_ ? g.x : g.y;
    if (d == 0.0 || !std::isfinite(d)) break;
    const double step = r / d;
    w -= step;
    if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(w))) {
      last_ = w;
      return swapped_ ? Vec2{w, s} : Vec2{s, w};
    }
  }
  std::ostringstream os;
  os << "rectify: inverse map failed at (s, u) = (" << s << ", " << u
     << "); the point left the rectification neighbourhood";
  throw DomainError(os.str());
}

Vec2 Rectified::from_plane(const Vec2& z) const { return {swapped_ ? z.y : z.x, model_->f(z)}; }

Vec2 Rectified::n_tilde(double s, double u) const {
  const Vec2 z = to_plane(s, u);
  const Vec2 n = model_->N(z);
  return {swapped_ ? n.y : n.x, dot(model_->grad_f(z), n)};
}

Vec2 Rectified::g_tilde(double s, double u, double eps) const {
  const Vec2 z = to_plane(s, u);
  const Vec2 g = model_->G(z, eps);
  return {swapped_ ? g.y : g.x, dot(model_->grad_f(z), g)};
}

Vec2 Rectified::rhs(double s, double u, double eps) const {
  const Vec2 z = to_plane(s, u);
  const Vec2 h = model_->rhs(z, eps);
  return {swapped_ ? h.y : h.x, dot(model_->grad_f(z), h)};
}

ExpansionCoeffs expansion_coeffs(const ModelSpec& model, const Vec2& F) {
  const int order = contact_order(model, F);
  const ContactClass cls = classify_contact(model, F, order);
  if (order != 1 || !cls.regular)
    throw PreconditionError("expansion_coeffs: F is not a regular order-1 contact point");
  const Rectified R(model, F);
  const double s0 = R.swapped() ? F.y : F.x;
  ExpansionCoeffs c;
  c.a0 = R.n_tilde(s0, 0.0).x;
  auto lam = [&](double s) { return R.n_tilde(s, 0.0).y; };
  constexpr double h = 1e-3;
  const double d1 = (lam(s0 + h) - lam(s0 - h)) / (2 * h);
  const double d2 = (lam(s0 + h / 2) - lam(s0 - h / 2)) / h;
  c.b1 = d2 + (d2 - d1) / 3.0;
  const Vec2 g = R.g_tilde(s0, 0.0, 0.0);
  c.c0 = g.x;
  c.d0 = g.y;
  if (std::fabs(c.a0) < 1e-8 || std::fabs(c.b1) < 1e-8 || std::fabs(c.d0) < 1e-8) {
    std::ostringstream os;
    os << "expansion_coeffs: degenerate normal form at " << F << " (a0 = " << c.a0
       << ", b1 = " << c.b1 << ", d0 = " << c.d0 << ")";
    throw DegeneracyError(os.str());
  }
  return c;
}

}  // namespace gspt
