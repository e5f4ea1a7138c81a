#include "rogue/wavefield.hpp"

#include "rogue/residual.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace rogue {

double AxisSpec::at(std::size_t i) const {
  if (i + 1 == count) return max;
  return min + (max - min) * double(i) / double(count - 1);
}

double AxisSpec::step() const { return (max - min) / double(count - 1); }

// ---------------------------------------------------------------------------
// WaveModel

WaveModel::WaveModel(int order, const Params& params, const FieldOptions& options)
    : WaveModel(order, params, [&] {
        FreeValues free = options.free_values;
        if (free.empty()) free = default_free_values(order);
        AnsatzOptions ao;
        ao.form = options.form;
        ao.override_singular = options.override_singular;
        AnsatzSpec spec = build_xi(order, AnsatzMode::solved, params, free, ao);
        return bind_center(spec, params, free);
      }()) {}

WaveModel WaveModel::from_xi(const Poly& xi, const Params& params) { return WaveModel(0, params, xi); }

WaveModel::WaveModel(int order, const Params& params, Poly xi)
    : order_(order), params_(params), omega_(to_double(params.omega)), xi_(std::move(xi)) {
  params.validate();
  if (xi_.num_vars() != 2 || xi_.vars()->name(0) != "v" || xi_.vars()->name(1) != "y") {
    throw UsageError("wave model needs xi over exactly (v, y)");
  }
  base_ = FloatPoly(xi_);
  PolyRatio u = u_from_xi(xi_, params);
  PolyRatio uv = ratio_diff(u, "v");
  PolyRatio uy = ratio_diff(u, "y");
  auto part = [](const PolyRatio& r) { return Part{FloatPoly(r.num()), r.power()}; };
  u_ = part(u);
  uv_ = part(uv);
  uy_ = part(uy);
  uvv_ = part(ratio_diff(uv, "v"));
  uvy_ = part(ratio_diff(uv, "y"));
  uyy_ = part(ratio_diff(uy, "y"));
}

double WaveModel::eval(const Part& part, double v, double y) const {
  const double pt[2] = {v, y};
  if (part.num.is_zero()) return 0.0;
  long double n = part.num.evaluate(pt);
  long double b = base_.evaluate(pt);
  long double d = 1;
  for (unsigned i = 0; i < part.power; ++i) d *= b;
  return double(n / d);
}

double WaveModel::u(double x, double y, double t) const { return eval(u_, v_of(x, t), y); }
double WaveModel::u_at(double v, double y) const { return eval(u_, v, y); }

std::array<double, 2> WaveModel::gradient(double v, double y) const {
  return {eval(uv_, v, y), eval(uy_, v, y)};
}

std::array<double, 3> WaveModel::hessian(double v, double y) const {
  return {eval(uvv_, v, y), eval(uvy_, v, y), eval(uyy_, v, y)};
}

double eval_u(int order, const Params& params, double x, double y, double t, const FieldOptions& options) {
  return WaveModel(order, params, options).u(x, y, t);
}

// ---------------------------------------------------------------------------
// Closed forms

ClosedForm::ClosedForm(int order, const Params& params, ClosedFormReading reading, const FreeValues& free_values)
    : order_(order), reading_(reading) {
  params.validate();
  if (order < 1 || order > 3) throw UsageError("order must be 1, 2 or 3");
  if (!params.nonsingular()) throw SingularParameters("closed forms need beta * (gamma + omega^2) < 0");
  alpha_ = to_double(params.alpha);
  beta_ = to_double(params.beta);
  k_ = to_double(params.k_sum());
  omega_ = to_double(params.omega);
  mu_ = to_double(params.mu);
  nu_ = to_double(params.nu);
  if (order == 2) {
    FreeValues free = free_values.empty() ? default_free_values(2) : free_values;
    z21_ = to_double(free.at("z21"));
    z24_ = to_double(free.at("z24"));
  }
  if (order == 3) {
    AnsatzOptions ao;
    ao.form = AnsatzForm::as_printed;
    AnsatzSpec spec = build_xi(3, AnsatzMode::solved, params, {}, ao);
    xi_ = bind_center(spec, params);
    xi_f_ = FloatPoly(xi_);
    xi_v_ = FloatPoly(diff(xi_, "v"));
    xi_vv_ = FloatPoly(diff(xi_, "v", 2));
  }
}

double ClosedForm::operator()(double x, double y, double t) const {
  const double v = x - omega_ * t;
  const double b = beta_, k = k_, mu = mu_, nu = nu_;
  if (order_ == 1) {
    double dv = mu - v, dy = y - nu;
    double num = 12 * b * (-3 * b / k - dv * dv - k * dy * dy);
    double den = -3 * b / k + dv * dv - k * dy * dy;
    return num / (alpha_ * den * den);
  }
  if (order_ == 2) {
    const double z21 = z21_, z24 = z24_;
    const double v2 = v * v, y2 = y * y, k2 = k * k, k3 = k2 * k;
    double T = 2 * (5 * (-25 * b * b / k2 - 30 * b * v2 / k + 3 * v2 * v2) + 3 * y2 * y2 * k2 +
                    18 * y2 * (5 * b - v2 * k) + 2 * nu * y * z21 + 6 * mu * v * z24);
    double a1 = y2 * k - 5 * v2, a2 = 17 * y2 * k - 5 * v2, a3 = y2 * k - v2;
    double A = 9 * (-1875 * b * b * b - 25 * b * b * k * (5 * v2 + 19 * y2 * k) - b * k2 * a1 * a2 - k3 * a3 * a3 * a3) +
               k2 * (9 * mu * z24 * (mu * z24 * k + 2 * v * (b + k * (v2 + 3 * y2 * k))) +
                     6 * nu * y * z21 * (k * (3 * v2 + y2 * k) - 5 * b) - nu * nu * z21 * z21);
    double d = v2 - y2 * k;
    double W = v * (-125 * b * b + 10 * b * k * (9 * y2 * k - 5 * v2) + 3 * k2 * d * d) +
               mu * z24 * k * (b + 3 * k * (v2 + y2 * k));
    double second;
    if (reading_ == ClosedFormReading::verbatim) {
      second = 4 * W / (k2 + 2 * nu * v * y * z21);
    } else {
      double half_xi_v = W / k2 + 2 * nu * v * y * z21;
      second = 4 * half_xi_v * half_xi_v;
    }
    return 486 * b * std::pow(k, 6) * (T * A / (9 * k3) - second) / (alpha_ * A * A);
  }
  const double pt[2] = {v, y};
  long double xi = xi_f_.evaluate(pt), xv = xi_v_.evaluate(pt), xvv = xi_vv_.evaluate(pt);
  return double(6 * b / alpha_ * (xvv / xi - xv * xv / (xi * xi)));
}

double eval_closed_form(int order, const Params& params, double x, double y, double t, ClosedFormReading reading,
                        const FreeValues& free_values) {
  return ClosedForm(order, params, reading, free_values)(x, y, t);
}

// ---------------------------------------------------------------------------
// Grids

namespace {

GridField empty_field(const WaveModel& model, const AxisSpec& x_axis, const AxisSpec& y_axis, double t) {
  if (x_axis.count < 2 || y_axis.count < 2) throw UsageError("grid axes need at least 2 nodes");
  if (!(x_axis.max > x_axis.min) || !(y_axis.max > y_axis.min)) throw UsageError("grid ranges must be increasing");
  GridField f;
  f.x_axis = x_axis;
  f.y_axis = y_axis;
  f.t = t;
  f.params_used = model.params();
  f.order = model.order();
  f.values.assign(x_axis.count * y_axis.count, 0.0);
  return f;
}

void fill_row(const WaveModel& model, GridField& f, std::size_t iy) {
  const double y = f.y_axis.at(iy);
  double* row = f.values.data() + iy * f.x_axis.count;
  for (std::size_t ix = 0; ix < f.x_axis.count; ++ix) row[ix] = model.u(f.x_axis.at(ix), y, f.t);
}

}  // namespace

GridField sample_grid(const WaveModel& model, const AxisSpec& x_axis, const AxisSpec& y_axis, double t) {
  GridField f = empty_field(model, x_axis, y_axis, t);
  const long long rows = static_cast<long long>(y_axis.count);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long iy = 0; iy < rows; ++iy) fill_row(model, f, std::size_t(iy));
  return f;
}

GridField sample_grid_serial(const WaveModel& model, const AxisSpec& x_axis, const AxisSpec& y_axis, double t) {
  GridField f = empty_field(model, x_axis, y_axis, t);
  for (std::size_t iy = 0; iy < y_axis.count; ++iy) fill_row(model, f, iy);
  return f;
}

// ---------------------------------------------------------------------------
// Extrema

std::string to_string(ExtremumKind kind) {
  switch (kind) {
    case ExtremumKind::max: return "max";
    case ExtremumKind::min: return "min";
    case ExtremumKind::saddle: return "saddle";
  }
  return "?";
}

std::size_t ExtremumReport::count(ExtremumKind kind) const {
  return std::size_t(std::count_if(entries.begin(), entries.end(), [&](const Extremum& e) { return e.kind == kind; }));
}

namespace {

ExtremumKind classify(const std::array<double, 3>& h) {
  double det = h[0] * h[2] - h[1] * h[1];
  if (det < 0) return ExtremumKind::saddle;
  return h[0] < 0 ? ExtremumKind::max : ExtremumKind::min;
}

// Newton on grad u = 0 in (v, y). Gives up (keeping the grid node) when a
// step leaves the node's neighbourhood or the Hessian is singular.
void refine(const WaveModel& model, double t, double radius, const ExtremaOptions& opt, Extremum& e) {
  double v = model.v_of(e.x, t), y = e.y;
  const double v0 = v, y0 = y;
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    auto g = model.gradient(v, y);
    double gn = std::hypot(g[0], g[1]);
    if (gn <= opt.gradient_tol) break;
    auto h = model.hessian(v, y);
    double det = h[0] * h[2] - h[1] * h[1];
    if (det == 0 || !std::isfinite(det)) return;
    double dv = -(h[2] * g[0] - h[1] * g[1]) / det;
    double dy = -(h[0] * g[1] - h[1] * g[0]) / det;
    v += dv;
    y += dy;
    if (std::hypot(v - v0, y - y0) > radius) return;
    if (std::hypot(dv, dy) < 1e-15 * (1 + std::hypot(v, y))) break;
  }
  auto g = model.gradient(v, y);
  e.x = v + model.omega() * t;
  e.y = y;
  e.u = model.u_at(v, y);
  e.kind = classify(model.hessian(v, y));
  e.gradient_norm = std::hypot(g[0], g[1]);
  e.refined = true;
}

}  // namespace

ExtremumReport find_extrema(const GridField& field, const WaveModel* model, const ExtremaOptions& options) {
  ExtremumReport report;
  report.options = options;
  const std::size_t nx = field.x_axis.count, ny = field.y_axis.count;
  double peak = 0;
  for (double u : field.values) peak = std::max(peak, std::fabs(u));
  report.threshold = options.threshold_fraction * peak;
  if (peak == 0) return report;

  std::vector<Extremum> found;
  for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
      const double c = field.at(ix, iy);
      if (std::fabs(c) < report.threshold) continue;
      bool is_max = true, is_min = true;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy) continue;
          double n = field.at(ix + dx, iy + dy);
          // Ties count toward the earlier node in raster order, so a flat
          // top reports one node.
          bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (earlier ? n >= c : n > c) is_max = false;
          if (earlier ? n <= c : n < c) is_min = false;
        }
      }
      if (!is_max && !is_min) continue;
      Extremum e;
      e.x = field.x_axis.at(ix);
      e.y = field.y_axis.at(iy);
      e.u = c;
      e.kind = is_max ? ExtremumKind::max : ExtremumKind::min;
      found.push_back(e);
    }
  }
  if (options.refine && model) {
    const double radius = 2 * std::hypot(field.x_axis.step(), field.y_axis.step());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(found.size()); ++i) {
      refine(*model, field.t, radius, options, found[std::size_t(i)]);
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Extremum& a, const Extremum& b) { return std::fabs(a.u) > std::fabs(b.u); });
  for (const Extremum& e : found) {
    if (std::fabs(e.u) < report.threshold) continue;
    bool close = std::any_of(report.entries.begin(), report.entries.end(), [&](const Extremum& k) {
      return k.kind == e.kind && std::hypot(k.x - e.x, k.y - e.y) < options.min_separation;
    });
    if (!close) report.entries.push_back(e);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Finite-difference residual

FdResidual fd_residual(const WaveModel& model, double x, double y, double t, double h) {
  if (!(h > 0)) throw UsageError("fd step must be positive");
  const Params& p = model.params();
  const double alpha = to_double(p.alpha), beta = to_double(p.beta), gamma = to_double(p.gamma);
  auto ux = [&](int i) { return model.u(x + i * h, y, t); };
  auto uy = [&](int i) { return model.u(x, y + i * h, t); };
  auto ut = [&](int i) { return model.u(x, y, t + i * h); };
  const double u0 = ux(0);
  const double xm2 = ux(-2), xm1 = ux(-1), xp1 = ux(1), xp2 = ux(2);
  const double h2 = h * h;
  const double d1 = (xm2 - 8 * xm1 + 8 * xp1 - xp2) / (12 * h);
  const double d2 = (-xm2 + 16 * xm1 - 30 * u0 + 16 * xp1 - xp2) / (12 * h2);
  const double d4 = (xm2 - 4 * xm1 + 6 * u0 - 4 * xp1 + xp2) / (h2 * h2);
  const double dyy = (-uy(-2) + 16 * uy(-1) - 30 * u0 + 16 * uy(1) - uy(2)) / (12 * h2);
  const double dtt = (-ut(-2) + 16 * ut(-1) - 30 * u0 + 16 * ut(1) - ut(2)) / (12 * h2);

  const double terms[] = {2 * alpha * d1 * d1, 2 * alpha * u0 * d2, beta * d4, gamma * d2, dtt, -dyy};
  FdResidual r;
  for (double term : terms) {
    r.residual += term;
    r.scale = std::max(r.scale, std::fabs(term));
  }
  double sample = std::max({std::fabs(u0), std::fabs(xm2), std::fabs(xm1), std::fabs(xp1), std::fabs(xp2)});
  double delta = 64 * std::numeric_limits<double>::epsilon() * sample;
  r.floor = 16 * std::fabs(beta) * delta / (h2 * h2) +
            64 * delta / (12 * h2) * (std::fabs(gamma) + 2 + 2 * std::fabs(alpha) * sample);
  return r;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const GridField& f) {
  const Params& p = f.params_used;
  out << "# order=" << f.order << " alpha=" << to_string(p.alpha) << " beta=" << to_string(p.beta)
      << " gamma=" << to_string(p.gamma) << " omega=" << to_string(p.omega) << " mu=" << to_string(p.mu)
      << " nu=" << to_string(p.nu) << " t=" << format_double(f.t) << " nx=" << f.x_axis.count
      << " ny=" << f.y_axis.count << " layout=row-major,x-fastest\n";
  out << "x,y,u\n";
  std::string line;
  for (std::size_t iy = 0; iy < f.y_axis.count; ++iy) {
    const std::string ys = format_double(f.y_axis.at(iy));
    for (std::size_t ix = 0; ix < f.x_axis.count; ++ix) {
      line = format_double(f.x_axis.at(ix));
      line += ',';
      line += ys;
      line += ',';
      line += format_double(f.at(ix, iy));
      line += '\n';
      out << line;
    }
  }
}

}  // namespace rogue
