#pragma once

#include "rogue/ansatz.hpp"
#include "rogue/poly.hpp"

#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace rogue {

/// Uniform axis: count nodes from min to max inclusive.
struct AxisSpec {
  double min = -1;
  double max = 1;
  std::size_t count = 2;

  double at(std::size_t i) const;
  double step() const;
};

/// Row-major samples, x fastest: values[iy * x_axis.count + ix].
struct GridField {
  AxisSpec x_axis, y_axis;
  double t = 0;
  Params params_used;
  int order = 0;  // 0 for a field built from an arbitrary xi
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * x_axis.count + ix]; }
};

struct FieldOptions {
  FreeValues free_values;  // order 2 defaults to z21 = z24 = 1
  AnsatzForm form = AnsatzForm::corrected;
  bool override_singular = false;
};

/// u = (6 beta / alpha)(ln xi)_vv and its first and second (v, y)
/// derivatives, each an exact numerator over a power of xi, evaluated in
/// extended precision.
class WaveModel {
 public:
  WaveModel(int order, const Params& params, const FieldOptions& options = {});
  /// xi must live over exactly {v, y}.
  static WaveModel from_xi(const Poly& xi, const Params& params);

  int order() const noexcept { return order_; }
  const Params& params() const noexcept { return params_; }
  const Poly& xi() const noexcept { return xi_; }

  /// v = x - omega t.
  double u(double x, double y, double t) const;
  /// u in the moving frame.
  double u_at(double v, double y) const;
  /// (u_v, u_y)
  std::array<double, 2> gradient(double v, double y) const;
  /// (u_vv, u_vy, u_yy)
  std::array<double, 3> hessian(double v, double y) const;

  double v_of(double x, double t) const { return x - omega_ * t; }
  double omega() const noexcept { return omega_; }

 private:
  WaveModel(int order, const Params& params, Poly xi);

  struct Part {
    FloatPoly num;
    unsigned power = 0;
  };
  double eval(const Part& part, double v, double y) const;

  int order_ = 0;
  Params params_;
  double omega_ = 0;
  Poly xi_;
  FloatPoly base_;
  Part u_, uv_, uy_, uvv_, uvy_, uyy_;
};

/// One-off evaluation; builds the model every call.
double eval_u(int order, const Params& params, double x, double y, double t, const FieldOptions& options = {});

/// How the garbled order-2 closed form is read. `verbatim` follows the
/// typeset text (the xi_v^2 part unsquared, divided by k^2 + 2 nu v y z21);
/// `repaired` squares xi_v = 2 (W / k^2 + 2 nu v y z21). Orders 1 and 3 are
/// unaffected.
enum class ClosedFormReading { verbatim, repaired };

/// The typeset solution formulas evaluated directly, for cross-checking
/// WaveModel. Order 1 and 2 are explicit formulas in doubles; order 3 is
/// (6 beta / alpha)(xi_vv / xi - xi_v^2 / xi^2) with the typeset xi.
class ClosedForm {
 public:
  ClosedForm(int order, const Params& params, ClosedFormReading reading = ClosedFormReading::repaired,
             const FreeValues& free_values = {});
  double operator()(double x, double y, double t) const;

 private:
  int order_;
  ClosedFormReading reading_;
  double alpha_, beta_, k_, omega_, mu_, nu_, z21_ = 1, z24_ = 1;
  Poly xi_;
  FloatPoly xi_f_, xi_v_, xi_vv_;
};

double eval_closed_form(int order, const Params& params, double x, double y, double t,
                        ClosedFormReading reading = ClosedFormReading::repaired,
                        const FreeValues& free_values = {});

/// Rows in parallel; bit-identical to sample_grid_serial.
GridField sample_grid(const WaveModel& model, const AxisSpec& x_axis, const AxisSpec& y_axis, double t);
GridField sample_grid_serial(const WaveModel& model, const AxisSpec& x_axis, const AxisSpec& y_axis, double t);

enum class ExtremumKind { max, min, saddle };
std::string to_string(ExtremumKind kind);

struct Extremum {
  double x = 0, y = 0, u = 0;
  ExtremumKind kind = ExtremumKind::max;
  bool refined = false;
  double gradient_norm = 0;
};

struct ExtremaOptions {
  /// Keep grid extrema with |u| >= fraction * max |u| over the grid.
  double threshold_fraction = 0.1;
  /// Same-kind entries closer than this are merged into the larger |u|.
  double min_separation = 2.0;
  bool refine = true;
  int newton_max_iter = 50;
  double gradient_tol = 1e-12;
};

struct ExtremumReport {
  std::vector<Extremum> entries;  // sorted by |u| descending
  double threshold = 0;           // absolute |u| cut
  ExtremaOptions options;

  std::size_t count(ExtremumKind kind) const;
};

/// Grid-local extrema over the 8-neighbourhood. With options.refine, each
/// is Newton-refined on the analytic gradient of `model` (which must be
/// the model that produced the field) and classified by its Hessian. A null
/// model leaves grid positions and neighbourhood classification.
ExtremumReport find_extrema(const GridField& field, const WaveModel* model, const ExtremaOptions& options = {});

struct FdResidual {
  double residual = 0;
  /// max |term| of the PDE at the point, for relative comparisons.
  double scale = 0;
  /// Rough size of the rounding error the stencils amplify (eps / h^4).
  double floor = 0;
};

/// alpha (2 u_x^2 + 2 u u_xx) + beta u_xxxx + gamma u_xx + u_tt - u_yy by
/// central differences: 5-point stencils for first and second derivatives,
/// 5-point stencil for the fourth. Truncation error is O(h^2).
FdResidual fd_residual(const WaveModel& model, double x, double y, double t, double h);

/// `# order=... alpha=... t=...` header line, then x,y,u rows with
/// shortest round-trip float text.
void write_csv(std::ostream& out, const GridField& field);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace rogue
