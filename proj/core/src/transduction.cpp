#include "rpwy/transduction.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rpwy/errors.hpp"

namespace rpwy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(std::string(name) + " must be finite and > 0");
}

void non_negative(double v, const char* name) {
  if (!(std::isfinite(v) && v >= 0.0)) throw ValidationError(std::string(name) + " must be finite and >= 0");
}

void check_point(const SensingPoint& p) {
  non_negative(p.yield, "Y");
  non_negative(p.derivative, "|dY/dB|");
  non_negative(p.uncertainty, "delta Y");
  non_negative(p.c_st, "C_ST");
}

// The three coherence-side expressions; product_exact is filled by the caller.
CoherenceBounds bounds_from_coherence(double c_st, double kv) {
  CoherenceBounds b;
  if (c_st == 0.0) {
    b.r_bound = b.db_bound = b.product_paper = kInf;
    return b;
  }
  b.r_bound = 8.0 * kv / c_st;
  b.db_bound = 0.015 / (std::sqrt(kv) * std::sqrt(c_st));
  b.product_paper = 0.1 / std::pow(c_st, 1.5);
  return b;
}

}  // namespace

void ReceptorSystem::validate() const {
  positive(K, "K");
  positive(R, "R");
  positive(V, "V");
  non_negative(L, "L");
}

double steady_state_complexes(const ReceptorSystem& sys) {
  sys.validate();
  return sys.R * sys.L / (sys.L + sys.K);
}

double ligand_shift(double L, double yield, double derivative, double delta_b) {
  non_negative(L, "L");
  positive(yield, "Y");
  return L / yield * std::abs(derivative) * delta_b;
}

double complex_shift(const ReceptorSystem& sys, double delta_l) {
  sys.validate();
  const double s = sys.L + sys.K;
  return sys.K * sys.R / (s * s) * delta_l;
}

double classical_noise(const ReceptorSystem& sys) {
  sys.validate();
  return std::sqrt(sys.L * sys.K * sys.R) / (sys.L + sys.K);
}

double quantum_ligand_noise(double L, double V, double uncertainty) {
  non_negative(L, "L");
  positive(V, "V");
  return std::sqrt(L / V) * uncertainty;
}

double sql_sensitivity(const SensingPoint& point, double L, double V) {
  check_point(point);
  positive(L, "L");
  positive(V, "V");
  if (point.derivative == 0.0) return kInf;
  return point.yield * point.uncertainty / (std::sqrt(L * V) * point.derivative);
}

double receptor_lower_bound(const ReceptorSystem& sys, double uncertainty) {
  positive(sys.K, "K");
  positive(sys.V, "V");
  non_negative(sys.L, "L");
  non_negative(uncertainty, "delta Y");
  if (uncertainty == 0.0) return kInf;
  const double s = sys.L + sys.K;
  return s * s * sys.V / (sys.K * uncertainty * uncertainty);
}

CoherenceBounds coherence_bounds(const SensingPoint& point, double K, double V) {
  check_point(point);
  positive(K, "K");
  positive(V, "V");
  CoherenceBounds b = bounds_from_coherence(point.c_st, K * V);
  b.product_exact = optimal_design(point, K, V).uncertainty_product_exact;
  return b;
}

TransductionReport optimal_design(const SensingPoint& point, double K, double V) {
  check_point(point);
  positive(K, "K");
  positive(V, "V");
  TransductionReport r;
  const double kv = K * V;

  r.dB_min = point.derivative == 0.0 ? kInf : point.yield * point.uncertainty / (point.derivative * std::sqrt(kv));
  r.R_min = point.uncertainty == 0.0 ? kInf : 4.0 * kv / (point.uncertainty * point.uncertainty);
  if (point.derivative == 0.0 || r.dB_min == 0.0) {
    r.R_min_weaver = kInf;
  } else {
    const double q = 2.0 * point.yield / (point.derivative * r.dB_min);
    r.R_min_weaver = q * q;
  }

  const bool finite = std::isfinite(r.R_min) && std::isfinite(r.dB_min) && r.dB_min > 0.0;
  r.uncertainty_product_exact = finite ? r.R_min * r.dB_min * r.dB_min : kInf;
  if (finite) {
    const double target = 4.0 * point.yield * point.yield / (point.derivative * point.derivative);
    const double err1 = std::abs(r.uncertainty_product_exact - target) / target;
    const double err2 = std::abs(r.R_min_weaver * r.dB_min * r.dB_min - target) / target;
    if (err1 > 1e-12 || err2 > 1e-12) {
      throw NumericalError("optimal_design: R_min dB_min^2 identity violated");
    }
  }

  // Operating point L = K with the designed receptor count.
  r.dB_sql = r.dB_min;
  ReceptorSystem sys{K, std::isfinite(r.R_min) ? r.R_min : 0.0, V, K};
  r.R_lower = receptor_lower_bound(sys, point.uncertainty);
  r.deltaL_quantum = quantum_ligand_noise(K, V, point.uncertainty);
  if (std::isfinite(r.R_min)) {
    r.C = r.R_min / 2.0;
    r.deltaC_classical = std::sqrt(r.R_min) / 2.0;
    r.deltaC_quantum = r.R_min / (4.0 * K) * r.deltaL_quantum;
    if (point.yield > 0.0 && std::isfinite(r.dB_min)) {
      r.deltaC_signal = r.R_min / (4.0 * K) * ligand_shift(K, point.yield, point.derivative, r.dB_min);
    } else {
      r.deltaC_signal = kInf;
    }
  } else {
    r.C = r.deltaC_classical = r.deltaC_quantum = r.deltaC_signal = kInf;
  }

  const CoherenceBounds b = bounds_from_coherence(point.c_st, kv);
  r.R_min_coherence_bound = b.r_bound;
  r.dB_min_coherence_bound = b.db_bound;
  r.uncertainty_product_paper = b.product_paper;
  return r;
}

}  // namespace rpwy
