#pragma once

namespace rpwy {

// Receptor-ligand transduction of the singlet yield, steady-state algebra only.
//
// Units: B is a frequency in units of k; K and L share one concentration unit and V is chosen
// so that L*V is a ligand count. Degenerate inputs (delta Y = 0, |dY/dB| = 0, C_ST = 0) produce
// +inf in the affected outputs instead of throwing, so sweeps can filter them.

struct ReceptorSystem {
  double K = 1.0;  // equilibrium constant k_b / k_f
  double R = 1.0;  // total receptors
  double V = 1.0;  // sensing volume
  double L = 0.0;  // ligand concentration

  void validate() const;
};

struct SensingPoint {
  double yield = 0.0;        // Y
  double derivative = 0.0;   // |dY/dB|
  double uncertainty = 0.0;  // delta Y
  double c_st = 0.0;         // reaction-averaged C_ST
};

/// C = R L / (L + K), the fixed point of dC/dt = k_f (R - C) L - k_b C.
double steady_state_complexes(const ReceptorSystem& sys);

/// Delta L = (L / Y) |dY/dB| delta B. Throws ValidationError for Y <= 0.
double ligand_shift(double L, double yield, double derivative, double delta_b);

/// Delta C = K R / (L + K)^2 * Delta L, i.e. |dC/dL| Delta L.
double complex_shift(const ReceptorSystem& sys, double delta_l);

/// Binding noise delta C = sqrt(L K R) / (L + K).
double classical_noise(const ReceptorSystem& sys);

/// Ligand noise inherited from the yield, delta~L = sqrt(L / V) delta Y.
double quantum_ligand_noise(double L, double V, double uncertainty);

/// Standard-quantum-limit field resolution Y delta Y / (sqrt(L V) |dY/dB|).
double sql_sensitivity(const SensingPoint& point, double L, double V);

/// Receptors needed for quantum-limited binding noise: (L + K)^2 V / (K delta Y^2).
double receptor_lower_bound(const ReceptorSystem& sys, double uncertainty);

struct CoherenceBounds {
  double r_bound = 0.0;          // 8 K V / C_ST
  double db_bound = 0.0;         // 0.015 / (sqrt(K V) sqrt(C_ST))
  double product_exact = 0.0;    // R_min delta B_min^2 of optimal_design
  double product_paper = 0.0;    // 0.1 / C_ST^{3/2}
};

CoherenceBounds coherence_bounds(const SensingPoint& point, double K, double V);

struct TransductionReport {
  // Operating point L = K with R = R_min and delta B = delta B_min.
  double C = 0.0;
  double deltaC_signal = 0.0;
  double deltaC_classical = 0.0;
  double deltaL_quantum = 0.0;
  double deltaC_quantum = 0.0;
  double dB_sql = 0.0;
  double R_lower = 0.0;
  double dB_min = 0.0;
  double R_min = 0.0;
  double R_min_weaver = 0.0;
  double R_min_coherence_bound = 0.0;
  double dB_min_coherence_bound = 0.0;
  double uncertainty_product_exact = 0.0;
  double uncertainty_product_paper = 0.0;
};

/// Quantum-limited design at L = K:
///   delta B_min^2 = (Y delta Y / |dY/dB|)^2 / (K V),   R_min = 4 K V / delta Y^2,
/// plus the classical-noise receptor count (2Y / (|dY/dB| delta B_min))^2 and the coherence
/// bounds. Checks R_min delta B_min^2 = (2Y/|dY/dB|)^2 to 1e-12 relative when finite.
TransductionReport optimal_design(const SensingPoint& point, double K, double V);

}  // namespace rpwy
