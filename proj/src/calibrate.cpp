#include "crtsim/calibrate.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace crtsim {

namespace {

// Gaussian elimination with partial pivoting for the tiny Newton systems.
bool solve_dense(std::vector<double>& A, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r * n + col]) > std::abs(A[pivot * n + col])) pivot = r;
    if (std::abs(A[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r * n + col] / A[col * n + col];
      for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
    b[r] = s / A[r * n + r];
  }
  return true;
}

// Single-cause closed-form starting point for the shape, treating the other
// cause as absent: the half/full incidence ratio pins the shape directly.
CauseGen initial_guess(double p, double f, Family family, double nu) {
  CauseGen g;
  if (family == Family::Weibull) {
    const double ratio = std::log1p(-f * p) / std::log1p(-p);
    g.shape = -std::log2(std::max(ratio, 1e-12));
    g.rate = -std::log1p(-p) / std::pow(nu, g.shape);
  } else {
    const double ratio = f * (1.0 - p) / (1.0 - f * p);
    g.shape = -std::log2(std::max(ratio, 1e-12));
    g.rate = (p / (1.0 - p)) / std::pow(nu, g.shape);
  }
  g.shape = std::max(g.shape, 0.05);
  return g;
}

}  // namespace

CalibrationResult calibrate_arm(const std::array<double, 2>& cir, double half_fraction,
                                Family family, double nu) {
  for (int k = 0; k < 2; ++k)
    if (!(cir[k] >= 0.0) || !(cir[k] < 1.0))
      throw CalibrationError("CIR targets must lie in [0,1)");
  if (!(cir[0] + cir[1] < 1.0))
    throw CalibrationError("infeasible CIR targets: cir_dp + cir_nc must be < 1 (got " +
                           std::to_string(cir[0]) + " + " + std::to_string(cir[1]) + ")");

  CalibrationResult res;
  res.gen.family = family;
  std::vector<int> active;
  for (int k = 0; k < 2; ++k) {
    if (cir[k] > 0.0) {
      active.push_back(k);
      res.gen.cause[k] = initial_guess(cir[k], half_fraction, family, nu);
    } else {
      res.gen.cause[k] = CauseGen{1.0, 0.0};
    }
  }
  if (active.empty()) return res;

  const int n = 2 * static_cast<int>(active.size());
  std::vector<double> u(n);
  for (std::size_t i = 0; i < active.size(); ++i) {
    u[2 * i] = std::log(res.gen.cause[active[i]].shape);
    u[2 * i + 1] = std::log(res.gen.cause[active[i]].rate);
  }

  auto apply = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < active.size(); ++i) {
      res.gen.cause[active[i]].shape = std::exp(v[2 * i]);
      res.gen.cause[active[i]].rate = std::exp(v[2 * i + 1]);
    }
  };
  auto residuals = [&](const std::vector<double>& v, std::vector<double>& F) {
    apply(v);
    const auto full = generator_cir(res.gen, nu, nu);
    const auto half = generator_cir(res.gen, nu / 2.0, nu);
    F.resize(n);
    for (std::size_t i = 0; i < active.size(); ++i) {
      const int k = active[i];
      F[2 * i] = full[k] - cir[k];
      F[2 * i + 1] = half[k] - half_fraction * cir[k];
    }
  };
  auto max_norm = [](const std::vector<double>& F) {
    double m = 0.0;
    for (double v : F) m = std::max(m, std::abs(v));
    return m;
  };

  std::vector<double> F, Ftrial, Fp, Fm, J(n * n), step, utrial(n);
  residuals(u, F);
  double err = max_norm(F);
  const double tol = 1e-12;

  for (res.iterations = 0; res.iterations < 200 && err > tol; ++res.iterations) {
    // Central-difference Jacobian on the log parameters.
    const double h = 1e-6;
    for (int c = 0; c < n; ++c) {
      utrial = u;
      utrial[c] += h;
      residuals(utrial, Fp);
      utrial[c] -= 2.0 * h;
      residuals(utrial, Fm);
      for (int r = 0; r < n; ++r) J[r * n + c] = (Fp[r] - Fm[r]) / (2.0 * h);
    }
    step = F;
    std::vector<double> Jcopy = J;
    if (!solve_dense(Jcopy, step, n)) break;

    double lambda = 1.0;
    bool improved = false;
    for (int half_steps = 0; half_steps < 40; ++half_steps) {
      for (int c = 0; c < n; ++c) utrial[c] = u[c] - lambda * step[c];
      residuals(utrial, Ftrial);
      if (max_norm(Ftrial) < err) {
        u = utrial;
        F = Ftrial;
        err = max_norm(F);
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }

  apply(u);
  res.residual = err;
  if (err > 1e-9)
    throw CalibrationError("calibration did not converge (residual " +
                           std::to_string(err) + ")");
  return res;
}

void calibrate_scenario(ScenarioSpec& scenario) {
  scenario.validate_targets();
  for (int arm = 0; arm < kNumArms; ++arm) {
    try {
      auto r = calibrate_arm(scenario.targets[arm].cir, scenario.half_fraction,
                             scenario.family, scenario.nu);
      scenario.arms[arm] = r.gen;
      scenario.residual[arm] = r.residual;
    } catch (const CalibrationError& e) {
      throw CalibrationError("arm " + arm_name(arm) + ": " + e.what());
    }
  }
  scenario.calibrated = true;
}

}  // namespace crtsim
