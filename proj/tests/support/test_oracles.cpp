#include "support/test_oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qee/constants.hpp"

namespace testsupport {

ComplexMatrix taylor_expm(const ComplexMatrix& h, double t, double hbar) {
  const Index d = h.rows();
  ComplexMatrix m = Complex(0.0, -t / hbar) * h;
  // Scale until the norm is small enough that the plain series converges
  // rapidly, sum it to machine precision, then square back.
  int squarings = 0;
  double norm = m.norm();
  while (norm > 0.25) {
    m /= 2.0;
    norm /= 2.0;
    ++squarings;
  }
  ComplexMatrix result = ComplexMatrix::Identity(d, d);
  ComplexMatrix term = ComplexMatrix::Identity(d, d);
  for (int k = 1; k <= 60; ++k) {
    term = (term * m).eval();
    term /= static_cast<double>(k);
    result += term;
    if (term.norm() < 1e-18 * result.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

std::vector<double> jacobi_eigenvalues(ComplexMatrix a) {
  const Index d = a.rows();
  if (a.cols() != d) throw std::invalid_argument("jacobi_eigenvalues: square input required");
  // Symmetrize away rounding-level asymmetry so the two-sided rotations keep
  // the matrix exactly Hermitian.
  a = ((a + a.adjoint()) / 2.0).eval();
  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < d; ++p)
      for (Index q = p + 1; q < d; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) < 1e-13 * scale) break;
    for (Index p = 0; p < d; ++p) {
      for (Index q = p + 1; q < d; ++q) {
        const double beta = std::abs(a(p, q));
        if (beta < 1e-300) continue;
        const double phi = std::arg(a(p, q));
        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        // Rotation angle zeroing the (p,q) entry: tan(2 theta) = 2 beta /
        // (alpha - gamma); pick the smaller-angle root for stability.
        const double tau = (alpha - gamma) / (2.0 * beta);
        double tt;
        if (std::abs(tau) > 1e150) {
          tt = 1.0 / (2.0 * tau);
        } else if (tau >= 0.0) {
          tt = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          tt = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = tt * c;
        const Complex eip = std::polar(1.0, phi);
        const Complex eim = std::conj(eip);
        // Columns p and q of A <- R^dag A R with R_pp = c, R_pq = -s e^{i
        // phi}, R_qp = s e^{-i phi}, R_qq = c.
        for (Index k = 0; k < d; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + s * eim * akq;
          a(k, q) = c * akq - s * eip * akp;
        }
        for (Index k = 0; k < d; ++k) {
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        const double app = c * c * alpha + 2.0 * c * s * beta + s * s * gamma;
        const double aqq = s * s * alpha - 2.0 * c * s * beta + c * c * gamma;
        a(p, p) = app;
        a(q, q) = aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  std::vector<double> evals(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) evals[static_cast<std::size_t>(i)] = a(i, i).real();
  std::sort(evals.begin(), evals.end());
  return evals;
}

ComplexMatrix partial_transpose_qubit_oracle(const ComplexMatrix& m, Index d_env) {
  const Index d = 2 * d_env;
  ComplexMatrix out(d, d);
  for (Index q = 0; q < 2; ++q)
    for (Index e = 0; e < d_env; ++e)
      for (Index qp = 0; qp < 2; ++qp)
        for (Index ep = 0; ep < d_env; ++ep)
          out(q * d_env + e, qp * d_env + ep) = m(qp * d_env + e, q * d_env + ep);
  return out;
}

double negativity_oracle(const ComplexMatrix& sigma, Index d_env) {
  const std::vector<double> evals =
      jacobi_eigenvalues(partial_transpose_qubit_oracle(sigma, d_env));
  double abs_sum = 0.0;
  for (double v : evals) abs_sum += std::abs(v);
  return (abs_sum - 1.0) / 2.0;
}

ComplexMatrix partial_trace_env_oracle(const ComplexMatrix& sigma, Index d_env) {
  ComplexMatrix out = ComplexMatrix::Zero(2, 2);
  for (Index q = 0; q < 2; ++q)
    for (Index qp = 0; qp < 2; ++qp)
      for (Index e = 0; e < d_env; ++e)
        out(q, qp) += sigma(q * d_env + e, qp * d_env + e);
  return out;
}

ComplexMatrix partial_trace_qubit_oracle(const ComplexMatrix& sigma, Index d_env) {
  ComplexMatrix out = ComplexMatrix::Zero(d_env, d_env);
  for (Index e = 0; e < d_env; ++e)
    for (Index ep = 0; ep < d_env; ++ep)
      for (Index q = 0; q < 2; ++q)
        out(e, ep) += sigma(q * d_env + e, q * d_env + ep);
  return out;
}

ComplexMatrix joint_hamiltonian(const qee::PureDephasingModel& model) {
  const Index d = model.d_env();
  ComplexMatrix h = ComplexMatrix::Zero(2 * d, 2 * d);
  h.block(0, 0, d, d) =
      model.eps0() * ComplexMatrix::Identity(d, d) + model.h_env() + model.v0();
  h.block(d, d, d, d) =
      model.eps1() * ComplexMatrix::Identity(d, d) + model.h_env() + model.v1();
  return h;
}

ComplexMatrix evolve_joint_oracle(const qee::PureDephasingModel& model,
                                  const ComplexMatrix& sigma0, double t) {
  const ComplexMatrix u =
      taylor_expm(joint_hamiltonian(model), t, qee::constants::hbar_meV_ps);
  return u * sigma0 * u.adjoint();
}

double isotropic_kernel(double amplitude, double a, double omega) {
  return amplitude * omega * std::exp(-a * omega * omega);
}

double isotropic_phase(double amplitude, double a, double t) {
  return amplitude * std::sqrt(M_PI) * t * std::exp(-t * t / (4.0 * a)) /
         (4.0 * std::pow(a, 1.5));
}

double isotropic_plateau_t0(double amplitude, double a) { return amplitude / (2.0 * a); }

double frob_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

std::string qee_binary;

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed for: " + command);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::filesystem::path scratch_dir(const std::string& label) {
  const std::filesystem::path dir = std::filesystem::path("test_scratch") / label;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
