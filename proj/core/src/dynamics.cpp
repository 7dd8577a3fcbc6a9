#include "vibron/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "vibron/errors.hpp"
#include "vibron/parallel.hpp"

namespace vibron {

using cd = std::complex<double>;

CompositeSpace::CompositeSpace(int n1_max, int n2_max) : n1_(n1_max), n2_(n2_max) {
  if (n1_max < 1 || n2_max < 1) {
    throw PhysicsError(ErrorCode::InvalidArgument, "phonon truncations must be >= 1");
  }
}

int CompositeSpace::index(ElectronicLevel e, int i_cm, int i_zz) const {
  if (i_cm < 0 || i_zz < 0 || i_cm >= n1_ || i_zz >= n2_) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "phonon index outside truncation");
  }
  return static_cast<int>(e) * n1_ * n2_ + i_cm * n2_ + i_zz;
}

Eigen::MatrixXd CompositeSpace::phonon_identity() const {
  return Eigen::MatrixXd::Identity(phonon_dimension(), phonon_dimension());
}

Eigen::MatrixXd LindbladModel::dense_hamiltonian() const {
  const int p = space.phonon_dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(space.dimension(), space.dimension());
  for (int e = 0; e < 3; ++e) {
    h.block(e * p, e * p, p, p).diagonal() = ground_phonon_energies;
  }
  h.block(3 * p, 3 * p, p, p) =
      rydberg_phonon_hamiltonian - laser.delta * Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(p, p);
  h.block(1 * p, 2 * p, p, p) = 0.5 * laser.omega_gp * id;
  h.block(2 * p, 1 * p, p, p) = 0.5 * laser.omega_gp * id;
  h.block(2 * p, 3 * p, p, p) = 0.5 * laser.omega_pr * id;
  h.block(3 * p, 2 * p, p, p) = 0.5 * laser.omega_pr * id;
  return h;
}

LindbladModel LindbladModel::with_detuning(double delta) const {
  LindbladModel m = *this;
  m.laser.delta = delta;
  return m;
}

std::array<double, kElectronicLevels> LindbladModel::loss_rates() const {
  std::array<double, kElectronicLevels> out{};
  for (const auto& j : jumps) out[static_cast<std::size_t>(j.from)] += j.rate;
  return out;
}

namespace {

Eigen::VectorXd ground_energies(const CompositeSpace& space, const PhononFrequencies& w) {
  Eigen::VectorXd d(space.phonon_dimension());
  for (int i1 = 0; i1 < space.n1_max(); ++i1) {
    for (int i2 = 0; i2 < space.n2_max(); ++i2) {
      d(i1 * space.n2_max() + i2) = w.first * (i1 + 0.5) + w.second * (i2 + 0.5);
    }
  }
  return d;
}

LindbladModel base_model(const CompositeSpace& space, const LaserParams& laser,
                         const DecayRates& rates, const PhononFrequencies& ground) {
  if (rates.gamma_sp < 0.0 || rates.gamma_gp < 0.0 || rates.gamma_sr < 0.0) {
    throw PhysicsError(ErrorCode::InvalidArgument, "decay rates must be non-negative");
  }
  if (!(ground.first > 0.0) || !(ground.second > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "phonon frequencies must be positive");
  }
  LindbladModel m;
  m.space = space;
  m.laser = laser;
  m.rates = rates;
  m.ground_phonon_energies = ground_energies(space, ground);
  m.jumps = {{ElectronicLevel::p, ElectronicLevel::s, rates.gamma_sp},
             {ElectronicLevel::p, ElectronicLevel::g, rates.gamma_gp},
             {ElectronicLevel::r, ElectronicLevel::s, rates.gamma_sr}};
  return m;
}

}  // namespace

LindbladModel build_hamiltonian(const CompositeSpace& space, const LaserParams& laser,
                                const DecayRates& rates, const PhononFrequencies& ground,
                                const PhononFrequencies& excited, const FCMatrix& fc,
                                double completeness_bound) {
  if (!(excited.first > 0.0) || !(excited.second > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "excited phonon frequencies must be positive");
  }
  const int rows_needed = std::max(space.n1_max(), space.n2_max());
  if (fc.n_max() + 1 < rows_needed) {
    throw PhysicsError(ErrorCode::TruncationTooSmall,
                       "FC matrix has fewer ground rows than the composite space");
  }
  fc.require_complete(space.n1_max(), space.n2_max(), completeness_bound);

  LindbladModel m = base_model(space, laser, rates, ground);
  const Eigen::MatrixXd w = fc.overlap_matrix(space.n1_max(), space.n2_max());
  const int side = fc.m_max() + 1;
  Eigen::VectorXd e(side * side);
  for (int m1 = 0; m1 < side; ++m1) {
    for (int m2 = 0; m2 < side; ++m2) {
      e(m1 * side + m2) = excited.first * (m1 + 0.5) + excited.second * (m2 + 0.5);
    }
  }
  const Eigen::MatrixXd we = w * e.asDiagonal();
  Eigen::MatrixXd hr = we * w.transpose();
  const double asym = (hr - hr.transpose()).norm();
  if (!(asym <= 1e-12 * std::max(hr.norm(), 1.0))) {
    throw PhysicsError(ErrorCode::NonHermitian, "excited phonon Hamiltonian is not symmetric");
  }
  m.rydberg_phonon_hamiltonian = 0.5 * (hr + hr.transpose());
  return m;
}

LindbladModel build_hamiltonian_identity(const CompositeSpace& space, const LaserParams& laser,
                                         const DecayRates& rates,
                                         const PhononFrequencies& ground) {
  LindbladModel m = base_model(space, laser, rates, ground);
  m.rydberg_phonon_hamiltonian = m.ground_phonon_energies.asDiagonal();
  return m;
}

Eigen::MatrixXd ThermalPhononState::density() const { return diagonal.asDiagonal(); }

ThermalPhononState thermal_state(const CompositeSpace& space, double mean_cm, double mean_zz,
                                 double tail_bound) {
  if (!(mean_cm >= 0.0) || !(mean_zz >= 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "mean occupations must be non-negative");
  }
  ThermalPhononState st;
  st.mean_cm = mean_cm;
  st.mean_zz = mean_zz;
  auto geometric = [&](double mean, int count, Eigen::VectorXd& w) {
    const double q = mean / (mean + 1.0);
    const double tail = std::pow(q, count);
    if (tail > tail_bound) {
      throw PhysicsError(ErrorCode::TailTooHeavy,
                         "thermal tail " + std::to_string(tail) + " beyond " +
                             std::to_string(count) + " Fock states exceeds " +
                             std::to_string(tail_bound));
    }
    w.resize(count);
    for (int n = 0; n < count; ++n) w(n) = (1.0 - q) * std::pow(q, n);
    w /= w.sum();
    return tail;
  };
  const double t1 = geometric(mean_cm, space.n1_max(), st.weights_cm);
  const double t2 = geometric(mean_zz, space.n2_max(), st.weights_zz);
  st.truncated_tail = std::max(t1, t2);
  st.diagonal.resize(space.phonon_dimension());
  for (int i1 = 0; i1 < space.n1_max(); ++i1) {
    for (int i2 = 0; i2 < space.n2_max(); ++i2) {
      st.diagonal(i1 * space.n2_max() + i2) = st.weights_cm(i1) * st.weights_zz(i2);
    }
  }
  st.diagonal /= st.diagonal.sum();
  return st;
}

Eigen::MatrixXcd product_state(const CompositeSpace& space, ElectronicLevel level,
                               const ThermalPhononState& phonons) {
  if (phonons.diagonal.size() != space.phonon_dimension()) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "phonon state does not match space");
  }
  const int p = space.phonon_dimension();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(space.dimension(), space.dimension());
  const int off = static_cast<int>(level) * p;
  rho.block(off, off, p, p).diagonal() = phonons.diagonal.cast<cd>();
  return rho;
}

Eigen::MatrixXcd lindblad_rhs_dense(const LindbladModel& model, const Eigen::MatrixXcd& rho) {
  const int dim = model.space.dimension();
  const int p = model.space.phonon_dimension();
  const Eigen::MatrixXcd h = model.dense_hamiltonian().cast<cd>();
  Eigen::MatrixXcd out = -cd(0, 1) * (h * rho - rho * h);
  for (const auto& j : model.jumps) {
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(dim, dim);
    l.block(static_cast<int>(j.to) * p, static_cast<int>(j.from) * p, p, p).setIdentity();
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    out += j.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

namespace {

constexpr int kBlockCount = 10;

constexpr int block_id(int a, int b) {
  // Upper-triangular row-major numbering of the 4 x 4 electronic blocks.
  constexpr int row_start[4] = {0, 4, 7, 9};
  return row_start[a] + (b - a);
}

// Propagates the upper-triangular electronic blocks of rho, packed as
// 10 column-major P x P complex blocks followed by the running integral of P_r.
class BlockPropagator {
 public:
  BlockPropagator(const LindbladModel& model, bool s_coherent)
      : p_(model.space.phonon_dimension()),
        d_(model.ground_phonon_energies),
        hr_(model.rydberg_phonon_hamiltonian),
        delta_(model.laser.delta),
        s_coherent_(s_coherent),
        work_(p_, p_),
        prod_(p_, p_) {
    k_[1][2] = k_[2][1] = 0.5 * model.laser.omega_gp;
    k_[2][3] = k_[3][2] = 0.5 * model.laser.omega_pr;
    loss_ = model.loss_rates();
    for (const auto& j : model.jumps) feed_.push_back(j);
  }

  [[nodiscard]] Eigen::Index size() const {
    return static_cast<Eigen::Index>(kBlockCount) * p_ * p_ + 1;
  }

  void pack(const Eigen::MatrixXcd& rho, Eigen::VectorXcd& y) const {
    y.setZero(size());
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) block(y, a, b) = rho.block(a * p_, b * p_, p_, p_);
    }
  }

  [[nodiscard]] Eigen::MatrixXcd unpack(const Eigen::VectorXcd& y) const {
    Eigen::MatrixXcd rho(4 * p_, 4 * p_);
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        rho.block(a * p_, b * p_, p_, p_) = cblock(y, a, b);
        if (b != a) rho.block(b * p_, a * p_, p_, p_) = cblock(y, a, b).adjoint();
      }
    }
    return rho;
  }

  void symmetrize(Eigen::VectorXcd& y) const {
    for (int a = 0; a < 4; ++a) {
      auto blk = block(y, a, a);
      for (int j = 0; j < p_; ++j) {
        blk(j, j) = cd(blk(j, j).real(), 0.0);
        for (int i = j + 1; i < p_; ++i) {
          const cd avg = 0.5 * (blk(i, j) + std::conj(blk(j, i)));
          blk(i, j) = avg;
          blk(j, i) = std::conj(avg);
        }
      }
    }
  }

  void rhs(const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    dy.resize(size());
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        auto out = block(dy, a, b);
        if (a == 0 && b != 0 && !s_coherent_) {
          out.setZero();
          continue;
        }
        const auto rho_ab = cblock(y, a, b);
        if (a == 3) {
          right_multiply(rho_ab, prod_);
          work_ = prod_.adjoint() - prod_;
        } else {
          work_.noalias() = d_.asDiagonal() * rho_ab;
          if (b == 3) {
            right_multiply(rho_ab, prod_);
            work_ -= prod_;
            work_ += delta_ * rho_ab;
          } else {
            work_.noalias() -= rho_ab * d_.asDiagonal();
          }
        }
        for (int c = 1; c < 4; ++c) {
          if (k_[a][c] != 0.0) add_block(work_, k_[a][c], y, c, b);
          if (k_[c][b] != 0.0) add_block(work_, -k_[c][b], y, a, c);
        }
        out = cd(0, -1) * work_ - (0.5 * (loss_[a] + loss_[b])) * rho_ab;
      }
    }
    for (const auto& j : feed_) {
      const int to = static_cast<int>(j.to);
      const int from = static_cast<int>(j.from);
      block(dy, to, to) += j.rate * cblock(y, from, from);
    }
    dy(size() - 1) = cblock(y, 3, 3).trace().real();
  }

 private:
  using Block = Eigen::Map<Eigen::MatrixXcd>;
  using ConstBlock = Eigen::Map<const Eigen::MatrixXcd>;

  [[nodiscard]] Block block(Eigen::VectorXcd& y, int a, int b) const {
    return Block(y.data() + static_cast<Eigen::Index>(block_id(a, b)) * p_ * p_, p_, p_);
  }
  [[nodiscard]] ConstBlock cblock(const Eigen::VectorXcd& y, int a, int b) const {
    return ConstBlock(y.data() + static_cast<Eigen::Index>(block_id(a, b)) * p_ * p_, p_, p_);
  }

  // out += k * rho_{ab} for any ordering of a, b.
  void add_block(Eigen::MatrixXcd& out, double k, const Eigen::VectorXcd& y, int a, int b) const {
    if (a <= b) {
      out += k * cblock(y, a, b);
    } else {
      out += k * cblock(y, b, a).adjoint();
    }
  }

  // prod = rho * H_r as one real product on the interleaved view of the complex block.
  void right_multiply(const ConstBlock& rho, Eigen::MatrixXcd& prod) const {
    Eigen::Map<const Eigen::MatrixXd> re(reinterpret_cast<const double*>(rho.data()), 2 * p_, p_);
    Eigen::Map<Eigen::MatrixXd> out(reinterpret_cast<double*>(prod.data()), 2 * p_, p_);
    out.noalias() = re * hr_;
  }

  int p_;
  Eigen::VectorXd d_;
  Eigen::MatrixXd hr_;
  double delta_;
  bool s_coherent_;
  std::array<std::array<double, 4>, 4> k_{};
  std::array<double, 4> loss_{};
  std::vector<JumpOperator> feed_;
  Eigen::MatrixXcd work_;
  Eigen::MatrixXcd prod_;
};

bool has_s_coherences(const Eigen::MatrixXcd& rho, int p) {
  return rho.block(0, p, p, 3 * p).cwiseAbs().maxCoeff() > 0.0;
}

void validate_density(const Eigen::MatrixXcd& rho, int dim) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "density matrix does not match the space");
  }
  if (!(std::abs(rho.trace() - cd(1.0, 0.0)) < 1e-10)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "initial state must have unit trace");
  }
  if (!((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "initial state must be Hermitian");
  }
  Eigen::MatrixXcd off = rho;
  off.diagonal().setZero();
  double lowest = 0.0;
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    lowest = rho.diagonal().real().minCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    lowest = es.eigenvalues().minCoeff();
  }
  if (lowest < -1e-10) {
    throw PhysicsError(ErrorCode::InvalidArgument, "initial state must be positive semidefinite");
  }
}

double lowest_eigenvalue(const Eigen::MatrixXcd& rho, int p, bool s_coherent) {
  auto lowest = [](const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  if (s_coherent) return lowest(rho);
  return std::min(lowest(rho.block(0, 0, p, p)), lowest(rho.block(p, p, 3 * p, 3 * p)));
}

}  // namespace

Eigen::MatrixXcd lindblad_rhs_blocked(const LindbladModel& model, const Eigen::MatrixXcd& rho) {
  const int p = model.space.phonon_dimension();
  BlockPropagator prop(model, has_s_coherences(rho, p));
  Eigen::VectorXcd y, dy;
  prop.pack(rho, y);
  prop.rhs(y, dy);
  return prop.unpack(dy);
}

EvolveResult evolve(const LindbladModel& model, const Eigen::MatrixXcd& rho0, double t_final,
                    const EvolveOptions& options) {
  const int p = model.space.phonon_dimension();
  validate_density(rho0, model.space.dimension());
  if (!(t_final >= 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "evolution time must be non-negative");
  }
  const bool s_coherent = has_s_coherences(rho0, p);
  BlockPropagator prop(model, s_coherent);
  Eigen::VectorXcd y;
  prop.pack(rho0, y);

  const OdeRhs f = [&prop](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& d) {
    prop.rhs(state, d);
  };
  const StepObserver obs = [&prop](double, Eigen::VectorXcd& state) { prop.symmetrize(state); };

  EvolveResult res;
  res.stats = integrate(f, y, 0.0, t_final, options.integrator, obs);
  res.integrated_rydberg = y(y.size() - 1).real();
  res.rho = prop.unpack(y);

  auto pop = [&](int e) { return res.rho.block(e * p, e * p, p, p).trace().real(); };
  res.populations = {pop(0), pop(1), pop(2), pop(3)};
  res.trace_defect = std::abs(res.rho.trace().real() - 1.0);
  if (options.compute_positivity) {
    res.positivity_defect = std::max(0.0, -lowest_eigenvalue(res.rho, p, s_coherent));
  }
  return res;
}

std::vector<double> SpectrumResult::rydberg() const {
  std::vector<double> out;
  out.reserve(populations.size());
  for (const auto& p : populations) out.push_back(p.r);
  return out;
}

double SpectrumResult::max_trace_defect() const {
  return trace_defect.empty() ? 0.0 : *std::max_element(trace_defect.begin(), trace_defect.end());
}

double SpectrumResult::max_positivity_defect() const {
  return positivity_defect.empty()
             ? 0.0
             : *std::max_element(positivity_defect.begin(), positivity_defect.end());
}

SpectrumResult spectrum(const ModelBuilder& builder, std::span<const double> delta_grid,
                        const Eigen::MatrixXcd& rho0, double t_probe,
                        const EvolveOptions& options, unsigned workers) {
  if (delta_grid.empty()) {
    throw PhysicsError(ErrorCode::InvalidArgument, "detuning grid is empty");
  }
  if (!(t_probe > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "probe time must be positive");
  }
  auto runs = parallel_map(
      delta_grid.size(),
      [&](std::size_t i) {
        EvolveResult r = evolve(builder(delta_grid[i]), rho0, t_probe, options);
        r.rho.resize(0, 0);
        return r;
      },
      workers);

  SpectrumResult out;
  out.probe_time = t_probe;
  out.delta.assign(delta_grid.begin(), delta_grid.end());
  for (const auto& r : runs) {
    out.populations.push_back(r.populations);
    out.rydberg_time_average.push_back(r.integrated_rydberg / t_probe);
    out.trace_defect.push_back(r.trace_defect);
    out.positivity_defect.push_back(r.positivity_defect);
  }
  return out;
}

PeakEstimate locate_peak(std::span<const double> delta, std::span<const double> values) {
  if (delta.empty() || delta.size() != values.size()) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "peak search needs matching nonempty arrays");
  }
  const auto it = std::max_element(values.begin(), values.end());
  PeakEstimate pk;
  pk.index = static_cast<std::size_t>(it - values.begin());
  pk.delta = delta[pk.index];
  pk.height = *it;
  if (pk.index == 0 || pk.index + 1 == values.size()) return pk;

  const double x0 = delta[pk.index - 1], x1 = delta[pk.index], x2 = delta[pk.index + 1];
  const double y0 = values[pk.index - 1], y1 = values[pk.index], y2 = values[pk.index + 1];
  // Vertex of the interpolating parabola in divided-difference form.
  const double f01 = (y1 - y0) / (x1 - x0);
  const double f12 = (y2 - y1) / (x2 - x1);
  const double curv = (f12 - f01) / (x2 - x0);
  if (!(curv < 0.0)) return pk;
  const double xv = 0.5 * (x0 + x1) - f01 / (2.0 * curv);
  pk.delta = std::clamp(xv, x0, x2);
  pk.height = y0 + f01 * (pk.delta - x0) + curv * (pk.delta - x0) * (pk.delta - x1);
  return pk;
}

std::vector<double> fluorescence_signal(const SpectrumResult& result, double branching) {
  std::vector<double> out;
  out.reserve(result.populations.size());
  for (const auto& p : result.populations) {
    out.push_back(std::clamp(p.s + branching * p.r, 0.0, 1.0));
  }
  return out;
}

}  // namespace vibron
