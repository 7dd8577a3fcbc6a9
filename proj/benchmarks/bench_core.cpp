#include <benchmark/benchmark.h>

#include "vibron/dynamics.hpp"
#include "vibron/franck_condon.hpp"
#include "vibron/surfaces.hpp"

namespace {

using namespace vibron;

const IonConstants kIons = IonConstants::strontium88();
const double kOmegaZ = units::mhz_to_rad(0.778);
const double kOmegaRf = units::mhz_to_rad(18.2);

Polarisability pol() {
  static const Polarisability p =
      polarisability_for_critical_frequency(units::mhz_to_rad(1.2268), kOmegaZ, kOmegaRf, kIons);
  return p;
}

void BM_EquilibriumNumeric(benchmark::State& state) {
  const PesModel pes = make_pes(kIons, {units::mhz_to_rad(1.2), kOmegaZ}, kOmegaRf, pol(), true);
  IonPositions seed = equilibrium_zigzag_analytic(pes).positions;
  seed.x[1] *= 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_numeric(pes, seed));
}
BENCHMARK(BM_EquilibriumNumeric);

void BM_FcMatrix(benchmark::State& state) {
  const SurfacePair sp = make_surface_pair(kIons, {units::mhz_to_rad(1.225), kOmegaZ}, kOmegaRf, pol());
  const int m_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fc_matrix(sp.map, 4, m_max, 1.0));
}
BENCHMARK(BM_FcMatrix)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_LindbladRhs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CompositeSpace space(n, n);
  const SurfacePair sp = make_surface_pair(kIons, {units::mhz_to_rad(1.346), kOmegaZ}, kOmegaRf, pol());
  const FCMatrix fc = fc_matrix(sp.map, n - 1, 40);
  const double mhz = units::mhz_to_rad(1.0);
  const LindbladModel model = build_hamiltonian(
      space, {0.0, mhz, 1.5 * mhz}, {475e6, 25e6, 1.0 / 5.5e-6},
      {sp.map.frequencies_ground(0), sp.map.frequencies_ground(1)},
      {sp.map.frequencies_excited(0), sp.map.frequencies_excited(1)}, fc);
  const Eigen::MatrixXcd rho = product_state(space, ElectronicLevel::g, thermal_state(space, 0.1, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs_blocked(model, rho));
}
BENCHMARK(BM_LindbladRhs)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
