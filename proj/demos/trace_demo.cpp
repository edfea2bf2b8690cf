// Minimal library usage: compare STIRAP and sa-STIRAP transfer for Gaussian
// pulses at a duration where the bare protocol is far from adiabatic.

#include <cstdio>

#include "stirap/experiments.hpp"
#include "stirap/units.hpp"

int main() {
  using namespace stirap;

  ScenarioSpec spec;
  spec.kind = ScenarioKind::PopulationTrace;
  spec.pulse.family = PulseFamily::Gaussian;
  spec.pulse.omega0 = mhz_to_rad_per_us(2.0);
  spec.pulse.T = 1.25;
  spec.pulse.sigma = spec.pulse.T / 6.0;
  spec.pulse.delta_t = spec.pulse.T / 10.0;
  spec.correction = CorrectionParams{mhz_to_rad_per_us(3.0)};

  for (Protocol protocol : {Protocol::Stirap, Protocol::SaStirap}) {
    spec.protocol = protocol;
    const TraceRecord record = run_population_trace(spec);
    std::printf("%-10s T=%.2f us  efficiency=%.4f  max p(|0>)=%.4f\n",
                to_string(protocol), spec.pulse.T, record.efficiency,
                max_intermediate_population(record));
  }
  return 0;
}
