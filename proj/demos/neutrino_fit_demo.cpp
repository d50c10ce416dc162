// Fit two-flavor oscillation parameters with damping to the bundled
// synthetic spectrum.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dqs/neutrino.hpp"

int main(int argc, char** argv) {
  using namespace dqs::neutrino;
  const std::string path = argc > 1 ? argv[1] : DQS_DATA_DIR "/synthetic_spectrum.csv";
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return 1;
  }
  try {
    const auto data = read_spectrum_csv(in);
    const auto fit = fit_parameters(data);
    std::printf("points   %zu\n", data.size());
    std::printf("dm2      %.6e eV^2\n", fit.params.dm2_ev2);
    std::printf("theta    %.6f rad\n", fit.params.theta_rad);
    std::printf("lambda   %.6e 1/km\n", fit.params.lambda_per_km);
    std::printf("sse      %.3e after %d sweeps (%s)\n", fit.sse, fit.sweeps,
                fit.converged ? "converged" : "not converged");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return 2;
  }
  return 0;
}
