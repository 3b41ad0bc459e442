#pragma once

#include "chainlab/spectral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace chainlab {

using Transform = std::function<cplx(double)>;

// Samples of a Fourier transform on the uniform grid xi_i = (i - half) * spacing,
// i = 0..2 half - 1. Symmetric index layout: the mirror of i is 2 half - i.
struct MacroField {
  double spacing = 1.0;
  int half = 0;
  std::vector<cplx> values;

  MacroField() = default;
  MacroField(int half, double spacing);
  int size() const { return static_cast<int>(values.size()); }
  double xi(int i) const { return (i - half) * spacing; }
  static MacroField sample(const Transform& f, int half, double spacing);
};

// a real test function J together with its transform J~(xi) = int J(y) e^{-2 pi i xi y} dy
struct TestFunction {
  std::string name;
  Profile value;
  Transform transform;
};

struct WaveSolution {
  MacroField p_tilde, l_tilde;
  double theta = 0.0;
  double time = 0.0;
};

struct FlucSolution {
  MacroField f_plus, f_minus;
  double theta = 0.0;
  double gamma = 0.0;
  double time = 0.0;
};

WaveSolution solve_wave(const MacroField& p0, const MacroField& l0, double t, double theta);
FlucSolution solve_fluc(const MacroField& f0_plus, const MacroField& f0_minus, double t, double theta,
                        double gamma);

// int e J dy for the limiting energy density of the wave solution
double energy_functional(const WaveSolution& wave, const TestFunction& J, double theta);
// bounded kernel of the 1<theta<3 potential energy pairing, extended to the singular rays
double energy_kernel(double k, double xi, double theta);
// int u v J dy for real fields u, v given by their transforms, by the double-frequency sum
double quadratic_pairing(const MacroField& u, const MacroField& v, const TestFunction& J);

struct GridSamples {
  std::vector<double> values;
  double max_imag = 0.0;
};
GridSamples field_on_grid(const MacroField& f, const std::vector<double>& y);

}  // namespace chainlab
