// Capacity of an unbroadened memory against optical depth, with a sqrt fit.
#include <iostream>
#include <qmcap/qmcap.hpp>

int main() {
  using namespace qmcap;
  auto r = capacity_curve(unbroadened_spec(1), {100, 225, 400, 625, 900}, 0.7);
  std::cout << sweep_csv(r);
  auto f = fit_scaling(fit_points(r), FitModel::sqrt);
  std::cout << "# N ~ " << f.a << " sqrt(d), r2 = " << f.r_squared << "\n";
}
