// AFC capacity against tooth count at fixed per-tooth depth and finesse.
#include <iostream>
#include <qmcap/qmcap.hpp>

int main() {
  using namespace qmcap;
  std::cout << "M,delta0,N,lambda1\n";
  for (int M : {1, 2, 4, 8}) {
    ProtocolSpec s = afc_spec(20, M, 40);
    auto c = capacity(evaluate_spectrum(s).spectrum, 0.7);
    std::cout << M << "," << s.delta0 << "," << c.N << "," << c.lambda_bar[0] << "\n";
  }
}
