#pragma once

#include <initializer_list>
#include <string>

#include "affiso/families.hpp"

namespace testing_helpers {

using affiso::Matrix;
using affiso::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline affiso::FamilyDescriptor desc(const std::string& kind, int n = 1) {
  affiso::FamilyDescriptor d;
  d.kind = kind;
  d.n = n;
  return d;
}

inline affiso::Potential pot(const affiso::FamilyDescriptor& d) { return affiso::make_family(d).potential(); }
inline affiso::SConcaveProfile prof(const affiso::FamilyDescriptor& d) { return affiso::make_family(d).profile(); }
inline affiso::TestFunction tfun(const affiso::FamilyDescriptor& d) { return affiso::make_family(d).test_function(); }

inline affiso::SConcaveProfile cap_gs(int n, int s) {
  auto d = desc("cap-gs", n);
  d.s = s;
  return prof(d);
}

inline affiso::TestFunction poly1(std::initializer_list<double> coeffs) {
  auto d = desc("polynomial");
  d.coeffs = coeffs;
  return tfun(d);
}

inline affiso::TestFunction hermite_basis(int k) {
  auto d = desc("hermite-basis");
  d.k = k;
  return tfun(d);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_helpers
