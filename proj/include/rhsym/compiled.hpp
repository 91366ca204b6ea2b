#pragma once

// Flat numeric evaluation of many polynomials over the same inputs. Kernel
// atoms are evaluated once per call in dependency order.

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rhsym/poly.hpp"

namespace rhsym {

class CompiledPolys {
 public:
  CompiledPolys() = default;

  CompiledPolys(const std::vector<Poly>& polys, const std::vector<Symbol>& inputs) {
    for (Symbol s : inputs) {
      slot_.emplace(s.id(), nslots_);
      ++nslots_;
    }
    ninputs_ = nslots_;
    for (const Poly& p : polys) outputs_.push_back(add_poly(p));
  }

  std::size_t inputs() const { return ninputs_; }
  std::size_t outputs() const { return outputs_.size(); }

  /// Writes one value per compiled polynomial.
  void eval(const double* in, double* out) const {
    std::vector<double> slots(nslots_);
    for (std::size_t i = 0; i < ninputs_; ++i) slots[i] = in[i];
    for (const Kernel& k : kernels_) {
      const double arg = run(k.poly, slots);
      slots[k.slot] = k.exp ? std::exp(arg) : std::log(arg);
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = run(outputs_[i], slots);
  }

  std::vector<double> eval(const std::vector<double>& in) const {
    if (in.size() != ninputs_) throw std::invalid_argument("wrong number of inputs");
    std::vector<double> out(outputs_.size());
    eval(in.data(), out.data());
    return out;
  }

 private:
  struct Factor {
    std::size_t slot;
    int exponent;
  };
  struct Term {
    double coef;
    std::size_t begin, end;  // into factors_
  };
  struct Range {
    std::size_t begin, end;  // into terms_
  };
  struct Kernel {
    bool exp;
    std::size_t slot;
    Range poly;
  };

  std::size_t slot_of(AtomId a) {
    if (auto it = slot_.find(a); it != slot_.end()) return it->second;
    const AtomInfo& info = atom_info(a);
    if (info.kind == AtomKind::Symbol) throw std::invalid_argument("no input for symbol " + info.name);
    const Range arg = add_poly(*info.arg);
    const std::size_t s = nslots_++;
    kernels_.push_back({info.kind == AtomKind::Exp, s, arg});
    slot_.emplace(a, s);
    return s;
  }

  Range add_poly(const Poly& p) {
    // Kernels referenced by p are registered before p's own terms.
    std::vector<std::vector<Factor>> fs;
    for (const auto& [m, c] : p.terms) {
      std::vector<Factor> f;
      for (auto [a, e] : m) f.push_back({slot_of(a), e});
      fs.push_back(std::move(f));
    }
    Range r{terms_.size(), 0};
    std::size_t i = 0;
    for (const auto& [m, c] : p.terms) {
      const std::size_t b = factors_.size();
      factors_.insert(factors_.end(), fs[i].begin(), fs[i].end());
      terms_.push_back({c.get_d(), b, factors_.size()});
      ++i;
    }
    r.end = terms_.size();
    return r;
  }

  double run(const Range& r, const std::vector<double>& slots) const {
    double acc = 0;
    for (std::size_t t = r.begin; t < r.end; ++t) {
      double v = terms_[t].coef;
      for (std::size_t f = terms_[t].begin; f < terms_[t].end; ++f) {
        const double x = slots[factors_[f].slot];
        const int e = factors_[f].exponent;
        if (e == 1) {
          v *= x;
        } else if (e == -1) {
          v /= x;
        } else if (e == 2) {
          v *= x * x;
        } else {
          v *= std::pow(x, e);
        }
      }
      acc += v;
    }
    return acc;
  }

  std::unordered_map<AtomId, std::size_t> slot_;
  std::size_t nslots_ = 0;
  std::size_t ninputs_ = 0;
  std::vector<Factor> factors_;
  std::vector<Term> terms_;
  std::vector<Kernel> kernels_;
  std::vector<Range> outputs_;
};

/// Rational functions compiled as numerator/denominator pairs.
class CompiledRatFuncs {
 public:
  CompiledRatFuncs() = default;
  CompiledRatFuncs(const std::vector<RatFunc>& fs, const std::vector<Symbol>& inputs) {
    std::vector<Poly> ps;
    for (const RatFunc& f : fs) {
      ps.push_back(f.num);
      ps.push_back(f.den);
    }
    polys_ = CompiledPolys(ps, inputs);
    n_ = fs.size();
  }
  std::vector<double> eval(const std::vector<double>& in) const {
    const std::vector<double> raw = polys_.eval(in);
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = raw[2 * i] / raw[2 * i + 1];
    return out;
  }

 private:
  CompiledPolys polys_;
  std::size_t n_ = 0;
};

}  // namespace rhsym
