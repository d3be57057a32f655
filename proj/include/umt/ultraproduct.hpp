#pragma once

#include <map>
#include <vector>

#include "umt/filters.hpp"
#include "umt/fol.hpp"
#include "umt/report.hpp"

namespace umt {

// Reduced product of a family modulo a filter. Elements are classes of
// choice functions; each class is represented by its pointwise-minimal
// member (first element of every factor off the kernel).
struct ReducedProduct {
  Structure structure;
  IndexSet index;
  Mask kernel = 0;
  std::vector<std::vector<int>> representatives;
  std::vector<int> factor_sizes;
  bool ultra = false;
  // Set when the filter is not an ultrafilter: the product still exists but
  // the Łoś correspondence can fail.
  bool warning = false;

  int class_of(const std::vector<int>& choice) const;
  int factor_size(int i) const { return factor_sizes.at(i); }
};

ReducedProduct build_ultraproduct(const std::vector<Structure>& family, const Ultrafilter& u);
ReducedProduct build_reduced_product(const std::vector<Structure>& family, const Filter& f);

// Compares B |= phi[f1..fk] with {i : A_i |= phi[f1(i)..fk(i)]} in F for every
// enumerated phi and every tuple of choice functions.
CheckReport los_check(const std::vector<Structure>& family, const Filter& f,
                      const EnumOptions& opt);
CheckReport los_check(const std::vector<Structure>& family, const Filter& f,
                      const FormulaTable& table);

struct DiagonalResult {
  ReducedProduct power;
  std::vector<int> map;  // element of A -> class of its constant function
  bool image_is_whole = false;
  CheckReport report;
};
DiagonalResult diagonal_embedding(const Structure& a, const Ultrafilter& u, const EnumOptions& opt);
DiagonalResult diagonal_embedding(const Structure& a, const Ultrafilter& u,
                                  const FormulaTable& table);

// Class -> value at the principal point; an isomorphism onto that factor.
std::vector<int> principal_projection(const ReducedProduct& p);

struct CompactnessResult {
  IndexSet index;  // nonempty subsets of the sentences
  Ultrafilter ultrafilter;
  ReducedProduct product;
  CheckReport report;
};
// models maps a nonempty subset of sentence positions (bitmask) to a model
// of exactly those sentences.
CompactnessResult compactness_witness(const std::vector<Formula>& sentences,
                                      const std::map<Mask, Structure>& models);
std::string subset_name(Mask m, std::size_t n);

}  // namespace umt
