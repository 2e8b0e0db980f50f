#ifndef CTFLOW_PARAM_HPP
#define CTFLOW_PARAM_HPP

#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ctflow/types.hpp"

namespace ctflow {

class Rng;

struct Block {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size() const { return rows * cols; }
};

// Immutable name -> (shape, offset) table describing how a flat parameter
// store splits into named matrices and vectors.
class BlockLayout {
 public:
  BlockLayout() = default;
  explicit BlockLayout(const std::vector<std::tuple<std::string, int, int>>& shapes);

  const Block& at(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  int size() const { return total_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  bool same_as(const BlockLayout& other) const;

 private:
  std::vector<Block> blocks_;
  std::unordered_map<std::string, int> index_;
  int total_ = 0;
};

using LayoutPtr = std::shared_ptr<const BlockLayout>;

LayoutPtr make_layout(const std::vector<std::tuple<std::string, int, int>>& shapes);

// Flat 64-bit parameter store with named block views. Views alias the flat
// data, so writes through a view update the store.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(LayoutPtr layout);

  static ParamVector zeros_like(const ParamVector& other);

  MatView mat(const std::string& name);
  ConstMatView mat(const std::string& name) const;
  VecView vec(const std::string& name);
  ConstVecView vec(const std::string& name) const;

  Vec& flat() { return data_; }
  const Vec& flat() const { return data_; }
  int size() const { return static_cast<int>(data_.size()); }
  const BlockLayout& layout() const { return *layout_; }
  LayoutPtr layout_ptr() const { return layout_; }

 private:
  LayoutPtr layout_;
  Vec data_;
};

// Fills weight blocks with entries uniform in [-s, s], s = 1/sqrt(fan-in)
// (fan-in = block columns); blocks whose name starts with 'b' are biases and
// stay zero. Blocks are visited in layout order.
void init_uniform(ParamVector& params, Rng& rng);

// Name of the first block containing a non-finite entry, or empty string.
std::string first_nonfinite_block(const ParamVector& params);

}  // namespace ctflow

#endif
