#include "ctflow/param.hpp"

#include <cmath>
#include <stdexcept>

#include "ctflow/rng.hpp"

namespace ctflow {

BlockLayout::BlockLayout(const std::vector<std::tuple<std::string, int, int>>& shapes) {
  blocks_.reserve(shapes.size());
  for (const auto& [name, rows, cols] : shapes) {
    if (rows < 1 || cols < 1) {
      throw std::invalid_argument("BlockLayout: block '" + name + "' has non-positive shape");
    }
    if (index_.count(name)) {
      throw std::invalid_argument("BlockLayout: duplicate block name '" + name + "'");
    }
    index_[name] = static_cast<int>(blocks_.size());
    blocks_.push_back(Block{name, rows, cols, total_});
    total_ += rows * cols;
  }
}

const Block& BlockLayout::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("BlockLayout: unknown block name '" + name + "'");
  }
  return blocks_[it->second];
}

bool BlockLayout::same_as(const BlockLayout& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& a = blocks_[i];
    const Block& b = other.blocks_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

LayoutPtr make_layout(const std::vector<std::tuple<std::string, int, int>>& shapes) {
  return std::make_shared<const BlockLayout>(shapes);
}

ParamVector::ParamVector(LayoutPtr layout) : layout_(std::move(layout)) {
  data_ = Vec::Zero(layout_->size());
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  return ParamVector(other.layout_ptr());
}

MatView ParamVector::mat(const std::string& name) {
  const Block& b = layout_->at(name);
  return MatView(data_.data() + b.offset, b.rows, b.cols);
}

ConstMatView ParamVector::mat(const std::string& name) const {
  const Block& b = layout_->at(name);
  return ConstMatView(data_.data() + b.offset, b.rows, b.cols);
}

VecView ParamVector::vec(const std::string& name) {
  const Block& b = layout_->at(name);
  return VecView(data_.data() + b.offset, b.size());
}

ConstVecView ParamVector::vec(const std::string& name) const {
  const Block& b = layout_->at(name);
  return ConstVecView(data_.data() + b.offset, b.size());
}

void init_uniform(ParamVector& params, Rng& rng) {
  for (const Block& b : params.layout().blocks()) {
    if (!b.name.empty() && b.name[0] == 'b') continue;  // biases stay zero
    const double s = 1.0 / std::sqrt(static_cast<double>(b.cols));
    double* p = params.flat().data() + b.offset;
    for (int i = 0; i < b.size(); ++i) p[i] = rng.uniform(-s, s);
  }
}

std::string first_nonfinite_block(const ParamVector& params) {
  for (const Block& b : params.layout().blocks()) {
    const double* p = params.flat().data() + b.offset;
    for (int i = 0; i < b.size(); ++i) {
      if (!std::isfinite(p[i])) return b.name;
    }
  }
  return {};
}

}  // namespace ctflow
