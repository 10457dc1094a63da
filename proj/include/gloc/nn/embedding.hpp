#pragma once

#include "gloc/nn/layers.hpp"

namespace gloc::nn {

// Learned embedding table, one column per entry.
template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParameterSet<T>& ps, const std::string& name, int width,
            int count, Rng& rng)
      : table_(&ps.add(name, width, count)) {
    init_fan_in(*table_, rng);
  }

  int width() const { return static_cast<int>(table_->rows()); }
  int count() const { return static_cast<int>(table_->cols()); }

  Vec<T> lookup(int index) const {
    if (index < 0 || index >= count())
      throw std::runtime_error("Embedding: index out of range");
    return table_->value.col(index);
  }

  void accumulate_grad(int index, const Vec<T>& g) {
    table_->grad.col(index) += g;
  }

  Param<T>& param() { return *table_; }

 private:
  Param<T>* table_ = nullptr;
};

}  // namespace gloc::nn
