#ifndef AHEM_FRAME_IMPL_HPP
#define AHEM_FRAME_IMPL_HPP

namespace ahem {

template <class Kernel>
std::vector<Field> evaluate_pointwise(const GridPtr& grid, const std::vector<TensorKind>& kinds, Kernel&& kernel,
                                      bool with_circle) {
  std::vector<Field> out;
  for (TensorKind k : kinds) out.push_back(Field::zeros(grid, k));
  for (int q = 0; q < grid->size(); ++q) {
    if (grid->is_boundary(q)) continue;
    const LocalChart chart(*grid, q, with_circle);
    const std::vector<double> vals = kernel(q, chart);
    std::size_t off = 0;
    for (auto& f : out)
      for (auto& c : f.comps) c(q) = vals.at(off++);
  }
  for (auto& f : out)
    for (auto& c : f.comps) extrapolate_to_boundary(*grid, c);
  return out;
}

}  // namespace ahem

#endif  // AHEM_FRAME_IMPL_HPP
