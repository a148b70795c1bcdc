#include "selfrec/wavelet.hpp"

namespace selfrec {

torch::Tensor dwt_haar(const torch::Tensor& img) {
  bool was_3d = false;
  auto x = detail::as_batched(img, was_3d);
  const auto h = x.size(2);
  const auto w = x.size(3);
  if (h % 2 != 0 || w % 2 != 0) {
    throw ShapeError("dwt_haar needs even spatial dims, got " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  using namespace torch::indexing;
  auto a = x.index({Slice(), Slice(), Slice(0, None, 2), Slice(0, None, 2)});
  auto b = x.index({Slice(), Slice(), Slice(0, None, 2), Slice(1, None, 2)});
  auto c = x.index({Slice(), Slice(), Slice(1, None, 2), Slice(0, None, 2)});
  auto d = x.index({Slice(), Slice(), Slice(1, None, 2), Slice(1, None, 2)});

  auto ll = (a + b + c + d) * 0.5;
  auto lh = (a + b - c - d) * 0.5;
  auto hl = (a - b + c - d) * 0.5;
  auto hh = (a - b - c + d) * 0.5;

  // stack as (N,C,4,h,w) then flatten so each channel's subbands stay together
  auto out = torch::stack({ll, lh, hl, hh}, 2);
  out = out.reshape({x.size(0), x.size(1) * 4, h / 2, w / 2});
  return detail::restore_rank(out, was_3d);
}

torch::Tensor iwt_haar(const torch::Tensor& sub) {
  bool was_3d = false;
  auto s = detail::as_batched(sub, was_3d);
  if (s.size(1) % 4 != 0) {
    throw ShapeError("iwt_haar needs a channel count divisible by 4, got " +
                     std::to_string(s.size(1)));
  }
  const auto n = s.size(0);
  const auto c = s.size(1) / 4;
  const auto hh2 = s.size(2);
  const auto ww2 = s.size(3);

  auto g = s.reshape({n, c, 4, hh2, ww2});
  using namespace torch::indexing;
  auto ll = g.index({Slice(), Slice(), 0});
  auto lh = g.index({Slice(), Slice(), 1});
  auto hl = g.index({Slice(), Slice(), 2});
  auto hh = g.index({Slice(), Slice(), 3});

  auto a = (ll + lh + hl + hh) * 0.5;
  auto b = (ll + lh - hl - hh) * 0.5;
  auto cc = (ll - lh + hl - hh) * 0.5;
  auto d = (ll - lh - hl + hh) * 0.5;

  // interleave columns, then rows
  auto top = torch::stack({a, b}, -1).reshape({n, c, hh2, ww2 * 2});
  auto bot = torch::stack({cc, d}, -1).reshape({n, c, hh2, ww2 * 2});
  auto out = torch::stack({top, bot}, 3).reshape({n, c, hh2 * 2, ww2 * 2});
  return detail::restore_rank(out, was_3d);
}

}  // namespace selfrec
