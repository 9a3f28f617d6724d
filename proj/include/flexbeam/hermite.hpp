#pragma once

namespace flexbeam {

// Two-point quintic Hermite piece on [0, h], matching value, first and
// second derivative at both ends. Reconstruction error for smooth data is
// O(h^6), which makes node-sampled tables effectively exact between nodes.
struct QuinticPiece {
  double y, b, c, a3, a4, a5;

  static QuinticPiece fit(double h, double y0, double b0, double c0, double y1,
                          double b1, double c1) {
    const double h2 = h * h;
    const double dy = y1 - y0 - b0 * h - 0.5 * c0 * h2;
    const double db = b1 - b0 - c0 * h;
    const double dc = c1 - c0;
    QuinticPiece p;
    p.y = y0;
    p.b = b0;
    p.c = c0;
    p.a3 = (10.0 * dy - 4.0 * db * h + 0.5 * dc * h2) / (h * h2);
    p.a4 = (-15.0 * dy + 7.0 * db * h - dc * h2) / (h2 * h2);
    p.a5 = (6.0 * dy - 3.0 * db * h + 0.5 * dc * h2) / (h2 * h2 * h);
    return p;
  }

  double eval(double t, int order) const {
    switch (order) {
      case 0:
        return y + t * (b + t * (0.5 * c + t * (a3 + t * (a4 + t * a5))));
      case 1:
        return b + t * (c + t * (3.0 * a3 + t * (4.0 * a4 + t * 5.0 * a5)));
      default:
        return c + t * (6.0 * a3 + t * (12.0 * a4 + t * 20.0 * a5));
    }
  }
};

}  // namespace flexbeam
