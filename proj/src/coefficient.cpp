#include "flexbeam/coefficient.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <nlohmann/json.hpp>

#include "flexbeam/errors.hpp"

namespace flexbeam {
namespace {

using nlohmann::json;

class AffineCoefficient final : public CoefficientFunction {
 public:
  AffineCoefficient(double a, double b) : a_(a), b_(b) {}

  double value(double x) const override { return a_ * (1.0 + b_ * x); }
  double deriv1(double) const override { return a_ * b_; }
  double deriv2(double) const override { return 0.0; }

  std::string describe() const override {
    std::ostringstream os;
    os << a_ << "*(1 + " << b_ << "*x)";
    return os.str();
  }

  json to_json() const override {
    return json{{"kind", "affine"}, {"a", a_}, {"b", b_}};
  }

 private:
  double a_, b_;
};

class PolyCoefficient final : public CoefficientFunction {
 public:
  explicit PolyCoefficient(std::vector<double> coeffs)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
      fail(ErrorCode::MalformedSpec, "polynomial coefficient list is empty");
    }
  }

  double value(double x) const override {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
  }

  double deriv1(double x) const override {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 1;) {
      acc = acc * x + static_cast<double>(i) * coeffs_[i];
    }
    return acc;
  }

  double deriv2(double x) const override {
    double acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 2;) {
      acc = acc * x + static_cast<double>(i * (i - 1)) * coeffs_[i];
    }
    return acc;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "poly[";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) os << ", ";
      os << coeffs_[i];
    }
    os << "]";
    return os.str();
  }

  json to_json() const override {
    return json{{"kind", "poly"}, {"coeffs", coeffs_}};
  }

 private:
  std::vector<double> coeffs_;
};

// Natural quintic spline: each interval carries a degree-5 Hermite piece
// matching value, first and second derivative at both ends; the nodal first
// and second derivatives are solved from C3/C4 continuity at interior knots
// plus vanishing third and fourth derivatives at the boundary knots.
class QuinticSpline final : public CoefficientFunction {
 public:
  QuinticSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n) {
      fail(ErrorCode::MalformedSpec, "table needs at least 4 samples");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(x_[i] > x_[i - 1])) {
        fail(ErrorCode::MalformedSpec, "table abscissae must be increasing");
      }
    }
    solve_nodal_derivatives();
  }

  double value(double x) const override { return eval(x, 0); }
  double deriv1(double x) const override { return eval(x, 1); }
  double deriv2(double x) const override { return eval(x, 2); }

  std::string describe() const override {
    std::ostringstream os;
    os << "table[" << x_.size() << " samples on " << x_.front() << ".."
       << x_.back() << "]";
    return os.str();
  }

  json to_json() const override {
    return json{{"kind", "table"}, {"x", x_}, {"y", y_}};
  }

 private:
  // Hermite quintic on [0,h] in terms of end data (y,b,c) and (Y,B,C):
  //   p(t) = y + b t + c/2 t^2 + a3 t^3 + a4 t^4 + a5 t^5
  // with a3..a5 determined by the right-end data.
  struct Piece {
    double y, b, c, a3, a4, a5;
  };

  static Piece hermite(double h, double y0, double b0, double c0, double y1,
                       double b1, double c1) {
    const double h2 = h * h;
    const double dy = y1 - y0 - b0 * h - 0.5 * c0 * h2;
    const double db = b1 - b0 - c0 * h;
    const double dc = c1 - c0;
    Piece p;
    p.y = y0;
    p.b = b0;
    p.c = c0;
    p.a3 = (10.0 * dy - 4.0 * db * h + 0.5 * dc * h2) / (h * h2);
    p.a4 = (-15.0 * dy + 7.0 * db * h - dc * h2) / (h2 * h2);
    p.a5 = (6.0 * dy - 3.0 * db * h + 0.5 * dc * h2) / (h2 * h2 * h);
    return p;
  }

  // Third/fourth derivative of the Hermite piece at its left end (t=0) and
  // right end (t=h), as linear functionals of the end data. Used to build
  // the continuity system.
  void solve_nodal_derivatives() {
    const std::size_t n = x_.size();
    // Unknowns: (b_i, c_i) per node -> 2n. Equations: C3 and C4 continuity at
    // n-2 interior nodes (2(n-2)) plus p'''=p''''=0 at both boundary nodes.
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * static_cast<long>(n));
    long row = 0;

    // d3/d4 at the ends of piece i (interval [x_i, x_{i+1}]) as coefficients
    // over (y_i, b_i, c_i, y_{i+1}, b_{i+1}, c_{i+1}).
    auto add_deriv_row = [&](std::size_t i, int order, bool at_right,
                             double sign, long r) {
      const double h = x_[i + 1] - x_[i];
      const double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
      // expand dy, db, dc in the a3/a4/a5 formulas over the end data:
      //   a3 = (10 dy - 4 db h + 0.5 dc h^2) / h^3
      //   a4 = (-15 dy + 7 db h - dc h^2) / h^4
      //   a5 = (6 dy - 3 db h + 0.5 dc h^2) / h^5
      // dy = Y - y - b h - c h^2/2 ; db = B - b - c h ; dc = C - c
      double ka3[6], ka4[6], ka5[6];
      // order: y, b, c, Y, B, C
      const double dyc[6] = {-1.0, -h, -0.5 * h2, 1.0, 0.0, 0.0};
      const double dbc[6] = {0.0, -1.0, -h, 0.0, 1.0, 0.0};
      const double dcc[6] = {0.0, 0.0, -1.0, 0.0, 0.0, 1.0};
      for (int k = 0; k < 6; ++k) {
        ka3[k] = (10.0 * dyc[k] - 4.0 * h * dbc[k] + 0.5 * h2 * dcc[k]) / h3;
        ka4[k] = (-15.0 * dyc[k] + 7.0 * h * dbc[k] - h2 * dcc[k]) / h4;
        ka5[k] = (6.0 * dyc[k] - 3.0 * h * dbc[k] + 0.5 * h2 * dcc[k]) / h5;
      }
      const double t = at_right ? h : 0.0;
      for (int k = 0; k < 6; ++k) {
        double coef;
        if (order == 3) {
          coef = 6.0 * ka3[k] + 24.0 * ka4[k] * t + 60.0 * ka5[k] * t * t;
        } else {
          coef = 24.0 * ka4[k] + 120.0 * ka5[k] * t;
        }
        // columns: b_j -> 2j, c_j -> 2j+1; y contributions go to rhs
        const std::size_t node = (k < 3) ? i : i + 1;
        const int comp = k % 3;
        if (comp == 0) {
          rhs(r) -= sign * coef * y_[node];
        } else {
          const long col = 2 * static_cast<long>(node) + (comp - 1);
          trips.emplace_back(r, col, sign * coef);
        }
      }
    };

    // boundary: piece 0 left end, third and fourth derivative = 0
    add_deriv_row(0, 3, false, 1.0, row++);
    add_deriv_row(0, 4, false, 1.0, row++);
    // interior continuity
    for (std::size_t i = 1; i + 1 < n; ++i) {
      add_deriv_row(i - 1, 3, true, 1.0, row);
      add_deriv_row(i, 3, false, -1.0, row);
      ++row;
      add_deriv_row(i - 1, 4, true, 1.0, row);
      add_deriv_row(i, 4, false, -1.0, row);
      ++row;
    }
    // boundary: last piece right end
    add_deriv_row(n - 2, 3, true, 1.0, row++);
    add_deriv_row(n - 2, 4, true, 1.0, row++);

    Eigen::SparseMatrix<double> mat(2 * static_cast<long>(n),
                                    2 * static_cast<long>(n));
    mat.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(mat);
    if (lu.info() != Eigen::Success) {
      fail(ErrorCode::MalformedSpec, "quintic spline system is singular");
    }
    Eigen::VectorXd sol = lu.solve(rhs);
    b_.resize(n);
    c_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      b_[i] = sol(2 * static_cast<long>(i));
      c_[i] = sol(2 * static_cast<long>(i) + 1);
    }
    pieces_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      pieces_[i] = hermite(x_[i + 1] - x_[i], y_[i], b_[i], c_[i], y_[i + 1],
                           b_[i + 1], c_[i + 1]);
    }
  }

  double eval(double x, int order) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    if (x <= x_.front()) {
      lo = 0;
    } else if (x >= x_.back()) {
      lo = x_.size() - 2;
    } else {
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (x_[mid] <= x ? lo : hi) = mid;
      }
    }
    const Piece& p = pieces_[lo];
    const double t = x - x_[lo];
    switch (order) {
      case 0:
        return p.y + t * (p.b + t * (0.5 * p.c +
                                     t * (p.a3 + t * (p.a4 + t * p.a5))));
      case 1:
        return p.b + t * (p.c + t * (3.0 * p.a3 +
                                     t * (4.0 * p.a4 + t * 5.0 * p.a5)));
      default:
        return p.c + t * (6.0 * p.a3 + t * (12.0 * p.a4 + t * 20.0 * p.a5));
    }
  }

  std::vector<double> x_, y_, b_, c_;
  std::vector<Piece> pieces_;
};

}  // namespace

CoefficientPtr CoefficientFunction::affine(double a, double b) {
  return std::make_shared<AffineCoefficient>(a, b);
}

CoefficientPtr CoefficientFunction::polynomial(std::vector<double> coeffs) {
  return std::make_shared<PolyCoefficient>(std::move(coeffs));
}

CoefficientPtr CoefficientFunction::table(std::vector<double> x,
                                          std::vector<double> y) {
  return std::make_shared<QuinticSpline>(std::move(x), std::move(y));
}

CoefficientPtr CoefficientFunction::from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) {
    fail(ErrorCode::MalformedSpec, "coefficient spec needs a \"kind\"");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "affine") {
      return affine(spec.at("a").get<double>(), spec.at("b").get<double>());
    }
    if (kind == "poly") {
      return polynomial(spec.at("coeffs").get<std::vector<double>>());
    }
    if (kind == "table") {
      return table(spec.at("x").get<std::vector<double>>(),
                   spec.at("y").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedSpec, std::string("coefficient spec: ") + e.what());
  }
  fail(ErrorCode::MalformedSpec, "unknown coefficient kind \"" + kind + "\"");
}

}  // namespace flexbeam
