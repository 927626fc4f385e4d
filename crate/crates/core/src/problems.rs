//! Benchmark catalog: coefficient matrices, exact solutions and the derived
//! right-hand sides `f = −A : D²u`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::elements::{Mat2, Vec2};
use crate::error::{Error, Result};
use crate::mesh::DomainId;

const SINGULAR_RADIUS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Holder,
    Uniform,
    Discontinuous,
    Degenerate,
}

/// `sign(0) = 0`, so `xy/|xy|` vanishes on the axes.
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Identity,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl Coefficient {
    pub fn name(self) -> &'static str {
        match self {
            Coefficient::Identity => "I",
            Coefficient::A1 => "A1",
            Coefficient::A2 => "A2",
            Coefficient::A3 => "A3",
            Coefficient::A4 => "A4",
            Coefficient::A5 => "A5",
            Coefficient::A6 => "A6",
            Coefficient::A7 => "A7",
        }
    }

    pub fn smoothness(self) -> Smoothness {
        match self {
            Coefficient::Identity => Smoothness::Smooth,
            Coefficient::A1 | Coefficient::A5 => Smoothness::Holder,
            Coefficient::A2 | Coefficient::A6 => Smoothness::Uniform,
            Coefficient::A3 | Coefficient::A7 => Smoothness::Discontinuous,
            Coefficient::A4 => Smoothness::Degenerate,
        }
    }

    /// Evaluates the symmetric matrix `A(x)`.
    pub fn eval(self, p: Vec2) -> Result<Mat2> {
        let [x, y] = p;
        let r = x.hypot(y);
        // −c/ln r, with its limit 0 at the origin; ln r must stay negative.
        let inv_log = |c: f64| -> Result<f64> {
            if r >= 1.0 {
                return Err(Error::DomainMismatch {
                    name: self.name(),
                    x,
                    y,
                });
            }
            Ok(if r == 0.0 { 0.0 } else { -c / r.ln() })
        };
        let sym = |a11: f64, a12: f64, a22: f64| [[a11, a12], [a12, a22]];
        Ok(match self {
            Coefficient::Identity => sym(1.0, 0.0, 1.0),
            Coefficient::A1 => {
                let s = r.sqrt();
                sym(s + 1.0, -s, 5.0 * s + 1.0)
            }
            Coefficient::A2 => sym(inv_log(5.0)? + 15.0, 1.0, inv_log(1.0)? + 3.0),
            Coefficient::A3 => sym(2.0, sign(x * y), 2.0),
            Coefficient::A4 => {
                let (ax, ay) = (x.abs(), y.abs());
                sym(ax.powf(2.0 / 3.0), -ax.cbrt() * ay.cbrt(), ay.powf(2.0 / 3.0))
            }
            Coefficient::A5 => {
                let d = 5.0 * r.sqrt() + 1.0;
                sym(d, 0.5 * r * r, d)
            }
            Coefficient::A6 => {
                let d = 5.0 + inv_log(1.0)?;
                sym(d, 0.5 * r * r, d)
            }
            Coefficient::A7 => sym(2.0, r * r * sign(x * y), 2.0),
        })
    }
}

/// Exact solutions with hand-derived gradients and Hessians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    Zero,
    /// `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`
    Quadratic([f64; 6]),
    /// `sin(πx) sin(πy)`
    SineProduct,
    /// `sin(2πx) sin(2πy) e^{x cos y}`
    SmoothTrig,
    /// `xy (e^{1−|x|} − 1)(e^{1−|y|} − 1)`
    SeparableExp,
    /// `(x² + y²)^{7/8}`
    RadialPower,
    /// `x^{4/3} − y^{4/3}`
    AxisPower,
    /// `r^{2/3} sin(2θ/3)`, θ ∈ [0, 2π)
    CornerSingular,
}

/// `g(t) = t (e^{1−|t|} − 1)` and its first two derivatives.
fn sep(t: f64) -> (f64, f64, f64) {
    let e = (1.0 - t.abs()).exp();
    (t * (e - 1.0), e - 1.0 - t.abs() * e, sign(t) * e * (t.abs() - 2.0))
}

impl ExactSolution {
    fn name(self) -> &'static str {
        match self {
            ExactSolution::Zero => "zero",
            ExactSolution::Quadratic(_) => "quadratic",
            ExactSolution::SineProduct => "sine-product",
            ExactSolution::SmoothTrig => "smooth-trig",
            ExactSolution::SeparableExp => "separable-exp",
            ExactSolution::RadialPower => "r^(7/4)",
            ExactSolution::AxisPower => "x^(4/3)-y^(4/3)",
            ExactSolution::CornerSingular => "r^(2/3) sin(2θ/3)",
        }
    }

    fn singular(self, x: f64, y: f64) -> Error {
        Error::SingularPoint { name: self.name(), x, y }
    }

    pub fn value(self, p: Vec2) -> Result<f64> {
        let [x, y] = p;
        Ok(match self {
            ExactSolution::Zero => 0.0,
            ExactSolution::Quadratic(c) => c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y,
            ExactSolution::SineProduct => (PI * x).sin() * (PI * y).sin(),
            ExactSolution::SmoothTrig => (2.0 * PI * x).sin() * (2.0 * PI * y).sin() * (x * y.cos()).exp(),
            ExactSolution::SeparableExp => sep(x).0 * sep(y).0,
            ExactSolution::RadialPower => (x * x + y * y).powf(7.0 / 8.0),
            ExactSolution::AxisPower => x.abs().powf(4.0 / 3.0) - y.abs().powf(4.0 / 3.0),
            ExactSolution::CornerSingular => {
                let (r, th) = polar(x, y);
                r.powf(2.0 / 3.0) * (2.0 * th / 3.0).sin()
            }
        })
    }

    pub fn gradient(self, p: Vec2) -> Result<Vec2> {
        let [x, y] = p;
        Ok(match self {
            ExactSolution::Zero => [0.0, 0.0],
            ExactSolution::Quadratic(c) => [c[1] + 2.0 * c[3] * x + c[4] * y, c[2] + c[4] * x + 2.0 * c[5] * y],
            ExactSolution::SineProduct => [
                PI * (PI * x).cos() * (PI * y).sin(),
                PI * (PI * x).sin() * (PI * y).cos(),
            ],
            ExactSolution::SmoothTrig => {
                let t = Trig::new(x, y);
                [
                    t.ty * (2.0 * PI * t.cx * t.e + t.sx * t.ex),
                    t.sx * (2.0 * PI * t.cy * t.e + t.ty * t.ey),
                ]
            }
            ExactSolution::SeparableExp => {
                let (gx, dx, _) = sep(x);
                let (gy, dy, _) = sep(y);
                [dx * gy, gx * dy]
            }
            ExactSolution::RadialPower => {
                let rho = x * x + y * y;
                if rho == 0.0 {
                    [0.0, 0.0]
                } else {
                    let s = 1.75 * rho.powf(-1.0 / 8.0);
                    [s * x, s * y]
                }
            }
            ExactSolution::AxisPower => [4.0 / 3.0 * x.cbrt(), -4.0 / 3.0 * y.cbrt()],
            ExactSolution::CornerSingular => {
                let (r, th) = polar(x, y);
                if r < SINGULAR_RADIUS {
                    return Err(self.singular(x, y));
                }
                let s = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
                [-s * (th / 3.0).sin(), s * (th / 3.0).cos()]
            }
        })
    }

    pub fn hessian(self, p: Vec2) -> Result<Mat2> {
        let [x, y] = p;
        let sym = |xx: f64, xy: f64, yy: f64| [[xx, xy], [xy, yy]];
        Ok(match self {
            ExactSolution::Zero => [[0.0; 2]; 2],
            ExactSolution::Quadratic(c) => sym(2.0 * c[3], c[4], 2.0 * c[5]),
            ExactSolution::SineProduct => {
                let u = (PI * x).sin() * (PI * y).sin();
                let cc = (PI * x).cos() * (PI * y).cos();
                sym(-PI * PI * u, PI * PI * cc, -PI * PI * u)
            }
            ExactSolution::SmoothTrig => {
                let t = Trig::new(x, y);
                let w = 2.0 * PI;
                sym(
                    t.ty * (-w * w * t.sx * t.e + 2.0 * w * t.cx * t.ex + t.sx * t.exx),
                    w * t.cx * (w * t.cy * t.e + t.ty * t.ey) + t.sx * (w * t.cy * t.ex + t.ty * t.exy),
                    t.sx * (-w * w * t.ty * t.e + 2.0 * w * t.cy * t.ey + t.ty * t.eyy),
                )
            }
            ExactSolution::SeparableExp => {
                let (gx, dx, ddx) = sep(x);
                let (gy, dy, ddy) = sep(y);
                sym(ddx * gy, dx * dy, gx * ddy)
            }
            ExactSolution::RadialPower => {
                let rho = x * x + y * y;
                if rho.sqrt() < SINGULAR_RADIUS {
                    return Err(self.singular(x, y));
                }
                let a = 1.75 * rho.powf(-1.0 / 8.0);
                let b = 7.0 / 16.0 * rho.powf(-9.0 / 8.0);
                sym(a - b * x * x, -b * x * y, a - b * y * y)
            }
            ExactSolution::AxisPower => {
                if x.abs() < SINGULAR_RADIUS || y.abs() < SINGULAR_RADIUS {
                    return Err(self.singular(x, y));
                }
                sym(4.0 / 9.0 * x.abs().powf(-2.0 / 3.0), 0.0, -4.0 / 9.0 * y.abs().powf(-2.0 / 3.0))
            }
            ExactSolution::CornerSingular => {
                let (r, th) = polar(x, y);
                if r < SINGULAR_RADIUS {
                    return Err(self.singular(x, y));
                }
                // u = Im z^{2/3}: u_xx = Im F'', u_xy = Re F'', F'' = −(2/9) z^{−4/3}
                let s = 2.0 / 9.0 * r.powf(-4.0 / 3.0);
                let a = 4.0 * th / 3.0;
                sym(s * a.sin(), -s * a.cos(), -s * a.sin())
            }
        })
    }
}

fn polar(x: f64, y: f64) -> (f64, f64) {
    let mut th = y.atan2(x);
    if th < 0.0 {
        th += 2.0 * PI;
    }
    (x.hypot(y), th)
}

/// Pieces of `sin(2πx) sin(2πy) e^{p}` with `p = x cos y`.
struct Trig {
    sx: f64,
    cx: f64,
    ty: f64,
    cy: f64,
    e: f64,
    ex: f64,
    ey: f64,
    exx: f64,
    exy: f64,
    eyy: f64,
}

impl Trig {
    fn new(x: f64, y: f64) -> Self {
        let w = 2.0 * PI;
        let (px, py) = (y.cos(), -x * y.sin());
        let (pxy, pyy) = (-y.sin(), -x * y.cos());
        let e = (x * y.cos()).exp();
        Trig {
            sx: (w * x).sin(),
            cx: (w * x).cos(),
            ty: (w * y).sin(),
            cy: (w * y).cos(),
            e,
            ex: e * px,
            ey: e * py,
            exx: e * px * px,
            exy: e * (px * py + pxy),
            eyy: e * (py * py + pyy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkName {
    SmoothA1,
    SmoothA2,
    SmoothA3,
    SmoothA4,
    DiscontSs13,
    SingularR74,
    DegenerateX43,
    LshapeA5,
    LshapeA6,
    LshapeA7,
    SanityLaplace,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 11] = [
        BenchmarkName::SmoothA1,
        BenchmarkName::SmoothA2,
        BenchmarkName::SmoothA3,
        BenchmarkName::SmoothA4,
        BenchmarkName::DiscontSs13,
        BenchmarkName::SingularR74,
        BenchmarkName::DegenerateX43,
        BenchmarkName::LshapeA5,
        BenchmarkName::LshapeA6,
        BenchmarkName::LshapeA7,
        BenchmarkName::SanityLaplace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::SmoothA1 => "smooth-a1",
            BenchmarkName::SmoothA2 => "smooth-a2",
            BenchmarkName::SmoothA3 => "smooth-a3",
            BenchmarkName::SmoothA4 => "smooth-a4",
            BenchmarkName::DiscontSs13 => "discont-ss13",
            BenchmarkName::SingularR74 => "singular-r74",
            BenchmarkName::DegenerateX43 => "degenerate-x43",
            BenchmarkName::LshapeA5 => "lshape-a5",
            BenchmarkName::LshapeA6 => "lshape-a6",
            BenchmarkName::LshapeA7 => "lshape-a7",
            BenchmarkName::SanityLaplace => "sanity-laplace",
        }
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "benchmark",
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub domain: DomainId,
    pub coefficient: Coefficient,
    pub exact: ExactSolution,
}

impl BenchmarkProblem {
    pub fn new(name: impl Into<String>, domain: DomainId, coefficient: Coefficient, exact: ExactSolution) -> Self {
        Self {
            name: name.into(),
            domain,
            coefficient,
            exact,
        }
    }

    pub fn catalog(name: BenchmarkName) -> Self {
        use BenchmarkName as B;
        use Coefficient as C;
        let (domain, coefficient, exact) = match name {
            B::SmoothA1 => (DomainId::UnitSquareCentered, C::A1, ExactSolution::SmoothTrig),
            B::SmoothA2 => (DomainId::UnitSquareCentered, C::A2, ExactSolution::SmoothTrig),
            B::SmoothA3 => (DomainId::UnitSquareCentered, C::A3, ExactSolution::SmoothTrig),
            B::SmoothA4 => (DomainId::UnitSquareCentered, C::A4, ExactSolution::SmoothTrig),
            B::DiscontSs13 => (DomainId::BiunitSquare, C::A3, ExactSolution::SeparableExp),
            B::SingularR74 => (DomainId::HalfSquare, C::A2, ExactSolution::RadialPower),
            B::DegenerateX43 => (DomainId::UnitSquare, C::A4, ExactSolution::AxisPower),
            B::LshapeA5 => (DomainId::LShape, C::A5, ExactSolution::CornerSingular),
            B::LshapeA6 => (DomainId::LShape, C::A6, ExactSolution::CornerSingular),
            B::LshapeA7 => (DomainId::LShape, C::A7, ExactSolution::CornerSingular),
            B::SanityLaplace => (DomainId::UnitSquare, C::Identity, ExactSolution::SineProduct),
        };
        Self::new(name.as_str(), domain, coefficient, exact)
    }

    pub fn a(&self, p: Vec2) -> Result<Mat2> {
        self.coefficient.eval(p)
    }

    /// `f = −A : D²u`
    pub fn f(&self, p: Vec2) -> Result<f64> {
        if self.exact == ExactSolution::Zero {
            return Ok(0.0);
        }
        let a = self.a(p)?;
        let h = self.exact.hessian(p)?;
        Ok(-frobenius(a, h))
    }

    /// Dirichlet trace `g = u|∂Ω`.
    pub fn g(&self, p: Vec2) -> Result<f64> {
        self.exact.value(p)
    }
}

pub fn frobenius(a: Mat2, b: Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}
