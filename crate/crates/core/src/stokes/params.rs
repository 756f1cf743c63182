//! Potentials V, V₀ (constants or x_n-profiles), strip geometry and the
//! classification of the coefficient configuration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::TorusGrid;
use crate::symbols::StokesSymbolParams;

/// Smallest positive potential value accepted without ambiguity.
pub const KERNEL_THRESHOLD: f64 = 1e-8;

/// A nonnegative potential depending on x_n only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// base + amplitude·exp(1 − 1/(1 − r²)) with r = (x_n − center)/half_width
    /// measured periodically, and zero bump outside |r| < 1.
    Bump { base: f64, amplitude: f64, center: f64, half_width: f64 },
}

impl Coefficient {
    /// Bump supported on the exterior strip (L, 2π), flat at both boundary components.
    pub fn exterior_bump(amplitude: f64, strip: f64) -> Self {
        Coefficient::Bump {
            base: 0.0,
            amplitude,
            center: 0.5 * (strip + 2.0 * PI),
            half_width: 0.5 * (2.0 * PI - strip),
        }
    }

    pub fn value(&self, xn: f64) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Bump { base, amplitude, center, half_width } => {
                let d = (xn - center + PI).rem_euclid(2.0 * PI) - PI;
                let r = d / half_width;
                if r.abs() >= 1.0 {
                    base
                } else {
                    base + amplitude * (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    /// Value of the constant reference operator.
    pub fn base(&self) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::Bump { base, .. } => base,
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Coefficient::Constant(_) => true,
            Coefficient::Bump { amplitude, .. } => amplitude == 0.0,
        }
    }

    /// Departure from the base value, δ(x_n) = value − base.
    pub fn deviation(&self, xn: f64) -> f64 {
        self.value(xn) - self.base()
    }

    /// Whether the coefficient is identically zero on the torus.
    pub fn identically_zero(&self) -> bool {
        match *self {
            Coefficient::Constant(c) => c == 0.0,
            Coefficient::Bump { base, amplitude, .. } => base == 0.0 && amplitude == 0.0,
        }
    }

    /// Whether the coefficient vanishes on the closed interval [a, b].
    pub fn vanishes_on(&self, a: f64, b: f64) -> bool {
        match *self {
            Coefficient::Constant(c) => c == 0.0,
            Coefficient::Bump { base, amplitude, center, half_width } => {
                if base != 0.0 {
                    return false;
                }
                if amplitude == 0.0 {
                    return true;
                }
                let lo = center - half_width;
                let hi = center + half_width;
                // Support (lo, hi) modulo 2π must miss [a, b].
                (-2..=2).all(|s| {
                    let shift = 2.0 * PI * s as f64;
                    hi + shift <= a || lo + shift >= b
                })
            }
        }
    }

    /// Whether the coefficient is not identically zero on the open interval (a, b).
    pub fn nonzero_somewhere_in(&self, a: f64, b: f64) -> bool {
        !self.vanishes_on(a + 1e-12, b - 1e-12)
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Coefficient::Constant(c) => c >= 0.0 && c.is_finite(),
            Coefficient::Bump { base, amplitude, half_width, center } => {
                base >= 0.0
                    && base + amplitude >= 0.0
                    && half_width > 0.0
                    && half_width <= PI
                    && [base, amplitude, half_width, center].iter().all(|x| x.is_finite())
            }
        };
        if !ok {
            return Err(Error::Argument(format!("{name} must be a finite nonnegative profile")));
        }
        for v in [self.base(), self.base() + self.amplitude()] {
            if v > 0.0 && v < KERNEL_THRESHOLD {
                return Err(Error::AmbiguousKernel(format!(
                    "{name} takes the value {v:.3e}, too close to zero to classify the kernel; \
                     set it to exactly 0 or to at least {KERNEL_THRESHOLD:e}"
                )));
            }
        }
        Ok(())
    }

    fn amplitude(&self) -> f64 {
        match *self {
            Coefficient::Constant(_) => 0.0,
            Coefficient::Bump { amplitude, .. } => amplitude,
        }
    }
}

/// Which case of the kernel classification applies on the flat torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelCase {
    /// V ≡ 0 and V₀ ≡ 0: constant velocities and constant pressures.
    VelocityAndPressure,
    /// V ≡ 0, V₀ ≢ 0: constant velocities.
    Velocity,
    /// V ≢ 0, V₀ ≡ 0: constant pressures.
    Pressure,
    /// V ≢ 0, V₀ ≢ 0: trivial kernel.
    Trivial,
}

impl KernelCase {
    pub fn dimension(self, n: usize) -> usize {
        match self {
            KernelCase::VelocityAndPressure => n + 1,
            KernelCase::Velocity => n,
            KernelCase::Pressure => 1,
            KernelCase::Trivial => 0,
        }
    }

    pub fn has_velocity(self) -> bool {
        matches!(self, KernelCase::VelocityAndPressure | KernelCase::Velocity)
    }

    pub fn has_pressure(self) -> bool {
        matches!(self, KernelCase::VelocityAndPressure | KernelCase::Pressure)
    }

    fn from_flags(v_zero: bool, v0_zero: bool) -> Self {
        match (v_zero, v0_zero) {
            (true, true) => KernelCase::VelocityAndPressure,
            (true, false) => KernelCase::Velocity,
            (false, true) => KernelCase::Pressure,
            (false, false) => KernelCase::Trivial,
        }
    }
}

/// Which standing assumptions hold for the configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Assumptions {
    /// V ≢ 0 on the torus.
    pub v_nonzero: bool,
    /// V₀ ≢ 0 on the exterior strip Ω₋ = (L, 2π).
    pub v0_nonzero_outside: bool,
    /// V₀ ≡ 0 on Ω = (0, L).
    pub v0_zero_inside: bool,
}

/// Coefficients, grid and strip geometry of the operator Ξ_{V,V₀}.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesParams {
    pub grid: TorusGrid,
    pub v: Coefficient,
    pub v0: Coefficient,
    /// Strip width L_s, with Ω = {0 < x_n < L_s}.
    pub strip: f64,
    /// Collocation points in x_n for variable-coefficient corrections.
    pub collocation: usize,
}

impl StokesParams {
    pub fn new(grid: TorusGrid, v: Coefficient, v0: Coefficient) -> Result<Self> {
        let p = Self { grid, v, v0, strip: PI, collocation: 512 };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(grid: TorusGrid, v: f64, v0: f64) -> Result<Self> {
        Self::new(grid, Coefficient::Constant(v), Coefficient::Constant(v0))
    }

    pub fn with_strip(mut self, strip: f64) -> Result<Self> {
        self.strip = strip;
        self.validate()?;
        Ok(self)
    }

    pub fn with_collocation(mut self, points: usize) -> Result<Self> {
        self.collocation = points;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.strip > 0.0 && self.strip < 2.0 * PI) {
            return Err(Error::Argument(format!("strip width {} must lie in (0, 2pi)", self.strip)));
        }
        if self.collocation < 16 || !self.collocation.is_power_of_two() {
            return Err(Error::Argument("collocation size must be a power of two >= 16".into()));
        }
        self.v.validate("V")?;
        self.v0.validate("V0")?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Constant reference operator built from the base values.
    pub fn reference(&self) -> StokesSymbolParams {
        StokesSymbolParams { v: self.v.base(), v0: self.v0.base() }
    }

    pub fn is_constant(&self) -> bool {
        self.v.is_constant() && self.v0.is_constant()
    }

    /// Extended normal field ν_ext(x) = −cos(x_n)·e_n, returned as its e_n component.
    pub fn extended_normal(&self, xn: f64) -> f64 {
        -xn.cos()
    }

    pub fn kernel_case(&self) -> KernelCase {
        KernelCase::from_flags(self.v.identically_zero(), self.v0.identically_zero())
    }

    pub fn reference_kernel_case(&self) -> KernelCase {
        let r = self.reference();
        KernelCase::from_flags(r.v == 0.0, r.v0 == 0.0)
    }

    pub fn assumptions(&self) -> Assumptions {
        Assumptions {
            v_nonzero: !self.v.identically_zero(),
            v0_nonzero_outside: self.v0.nonzero_somewhere_in(self.strip, 2.0 * PI),
            v0_zero_inside: self.v0.vanishes_on(0.0, self.strip),
        }
    }

    /// Whether the variable parts of V and V₀ vanish on the closed strip [0, L].
    pub fn deviation_vanishes_on_strip(&self) -> bool {
        let flat = |c: &Coefficient| match *c {
            Coefficient::Constant(_) => true,
            Coefficient::Bump { amplitude, center, half_width, .. } => {
                let probe = Coefficient::Bump { base: 0.0, amplitude: 1.0, center, half_width };
                amplitude == 0.0 || probe.vanishes_on(0.0, self.strip)
            }
        };
        flat(&self.v) && flat(&self.v0)
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        fn one(c: &Coefficient) -> String {
            match *c {
                Coefficient::Constant(x) => format!("{x}"),
                Coefficient::Bump { base, amplitude, .. } => format!("bump({base}+{amplitude})"),
            }
        }
        format!("V={};V0={}", one(&self.v), one(&self.v0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_bump_is_flat_on_the_strip() {
        let b = Coefficient::exterior_bump(1.0, PI);
        assert_eq!(b.value(0.5), 0.0);
        assert_eq!(b.value(PI), 0.0);
        assert!((b.value(1.5 * PI) - 1.0).abs() < 1e-15);
        assert!(b.value(2.0 * PI - 0.1) > 0.0);
        assert!(b.vanishes_on(0.0, PI));
        let grid = TorusGrid::new(2, 16).unwrap();
        let p = StokesParams::new(grid, Coefficient::Constant(1.0), b).unwrap();
        let a = p.assumptions();
        assert!(a.v_nonzero && a.v0_nonzero_outside && a.v0_zero_inside);
        assert_eq!(p.kernel_case(), KernelCase::Trivial);
        assert_eq!(p.reference_kernel_case(), KernelCase::Pressure);
        assert!(p.deviation_vanishes_on_strip());
    }

    #[test]
    fn kernel_cases_and_ambiguity() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let cases = [(0.0, 0.0, 3), (0.0, 1.0, 2), (1.0, 0.0, 1), (1.0, 1.0, 0)];
        for (v, v0, d) in cases {
            let p = StokesParams::constant(grid, v, v0).unwrap();
            assert_eq!(p.kernel_case().dimension(2), d);
        }
        assert!(matches!(StokesParams::constant(grid, 1e-12, 0.0), Err(Error::AmbiguousKernel(_))));
        assert!(StokesParams::constant(grid, -1.0, 0.0).is_err());
        assert!(StokesParams::constant(grid, 1.0, 0.0).unwrap().with_strip(7.0).is_err());
    }
}
