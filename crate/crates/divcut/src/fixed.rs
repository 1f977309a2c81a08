//! Fixed-point cost representation.
//!
//! Costs enter as reals but every solver comparison happens on `i64` units so
//! that max-flow terminates and cut ties are exact. One unit equals `1 / S`
//! for a configurable scale `S` (default 10^6).

/// Default units per real cost unit.
pub const DEFAULT_SCALE: i64 = 1_000_000;

/// Largest magnitude a single quantized cost may take. Keeps sums over a full
/// instance (nodes, edges, all M levels) far away from `i64` overflow.
pub const MAX_COST_UNITS: i64 = 1 << 42;

/// Conversion factor between real-valued costs and integer units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    units_per_one: i64,
}

impl Default for Scale {
    fn default() -> Self {
        Scale::new(DEFAULT_SCALE)
    }
}

impl Scale {
    pub fn new(units_per_one: i64) -> Self {
        assert!(units_per_one > 0, "scale must be positive");
        Scale { units_per_one }
    }

    pub fn units_per_one(&self) -> i64 {
        self.units_per_one
    }

    /// Numeric tolerance implied by the scale: one unit in real terms.
    pub fn epsilon(&self) -> f64 {
        1.0 / self.units_per_one as f64
    }

    /// Quantize a real cost to integer units (round half away from zero).
    /// Panics on values outside the representable range; use [`try_units`]
    /// for untrusted inputs.
    ///
    /// [`try_units`]: Scale::try_units
    pub fn to_units(&self, value: f64) -> i64 {
        self.try_units(value).expect("cost outside the fixed-point range")
    }

    /// Fallible quantization for values arriving from files or flags.
    pub fn try_units(&self, value: f64) -> crate::error::Result<i64> {
        let scaled = value * self.units_per_one as f64;
        if !scaled.is_finite() {
            return Err(crate::error::Error::InvalidInput(format!(
                "cost {value} is not finite at scale {}",
                self.units_per_one
            )));
        }
        let rounded = scaled.round();
        if rounded.abs() > MAX_COST_UNITS as f64 {
            return Err(crate::error::Error::InvalidInput(format!(
                "cost {value} exceeds the representable fixed-point range"
            )));
        }
        Ok(rounded as i64)
    }

    pub fn to_real(&self, units: i64) -> f64 {
        units as f64 / self.units_per_one as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_quantized_values() {
        let s = Scale::default();
        for v in [-3.5, 0.0, 0.25, 1.0, 17.125, -0.000001] {
            let u = s.to_units(v);
            assert_eq!(s.to_units(s.to_real(u)), u);
        }
    }

    #[test]
    fn rounds_half_away_from_zero() {
        let s = Scale::new(10);
        assert_eq!(s.to_units(0.05), 1);
        assert_eq!(s.to_units(-0.05), -1);
        assert_eq!(s.to_units(0.04), 0);
    }

    #[test]
    #[should_panic]
    fn rejects_non_finite() {
        Scale::default().to_units(f64::NAN);
    }
}
