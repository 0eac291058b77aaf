use crate::{Error, Result};

/// Penalties in units of the per-period operating reward (fixed at 1).
///
/// `d` is charged on a manufacturing failure, `c` on an unannounced closure and
/// `c_tilde` on a closure forced by the inspection itself. Requires
/// `0 <= c_tilde <= c <= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    d: f64,
    c: f64,
    c_tilde: f64,
}

impl PenaltyParams {
    pub fn new(d: f64, c: f64, c_tilde: f64) -> Result<Self> {
        if !(d.is_finite() && c.is_finite() && c_tilde.is_finite()) {
            return Err(Error::InvalidPenalties("penalties must be finite".into()));
        }
        if !(0.0 <= c_tilde && c_tilde <= c && c <= d) {
            return Err(Error::InvalidPenalties(format!(
                "need 0 <= c_tilde <= c <= d, got d = {d}, c = {c}, c_tilde = {c_tilde}"
            )));
        }
        Ok(Self { d, c, c_tilde })
    }

    /// Penalties without an inspection-closure charge.
    pub fn base(d: f64, c: f64) -> Result<Self> {
        Self::new(d, c, 0.0)
    }

    #[inline]
    pub fn d(&self) -> f64 {
        self.d
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }

    #[inline]
    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    /// `d / c_tilde`.
    pub fn alpha_d(&self) -> Result<f64> {
        if self.c_tilde > 0.0 {
            Ok(self.d / self.c_tilde)
        } else {
            Err(Error::AlphaUndefined)
        }
    }

    /// `c / c_tilde`.
    pub fn alpha_c(&self) -> Result<f64> {
        if self.c_tilde > 0.0 {
            Ok(self.c / self.c_tilde)
        } else {
            Err(Error::AlphaUndefined)
        }
    }

    pub fn with_d(&self, d: f64) -> Result<Self> {
        Self::new(d, self.c, self.c_tilde)
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.d, c, self.c_tilde)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_enforced() {
        assert!(PenaltyParams::new(14.0, 5.0, 1.0).is_ok());
        assert!(PenaltyParams::new(4.0, 5.0, 1.0).is_err());
        assert!(PenaltyParams::new(14.0, 5.0, 6.0).is_err());
        assert!(PenaltyParams::new(14.0, 5.0, -1.0).is_err());
        assert!(PenaltyParams::new(f64::INFINITY, 5.0, 1.0).is_err());
    }

    #[test]
    fn alphas() {
        let p = PenaltyParams::new(14.0, 5.0, 1.0).unwrap();
        assert_eq!(p.alpha_d().unwrap(), 14.0);
        assert_eq!(p.alpha_c().unwrap(), 5.0);
        let base = PenaltyParams::base(14.0, 5.0).unwrap();
        assert_eq!(base.alpha_d(), Err(Error::AlphaUndefined));
    }
}
