use rug::float::Round;
use rug::ops::DivAssignRound;
use rug::Float;

/// Outcome of one numeric identity check: a left side, a right side, how far
/// apart they landed, and whether that clears the tolerance.
///
/// Both sides are kept at full working precision so a failing report can be
/// printed with enough digits to see *where* the disagreement starts.
#[derive(Debug, Clone)]
pub struct CheckReport {
    /// What was checked, e.g. `"totient product n=14"`.
    pub name: String,
    pub lhs: Float,
    pub rhs: Float,
    pub abs_diff: Float,
    /// |lhs - rhs| / |rhs|, infinite if rhs = 0.
    pub rel_diff: Float,
    pub tolerance: Float,
    /// Whether `abs_diff <= tolerance` (callers that want a relative gate
    /// pass a tolerance already scaled by |rhs|).
    pub pass: bool,
}

impl CheckReport {
    /// Compare `lhs` against `rhs` with an absolute tolerance.
    pub fn new(name: impl Into<String>, lhs: Float, rhs: Float, tolerance: Float) -> Self {
        let abs_diff = Float::with_val(lhs.prec().max(rhs.prec()), &lhs - &rhs).abs();
        let mut rel_diff = abs_diff.clone();
        if rhs.is_zero() {
            rel_diff = Float::with_val(rel_diff.prec(), rug::float::Special::Infinity);
        } else {
            rel_diff.div_assign_round(Float::with_val(rhs.prec(), rhs.abs_ref()), Round::Up);
        }
        let pass = abs_diff <= tolerance;
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            abs_diff,
            rel_diff,
            tolerance,
            pass,
        }
    }

    /// Compare with a tolerance relative to |rhs|: passes iff
    /// `|lhs - rhs| <= rel_tol * |rhs|`.
    pub fn new_relative(name: impl Into<String>, lhs: Float, rhs: Float, rel_tol: Float) -> Self {
        let scaled = Float::with_val(rhs.prec(), rhs.abs_ref()) * &rel_tol;
        Self::new(name, lhs, rhs, scaled)
    }

    /// One-line human summary, digits trimmed to what matters.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} (|diff| = {:.3e}, tol = {:.3e})",
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            self.abs_diff.to_f64(),
            self.tolerance.to_f64(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_and_fail_thresholds() {
        let lhs = Float::with_val(64, 1.0);
        let rhs = Float::with_val(64, 1.0 + 1e-12);
        let ok = CheckReport::new("close", lhs.clone(), rhs.clone(), Float::with_val(64, 1e-10));
        assert!(ok.pass);
        let bad = CheckReport::new("tight", lhs, rhs, Float::with_val(64, 1e-14));
        assert!(!bad.pass);
    }

    #[test]
    fn relative_gate_scales_by_rhs() {
        let lhs = Float::with_val(64, 1000.0);
        let rhs = Float::with_val(64, 1001.0);
        // 1/1001 relative error passes a 1e-2 relative gate, fails 1e-4.
        let ok = CheckReport::new_relative("rel", lhs.clone(), rhs.clone(), Float::with_val(64, 1e-2));
        assert!(ok.pass);
        let bad = CheckReport::new_relative("rel", lhs, rhs, Float::with_val(64, 1e-4));
        assert!(!bad.pass);
    }

    #[test]
    fn zero_rhs_gives_infinite_relative_diff() {
        let r = CheckReport::new(
            "z",
            Float::with_val(64, 1.0),
            Float::with_val(64, 0.0),
            Float::with_val(64, 2.0),
        );
        assert!(r.rel_diff.is_infinite());
        assert!(r.pass);
    }
}
