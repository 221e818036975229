//! Compensated floating-point accumulation.
//!
//! The SDP objective pairs matrices whose entries span many orders of
//! magnitude near the pure-state boundary; plain summation loses the
//! cancellation there. `dot2` is the Ogita-Rump-Oishi compensated dot
//! product (error-free products via FMA plus two-sum accumulation),
//! accurate as if computed in twice the working precision.

/// Compensated sum of `x * y` over an iterator of pairs.
pub fn dot2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (x, y) in pairs {
        let prod = x * y;
        let prod_err = x.mul_add(y, -prod);
        let t = sum + prod;
        let z = t - sum;
        let sum_err = (sum - (t - z)) + (prod - z);
        sum = t;
        comp += prod_err + sum_err;
    }
    sum + comp
}

/// Kahan-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }

    /// Merge another compensated sum; used to combine batch results in a
    /// fixed order so parallel runs stay bit-identical.
    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(-other.comp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot2_recovers_cancelling_products() {
        // 1e8 * 1e-8 terms that cancel against -1 exactly
        let xs = [1.0e8, 1.0, -1.0e8];
        let ys = [1.0e-8, -1.0, 1.0e-8];
        let d = dot2(xs.iter().copied().zip(ys.iter().copied()));
        assert_eq!(d, -1.0);
    }

    #[test]
    fn kahan_handles_small_increments() {
        let mut acc = KahanSum::default();
        for _ in 0..1_000_000 {
            acc.add(0.1);
        }
        assert!((acc.value() - 100_000.0).abs() < 1e-6);
    }
}
