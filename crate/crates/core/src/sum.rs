//! Order-fixed summation.
//!
//! The tree shape depends only on the slice length, so a parallel map followed
//! by these reductions gives the same bits as a serial loop.

const LEAF: usize = 32;

/// Pairwise summation with Neumaier-compensated leaves and root.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    let (s, c) = pairwise(xs);
    s + c
}

fn pairwise(xs: &[f64]) -> (f64, f64) {
    if xs.len() <= LEAF {
        let mut acc = Neumaier::default();
        for &x in xs {
            acc.add(x);
        }
        return (acc.sum, acc.comp);
    }
    let mid = xs.len() / 2;
    let (a, ca) = pairwise(&xs[..mid]);
    let (b, cb) = pairwise(&xs[mid..]);
    let mut acc = Neumaier::default();
    acc.add(a);
    acc.add(b);
    (acc.sum, acc.comp + ca + cb)
}

/// Neumaier (improved Kahan) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(pairwise_sum(&xs), 2.0);
    }

    #[test]
    fn long_sums_match_exact() {
        let xs: Vec<f64> = (1..=10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
    }
}
