//! Deterministic work accounting.
//!
//! Every inner-loop step of the distance routines (a DP cell, a symbol
//! comparison) charges one unit. Budgeted operations and the racing
//! drivers compare these counters instead of wall-clock time, so races
//! are reproducible bit-for-bit.

/// Monotone counter of elementary operations.
#[derive(Debug, Default, Clone)]
pub struct WorkMeter {
    units: u64,
}

impl WorkMeter {
    pub fn new() -> Self {
        Self { units: 0 }
    }

    #[inline]
    pub fn charge(&mut self, n: u64) {
        self.units += n;
    }

    #[inline]
    pub fn units(&self) -> u64 {
        self.units
    }

    /// Fold a meter that ran on another thread into this one.
    pub fn absorb(&mut self, other: &WorkMeter) {
        self.units += other.units;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone() {
        let mut m = WorkMeter::new();
        assert_eq!(m.units(), 0);
        m.charge(3);
        m.charge(0);
        m.charge(5);
        assert_eq!(m.units(), 8);
    }
}
