use serde::{Deserialize, Serialize};

/// Time charged for work left on the host CPU.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostCostModel {
    /// One elementary byte operation (table lookup, shift, xor) of a
    /// stage left on the host.
    pub ns_per_host_byte: f64,
    /// Population count of one 64-bit word.
    pub ns_per_popcount_word: f64,
    pub ns_per_divide: f64,
}

impl HostCostModel {
    /// Host work is free; isolates the PIM side for back-end comparisons.
    pub const ZERO: HostCostModel = HostCostModel {
        ns_per_host_byte: 0.0,
        ns_per_popcount_word: 0.0,
        ns_per_divide: 0.0,
    };

    pub fn validate(&self) -> crate::Result<()> {
        for v in [self.ns_per_host_byte, self.ns_per_popcount_word, self.ns_per_divide] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(crate::Error::Invalid("host costs must be non-negative".into()));
            }
        }
        Ok(())
    }
}

impl Default for HostCostModel {
    fn default() -> Self {
        HostCostModel::ZERO
    }
}
