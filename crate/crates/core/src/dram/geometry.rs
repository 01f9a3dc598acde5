use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Organisation of one DRAM chip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DramGeometry {
    pub banks_per_chip: u32,
    pub rows_per_bank: u32,
    pub cols_per_row: u32,
    pub bits_per_col: u32,
    /// Banks that share one TLPE array.
    pub bank_group_size: u32,
}

impl Default for DramGeometry {
    /// 8 banks of 16384 x 1024 x 8 bits.
    fn default() -> Self {
        DramGeometry {
            banks_per_chip: 8,
            rows_per_bank: 16384,
            cols_per_row: 1024,
            bits_per_col: 8,
            bank_group_size: 4,
        }
    }
}

impl DramGeometry {
    /// Same organisation with narrower rows; handy for fast functional runs.
    pub fn with_row_bits(self, bits: u32) -> Self {
        DramGeometry {
            cols_per_row: bits / self.bits_per_col,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.banks_per_chip == 0 || self.rows_per_bank < 2 || self.cols_per_row == 0 || self.bits_per_col == 0 {
            return Err(Error::Invalid(format!("degenerate geometry {self:?}")));
        }
        if self.bank_group_size < 4 {
            return Err(Error::Invalid(format!(
                "bank group needs at least 4 banks, got {}",
                self.bank_group_size
            )));
        }
        if self.banks_per_chip % self.bank_group_size != 0 {
            return Err(Error::Invalid(format!(
                "{} banks do not split into groups of {}",
                self.banks_per_chip, self.bank_group_size
            )));
        }
        Ok(())
    }

    /// Row width N in bits.
    pub fn row_bits(&self) -> usize {
        (self.cols_per_row * self.bits_per_col) as usize
    }

    pub fn row_bytes(&self) -> u64 {
        self.row_bits() as u64 / 8
    }

    pub fn groups(&self) -> u32 {
        self.banks_per_chip / self.bank_group_size
    }

    pub fn group_of(&self, bank: u32) -> u32 {
        bank / self.bank_group_size
    }

    pub fn group_banks(&self, group: u32) -> std::ops::Range<u32> {
        let first = group * self.bank_group_size;
        first..first + self.bank_group_size
    }

    /// Last row of every bank; kept free for placement fix-ups.
    pub fn staging_row(&self) -> u32 {
        self.rows_per_bank - 1
    }

    pub fn capacity_bits(&self) -> u64 {
        self.banks_per_chip as u64 * self.rows_per_bank as u64 * self.row_bits() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_128_mb() {
        let g = DramGeometry::default();
        g.validate().unwrap();
        assert_eq!(g.row_bits(), 8192);
        assert_eq!(g.groups(), 2);
        assert_eq!(g.capacity_bits() / 8, 128 << 20);
        assert_eq!(g.group_banks(1), 4..8);
    }

    #[test]
    fn rejects_ragged_groups() {
        let g = DramGeometry {
            banks_per_chip: 6,
            ..DramGeometry::default()
        };
        assert!(g.validate().is_err());
    }
}
