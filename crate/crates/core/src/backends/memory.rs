use crate::bits::BitRow;
use crate::dram::DramGeometry;
use crate::error::{Error, Result};
use crate::threshold::TlpeaLatches;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// A row of one bank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RowAddr {
    pub bank: u32,
    pub row: u32,
}

impl RowAddr {
    pub const fn new(bank: u32, row: u32) -> Self {
        RowAddr { bank, row }
    }
}

impl fmt::Display for RowAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}:r{}", self.bank, self.row)
    }
}

/// Rows at the top of every bank that back-ends use internally.
pub const RESERVED_ROWS: u32 = 9;

/// Addresses of the reserved rows, counted down from the last row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReservedRows {
    /// Free row used to stage operands when banks collide.
    pub staging: u32,
    /// Constant all-zero and all-one control rows.
    pub c0: u32,
    pub c1: u32,
    /// Compute rows (also the two DRA rows and the DRISA scratch row).
    pub t: [u32; 4],
    /// Dual-contact rows with a negated wordline.
    pub dcc: [u32; 2],
}

impl ReservedRows {
    pub fn of(geometry: &DramGeometry) -> Self {
        let top = geometry.staging_row();
        ReservedRows {
            staging: top,
            c0: top - 1,
            c1: top - 2,
            t: [top - 3, top - 4, top - 5, top - 6],
            dcc: [top - 7, top - 8],
        }
    }
}

/// Rows available to user data in each bank.
pub fn user_rows(geometry: &DramGeometry) -> u32 {
    geometry.rows_per_bank - RESERVED_ROWS
}

/// Contents of every bank, plus the latch state of each TLPE array and the
/// per-bank latch DRISA computes through. Rows never written read as zero.
#[derive(Clone, Debug)]
pub struct MemoryImage {
    geometry: DramGeometry,
    rows: HashMap<RowAddr, BitRow>,
    latches: Vec<TlpeaLatches>,
    bank_latch: Vec<BitRow>,
}

impl MemoryImage {
    pub fn new(geometry: DramGeometry) -> Result<Self> {
        geometry.validate()?;
        if geometry.rows_per_bank <= RESERVED_ROWS + 1 {
            return Err(Error::Invalid(format!(
                "need more than {} rows per bank, got {}",
                RESERVED_ROWS + 1,
                geometry.rows_per_bank
            )));
        }
        let width = geometry.row_bits();
        let mut rows = HashMap::new();
        let c1 = ReservedRows::of(&geometry).c1;
        for bank in 0..geometry.banks_per_chip {
            rows.insert(RowAddr::new(bank, c1), BitRow::ones(width));
        }
        Ok(MemoryImage {
            geometry,
            rows,
            latches: vec![TlpeaLatches::new(width); geometry.groups() as usize],
            bank_latch: vec![BitRow::zeros(width); geometry.banks_per_chip as usize],
        })
    }

    pub fn geometry(&self) -> &DramGeometry {
        &self.geometry
    }

    pub fn width(&self) -> usize {
        self.geometry.row_bits()
    }

    pub fn reserved(&self) -> ReservedRows {
        ReservedRows::of(&self.geometry)
    }

    pub fn check(&self, a: RowAddr) -> Result<()> {
        if a.bank >= self.geometry.banks_per_chip || a.row >= self.geometry.rows_per_bank {
            return Err(Error::Argument(format!("row {a} is outside the device")));
        }
        Ok(())
    }

    /// Like [`MemoryImage::check`], and also rejects reserved rows.
    pub fn check_user(&self, a: RowAddr) -> Result<()> {
        self.check(a)?;
        if a.row >= user_rows(&self.geometry) {
            return Err(Error::Argument(format!("row {a} is reserved")));
        }
        Ok(())
    }

    pub fn read(&self, a: RowAddr) -> Result<BitRow> {
        self.check(a)?;
        Ok(self
            .rows
            .get(&a)
            .cloned()
            .unwrap_or_else(|| BitRow::zeros(self.width())))
    }

    pub fn write(&mut self, a: RowAddr, value: BitRow) -> Result<()> {
        self.check(a)?;
        if value.width() != self.width() {
            return Err(Error::Argument(format!(
                "row width {} does not match device row width {}",
                value.width(),
                self.width()
            )));
        }
        self.rows.insert(a, value);
        Ok(())
    }

    pub fn latches(&self, group: u32) -> &TlpeaLatches {
        &self.latches[group as usize]
    }

    pub fn set_latches(&mut self, group: u32, l: TlpeaLatches) {
        self.latches[group as usize] = l;
    }

    pub(crate) fn bank_latch(&self, bank: u32) -> &BitRow {
        &self.bank_latch[bank as usize]
    }

    pub(crate) fn set_bank_latch(&mut self, bank: u32, v: BitRow) {
        self.bank_latch[bank as usize] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwritten_rows_read_zero_and_control_rows_are_set() {
        let geo = DramGeometry::default().with_row_bits(128);
        let m = MemoryImage::new(geo).unwrap();
        assert!(m.read(RowAddr::new(3, 10)).unwrap().is_zero());
        let r = m.reserved();
        assert_eq!(m.read(RowAddr::new(5, r.c1)).unwrap().count_ones(), 128);
        assert!(m.read(RowAddr::new(5, r.c0)).unwrap().is_zero());
        assert!(m.check_user(RowAddr::new(0, r.dcc[1])).is_err());
        assert!(m.check_user(RowAddr::new(0, r.dcc[1] - 1)).is_ok());
    }

    #[test]
    fn width_is_enforced() {
        let geo = DramGeometry::default().with_row_bits(64);
        let mut m = MemoryImage::new(geo).unwrap();
        assert!(m.write(RowAddr::new(0, 0), BitRow::zeros(65)).is_err());
        assert!(m.read(RowAddr::new(8, 0)).is_err());
    }
}
