//! Byte-level rendering of an `[Int]` storage block as `⟨r, n, k, payload⟩`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ByteOrder {
    Little,
    Big,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrayLayout {
    pub r: u64,
    pub n: u64,
    pub k: u64,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("element size must be between 1 and 8 bytes, got {0}")]
    BadWidth(usize),
    #[error("element {index} ({value}) does not fit in {width} bytes")]
    DoesNotFit { index: usize, value: i64, width: usize },
}

/// A value fits a width if it is representable either as a signed or an
/// unsigned integer of that many bytes.
fn fits(v: i64, width: usize) -> bool {
    if width >= 8 {
        return true;
    }
    let bits = 8 * width as u32;
    let min = -(1i128 << (bits - 1));
    let max = (1i128 << bits) - 1;
    (min..=max).contains(&(v as i128))
}

pub fn serialize_array_layout(
    elements: &[i64],
    width: usize,
    order: ByteOrder,
) -> Result<ArrayLayout, LayoutError> {
    if !(1..=8).contains(&width) {
        return Err(LayoutError::BadWidth(width));
    }
    let mut payload = Vec::with_capacity(elements.len() * width);
    for (index, &value) in elements.iter().enumerate() {
        if !fits(value, width) {
            return Err(LayoutError::DoesNotFit { index, value, width });
        }
        let le = value.to_le_bytes();
        match order {
            ByteOrder::Little => payload.extend_from_slice(&le[..width]),
            ByteOrder::Big => payload.extend(le[..width].iter().rev()),
        }
    }
    let n = elements.len() as u64;
    Ok(ArrayLayout {
        r: 1,
        n,
        k: n * width as u64,
        payload,
    })
}
