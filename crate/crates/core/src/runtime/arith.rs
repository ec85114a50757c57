//! Scalar arithmetic shared by the VM and the reference interpreter.

use super::TrapKind;
use crate::frontend::ast::BinOp;

fn compare<T: PartialOrd>(op: BinOp, a: T, b: T) -> i64 {
    let r = match op {
        BinOp::Eq => a == b,
        BinOp::Ne => a != b,
        BinOp::Lt => a < b,
        BinOp::Le => a <= b,
        BinOp::Gt => a > b,
        BinOp::Ge => a >= b,
        _ => unreachable!("{op:?} is not a comparison"),
    };
    r as i64
}

/// 64-bit signed arithmetic; overflow and zero divisors trap.
pub fn int_op(op: BinOp, a: i64, b: i64) -> Result<i64, TrapKind> {
    if op.is_comparison() {
        return Ok(compare(op, a, b));
    }
    if matches!(op, BinOp::Div | BinOp::Rem) && b == 0 {
        return Err(TrapKind::DivisionByZero);
    }
    let r = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div => a.checked_div(b),
        BinOp::Rem => a.checked_rem(b),
        _ => unreachable!(),
    };
    r.ok_or(TrapKind::IntegerOverflow)
}

pub enum FloatResult {
    Float(f64),
    Int(i64),
}

/// IEEE 754 arithmetic; comparisons yield an Int.
pub fn float_op(op: BinOp, a: f64, b: f64) -> FloatResult {
    match op {
        BinOp::Add => FloatResult::Float(a + b),
        BinOp::Sub => FloatResult::Float(a - b),
        BinOp::Mul => FloatResult::Float(a * b),
        BinOp::Div => FloatResult::Float(a / b),
        BinOp::Rem => unreachable!("% is rejected on Float"),
        _ => FloatResult::Int(compare(op, a, b)),
    }
}

/// Shortest decimal that round-trips, always with a fractional part or exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traps() {
        assert_eq!(int_op(BinOp::Add, i64::MAX, 1), Err(TrapKind::IntegerOverflow));
        assert_eq!(int_op(BinOp::Div, 1, 0), Err(TrapKind::DivisionByZero));
        assert_eq!(int_op(BinOp::Rem, 1, 0), Err(TrapKind::DivisionByZero));
        assert_eq!(int_op(BinOp::Div, i64::MIN, -1), Err(TrapKind::IntegerOverflow));
        assert_eq!(int_op(BinOp::Rem, -7, 2), Ok(-1));
        assert_eq!(int_op(BinOp::Le, 2, 2), Ok(1));
    }

    #[test]
    fn floats() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(0.1 + 0.2), "0.30000000000000004");
        assert!(matches!(float_op(BinOp::Lt, 1.0, 2.0), FloatResult::Int(1)));
    }
}
