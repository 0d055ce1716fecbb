use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::RangeInclusive;

use crate::lang::{BinOp, Ident, UnOp};

/// Bit width of the machine. Values are `width`-bit two's-complement integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bit width {0} is outside the supported range 2..=16")]
pub struct WidthError(pub u32);

impl MachineConfig {
    pub const MIN_WIDTH: u32 = 2;
    pub const MAX_WIDTH: u32 = 16;

    pub fn new(width: u32) -> Result<Self, WidthError> {
        if (Self::MIN_WIDTH..=Self::MAX_WIDTH).contains(&width) {
            Ok(MachineConfig { width })
        } else {
            Err(WidthError(width))
        }
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn min(self) -> i64 {
        -(1i64 << (self.width - 1))
    }

    pub fn max(self) -> i64 {
        (1i64 << (self.width - 1)) - 1
    }

    pub fn values(self) -> RangeInclusive<i64> {
        self.min()..=self.max()
    }

    pub fn domain_size(self) -> u64 {
        1u64 << self.width
    }

    /// Reduces an arbitrary integer modulo 2^width into the signed range.
    pub fn wrap(self, v: i64) -> i64 {
        let modulus = 1u64 << self.width;
        let u = (v as u64) & (modulus - 1);
        if u >= modulus >> 1 {
            u as i64 - modulus as i64
        } else {
            u as i64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaultKind {
    DivByZero,
    ShiftOutOfRange,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultKind::DivByZero => "division by zero",
            FaultKind::ShiftOutOfRange => "shift amount out of range",
        })
    }
}

/// A partial operation hit during evaluation, tagged with the origin of the statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvalFault {
    pub kind: FaultKind,
    pub location: Option<u32>,
}

impl fmt::Display for EvalFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some(l) => write!(f, "{} at statement {l}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Applies a strict binary operator to in-range operands. `&&` and `||` are handled here
/// on already-evaluated operands; short-circuiting is the evaluator's job.
pub(crate) fn apply_binary(
    op: BinOp,
    a: i64,
    b: i64,
    cfg: MachineConfig,
) -> Result<i64, FaultKind> {
    use BinOp::*;
    let w = i64::from(cfg.width());
    Ok(match op {
        Add => cfg.wrap(a + b),
        Sub => cfg.wrap(a - b),
        Mul => cfg.wrap(a * b),
        Div if b == 0 => return Err(FaultKind::DivByZero),
        Mod if b == 0 => return Err(FaultKind::DivByZero),
        // i64 division truncates toward zero, as in C11
        Div => cfg.wrap(a / b),
        Mod => cfg.wrap(a % b),
        BitAnd => a & b,
        BitOr => a | b,
        BitXor => a ^ b,
        Shl | Shr if b < 0 || b >= w => return Err(FaultKind::ShiftOutOfRange),
        Shl => cfg.wrap(a << b),
        // arithmetic: operands are kept sign-extended
        Shr => a >> b,
        Lt => i64::from(a < b),
        Le => i64::from(a <= b),
        Gt => i64::from(a > b),
        Ge => i64::from(a >= b),
        Eq => i64::from(a == b),
        Ne => i64::from(a != b),
        LogAnd => i64::from(a != 0 && b != 0),
        LogOr => i64::from(a != 0 || b != 0),
    })
}

pub(crate) fn apply_unary(op: UnOp, a: i64, cfg: MachineConfig) -> i64 {
    match op {
        UnOp::Neg => cfg.wrap(-a),
        UnOp::LogNot => i64::from(a == 0),
        UnOp::BitNot => !a,
    }
}

/// A valuation of program variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct State(BTreeMap<Ident, i64>);

impl State {
    pub fn new() -> Self {
        State(BTreeMap::new())
    }

    /// Every name bound to zero.
    pub fn zeros<'a>(vars: impl IntoIterator<Item = &'a Ident>) -> Self {
        State(vars.into_iter().map(|v| (v.clone(), 0)).collect())
    }

    pub fn get(&self, x: &Ident) -> Option<i64> {
        self.0.get(x).copied()
    }

    pub fn set(&mut self, x: &Ident, v: i64) {
        self.0.insert(x.clone(), v);
    }

    pub fn with(mut self, x: &Ident, v: i64) -> Self {
        self.set(x, v);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, i64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Keeps only the listed variables, in the listed order.
    pub fn project(&self, vars: &[Ident]) -> alloc::vec::Vec<i64> {
        vars.iter().map(|v| self.get(v).unwrap_or(0)).collect()
    }
}

impl<'a> FromIterator<(&'a str, i64)> for State {
    /// Panics on malformed names; intended for literals in tests and fixtures.
    fn from_iter<T: IntoIterator<Item = (&'a str, i64)>>(iter: T) -> Self {
        State(
            iter.into_iter()
                .map(|(k, v)| (Ident::new(k).expect("valid identifier"), v))
                .collect(),
        )
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_bounds() {
        assert!(MachineConfig::new(1).is_err());
        assert!(MachineConfig::new(17).is_err());
        let c = MachineConfig::new(4).unwrap();
        assert_eq!(c.values(), -8..=7);
        assert_eq!(c.domain_size(), 16);
    }

    #[test]
    fn wrap_is_modular() {
        let c = MachineConfig::new(4).unwrap();
        assert_eq!(c.wrap(8), -8);
        assert_eq!(c.wrap(-9), 7);
        assert_eq!(c.wrap(16), 0);
        for v in -100..100 {
            let w = c.wrap(v);
            assert!(c.values().contains(&w));
            assert_eq!((v - w).rem_euclid(16), 0);
        }
    }

    #[test]
    fn division_truncates_toward_zero() {
        let c = MachineConfig::new(8).unwrap();
        assert_eq!(apply_binary(BinOp::Div, -7, 2, c), Ok(-3));
        assert_eq!(apply_binary(BinOp::Mod, -7, 2, c), Ok(-1));
        assert_eq!(apply_binary(BinOp::Mod, 7, -2, c), Ok(1));
        assert_eq!(apply_binary(BinOp::Div, -128, -1, c), Ok(-128));
        assert_eq!(apply_binary(BinOp::Mod, -128, -1, c), Ok(0));
        assert_eq!(apply_binary(BinOp::Div, 1, 0, c), Err(FaultKind::DivByZero));
    }

    #[test]
    fn shifts() {
        let c = MachineConfig::new(4).unwrap();
        assert_eq!(apply_binary(BinOp::Shr, -3, 3, c), Ok(-1));
        assert_eq!(apply_binary(BinOp::Shr, 5, 3, c), Ok(0));
        assert_eq!(apply_binary(BinOp::Shl, 3, 2, c), Ok(-4));
        assert_eq!(
            apply_binary(BinOp::Shl, 1, 4, c),
            Err(FaultKind::ShiftOutOfRange)
        );
        assert_eq!(
            apply_binary(BinOp::Shr, 1, -1, c),
            Err(FaultKind::ShiftOutOfRange)
        );
    }
}
