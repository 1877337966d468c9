//! Weight domains. A program is solved over one of five semirings; every
//! value the engine touches is a `Value` and every combination of values
//! goes through `plus` (disjunction over derivations) or `times`
//! (conjunction within a derivation).

use std::fmt;

use thiserror::Error;

/// Identifies one of the built-in semirings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemiringId {
    /// <{true,false}, or, and, false, true>
    Boolean,
    /// <[0,inf], min, +, inf, 0> — costs
    Tropical,
    /// <[0,1], max, *, 0, 1> — best-derivation probability
    Viterbi,
    /// <[0,inf], +, *, 0, 1> — derivation sums
    Real,
    /// Triples <x,y,z> added componentwise, multiplied by
    /// <x1*x2, x1*y2 + x2*y1, z1*z2>. The x and z channels behave like
    /// `Real`; the y channel accumulates expectation-style sums.
    Entropy3,
}

pub const ALL_SEMIRINGS: [SemiringId; 5] = [
    SemiringId::Boolean,
    SemiringId::Tropical,
    SemiringId::Viterbi,
    SemiringId::Real,
    SemiringId::Entropy3,
];

impl SemiringId {
    pub fn name(self) -> &'static str {
        match self {
            SemiringId::Boolean => "boolean",
            SemiringId::Tropical => "tropical",
            SemiringId::Viterbi => "viterbi",
            SemiringId::Real => "real",
            SemiringId::Entropy3 => "entropy3",
        }
    }

    pub fn parse(name: &str) -> Option<SemiringId> {
        ALL_SEMIRINGS.iter().copied().find(|s| s.name() == name)
    }

    pub fn get(self) -> &'static Semiring {
        match self {
            SemiringId::Boolean => &BOOLEAN,
            SemiringId::Tropical => &TROPICAL,
            SemiringId::Viterbi => &VITERBI,
            SemiringId::Real => &REAL,
            SemiringId::Entropy3 => &ENTROPY3,
        }
    }
}

impl fmt::Display for SemiringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One semiring element. The carrier in use must match the semiring the
/// program is being solved under; mixing carriers is an error, never a
/// coercion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Real(f64),
    Triple(f64, f64, f64),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_triple(&self) -> Option<(f64, f64, f64)> {
        match self {
            Value::Triple(x, y, z) => Some((*x, *y, *z)),
            _ => None,
        }
    }

    /// Exact equality, with NaN never equal and -0.0 == 0.0.
    pub fn same(&self, other: &Value) -> bool {
        self == other
    }
}

fn fmt_f64(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x.is_nan() {
        f.write_str("nan")
    } else if x == f64::INFINITY {
        f.write_str("inf")
    } else if x == f64::NEG_INFINITY {
        f.write_str("-inf")
    } else {
        write!(f, "{}", x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", b),
            Value::Real(x) => fmt_f64(*x, f),
            Value::Triple(x, y, z) => {
                f.write_str("<")?;
                fmt_f64(*x, f)?;
                f.write_str(",")?;
                fmt_f64(*y, f)?;
                f.write_str(",")?;
                fmt_f64(*z, f)?;
                f.write_str(">")
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SemiringError {
    #[error("{op} over {semiring}: value {value} is outside the carrier")]
    Carrier {
        semiring: SemiringId,
        op: &'static str,
        value: String,
    },
    #[error("{op} over {semiring} produced NaN from {lhs} and {rhs}")]
    NaN {
        semiring: SemiringId,
        op: &'static str,
        lhs: String,
        rhs: String,
    },
}

/// Operation table for one semiring. `idempotent_plus` means a + a = a;
/// `monotone_superior` additionally means multiplying never improves a
/// value, which is what makes the priority (Dijkstra-style) solver exact.
#[derive(Debug)]
pub struct Semiring {
    pub id: SemiringId,
    pub idempotent_plus: bool,
    pub monotone_superior: bool,
}

pub static BOOLEAN: Semiring = Semiring {
    id: SemiringId::Boolean,
    idempotent_plus: true,
    monotone_superior: true,
};
pub static TROPICAL: Semiring = Semiring {
    id: SemiringId::Tropical,
    idempotent_plus: true,
    monotone_superior: true,
};
pub static VITERBI: Semiring = Semiring {
    id: SemiringId::Viterbi,
    idempotent_plus: true,
    monotone_superior: true,
};
pub static REAL: Semiring = Semiring {
    id: SemiringId::Real,
    idempotent_plus: false,
    monotone_superior: false,
};
pub static ENTROPY3: Semiring = Semiring {
    id: SemiringId::Entropy3,
    idempotent_plus: false,
    monotone_superior: false,
};

/// Product that treats an exact 0 as absorbing even against infinities, so
/// the zero triple annihilates and the 0 * log 0 = 0 convention holds.
fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Semiring {
    pub fn zero(&self) -> Value {
        match self.id {
            SemiringId::Boolean => Value::Bool(false),
            SemiringId::Tropical => Value::Real(f64::INFINITY),
            SemiringId::Viterbi | SemiringId::Real => Value::Real(0.0),
            SemiringId::Entropy3 => Value::Triple(0.0, 0.0, 0.0),
        }
    }

    pub fn one(&self) -> Value {
        match self.id {
            SemiringId::Boolean => Value::Bool(true),
            SemiringId::Tropical => Value::Real(0.0),
            SemiringId::Viterbi | SemiringId::Real => Value::Real(1.0),
            SemiringId::Entropy3 => Value::Triple(1.0, 0.0, 1.0),
        }
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero()
    }

    fn expect_bool(&self, v: &Value, op: &'static str) -> Result<bool, SemiringError> {
        match v {
            Value::Bool(b) => Ok(*b),
            _ => Err(self.carrier_err(op, v)),
        }
    }

    fn expect_real(&self, v: &Value, op: &'static str) -> Result<f64, SemiringError> {
        match v {
            Value::Real(x) if !x.is_nan() => Ok(*x),
            _ => Err(self.carrier_err(op, v)),
        }
    }

    fn expect_triple(&self, v: &Value, op: &'static str) -> Result<(f64, f64, f64), SemiringError> {
        match v {
            Value::Triple(x, y, z) if !x.is_nan() && !y.is_nan() && !z.is_nan() => {
                Ok((*x, *y, *z))
            }
            _ => Err(self.carrier_err(op, v)),
        }
    }

    fn carrier_err(&self, op: &'static str, v: &Value) -> SemiringError {
        SemiringError::Carrier {
            semiring: self.id,
            op,
            value: v.to_string(),
        }
    }

    fn nan_err(&self, op: &'static str, a: &Value, b: &Value) -> SemiringError {
        SemiringError::NaN {
            semiring: self.id,
            op,
            lhs: a.to_string(),
            rhs: b.to_string(),
        }
    }

    pub fn plus(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        match self.id {
            SemiringId::Boolean => {
                Ok(Value::Bool(self.expect_bool(a, "plus")? | self.expect_bool(b, "plus")?))
            }
            SemiringId::Tropical => {
                let (x, y) = (self.expect_real(a, "plus")?, self.expect_real(b, "plus")?);
                Ok(Value::Real(x.min(y)))
            }
            SemiringId::Viterbi => {
                let (x, y) = (self.expect_real(a, "plus")?, self.expect_real(b, "plus")?);
                Ok(Value::Real(x.max(y)))
            }
            SemiringId::Real => {
                let (x, y) = (self.expect_real(a, "plus")?, self.expect_real(b, "plus")?);
                Ok(Value::Real(x + y))
            }
            SemiringId::Entropy3 => {
                let (x1, y1, z1) = self.expect_triple(a, "plus")?;
                let (x2, y2, z2) = self.expect_triple(b, "plus")?;
                let out = Value::Triple(x1 + x2, y1 + y2, z1 + z2);
                match out {
                    Value::Triple(x, y, z) if x.is_nan() || y.is_nan() || z.is_nan() => {
                        Err(self.nan_err("plus", a, b))
                    }
                    _ => Ok(out),
                }
            }
        }
    }

    pub fn times(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        match self.id {
            SemiringId::Boolean => {
                Ok(Value::Bool(self.expect_bool(a, "times")? & self.expect_bool(b, "times")?))
            }
            SemiringId::Tropical => {
                let (x, y) = (self.expect_real(a, "times")?, self.expect_real(b, "times")?);
                Ok(Value::Real(x + y))
            }
            SemiringId::Viterbi | SemiringId::Real => {
                let (x, y) = (self.expect_real(a, "times")?, self.expect_real(b, "times")?);
                let p = x * y;
                if p.is_nan() {
                    return Err(self.nan_err("times", a, b));
                }
                Ok(Value::Real(p))
            }
            SemiringId::Entropy3 => {
                let (x1, y1, z1) = self.expect_triple(a, "times")?;
                let (x2, y2, z2) = self.expect_triple(b, "times")?;
                let x = mul0(x1, x2);
                let y = mul0(x1, y2) + mul0(x2, y1);
                let z = mul0(z1, z2);
                if x.is_nan() || y.is_nan() || z.is_nan() {
                    return Err(self.nan_err("times", a, b));
                }
                Ok(Value::Triple(x, y, z))
            }
        }
    }

    /// Componentwise comparison within `tol`. Infinities compare equal only
    /// to the same infinity.
    pub fn approx_eq(&self, a: &Value, b: &Value, tol: f64) -> Result<bool, SemiringError> {
        match self.id {
            SemiringId::Boolean => Ok(self.expect_bool(a, "approx_eq")? == self.expect_bool(b, "approx_eq")?),
            SemiringId::Tropical | SemiringId::Viterbi | SemiringId::Real => {
                let (x, y) = (self.expect_real(a, "approx_eq")?, self.expect_real(b, "approx_eq")?);
                Ok(close(x, y, tol))
            }
            SemiringId::Entropy3 => {
                let (x1, y1, z1) = self.expect_triple(a, "approx_eq")?;
                let (x2, y2, z2) = self.expect_triple(b, "approx_eq")?;
                Ok(close(x1, x2, tol) && close(y1, y2, tol) && close(z1, z2, tol))
            }
        }
    }

    /// Magnitude of the change from `old` (absent means the zero element)
    /// to `new`; drives the iterate mode convergence test.
    pub fn delta(&self, old: Option<&Value>, new: &Value) -> f64 {
        let zero = self.zero();
        let old = old.unwrap_or(&zero);
        match (old, new) {
            (Value::Bool(a), Value::Bool(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (Value::Real(a), Value::Real(b)) => diff(*a, *b),
            (Value::Triple(a1, a2, a3), Value::Triple(b1, b2, b3)) => {
                diff(*a1, *b1).max(diff(*a2, *b2)).max(diff(*a3, *b3))
            }
            _ => f64::INFINITY,
        }
    }

    /// Checks a value is a legal axiom weight for this semiring: right
    /// carrier, inside the admissible range, and NaN-free.
    pub fn check_axiom(&self, v: &Value) -> Result<(), SemiringError> {
        match self.id {
            SemiringId::Boolean => {
                self.expect_bool(v, "axiom")?;
            }
            SemiringId::Tropical => {
                let x = self.expect_real(v, "axiom")?;
                if x < 0.0 {
                    return Err(self.carrier_err("axiom", v));
                }
            }
            SemiringId::Viterbi => {
                let x = self.expect_real(v, "axiom")?;
                if !(0.0..=1.0).contains(&x) {
                    return Err(self.carrier_err("axiom", v));
                }
            }
            SemiringId::Real => {
                let x = self.expect_real(v, "axiom")?;
                if x < 0.0 {
                    return Err(self.carrier_err("axiom", v));
                }
            }
            SemiringId::Entropy3 => {
                self.expect_triple(v, "axiom")?;
            }
        }
        Ok(())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true; // covers equal infinities
    }
    (a - b).abs() <= tol
}

fn diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        let d = (a - b).abs();
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn sample(sr: &Semiring, rng: &mut ChaCha8Rng) -> Value {
        match sr.id {
            SemiringId::Boolean => Value::Bool(rng.random()),
            SemiringId::Tropical => {
                if rng.random_ratio(1, 16) {
                    Value::Real(f64::INFINITY)
                } else {
                    Value::Real(rng.random_range(0.0..5.0))
                }
            }
            SemiringId::Viterbi => Value::Real(rng.random_range(0.0..=1.0)),
            SemiringId::Real => Value::Real(rng.random_range(0.0..4.0)),
            SemiringId::Entropy3 => Value::Triple(
                rng.random_range(0.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..3.0),
            ),
        }
    }

    fn assert_close(sr: &Semiring, a: &Value, b: &Value, what: &str) {
        assert!(
            sr.approx_eq(a, b, TOL).unwrap(),
            "{} violated for {}: {} vs {}",
            what,
            sr.id,
            a,
            b
        );
    }

    #[test]
    fn laws_hold_on_random_triples() {
        for id in ALL_SEMIRINGS {
            let sr = id.get();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
            for _ in 0..1000 {
                let a = sample(sr, &mut rng);
                let b = sample(sr, &mut rng);
                let c = sample(sr, &mut rng);

                let ab_c = sr.plus(&sr.plus(&a, &b).unwrap(), &c).unwrap();
                let a_bc = sr.plus(&a, &sr.plus(&b, &c).unwrap()).unwrap();
                assert_close(sr, &ab_c, &a_bc, "plus associativity");

                let ab = sr.plus(&a, &b).unwrap();
                let ba = sr.plus(&b, &a).unwrap();
                assert_close(sr, &ab, &ba, "plus commutativity");

                let m_ab_c = sr.times(&sr.times(&a, &b).unwrap(), &c).unwrap();
                let m_a_bc = sr.times(&a, &sr.times(&b, &c).unwrap()).unwrap();
                assert_close(sr, &m_ab_c, &m_a_bc, "times associativity");

                let m_ab = sr.times(&a, &b).unwrap();
                let m_ba = sr.times(&b, &a).unwrap();
                assert_close(sr, &m_ab, &m_ba, "times commutativity");

                // (a + b) * c = a*c + b*c
                let lhs = sr.times(&sr.plus(&a, &b).unwrap(), &c).unwrap();
                let rhs = sr
                    .plus(&sr.times(&a, &c).unwrap(), &sr.times(&b, &c).unwrap())
                    .unwrap();
                assert_close(sr, &lhs, &rhs, "distributivity");

                assert_close(sr, &sr.plus(&a, &sr.zero()).unwrap(), &a, "plus identity");
                assert_close(sr, &sr.times(&a, &sr.one()).unwrap(), &a, "times identity");
                let ann = sr.times(&a, &sr.zero()).unwrap();
                assert_close(sr, &ann, &sr.zero(), "annihilation");

                if sr.idempotent_plus {
                    assert_close(sr, &sr.plus(&a, &a).unwrap(), &a, "idempotence");
                }
                if sr.monotone_superior {
                    // multiplying in b never improves a: a + a*b = a
                    let sup = sr.plus(&a, &sr.times(&a, &b).unwrap()).unwrap();
                    assert_close(sr, &sup, &a, "superiority");
                }
            }
        }
    }

    #[test]
    fn real_plus_is_not_idempotent() {
        let sr = SemiringId::Real.get();
        let two = sr.plus(&Value::Real(1.0), &Value::Real(1.0)).unwrap();
        assert_eq!(two, Value::Real(2.0));
        assert!(!sr.idempotent_plus);
        assert!(!SemiringId::Entropy3.get().idempotent_plus);
    }

    #[test]
    fn entropy3_times_matches_expansion() {
        let sr = SemiringId::Entropy3.get();
        let a = Value::Triple(2.0, 3.0, 5.0);
        let b = Value::Triple(0.5, -1.0, 4.0);
        let p = sr.times(&a, &b).unwrap();
        // <x1*x2, x1*y2 + x2*y1, z1*z2>
        assert_eq!(p, Value::Triple(1.0, 2.0 * -1.0 + 0.5 * 3.0, 20.0));
    }

    #[test]
    fn entropy3_zero_annihilates_despite_infinities() {
        let sr = SemiringId::Entropy3.get();
        let inf = Value::Triple(1.0, f64::NEG_INFINITY, 0.0);
        let z = sr.times(&sr.zero(), &inf).unwrap();
        assert_eq!(z, sr.zero());
        // a finite positive x-channel keeps propagating -inf in y
        let carry = sr.times(&Value::Triple(0.5, 0.0, 1.0), &inf).unwrap();
        assert_eq!(carry, Value::Triple(0.5, f64::NEG_INFINITY, 0.0));
    }

    #[test]
    fn entropy3_x_and_z_channels_track_real() {
        let sr3 = SemiringId::Entropy3.get();
        let srr = SemiringId::Real.get();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (x1, z1) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
            let (x2, z2) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
            let a = Value::Triple(x1, rng.random_range(-1.0..1.0), z1);
            let b = Value::Triple(x2, rng.random_range(-1.0..1.0), z2);
            for (f, g) in [
                (sr3.plus(&a, &b).unwrap(), srr.plus(&Value::Real(x1), &Value::Real(x2)).unwrap()),
                (sr3.times(&a, &b).unwrap(), srr.times(&Value::Real(x1), &Value::Real(x2)).unwrap()),
            ] {
                let (x, _, _) = f.as_triple().unwrap();
                assert!((x - g.as_real().unwrap()).abs() <= 1e-12);
            }
            let (_, _, z) = sr3.times(&a, &b).unwrap().as_triple().unwrap();
            assert!((z - z1 * z2).abs() <= 1e-12);
        }
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let sr = SemiringId::Real.get();
        assert!(sr.plus(&Value::Real(1.0), &Value::Bool(true)).is_err());
        assert!(sr.times(&Value::Triple(1.0, 0.0, 0.0), &Value::Real(1.0)).is_err());
        let sb = SemiringId::Boolean.get();
        assert!(sb.plus(&Value::Real(1.0), &Value::Bool(true)).is_err());
    }

    #[test]
    fn nan_is_rejected_not_propagated() {
        let sr = SemiringId::Real.get();
        assert!(sr.plus(&Value::Real(f64::NAN), &Value::Real(1.0)).is_err());
        let s3 = SemiringId::Entropy3.get();
        let a = Value::Triple(1.0, f64::INFINITY, 1.0);
        let b = Value::Triple(1.0, f64::NEG_INFINITY, 1.0);
        // inf + -inf in the y channel
        assert!(s3.plus(&a, &b).is_err());
    }

    #[test]
    fn axiom_range_checks() {
        assert!(SemiringId::Viterbi.get().check_axiom(&Value::Real(1.5)).is_err());
        assert!(SemiringId::Viterbi.get().check_axiom(&Value::Real(1.0)).is_ok());
        assert!(SemiringId::Tropical.get().check_axiom(&Value::Real(-0.5)).is_err());
        assert!(SemiringId::Tropical.get().check_axiom(&Value::Real(f64::INFINITY)).is_ok());
        assert!(SemiringId::Real.get().check_axiom(&Value::Bool(true)).is_err());
        assert!(SemiringId::Entropy3.get()
            .check_axiom(&Value::Triple(0.5, f64::NEG_INFINITY, 0.0))
            .is_ok());
    }

    #[test]
    fn zero_test_is_exact() {
        let sr = SemiringId::Tropical.get();
        assert!(sr.is_zero(&Value::Real(f64::INFINITY)));
        assert!(!sr.is_zero(&Value::Real(1e300)));
        assert!(SemiringId::Entropy3.get().is_zero(&Value::Triple(0.0, 0.0, 0.0)));
        assert!(!SemiringId::Entropy3.get().is_zero(&Value::Triple(0.0, 0.0, 0.3)));
    }

    #[test]
    fn delta_measures_componentwise_change() {
        let sr = SemiringId::Entropy3.get();
        let a = Value::Triple(1.0, 2.0, 3.0);
        let b = Value::Triple(1.0, 2.5, 3.1);
        assert!((sr.delta(Some(&a), &b) - 0.5).abs() < 1e-15);
        // a fresh tropical entry is infinitely far from the zero element
        let st = SemiringId::Tropical.get();
        assert_eq!(st.delta(None, &Value::Real(3.0)), f64::INFINITY);
        assert_eq!(st.delta(Some(&Value::Real(f64::INFINITY)), &Value::Real(f64::INFINITY)), 0.0);
    }
}
