//! Level-index numerics for tetrationally large magnitudes.
//!
//! [`Mag`] stores a nonnegative real as `exp2` iterated `level` times on a
//! mantissa `r`. Canonical form keeps the ranges per level disjoint and
//! increasing, so comparison is lexicographic in `(level, r)`:
//!   level 0: value = r in [0, 2^60),
//!   level L >= 1: value = exp2^L(r) with r in [60, 2^60).
//! Small integers stay exact at level 0; at higher levels the relative
//! precision of the value is whatever the mantissa's 52 bits buy at that
//! height, which is the best any fixed-size representation can do.
//!
//! [`Val`] is the signed wrapper, and [`Idx`] a huge index with an exact
//! small successor offset (needed where `k + 1` is not representable inside
//! the magnitude itself).

use serde::{Deserialize, Serialize};

use crate::real;

/// Level-0 upper bound; also the lower bound (as a mantissa) for level >= 1
/// is `LEVEL_MIN = 60` so that down-conversion lands strictly inside level 0.
const LEVEL0_CAP: f64 = 1152921504606846976.0; // 2^60
const LEVEL_MIN: f64 = 60.0;

/// Nonnegative magnitude `exp2^level(r)` in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mag {
    pub level: u32,
    pub r: f64,
}

impl Mag {
    pub const ZERO: Mag = Mag { level: 0, r: 0.0 };
    pub const ONE: Mag = Mag { level: 0, r: 1.0 };

    /// Canonicalizes a raw `(level, r)` pair.
    pub fn new(mut level: u32, mut r: f64) -> Mag {
        assert!(r.is_finite() && r >= 0.0, "Mag mantissa must be finite nonnegative, got {r}");
        while level >= 1 && r < LEVEL_MIN {
            r = real::exp2(r);
            level -= 1;
        }
        while r >= LEVEL0_CAP {
            r = real::log2(r);
            level += 1;
        }
        Mag { level, r }
    }

    pub fn from_f64(v: f64) -> Mag {
        Mag::new(0, v)
    }

    pub fn from_u64(v: u64) -> Mag {
        Mag::new(0, v as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.level == 0 && self.r == 0.0
    }

    /// Value as `f64` when it fits, else `None`.
    pub fn to_f64(&self) -> Option<f64> {
        match self.level {
            0 => Some(self.r),
            1 if self.r < 1023.0 => Some(real::exp2(self.r)),
            _ => None,
        }
    }

    /// `2^self`, exact in the representation (level shift).
    pub fn exp2(&self) -> Mag {
        if self.level == 0 && self.r < LEVEL_MIN {
            Mag::new(0, real::exp2(self.r))
        } else {
            Mag { level: self.level + 1, r: self.r }
        }
    }

    /// `log2` as a signed value (negative for values below 1).
    pub fn log2(&self) -> Val {
        assert!(!self.is_zero(), "log2 of zero");
        if self.level >= 1 {
            return Val::pos(Mag::new(self.level - 1, self.r));
        }
        let l = real::log2(self.r);
        if l >= 0.0 {
            Val::pos(Mag::new(0, l))
        } else {
            Val::neg(Mag::new(0, -l))
        }
    }

    pub fn cmp_mag(&self, other: &Mag) -> core::cmp::Ordering {
        match self.level.cmp(&other.level) {
            core::cmp::Ordering::Equal => {
                self.r.partial_cmp(&other.r).expect("canonical Mag mantissas are ordered")
            }
            o => o,
        }
    }

    /// `other / self` as an `f64` in `[0, 1]`; 0 when the gap exceeds f64 range.
    /// Requires `other <= self`.
    fn ratio_of(&self, other: &Mag) -> f64 {
        debug_assert!(other.cmp_mag(self) != core::cmp::Ordering::Greater);
        if other.is_zero() {
            return 0.0;
        }
        if self.level == 0 {
            return other.r / self.r;
        }
        let d = self.log2().sub(&other.log2());
        debug_assert!(!d.negative);
        match d.mag.to_f64() {
            Some(g) if g <= 1075.0 => real::exp2(-g),
            _ => 0.0,
        }
    }

    /// Multiplies by a scalar in `(0, 2]`.
    fn scale(&self, s: f64) -> Mag {
        debug_assert!(s > 0.0 && s <= 2.0);
        if self.is_zero() {
            return *self;
        }
        if self.level == 0 {
            return Mag::new(0, self.r * s);
        }
        // value = 2^u * s = 2^(u + log2 s) with u one level down.
        let u = Mag { level: self.level - 1, r: self.r };
        let ls = real::log2(s);
        let u2 = if ls >= 0.0 {
            u.add(&Mag::from_f64(ls))
        } else {
            u.sub(&Mag::from_f64(-ls))
        };
        u2.exp2()
    }

    pub fn add(&self, other: &Mag) -> Mag {
        let (a, b) = if self.cmp_mag(other) == core::cmp::Ordering::Less {
            (other, self)
        } else {
            (self, other)
        };
        if b.is_zero() {
            return *a;
        }
        if a.level == 0 {
            return Mag::new(0, a.r + b.r);
        }
        a.scale(1.0 + a.ratio_of(b))
    }

    /// `self - other`; requires `self >= other`.
    pub fn sub(&self, other: &Mag) -> Mag {
        assert!(
            self.cmp_mag(other) != core::cmp::Ordering::Less,
            "Mag::sub would go negative"
        );
        if other.is_zero() {
            return *self;
        }
        if self.level == 0 {
            return Mag::new(0, self.r - other.r);
        }
        let t = self.ratio_of(other);
        if t >= 1.0 {
            return Mag::ZERO;
        }
        self.scale(1.0 - t)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        if self.level == 0 && other.level == 0 && self.r * other.r < LEVEL0_CAP {
            return Mag::new(0, self.r * other.r);
        }
        self.log2().add(&other.log2()).exp2()
    }

    /// `self / other`; requires `other > 0` and `self >= other` is not needed
    /// (values below 1 are representable at level 0).
    pub fn div(&self, other: &Mag) -> Mag {
        assert!(!other.is_zero(), "Mag::div by zero");
        if self.is_zero() {
            return Mag::ZERO;
        }
        if self.level == 0 && other.level == 0 {
            return Mag::new(0, self.r / other.r);
        }
        let d = self.log2().sub(&other.log2());
        if d.negative {
            match d.mag.to_f64() {
                Some(g) if g <= 1075.0 => Mag::new(0, real::exp2(-g)),
                _ => Mag::ZERO,
            }
        } else {
            d.mag.exp2()
        }
    }

    /// Representation-space midpoint, used by bisection searches. Not the
    /// arithmetic mean; only guarantees strict betweenness in the order.
    pub fn rep_mid(&self, other: &Mag) -> Mag {
        let (lo, hi) = if self.cmp_mag(other) == core::cmp::Ordering::Greater {
            (other, self)
        } else {
            (self, other)
        };
        if lo.level == hi.level {
            return Mag::new(lo.level, 0.5 * (lo.r + hi.r));
        }
        // Lift the lower one (uncanonically) to the higher level and average.
        let mut r = lo.r;
        let mut level = lo.level;
        while level < hi.level {
            r = real::log2(real::max(r, 1.0 + 1e-12));
            level += 1;
        }
        Mag::new(level, 0.5 * (r + hi.r))
    }
}

/// Signed level-index value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Val {
    pub negative: bool,
    pub mag: Mag,
}

impl Val {
    pub const ZERO: Val = Val { negative: false, mag: Mag::ZERO };

    pub fn pos(mag: Mag) -> Val {
        Val { negative: false, mag }
    }

    pub fn neg(mag: Mag) -> Val {
        let negative = !mag.is_zero();
        Val { negative, mag }
    }

    pub fn from_f64(v: f64) -> Val {
        if v >= 0.0 {
            Val::pos(Mag::from_f64(v))
        } else {
            Val::neg(Mag::from_f64(-v))
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.mag.to_f64().map(|m| if self.negative { -m } else { m })
    }

    pub fn add(&self, other: &Val) -> Val {
        if self.negative == other.negative {
            return Val { negative: self.negative, mag: self.mag.add(&other.mag) };
        }
        match self.mag.cmp_mag(&other.mag) {
            core::cmp::Ordering::Equal => Val::ZERO,
            core::cmp::Ordering::Greater => {
                Val { negative: self.negative, mag: self.mag.sub(&other.mag) }
            }
            core::cmp::Ordering::Less => {
                Val { negative: other.negative, mag: other.mag.sub(&self.mag) }
            }
        }
    }

    pub fn sub(&self, other: &Val) -> Val {
        self.add(&Val { negative: !other.negative, mag: other.mag })
    }

    pub fn mul(&self, other: &Val) -> Val {
        let mag = self.mag.mul(&other.mag);
        let negative = self.negative != other.negative && !mag.is_zero();
        Val { negative, mag }
    }

    pub fn div(&self, other: &Val) -> Val {
        let mag = self.mag.div(&other.mag);
        let negative = self.negative != other.negative && !mag.is_zero();
        Val { negative, mag }
    }

    pub fn cmp_val(&self, other: &Val) -> core::cmp::Ordering {
        match (self.negative, other.negative) {
            (false, true) => core::cmp::Ordering::Greater,
            (true, false) => core::cmp::Ordering::Less,
            (false, false) => self.mag.cmp_mag(&other.mag),
            (true, true) => other.mag.cmp_mag(&self.mag),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    /// `2^self` (values below 1 for negative exponents).
    pub fn exp2(&self) -> Mag {
        if self.negative {
            match self.mag.to_f64() {
                Some(g) if g <= 1075.0 => Mag::new(0, real::exp2(-g)),
                _ => Mag::ZERO,
            }
        } else {
            self.mag.exp2()
        }
    }

    /// Relative closeness in the representation: `|self - other| <= tol * |other|`.
    pub fn rel_close(&self, other: &Val, tol: f64) -> bool {
        let d = self.sub(other);
        if d.is_zero() {
            return true;
        }
        if other.is_zero() {
            return false;
        }
        match d.mag.div(&other.mag).to_f64() {
            Some(q) => q <= tol,
            None => false,
        }
    }
}

/// A potentially huge index with an exact small offset: value = `base + offset`.
/// The offset carries successor information lost to absorption at high levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Idx {
    pub base: Mag,
    pub offset: u64,
}

impl Idx {
    pub fn from_u64(v: u64) -> Idx {
        Idx { base: Mag::from_u64(v), offset: 0 }
    }

    pub fn succ(&self) -> Idx {
        if self.base.level == 0 && self.base.r + self.offset as f64 + 1.0 < 9.0e15 {
            Idx { base: Mag::new(0, self.base.r + self.offset as f64 + 1.0), offset: 0 }
        } else {
            Idx { base: self.base, offset: self.offset + 1 }
        }
    }

    /// Magnitude of the index (offset absorbed where not representable).
    pub fn to_mag(&self) -> Mag {
        self.base.add(&Mag::from_u64(self.offset))
    }

    pub fn cmp_idx(&self, other: &Idx) -> core::cmp::Ordering {
        match self.base.cmp_mag(&other.base) {
            core::cmp::Ordering::Equal => self.offset.cmp(&other.offset),
            o => o,
        }
    }

    /// `self - other` as a signed value; exact when the bases coincide.
    pub fn sub_idx(&self, other: &Idx) -> Val {
        if self.base == other.base {
            let (a, b) = (self.offset, other.offset);
            return if a >= b {
                Val::pos(Mag::from_u64(a - b))
            } else {
                Val::neg(Mag::from_u64(b - a))
            };
        }
        let base_diff = match self.base.cmp_mag(&other.base) {
            core::cmp::Ordering::Less => Val::neg(other.base.sub(&self.base)),
            _ => Val::pos(self.base.sub(&other.base)),
        };
        let off = Val::from_f64(self.offset as f64 - other.offset as f64);
        base_diff.add(&off)
    }
}
