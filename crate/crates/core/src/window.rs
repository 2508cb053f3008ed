//! Finite enumerations of group elements used by scans and searches.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{Dyadic, Element, GroupDescriptor, GroupKind};
use crate::rational::Rational;

/// Largest support bound accepted by [`Window::Subsets`] (`2^16` elements).
pub const MAX_SUBSET_INDEX: u32 = 16;

/// Cap on the number of elements any window may enumerate.
pub const MAX_WINDOW_ELEMENTS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Window {
    /// Lattice points whose coordinates are multiples of `2^-exponent`
    /// inside `[lo, hi]`, in every coordinate.
    Grid { lo: Rational, hi: Rational, exponent: u32 },
    /// Every binary sequence supported inside `{1..max_index}`.
    Subsets { max_index: u32 },
    Explicit(Vec<Element>),
}

impl Window {
    pub fn int_range(lo: i64, hi: i64) -> Self {
        Window::Grid { lo: lo.into(), hi: hi.into(), exponent: 0 }
    }

    pub fn dyadic_range(lo: i64, hi: i64, exponent: u32) -> Self {
        Window::Grid { lo: lo.into(), hi: hi.into(), exponent }
    }

    pub fn subsets(max_index: u32) -> Self {
        Window::Subsets { max_index }
    }

    /// All elements of the window in a fixed order.
    pub fn elements(&self, g: &GroupDescriptor) -> Result<Vec<Element>> {
        let out = match (self, g.kind()) {
            (Window::Grid { lo, hi, exponent }, GroupKind::IntLattice(d) | GroupKind::DyadicLattice(d)) => {
                if *exponent > 0 && matches!(g.kind(), GroupKind::IntLattice(_)) {
                    return Err(Error::UnsupportedDomain(format!("fractional grid on {g}")));
                }
                let scale = Rational::from_integer(BigInt::one() << *exponent as usize);
                let first = (lo * &scale).ceil();
                let last = (hi * &scale).floor();
                let count = (&last - &first + BigInt::one()).to_i64().unwrap_or(i64::MAX).max(0) as usize;
                if count == 0 {
                    return Err(Error::EmptyWindow);
                }
                if count.checked_pow(d as u32).is_none_or(|n| n > MAX_WINDOW_ELEMENTS) {
                    return Err(Error::InvalidArgument(format!("window {self} is too large")));
                }
                let coords: Vec<BigInt> = (0..count).map(|k| &first + BigInt::from(k)).collect();
                let mut points: Vec<Vec<BigInt>> = vec![Vec::new()];
                for _ in 0..d {
                    points = points
                        .into_iter()
                        .flat_map(|p| {
                            coords.iter().map(move |c| {
                                let mut q = p.clone();
                                q.push(c.clone());
                                q
                            })
                        })
                        .collect();
                }
                points
                    .into_iter()
                    .map(|p| match g.kind() {
                        GroupKind::IntLattice(_) => Element::Int(p),
                        _ => Element::Dyadic(p.into_iter().map(|m| Dyadic::new(m, *exponent)).collect()),
                    })
                    .collect()
            }
            (Window::Subsets { max_index }, GroupKind::BinarySeq) => {
                if *max_index > MAX_SUBSET_INDEX {
                    return Err(Error::InvalidArgument(format!("subset window above {MAX_SUBSET_INDEX}")));
                }
                (0u32..1 << max_index)
                    .map(|mask| Element::Bits((1..=*max_index).filter(|i| mask >> (i - 1) & 1 == 1).collect()))
                    .collect()
            }
            (Window::Explicit(v), _) => {
                for e in v {
                    g.check(e)?;
                }
                v.clone()
            }
            _ => return Err(Error::UnsupportedDomain(format!("window {self} does not fit {g}"))),
        };
        if out.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(out)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Grid { lo, hi, exponent: 0 } => write!(f, "{lo}..{hi}"),
            Window::Grid { lo, hi, exponent } => write!(f, "{lo}..{hi}@1/2^{exponent}"),
            Window::Subsets { max_index } => write!(f, "subsets:{max_index}"),
            Window::Explicit(v) => {
                let items: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "explicit:{}", items.join(";"))
            }
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `lo..hi`, `lo..hi@step` with `step = 1/2^e`, `subsets:n`, or
    /// `explicit:e1;e2;...` with tagged elements.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let fail = || Error::Parse(format!("invalid window `{s}`"));
        if let Some(n) = s.strip_prefix("subsets:") {
            return Ok(Window::Subsets { max_index: n.parse().map_err(|_| fail())? });
        }
        if let Some(list) = s.strip_prefix("explicit:") {
            return Ok(Window::Explicit(list.split(';').map(str::parse).collect::<Result<_>>()?));
        }
        let (range, step) = match s.split_once('@') {
            Some((r, st)) => (r, Some(st)),
            None => (s, None),
        };
        let (lo, hi) = range.split_once("..").ok_or_else(fail)?;
        let exponent = match step {
            None => 0,
            Some(st) => {
                let step: Rational = st.parse()?;
                let d = Dyadic::from_rational(&step).ok_or_else(fail)?;
                if !step.numer().is_one() {
                    return Err(fail());
                }
                d.exponent()
            }
        };
        Ok(Window::Grid { lo: lo.parse()?, hi: hi.parse()?, exponent })
    }
}

impl Serialize for Window {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let z = GroupDescriptor::int_lattice(1);
        assert_eq!(Window::int_range(-16, 16).elements(&z).unwrap().len(), 33);
        let z2 = GroupDescriptor::int_lattice(2);
        assert_eq!(Window::int_range(-2, 2).elements(&z2).unwrap().len(), 25);
        let d = GroupDescriptor::dyadic_lattice(1);
        let half = Window::dyadic_range(-16, 16, 1).elements(&d).unwrap();
        assert_eq!(half.len(), 65);
        assert!(half.contains(&Element::dyadic(-31, 1)));
        assert!(Window::dyadic_range(-1, 1, 1).elements(&z).is_err());
        assert_eq!(Window::int_range(3, 2).elements(&z), Err(Error::EmptyWindow));
    }

    #[test]
    fn subsets() {
        let b = GroupDescriptor::binary_seq();
        let all = Window::subsets(8).elements(&b).unwrap();
        assert_eq!(all.len(), 256);
        assert!(all.contains(&Element::bits([1, 8])));
        assert!(Window::subsets(3).elements(&GroupDescriptor::int_lattice(1)).is_err());
    }

    #[test]
    fn text_forms() {
        for s in ["-16..16", "-4..4@1/2^1", "subsets:8", "explicit:int:[1];int:[2]"] {
            assert_eq!(s.parse::<Window>().unwrap().to_string(), s);
        }
        assert_eq!("-16..16@1/2".parse::<Window>().unwrap(), Window::dyadic_range(-16, 16, 1));
        assert!("-1..1@1/3".parse::<Window>().is_err());
        assert!("-1..1@3/4".parse::<Window>().is_err());
    }
}
