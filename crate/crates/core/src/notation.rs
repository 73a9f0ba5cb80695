//! Syntactic ordinal notations: zero, successor, and limits carrying a
//! canonical fundamental sequence.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// A notation. Limit notations carry their value; their sequence is the
/// canonical fundamental sequence of that value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "NotationRepr", into = "NotationRepr")]
pub enum Notation {
    Zero,
    Succ(Box<Notation>),
    Lim(Ordinal),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
enum NotationRepr {
    Zero,
    Succ { child: Box<Notation> },
    Lim { ordinal: Ordinal },
}

impl TryFrom<NotationRepr> for Notation {
    type Error = Error;

    fn try_from(r: NotationRepr) -> Result<Self> {
        match r {
            NotationRepr::Zero => Ok(Notation::Zero),
            NotationRepr::Succ { child } => Ok(Notation::Succ(child)),
            NotationRepr::Lim { ordinal } => Notation::limit(ordinal),
        }
    }
}

impl From<Notation> for NotationRepr {
    fn from(n: Notation) -> Self {
        match n {
            Notation::Zero => NotationRepr::Zero,
            Notation::Succ(child) => NotationRepr::Succ { child },
            Notation::Lim(ordinal) => NotationRepr::Lim { ordinal },
        }
    }
}

impl Notation {
    /// A limit notation; rejects zero and successor values.
    pub fn limit(value: Ordinal) -> Result<Self> {
        if value.is_limit() {
            Ok(Notation::Lim(value))
        } else {
            Err(Error::NotALimit)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Notation::Zero)
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, Notation::Lim(_))
    }

    /// The unique successor label of a successor notation.
    pub fn inner(&self) -> Option<&Notation> {
        match self {
            Notation::Succ(c) => Some(c),
            _ => None,
        }
    }

    /// Integer code in the 1 / 2^c style, available for small finite
    /// notations only (limits have no program index here).
    pub fn kleene_code(&self) -> Option<BigUint> {
        match self {
            Notation::Zero => Some(BigUint::from(1u32)),
            Notation::Succ(c) => {
                let e = c.kleene_code()?.to_u32().filter(|e| *e <= 1 << 16)?;
                Some(BigUint::from(1u32) << e)
            }
            Notation::Lim(_) => None,
        }
    }
}

/// The canonical notation for `alpha`.
pub fn notation_from_ordinal(alpha: &Ordinal) -> Notation {
    let inf = alpha.infinite_part();
    let mut n = if inf.is_zero() { Notation::Zero } else { Notation::Lim(inf) };
    let k = alpha.finite_part().to_u64().expect("finite offset fits in u64");
    for _ in 0..k {
        n = Notation::Succ(Box::new(n));
    }
    n
}

/// The ordinal denoted by `b`.
pub fn notation_value(b: &Notation) -> Ordinal {
    let mut cur = b;
    let mut succs = 0u64;
    while let Notation::Succ(c) = cur {
        succs += 1;
        cur = c;
    }
    let base = match cur {
        Notation::Lim(v) => v.clone(),
        _ => Ordinal::zero(),
    };
    base + Ordinal::from(succs)
}

/// The `n`-th member of a limit notation's sequence.
pub fn fundamental_seq(b: &Notation, n: u64) -> Result<Notation> {
    match b {
        Notation::Lim(v) => Ok(notation_from_ordinal(&v.fundamental(n).expect("limit"))),
        _ => Err(Error::NotALimit),
    }
}

impl fmt::Display for Notation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notation::Zero => write!(f, "zero"),
            Notation::Succ(_) => write!(f, "succ[{}]", notation_value(self)),
            Notation::Lim(v) => write!(f, "lim[{v}]"),
        }
    }
}
