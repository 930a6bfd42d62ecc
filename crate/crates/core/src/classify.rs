//! Radon–Hurwitz numbers, the menu of invariant structures by dimension, and
//! ergodicity verdicts.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::thresholds;

/// `ρ(n)`: for `n = (2a+1)·2^b` with `b = c + 4d`, `ρ(n) = 2^c + 8d`.
pub fn radon_hurwitz(n: u64) -> u64 {
    assert!(n >= 1, "radon_hurwitz is defined for n >= 1");
    let b = n.trailing_zeros() as u64;
    let (c, d) = (b % 4, b / 4);
    (1 << c) + 8 * d
}

/// Kinds of invariant structure that can obstruct ergodicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum StructureLabel {
    NoneOddDim,
    OddVectorField,
    EvenProjector { max_rank: usize },
    ComplexStructure7,
    G2Structure8,
    LieBracket134 { min_degree: usize },
}

impl std::fmt::Display for StructureLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NoneOddDim => write!(f, "none (odd dimension)"),
            Self::OddVectorField => write!(f, "odd invariant unit vector field"),
            Self::EvenProjector { max_rank } => {
                write!(f, "even invariant projector of rank <= {max_rank}")
            }
            Self::ComplexStructure7 => write!(f, "invariant complex structure (n = 7)"),
            Self::G2Structure8 => write!(f, "invariant G2-structure (n = 8)"),
            Self::LieBracket134 { min_degree } => {
                write!(f, "invariant Lie bracket of degree >= {min_degree} (n = 134)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureCase {
    pub label: StructureLabel,
    /// Pinching above which the case is excluded; 0 when it never occurs.
    pub threshold: f64,
}

fn projector_rank(n: usize) -> usize {
    let rho = radon_hurwitz(n as u64) as usize;
    (rho - 1).min((n - 2) / 2)
}

pub fn structure_menu(n: usize) -> Result<Vec<StructureCase>> {
    if n < 3 {
        return domain(format!("dimension n must be >= 3, got {n}"));
    }
    let exceptional = |n| thresholds::exceptional_report(n).map(|r| r.composite).expect("n in {7, 8, 134}");
    let vector_field = || -> Result<StructureCase> {
        Ok(StructureCase { label: StructureLabel::OddVectorField, threshold: thresholds::delta_lambda1(n)? })
    };
    let projector = |max_rank| -> Result<StructureCase> {
        Ok(StructureCase {
            label: StructureLabel::EvenProjector { max_rank },
            threshold: thresholds::delta_sym2(n)?,
        })
    };
    Ok(match n {
        7 => vec![StructureCase { label: StructureLabel::ComplexStructure7, threshold: exceptional(7) }],
        8 => vec![
            StructureCase { label: StructureLabel::G2Structure8, threshold: exceptional(8) },
            projector(projector_rank(8))?,
        ],
        134 => vec![
            StructureCase {
                label: StructureLabel::LieBracket134 { min_degree: 3 },
                threshold: exceptional(134),
            },
            vector_field()?,
        ],
        _ if n % 2 == 1 => vec![StructureCase { label: StructureLabel::NoneOddDim, threshold: 0.0 }],
        _ if n == 4 || n % 4 == 2 => vec![vector_field()?],
        _ => vec![projector(projector_rank(n))?],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// Every case in the menu is excluded at this pinching.
    Ergodic { cases: Vec<StructureCase> },
    /// Some case is not excluded; nothing is claimed.
    Inconclusive { open_cases: Vec<StructureCase> },
}

impl Verdict {
    pub fn is_ergodic(&self) -> bool {
        matches!(self, Verdict::Ergodic { .. })
    }
}

pub fn verdict(n: usize, delta: f64) -> Result<Verdict> {
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("pinching delta must lie in (0, 1], got {delta}"));
    }
    let menu = structure_menu(n)?;
    let open: Vec<StructureCase> = menu.iter().filter(|c| delta <= c.threshold).cloned().collect();
    Ok(if open.is_empty() { Verdict::Ergodic { cases: menu } } else { Verdict::Inconclusive { open_cases: open } })
}

/// Informational note for even dimensions above quarter pinching.
pub fn quarter_pinching_note(n: usize, delta: f64) -> Option<&'static str> {
    (n % 2 == 0 && delta > 0.25).then_some(
        "strictly 1/4-pinched: ergodicity is conjectured in this range; \
         the verdict above only reflects proven thresholds",
    )
}
