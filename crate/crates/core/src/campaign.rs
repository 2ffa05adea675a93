//! Seeded random campaigns that check certification bounds on states known
//! to be (bi)separable.
//!
//! Sample `i` draws from its own generator seeded with `seed + i`, so results
//! do not depend on how samples are spread over threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{i3, i4, i_m_bipartite, QUADRIPARTITE_BOUND, TRIPARTITE_BOUND};
use crate::error::{invalid, Error, Result};
use crate::mub::{best_family, fourier_pair, MubFamily};
use crate::qla::DensityMatrix;
use crate::states::{
    dirichlet_weights, random_biseparable_with, random_cut_product_with, random_product_with,
    random_separable_bipartite, seeded_rng, Bipartition,
};
use crate::VIOLATION_SLACK;

/// Which family of states a campaign samples and which criterion it applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CampaignClass {
    /// 3-qubit biseparable states against `i3`.
    Biseparable3,
    /// 4-qubit biseparable states against `i4`.
    Biseparable4,
    /// Separable states on `C^d ⊗ C^d` against `I_m`, with the Fourier pair
    /// (`m = 2`) or the largest known family.
    SeparableBipartite { d: usize, complete: bool },
}

impl CampaignClass {
    pub fn name(&self) -> &'static str {
        match self {
            CampaignClass::Biseparable3 => "biseparable3",
            CampaignClass::Biseparable4 => "biseparable4",
            CampaignClass::SeparableBipartite { .. } => "separable-bipartite",
        }
    }
}

impl Serialize for CampaignClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl fmt::Display for CampaignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses the class name; `separable-bipartite` defaults to `d = 2` with the
/// pair family.
impl FromStr for CampaignClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "biseparable3" => Ok(CampaignClass::Biseparable3),
            "biseparable4" => Ok(CampaignClass::Biseparable4),
            "separable-bipartite" => Ok(CampaignClass::SeparableBipartite { d: 2, complete: false }),
            other => invalid(format!("unknown campaign class '{other}'")),
        }
    }
}

/// Outcome of a campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub class: CampaignClass,
    /// Local dimension and family size, for bipartite campaigns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mubs: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub max_value: f64,
    pub bound: f64,
    pub violations: usize,
    /// Seed of the sample attaining `max_value`.
    pub worst_seed: u64,
    pub pass: bool,
}

enum Evaluator {
    Tripartite(Vec<Bipartition>),
    Quadripartite(Vec<Bipartition>),
    Bipartite { d: usize, family: MubFamily },
}

impl Evaluator {
    fn new(class: CampaignClass) -> Result<Self> {
        Ok(match class {
            CampaignClass::Biseparable3 => Evaluator::Tripartite(Bipartition::all(3)),
            CampaignClass::Biseparable4 => Evaluator::Quadripartite(Bipartition::all(4)),
            CampaignClass::SeparableBipartite { d, complete } => {
                if d < 2 {
                    return invalid("separable-bipartite campaign needs d ≥ 2");
                }
                let family = if complete { best_family(d)? } else { fourier_pair(d)? };
                Evaluator::Bipartite { d, family }
            }
        })
    }

    fn bound(&self) -> f64 {
        match self {
            Evaluator::Tripartite(_) => TRIPARTITE_BOUND,
            Evaluator::Quadripartite(_) => QUADRIPARTITE_BOUND,
            Evaluator::Bipartite { d, family } => 1.0 + (family.len() - 1) as f64 / *d as f64,
        }
    }

    fn sample(&self, index: usize, seed: u64) -> Result<DensityMatrix> {
        let mut rng = seeded_rng(seed);
        match self {
            Evaluator::Tripartite(cuts) | Evaluator::Quadripartite(cuts) => biseparable_sample(cuts, index, &mut rng),
            Evaluator::Bipartite { d, .. } => {
                if index.is_multiple_of(2) {
                    Ok(random_product_with(&[*d, *d], &mut rng)?.density())
                } else {
                    let terms = rng.random_range(2..=5);
                    random_separable_bipartite(*d, terms, &mut rng)
                }
            }
        }
    }

    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(match self {
            Evaluator::Tripartite(_) => i3(rho)?.i_value,
            Evaluator::Quadripartite(_) => i4(rho)?.i_value,
            Evaluator::Bipartite { family, .. } => i_m_bipartite(rho, family)?.i_value,
        })
    }
}

/// Cycles over three shapes: a pure product across one cut, a mixture of
/// products across one cut, and a mixture of such states across several
/// cuts. The cut for the first two shapes rotates with the index.
fn biseparable_sample<R: Rng>(cuts: &[Bipartition], index: usize, rng: &mut R) -> Result<DensityMatrix> {
    let cut = &cuts[(index / 3) % cuts.len()];
    match index % 3 {
        0 => Ok(random_cut_product_with(cut, rng)?.density()),
        1 => {
            let terms = rng.random_range(2..=5);
            random_biseparable_with(cut, terms, rng)
        }
        _ => {
            let k = rng.random_range(2..=cuts.len().min(4));
            let parts = (0..k)
                .map(|_| {
                    let c = &cuts[rng.random_range(0..cuts.len())];
                    let terms = rng.random_range(1..=3);
                    random_biseparable_with(c, terms, rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let weights = dirichlet_weights(k, rng);
            let pairs: Vec<(f64, &DensityMatrix)> = weights.into_iter().zip(&parts).collect();
            DensityMatrix::mixture(&pairs)
        }
    }
}

/// The state drawn for sample `index` of a campaign with base `seed`.
pub fn campaign_sample(class: CampaignClass, seed: u64, index: usize) -> Result<DensityMatrix> {
    Evaluator::new(class)?.sample(index, seed.wrapping_add(index as u64))
}

/// Runs `trials` samples and reports the largest criterion value seen. A
/// sample violates when its value exceeds the bound by more than
/// [`VIOLATION_SLACK`].
pub fn run_campaign(class: CampaignClass, trials: usize, seed: u64) -> Result<CampaignReport> {
    if trials == 0 {
        return invalid("a campaign needs at least one trial");
    }
    let eval = Evaluator::new(class)?;
    let bound = eval.bound();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            eval.value(&eval.sample(i, s)?)
        })
        .collect::<Result<_>>()?;
    let (worst, max_value) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    let violations = values.iter().filter(|&&v| v > bound + VIOLATION_SLACK).count();
    let (dim, mubs) = match &eval {
        Evaluator::Bipartite { d, family } => (Some(*d), Some(family.len())),
        _ => (None, None),
    };
    Ok(CampaignReport {
        class,
        dim,
        mubs,
        trials,
        seed,
        max_value,
        bound,
        violations,
        worst_seed: seed.wrapping_add(worst as u64),
        pass: violations == 0,
    })
}
