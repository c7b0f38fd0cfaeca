use std::fmt;
use std::str::FromStr;

use crate::game::go::DEFAULT_MOVE_CAP;
use crate::policy::PolicyParams;
use crate::scalar::{lit, Scalar};

use super::SearchError;

/// The search algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Uct,
    Grave,
    /// UCT with node recycling.
    UctR,
    /// GRAVE with node recycling.
    GraveR,
    /// Two-level UCT.
    Uct2,
    /// Two-level GRAVE, batch backpropagation.
    Grave2,
    /// Two-level GRAVE with forward sharing.
    Grave2Fs,
    /// Two-level GRAVE with forward sharing and recycling in both trees.
    GraveR2,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Uct,
        Variant::Grave,
        Variant::UctR,
        Variant::GraveR,
        Variant::Uct2,
        Variant::Grave2,
        Variant::Grave2Fs,
        Variant::GraveR2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Uct => "uct",
            Variant::Grave => "grave",
            Variant::UctR => "uctr",
            Variant::GraveR => "graver",
            Variant::Uct2 => "uct2",
            Variant::Grave2 => "grave2",
            Variant::Grave2Fs => "grave2fs",
            Variant::GraveR2 => "graver2",
        }
    }

    /// Uses GRAVE selection and keeps AMAF tables.
    pub fn uses_amaf(self) -> bool {
        !matches!(self, Variant::Uct | Variant::UctR | Variant::Uct2)
    }

    pub fn recycles(self) -> bool {
        matches!(self, Variant::UctR | Variant::GraveR | Variant::GraveR2)
    }

    pub fn is_two_level(self) -> bool {
        matches!(
            self,
            Variant::Uct2 | Variant::Grave2 | Variant::Grave2Fs | Variant::GraveR2
        )
    }

    pub fn forward_sharing(self) -> bool {
        matches!(self, Variant::Grave2Fs | Variant::GraveR2)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_lowercase();
        let key = key.replace('²', "2");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| SearchError::InvalidParams(format!("unknown variant {s:?}")))
    }
}

/// Variant selector plus every tunable of a search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams<T> {
    pub variant: Variant,
    /// Playouts `P` of a single-level search.
    pub playouts: u32,
    /// Node budget `N`, not counting the root.
    pub capacity: u32,
    /// Fraction of `N` given to the second-level tree.
    pub lambda: T,
    /// Top-level iterations of GRAVER² (`P_top`).
    pub p_top: u32,
    /// Second-level playouts of GRAVER² (`P_sec`).
    pub p_sec: u32,
    pub policy: PolicyParams<T>,
    /// MAST exploration probability.
    pub epsilon: T,
    /// MAST decay factor applied between turns of one game.
    pub mast_decay: T,
    /// Total ply count at which playouts stop.
    pub move_cap: u32,
    pub seed: u64,
}

/// Node and iteration counts implied by a parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub top_nodes: u32,
    pub sec_nodes: u32,
    pub top_iterations: u32,
    /// Playouts per second-level search; 0 for single-level variants.
    pub sec_playouts: u32,
}

impl Budget {
    pub fn total_playouts(&self) -> u64 {
        if self.sec_playouts == 0 {
            u64::from(self.top_iterations)
        } else {
            u64::from(self.top_iterations) * u64::from(self.sec_playouts)
        }
    }
}

impl<T: Scalar> SearchParams<T> {
    /// Defaults for `variant`: P = N = 10,000 for single-level variants,
    /// N = 200 and lambda = 0.5 for two-level ones.
    pub fn new(variant: Variant) -> SearchParams<T> {
        let mut p = SearchParams {
            variant,
            playouts: 10_000,
            capacity: 10_000,
            lambda: lit(0.5),
            p_top: 0,
            p_sec: 0,
            policy: PolicyParams::default(),
            epsilon: lit(0.4),
            mast_decay: lit(0.2),
            move_cap: DEFAULT_MOVE_CAP,
            seed: 0,
        };
        if variant.is_two_level() {
            p.capacity = 200;
        }
        if variant == Variant::GraveR2 {
            let b = p.split();
            p.p_top = b.0;
            p.p_sec = b.1;
        }
        p
    }

    /// Single-level search with `playouts` playouts and a node budget of
    /// the same size.
    pub fn single(variant: Variant, playouts: u32) -> SearchParams<T> {
        SearchParams {
            playouts,
            capacity: playouts,
            ..SearchParams::new(variant)
        }
    }

    /// Two-level search with node budget `nodes` split by `lambda`.
    pub fn two_level(variant: Variant, nodes: u32, lambda: T) -> SearchParams<T> {
        let mut p = SearchParams {
            capacity: nodes,
            lambda,
            ..SearchParams::new(variant)
        };
        let (top, sec) = p.split();
        p.p_top = top;
        p.p_sec = sec;
        p
    }

    pub fn with_seed(mut self, seed: u64) -> SearchParams<T> {
        self.seed = seed;
        self
    }

    /// `(N_top, N_sec)` with `N_sec = round(lambda * N)`.
    pub fn split(&self) -> (u32, u32) {
        let n: T = crate::scalar::count(self.capacity);
        let sec = (self.lambda * n).round().to_u32().unwrap_or(0).min(self.capacity);
        (self.capacity - sec, sec)
    }

    pub fn budget(&self) -> Budget {
        if !self.variant.is_two_level() {
            return Budget {
                top_nodes: self.capacity,
                sec_nodes: 0,
                top_iterations: self.playouts,
                sec_playouts: 0,
            };
        }
        let (top, sec) = self.split();
        let (top_iterations, sec_playouts) = if self.variant == Variant::GraveR2 {
            (self.p_top, self.p_sec)
        } else {
            (top, sec)
        };
        Budget {
            top_nodes: top,
            sec_nodes: sec,
            top_iterations,
            sec_playouts,
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidParams(m));
        if self.capacity < 2 {
            return bad(format!("node budget N must be at least 2, got {}", self.capacity));
        }
        if !(self.epsilon >= T::zero() && self.epsilon <= T::one()) {
            return bad(format!("epsilon must lie in [0, 1], got {:?}", self.epsilon));
        }
        if !(self.mast_decay >= T::zero() && self.mast_decay <= T::one()) {
            return bad(format!("MAST decay must lie in [0, 1], got {:?}", self.mast_decay));
        }
        if !(self.policy.bias > T::zero()) || !self.policy.bias.is_finite() {
            return bad(format!("bias must be positive, got {:?}", self.policy.bias));
        }
        if !(self.policy.exploration_c >= T::zero()) || !self.policy.exploration_c.is_finite() {
            return bad(format!(
                "exploration constant must be non-negative, got {:?}",
                self.policy.exploration_c
            ));
        }
        if self.move_cap == 0 {
            return bad("move cap must be positive".into());
        }
        if self.variant.is_two_level() {
            if !(self.lambda > T::zero() && self.lambda < T::one()) {
                return bad(format!("lambda must lie in (0, 1), got {:?}", self.lambda));
            }
            let (top, sec) = self.split();
            if top < 2 || sec < 2 {
                return bad(format!("N_top = {top} and N_sec = {sec} must both be at least 2"));
            }
            if self.variant == Variant::GraveR2 && (self.p_top < 1 || self.p_sec < 1) {
                return bad("P_top and P_sec must be at least 1".into());
            }
        } else {
            if self.playouts < 1 {
                return bad("playouts must be at least 1".into());
            }
            if !self.variant.recycles() && self.capacity < self.playouts {
                return bad(format!(
                    "{} cannot recycle nodes: N = {} must be at least P = {}",
                    self.variant, self.capacity, self.playouts
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        let b = SearchParams::<f64>::two_level(Variant::Grave2Fs, 200, 0.5).budget();
        assert_eq!((b.top_nodes, b.sec_nodes, b.total_playouts()), (100, 100, 10_000));
        let b = SearchParams::<f64>::two_level(Variant::Grave2, 240, 0.5).budget();
        assert_eq!(b.total_playouts(), 14_400);
        let b = SearchParams::<f64>::two_level(Variant::Uct2, 10, 0.5).budget();
        assert_eq!(b.total_playouts(), 25);
        let mut p = SearchParams::<f64>::two_level(Variant::GraveR2, 160, 0.5);
        p.p_top = 160;
        p.p_sec = 80;
        assert_eq!(p.budget().total_playouts(), 12_800);
        assert_eq!(
            SearchParams::<f64>::single(Variant::Grave, 10_000)
                .budget()
                .total_playouts(),
            10_000
        );
    }

    #[test]
    fn lambda_rounding() {
        let p = SearchParams::<f64>::two_level(Variant::Grave2, 240, 0.4);
        assert_eq!(p.split(), (144, 96));
        let p = SearchParams::<f64>::two_level(Variant::Grave2, 7, 0.5);
        assert_eq!(p.split(), (3, 4));
    }

    #[test]
    fn validation() {
        assert!(SearchParams::<f64>::single(Variant::Grave, 100).validate().is_ok());
        let mut p = SearchParams::<f64>::single(Variant::Grave, 100);
        p.capacity = 50;
        assert!(p.validate().is_err());
        p.variant = Variant::GraveR;
        assert!(p.validate().is_ok());
        p.capacity = 1;
        assert!(p.validate().is_err());
        assert!(SearchParams::<f64>::two_level(Variant::Grave2, 200, 1.0)
            .validate()
            .is_err());
        assert!(SearchParams::<f64>::two_level(Variant::Grave2, 200, 0.0)
            .validate()
            .is_err());
        assert!(SearchParams::<f64>::two_level(Variant::Grave2, 3, 0.5)
            .validate()
            .is_err());
    }

    #[test]
    fn variant_names_roundtrip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("GRAVE2_FS".parse::<Variant>().unwrap(), Variant::Grave2Fs);
        assert_eq!("UCT_R".parse::<Variant>().unwrap(), Variant::UctR);
        assert!("rave".parse::<Variant>().is_err());
    }
}
