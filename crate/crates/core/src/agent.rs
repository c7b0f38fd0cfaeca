//! Compact agent strings such as `grave2fs:N=240,lambda=0.4` or `grave:P=10000`.
//!
//! Grammar: `variant[:key=value[,key=value]...]`, keys case-insensitive.
//!
//! | key      | meaning                                   |
//! |----------|-------------------------------------------|
//! | `P`      | playouts (single-level)                   |
//! | `N`      | node budget, root excluded                |
//! | `lambda` | second-level share of `N` (two-level)     |
//! | `ptop`   | top iterations (GRAVER²)                  |
//! | `psec`   | second-level playouts (GRAVER²)           |
//! | `C`      | UCB exploration constant                  |
//! | `bias`   | GRAVE bias                                |
//! | `ref`    | reference-node visit threshold            |
//! | `eps`    | MAST exploration probability              |
//! | `decay`  | MAST decay between turns                  |
//! | `cap`    | playout ply cap                           |
//! | `seed`   | search seed (overridden per turn in games)|

use std::fmt;
use std::str::FromStr;

use crate::scalar::Scalar;
use crate::search::{SearchError, SearchParams, Variant};

#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec<T> {
    /// The string the agent was parsed from.
    pub label: String,
    pub params: SearchParams<T>,
}

impl<T: Scalar> fmt::Display for AgentSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl<T: Scalar + FromStr> FromStr for AgentSpec<T> {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_agent(s)
    }
}

fn bad(msg: String) -> SearchError {
    SearchError::InvalidParams(msg)
}

fn num<V: FromStr>(key: &str, value: &str) -> Result<V, SearchError> {
    value
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad value {value:?} for {key}")))
}

/// Parses and validates an agent string.
pub fn parse_agent<T: Scalar + FromStr>(s: &str) -> Result<AgentSpec<T>, SearchError> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let variant: Variant = name.trim().parse()?;
    let mut p = SearchParams::<T>::new(variant);
    let (mut playouts, mut nodes, mut lambda, mut ptop, mut psec) = (None, None, None, None, None);

    for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {item:?}")))?;
        let key = key.trim();
        match key.to_ascii_lowercase().as_str() {
            "p" => playouts = Some(num::<u32>(key, value)?),
            "n" => nodes = Some(num::<u32>(key, value)?),
            "lambda" => lambda = Some(num::<T>(key, value)?),
            "ptop" => ptop = Some(num::<u32>(key, value)?),
            "psec" => psec = Some(num::<u32>(key, value)?),
            "c" => p.policy.exploration_c = num(key, value)?,
            "bias" => p.policy.bias = num(key, value)?,
            "ref" => p.policy.ref_threshold = num(key, value)?,
            "eps" | "epsilon" => p.epsilon = num(key, value)?,
            "decay" => p.mast_decay = num(key, value)?,
            "cap" => p.move_cap = num(key, value)?,
            "seed" => p.seed = num(key, value)?,
            _ => return Err(bad(format!("unknown key {key:?} in agent {s:?}"))),
        }
    }

    if variant.is_two_level() {
        if playouts.is_some() {
            return Err(bad(format!("{variant} takes N and lambda, not P")));
        }
        if let Some(n) = nodes {
            p.capacity = n;
        }
        if let Some(l) = lambda {
            p.lambda = l;
        }
        let (top, sec) = p.split();
        p.p_top = ptop.unwrap_or(top);
        p.p_sec = psec.unwrap_or(sec);
        if variant != Variant::GraveR2 && (ptop.is_some() || psec.is_some()) {
            return Err(bad(format!("ptop and psec apply to graver2 only, not {variant}")));
        }
    } else {
        if lambda.is_some() || ptop.is_some() || psec.is_some() {
            return Err(bad(format!(
                "{variant} is single-level; lambda, ptop and psec do not apply"
            )));
        }
        if let Some(n) = playouts {
            p.playouts = n;
        }
        p.capacity = nodes.unwrap_or(p.playouts);
    }
    p.validate()?;
    Ok(AgentSpec {
        label: s.to_string(),
        params: p,
    })
}
