//! Prym-canonical binary curves.
//!
//! The curve is a union of two rational components `C_1`, `C_2` meeting at
//! `g + 1` nodes. Node `P_i` (`i < g - 1`) is the coordinate point hit by each
//! component at `t = a[k][i]`; `P_g` is the image of `t = 0` and `P_{g+1}` the
//! image of `t = infinity`. The 2-torsion twist is encoded in the scalars `c`.
//!
//! All indices are 0-based: node `P_i` of the usual numbering is index `i - 1`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactla::{parse_rational, rat, to_fraction_string, RatPoly, Rational, UniPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    One,
    Two,
}

impl Component {
    pub const BOTH: [Component; 2] = [Component::One, Component::Two];

    pub fn index(self) -> usize {
        match self {
            Component::One => 0,
            Component::Two => 1,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrymCurveParams {
    g: usize,
    a: [Vec<Rational>; 2],
    delta: Vec<Rational>,
    c: [Vec<Rational>; 2],
    mu: Rational,
    d1: Rational,
    d2: Rational,
    tvec: Vec<u8>,
    svec: Vec<u8>,
    a_prod: [Rational; 2],
}

pub const MIN_GENUS: usize = 6;

fn validate_row(g: usize, row: &[Rational], k: usize, allow_repeats: bool) -> Result<()> {
    if row.len() != g - 1 {
        return Err(Error::InvalidParams(format!(
            "row {} has {} values, expected {}",
            k + 1,
            row.len(),
            g - 1
        )));
    }
    for (i, x) in row.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::InvalidParams(format!(
                "a[{}][{}] is zero",
                k + 1,
                i + 1
            )));
        }
        if allow_repeats {
            continue;
        }
        if let Some(j) = row[..i].iter().position(|y| y == x) {
            return Err(Error::InvalidParams(format!(
                "a[{k1}][{}] = a[{k1}][{}] = {x}",
                j + 1,
                i + 1,
                k1 = k + 1
            )));
        }
    }
    Ok(())
}

impl PrymCurveParams {
    fn assemble(
        g: usize,
        a: [Vec<Rational>; 2],
        mu: Rational,
        d2: Rational,
        allow_repeats: bool,
    ) -> Result<Self> {
        if g < MIN_GENUS {
            return Err(Error::InvalidParams(format!(
                "genus {g} is below {MIN_GENUS}"
            )));
        }
        if mu.is_zero() || d2.is_zero() {
            return Err(Error::InvalidParams("mu and d2 must be nonzero".into()));
        }
        for (k, row) in a.iter().enumerate() {
            validate_row(g, row, k, allow_repeats)?;
        }
        let half = g / 2;
        let svec: Vec<u8> = (0..g - 1).map(|i| u8::from(i < half)).collect();
        let tvec: Vec<u8> = svec.iter().map(|s| 1 - s).collect();
        let a_prod = [
            a[0].iter().product::<Rational>(),
            a[1].iter().product::<Rational>(),
        ];
        let d1 = -&d2 * &a_prod[0] / &a_prod[1];
        let delta = svec
            .iter()
            .map(|&s| if s == 1 { mu.clone() } else { Rational::zero() })
            .collect();
        let mut p = PrymCurveParams {
            g,
            a,
            delta,
            c: [Vec::new(), Vec::new()],
            mu,
            d1,
            d2,
            tvec,
            svec,
            a_prod,
        };
        p.recompute_c();
        Ok(p)
    }

    fn recompute_c(&mut self) {
        let d = [self.d1.clone(), self.d2.clone()];
        for (k, dk) in d.iter().enumerate() {
            self.c[k] = (0..self.g - 1)
                .map(|i| {
                    if self.tvec[i] == 0 {
                        Rational::zero()
                    } else {
                        dk * &self.a[k][i] / &self.a_prod[k]
                    }
                })
                .collect();
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// `floor(g / 2)`: nodes with index below this carry `delta = mu`.
    pub fn half(&self) -> usize {
        self.g / 2
    }

    /// Number of coordinate nodes, `g - 1`.
    pub fn n(&self) -> usize {
        self.g - 1
    }

    pub fn a(&self, k: Component) -> &[Rational] {
        &self.a[k.index()]
    }

    pub fn c(&self, k: Component) -> &[Rational] {
        &self.c[k.index()]
    }

    /// Shared by both components.
    pub fn delta(&self) -> &[Rational] {
        &self.delta
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn d1(&self) -> &Rational {
        &self.d1
    }

    pub fn d2(&self) -> &Rational {
        &self.d2
    }

    pub fn tvec(&self) -> &[u8] {
        &self.tvec
    }

    pub fn svec(&self) -> &[u8] {
        &self.svec
    }

    /// `A_k`, the product of the node parameters of component `k`.
    pub fn a_product(&self, k: Component) -> &Rational {
        &self.a_prod[k.index()]
    }

    /// Replaces `d1`, recomputing `c` but not re-deriving `d1` from `d2`.
    /// Only meant for exercising the consistency checks.
    pub fn with_d1(mut self, d1: Rational) -> Self {
        self.d1 = d1;
        self.recompute_c();
        self
    }

    /// `M_k(t) = prod_r (t - a[k][r])`.
    pub fn m_poly(&self, k: Component) -> RatPoly {
        RatPoly::from_roots(self.a(k))
    }

    pub fn to_json(&self) -> Value {
        let row = |r: &[Rational]| Value::Array(r.iter().map(rational_to_json).collect());
        let mut obj = serde_json::Map::new();
        obj.insert("g".into(), Value::from(self.g));
        obj.insert(
            "a".into(),
            Value::Array(vec![row(&self.a[0]), row(&self.a[1])]),
        );
        if !self.mu.is_one() {
            obj.insert("mu".into(), rational_to_json(&self.mu));
        }
        if !self.d2.is_one() {
            obj.insert("d2".into(), rational_to_json(&self.d2));
        }
        Value::Object(obj)
    }

    /// Reads `{g, a: [[...], [...]]}` (optionally `mu`, `d2`). Entries may be
    /// integers or `"n/d"` strings. Every derived field is recomputed.
    pub fn from_json(v: &Value) -> Result<Self> {
        let g = v
            .get("g")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field `g`".into()))?
            as usize;
        let rows = v
            .get("a")
            .and_then(Value::as_array)
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::Parse("field `a` must be a list of two lists".into()))?;
        let mut a: [Vec<Rational>; 2] = [Vec::new(), Vec::new()];
        for (k, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse(format!("a[{}] is not a list", k + 1)))?;
            a[k] = row.iter().map(rational_from_json).collect::<Result<_>>()?;
        }
        let scalar = |key: &str| {
            v.get(key)
                .map(rational_from_json)
                .transpose()
                .map(|x| x.unwrap_or_else(Rational::one))
        };
        build_params_with(g, a, scalar("mu")?, scalar("d2")?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    /// Hex SHA-256 of the canonical serialization: compact JSON with `g`, then
    /// `a` as `"n/d"` strings, then `mu` and `d2`.
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Canonical {
            g: usize,
            a: [Vec<String>; 2],
            mu: String,
            d2: String,
        }
        let canon = Canonical {
            g: self.g,
            a: [
                self.a[0].iter().map(to_fraction_string).collect(),
                self.a[1].iter().map(to_fraction_string).collect(),
            ],
            mu: to_fraction_string(&self.mu),
            d2: to_fraction_string(&self.d2),
        };
        let bytes = serde_json::to_vec(&canon).expect("serializable");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn rational_to_json(x: &Rational) -> Value {
    if x.is_integer() {
        if let Some(n) = x.numer().to_i64() {
            return Value::from(n);
        }
    }
    Value::String(to_fraction_string(x))
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(rat)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}; use a \"n/d\" string"))),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

/// Parameters with `mu = d2 = 1`.
pub fn build_params(g: usize, a: [Vec<Rational>; 2]) -> Result<PrymCurveParams> {
    build_params_with(g, a, Rational::one(), Rational::one())
}

pub fn build_params_with(
    g: usize,
    a: [Vec<Rational>; 2],
    mu: Rational,
    d2: Rational,
) -> Result<PrymCurveParams> {
    PrymCurveParams::assemble(g, a, mu, d2, false)
}

/// Like [`build_params`] but tolerates repeated values within a row, for
/// exploring degenerate configurations. Zero values are still rejected.
pub fn build_params_unchecked(g: usize, a: [Vec<Rational>; 2]) -> Result<PrymCurveParams> {
    PrymCurveParams::assemble(g, a, Rational::one(), Rational::one(), true)
}

/// The special family `a[1][i] = i * a`, `a[2] = (1, 3, 4, ..., g)`
/// (1-based), used in the induction step.
pub fn scelta_params(g: usize, a: &Rational) -> Result<PrymCurveParams> {
    if a.is_zero() || a.is_one() {
        return Err(Error::InvalidParams(format!(
            "scaling constant must avoid 0 and 1, got {a}"
        )));
    }
    let row1 = (1..g as i64).map(|i| rat(i) * a).collect();
    let row2 = (1..g as i64)
        .map(|r| if r == 1 { rat(1) } else { rat(r + 1) })
        .collect();
    build_params(g, [row1, row2])
}

/// Seeded draw of distinct integers in `[1, 10g]` for each row. Different
/// `attempt` values give independent redraws.
pub fn random_params(g: usize, seed: u64, attempt: u32) -> Result<PrymCurveParams> {
    if g < MIN_GENUS {
        return Err(Error::InvalidParams(format!(
            "genus {g} is below {MIN_GENUS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((g as u64) << 8) | u64::from(attempt));
    let mut draw = || -> Vec<Rational> {
        sample(&mut rng, 10 * g, g - 1)
            .into_iter()
            .map(|x| rat(x as i64 + 1))
            .collect()
    };
    let row1 = draw();
    let row2 = draw();
    build_params(g, [row1, row2])
}

/// Redraws allowed after the first seeded draw.
pub const MAX_REDRAWS: u32 = 5;

/// First seeded draw (attempts `0..=MAX_REDRAWS`) that builds and passes
/// `accept`, with the attempt number used.
pub fn draw_params(
    g: usize,
    seed: u64,
    mut accept: impl FnMut(&PrymCurveParams) -> bool,
) -> Result<(PrymCurveParams, u32)> {
    let mut last = None;
    for attempt in 0..=MAX_REDRAWS {
        match random_params(g, seed, attempt) {
            Ok(p) if accept(&p) => return Ok((p, attempt)),
            Ok(_) => last = Some(Error::Degenerate(format!("draw {attempt} rejected"))),
            Err(e @ Error::InvalidParams(_)) if g < MIN_GENUS => return Err(e),
            Err(e) => last = Some(e),
        }
    }
    Err(Error::Degenerate(format!(
        "no usable draw for g = {g}, seed = {seed} after {} attempts: {}",
        MAX_REDRAWS + 1,
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// The coordinate functions `f_{i,k}(t) = M_k(t) (delta_i t - c_i) / (t - a_i)`
/// of component `k`, one per node.
pub fn component_polys(params: &PrymCurveParams, k: Component) -> Result<Vec<RatPoly>> {
    let m = params.m_poly(k);
    let (a, c) = (params.a(k), params.c(k));
    (0..params.n())
        .map(|i| {
            let lin = UniPoly::linear(&params.delta[i], &-&c[i]);
            (&m * &lin).div_exact(&UniPoly::linear_root(&a[i]))
        })
        .collect()
}

/// Signs `h_1, ..., h_{g+1}` of the 2-torsion character, normalized so that
/// the last entry is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionCharacter {
    pub h: Vec<i8>,
}

impl TorsionCharacter {
    pub fn is_trivial(&self) -> bool {
        self.h.iter().all(|&x| x == self.h[0])
    }
}

fn sign_of(x: &Rational, label: &str) -> Result<i8> {
    if x.abs().is_one() {
        Ok(if x.is_positive() { 1 } else { -1 })
    } else {
        Err(Error::NotTwoTorsion(format!("{label} = {x} is not a sign")))
    }
}

fn checked_ratio(num: &Rational, den: &Rational, label: &str) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::NotTwoTorsion(format!(
            "{label} has a vanishing residue"
        )));
    }
    Ok(num / den)
}

/// Ratio of residues of the two components at each node.
pub fn torsion_character(params: &PrymCurveParams) -> Result<TorsionCharacter> {
    let n = params.n();
    let (a1, a2) = (params.a(Component::One), params.a(Component::Two));
    let (c1, c2) = (params.c(Component::One), params.c(Component::Two));
    let mut h = Vec::with_capacity(n + 2);
    for i in 0..n {
        let num = &params.delta[i] - &c1[i] / &a1[i];
        let den = &params.delta[i] - &c2[i] / &a2[i];
        let label = format!("h_{}", i + 1);
        h.push(sign_of(&checked_ratio(&num, &den, &label)?, &label)?);
    }
    let last = n - 1;
    let hg = checked_ratio(&(&c1[last] / &a1[last]), &(&c2[last] / &a2[last]), "h_g")?;
    h.push(sign_of(&hg, "h_g")?);
    let hinf = checked_ratio(&params.delta[0], &params.delta[0], "h_{g+1}")?;
    h.push(sign_of(&hinf, "h_{g+1}")?);
    if h[n + 1] < 0 {
        h.iter_mut().for_each(|x| *x = -*x);
    }
    let chi = TorsionCharacter { h };
    if chi.is_trivial() {
        return Err(Error::NotTwoTorsion(
            "character is trivial modulo the diagonal".into(),
        ));
    }
    Ok(chi)
}

/// `D = prod_{r != p} (a_p - a_r)^2` on component `k`.
pub(crate) fn node_discriminant(params: &PrymCurveParams, k: Component, p: usize) -> Rational {
    let a = params.a(k);
    (0..params.n())
        .filter(|&r| r != p)
        .map(|r| {
            let d = &a[p] - &a[r];
            &d * &d
        })
        .product()
}
