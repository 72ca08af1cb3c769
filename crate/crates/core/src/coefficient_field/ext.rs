use serde::{Deserialize, Serialize};

use super::{FieldConfig, PadicNumber, PadicWire};
use crate::error::Error;

/// `sum(coords[i] * pi^i)` for `i < e`, with `pi^e = p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElement {
    coords: Vec<PadicNumber>,
}

impl ExtElement {
    pub fn zero(cfg: &FieldConfig) -> Self {
        ExtElement { coords: vec![PadicNumber::zero(); cfg.e() as usize] }
    }

    pub fn one(cfg: &FieldConfig) -> Self {
        Self::from_padic(PadicNumber::one(cfg), cfg)
    }

    pub fn from_i64(n: i64, cfg: &FieldConfig) -> Self {
        Self::from_padic(PadicNumber::from_i64(n, cfg), cfg)
    }

    pub fn from_padic(x: PadicNumber, cfg: &FieldConfig) -> Self {
        let mut out = Self::zero(cfg);
        out.coords[0] = x;
        out
    }

    /// The uniformizer `pi` (for `e = 1` this is `p`).
    pub fn pi(cfg: &FieldConfig) -> Self {
        cross_section(1, cfg)
    }

    /// Coordinates beyond those given are zero.
    pub fn from_coords(coords: Vec<PadicNumber>, cfg: &FieldConfig) -> Result<Self, Error> {
        let e = cfg.e() as usize;
        if coords.len() > e {
            return Err(Error::Parse(format!("{} coordinates given but e = {e}", coords.len())));
        }
        let mut coords = coords;
        coords.resize(e, PadicNumber::zero());
        Ok(ExtElement { coords })
    }

    pub fn coords(&self) -> &[PadicNumber] {
        &self.coords
    }

    /// True when every coordinate is zero, exactly or to its precision.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(PadicNumber::is_zero)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coords.iter().all(PadicNumber::is_exact_zero)
    }

    /// `min(e * v_p(a_i) + i)`, normalized so that `v(pi) = 1`; `None` for zero.
    ///
    /// Exact: the candidates are pairwise distinct modulo `e`.
    pub fn val(&self, cfg: &FieldConfig) -> Option<i64> {
        let e = cfg.e() as i64;
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.valuation().map(|v| e * v + i as i64))
            .min()
    }

    pub fn add(&self, other: &Self, cfg: &FieldConfig) -> Self {
        ExtElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b, cfg)).collect(),
        }
    }

    pub fn neg(&self, cfg: &FieldConfig) -> Self {
        ExtElement { coords: self.coords.iter().map(|a| a.neg(cfg)).collect() }
    }

    pub fn sub(&self, other: &Self, cfg: &FieldConfig) -> Self {
        self.add(&other.neg(cfg), cfg)
    }

    /// Polynomial product in `pi`, reduced by `pi^e = p`.
    pub fn mul(&self, other: &Self, cfg: &FieldConfig) -> Self {
        let e = cfg.e() as usize;
        let mut out = vec![PadicNumber::zero(); e];
        // zeros known only to some precision still carry that precision along
        for (i, a) in self.coords.iter().enumerate().filter(|(_, a)| !a.is_exact_zero()) {
            for (j, b) in other.coords.iter().enumerate().filter(|(_, b)| !b.is_exact_zero()) {
                let prod = a.mul(b, cfg);
                let (k, prod) = if i + j >= e { (i + j - e, prod.mul_p_power(1)) } else { (i + j, prod) };
                out[k] = out[k].add(&prod, cfg);
            }
        }
        ExtElement { coords: out }
    }

    pub fn scale(&self, c: &PadicNumber, cfg: &FieldConfig) -> Self {
        ExtElement { coords: self.coords.iter().map(|a| a.mul(c, cfg)).collect() }
    }

    /// Multiplication by `pi^m`; exact, since it only permutes coordinates and
    /// shifts their p-adic valuations.
    pub fn mul_pi_power(&self, m: i64, cfg: &FieldConfig) -> Self {
        let e = cfg.e() as i64;
        let mut out = vec![PadicNumber::zero(); e as usize];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            let idx = i as i64 + m;
            out[idx.rem_euclid(e) as usize] = a.mul_p_power(idx.div_euclid(e));
        }
        ExtElement { coords: out }
    }

    /// Multiplicative inverse.
    ///
    /// Writes `x = pi^k u` with `v(u) = 0`, starts from the inverse of the
    /// constant coordinate of `u` and refines by Newton steps
    /// `y <- y + y(1 - uy)`, which double the valuation of the error.
    pub fn inv(&self, cfg: &FieldConfig) -> Result<Self, Error> {
        let k = self.val(cfg).ok_or(Error::DivisionByZero)?;
        let u = self.mul_pi_power(-k, cfg);
        let one = Self::one(cfg);
        let mut y = Self::from_padic(u.coords[0].inv(cfg)?, cfg);
        // error starts at valuation >= 1 and must pass e * N
        let target = (cfg.e() as u64) * (cfg.precision() as u64) + 1;
        let max_steps = 2 + 64 - target.leading_zeros();
        for _ in 0..max_steps {
            let err = one.sub(&u.mul(&y, cfg), cfg);
            if err.is_zero() {
                break;
            }
            y = y.add(&y.mul(&err, cfg), cfg);
        }
        Ok(y.mul_pi_power(-k, cfg))
    }

    /// Inverse by solving `x y = 1` as an `e x e` linear system over `Q_p`.
    ///
    /// Slower than [`ExtElement::inv`] and independent of it; the property
    /// suites compare the two.
    pub fn inv_linear(&self, cfg: &FieldConfig) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e = cfg.e() as usize;
        // column j holds the coordinates of x * pi^j
        let cols: Vec<Self> = (0..e as i64).map(|j| self.mul_pi_power(j, cfg)).collect();
        let mut rows: Vec<Vec<PadicNumber>> = (0..e)
            .map(|i| {
                let mut row: Vec<PadicNumber> = cols.iter().map(|c| c.coords[i].clone()).collect();
                row.push(if i == 0 { PadicNumber::one(cfg) } else { PadicNumber::zero() });
                row
            })
            .collect();
        for col in 0..e {
            // pivot on the entry of least valuation to keep digits
            let pivot = (col..e)
                .filter(|&r| !rows[r][col].is_zero())
                .min_by_key(|&r| rows[r][col].valuation())
                .ok_or(Error::DivisionByZero)?;
            rows.swap(col, pivot);
            let inv = rows[col][col].inv(cfg)?;
            for r in 0..e {
                if r == col || rows[r][col].is_exact_zero() {
                    continue;
                }
                let factor = rows[r][col].mul(&inv, cfg);
                for k in col..=e {
                    let d = factor.mul(&rows[col][k], cfg);
                    rows[r][k] = rows[r][k].sub(&d, cfg);
                }
            }
        }
        let coords = rows
            .iter()
            .enumerate()
            .map(|(i, row)| Ok(row[e].mul(&row[i].inv(cfg)?, cfg)))
            .collect::<Result<_, Error>>()?;
        Self::from_coords(coords, cfg)
    }

    /// Image in the residue field `F_p`.
    pub fn residue(&self, cfg: &FieldConfig) -> Result<u32, Error> {
        match self.val(cfg) {
            None => Ok(0),
            Some(v) if v < 0 => Err(Error::NegativeValuation(v)),
            Some(0) => Ok(self.coords[0].digits(cfg)[0]),
            Some(_) => Ok(0),
        }
    }

    /// Coordinate-wise equality on guaranteed digits.
    pub fn agrees(&self, other: &Self, cfg: &FieldConfig) -> bool {
        self.coords.len() == other.coords.len()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a.agrees(b, cfg))
    }

    /// Smallest number of guaranteed digits over the nonzero coordinates.
    pub fn precision(&self) -> Option<u32> {
        self.coords.iter().filter_map(PadicNumber::precision).min()
    }

    pub fn to_wire(&self, cfg: &FieldConfig) -> ExtWire {
        ExtWire::Coords { coords: self.coords.iter().map(|a| a.to_wire(cfg)).collect() }
    }

    pub fn from_wire(w: &ExtWire, cfg: &FieldConfig) -> Result<Self, Error> {
        match w {
            ExtWire::Coords { coords } => {
                let coords =
                    coords.iter().map(|c| PadicNumber::from_wire(c, cfg)).collect::<Result<_, _>>()?;
                Self::from_coords(coords, cfg)
            }
            ExtWire::Exact(s) => {
                Ok(Self::from_padic(PadicNumber::from_wire(&PadicWire::Exact(s.clone()), cfg)?, cfg))
            }
        }
    }
}

/// `pi^m`. For negative `m` the result lives in the fraction field.
pub fn cross_section(m: i64, cfg: &FieldConfig) -> ExtElement {
    ExtElement::one(cfg).mul_pi_power(m, cfg)
}

/// JSON form `{"coords": [padic, ...]}`; a bare rational string is accepted on
/// input as an element of `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtWire {
    Coords { coords: Vec<PadicWire> },
    Exact(String),
}
