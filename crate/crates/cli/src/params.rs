use jacarith::numth;
use serde_json::{json, Value};

use crate::UsageError;

fn show<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(|| "?".into(), |v| v.to_string())
}

/// Validated instance parameters with derived regime flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceParams {
    pub p: Option<u32>,
    pub q: Option<u64>,
    pub r: Option<u32>,
    pub d: Option<u32>,
    pub ell: Option<u64>,
    /// `ν` with `d = p^ν + 1`, when it exists.
    pub nu: Option<u32>,
}

impl InstanceParams {
    pub fn new(
        p: Option<u32>,
        q: Option<u64>,
        r: Option<u32>,
        d: Option<u32>,
        ell: Option<u64>,
    ) -> Result<Self, UsageError> {
        let mut p = p;
        if let Some(p) = p {
            if !numth::is_prime(p as u64) {
                return Err(UsageError(format!("--p {p} is not prime")));
            }
        }
        if let Some(q) = q {
            let Some((base, _)) = numth::prime_power(q) else {
                return Err(UsageError(format!("--q {q} is not a prime power")));
            };
            match p {
                Some(p) if p as u64 != base => {
                    return Err(UsageError(format!("--q {q} is not a power of --p {p}")));
                }
                _ => p = Some(base as u32),
            }
        }
        if let Some(r) = r {
            if r < 2 {
                return Err(UsageError(format!("--r {r} must be at least 2")));
            }
        }
        if d == Some(0) {
            return Err(UsageError("--d must be positive".into()));
        }
        if let Some(ell) = ell {
            if !numth::is_prime(ell) {
                return Err(UsageError(format!("--ell {ell} is not prime")));
            }
        }
        if let (Some(p), Some(r), Some(d)) = (p, r, d) {
            if (r as u64 * d as u64) % p as u64 == 0 {
                return Err(UsageError(format!("p = {p} divides rd = {}", r as u64 * d as u64)));
            }
        }
        let nu = match (p, d) {
            (Some(p), Some(d)) => {
                (1..=32u32).find(|&nu| (p as u64).checked_pow(nu).map(|x| x + 1) == Some(d as u64))
            }
            _ => None,
        };
        Ok(InstanceParams { p, q, r, d, ell, nu })
    }

    pub fn r_divides_d(&self) -> Option<bool> {
        Some(self.d? % self.r? == 0)
    }

    pub fn d_divides_q_minus_1(&self) -> Option<bool> {
        Some((self.q? - 1) % self.d? as u64 == 0)
    }

    pub fn d_eq_p_nu_plus_1(&self) -> Option<bool> {
        self.p?;
        self.d?;
        Some(self.nu.is_some())
    }

    pub fn need_p(&self) -> Result<u32, UsageError> {
        self.p.ok_or_else(|| UsageError("missing --p (or a --q to derive it from)".into()))
    }

    pub fn need_q(&self) -> Result<u64, UsageError> {
        self.q.ok_or_else(|| UsageError("missing --q".into()))
    }

    pub fn need_r(&self) -> Result<u32, UsageError> {
        self.r.ok_or_else(|| UsageError("missing --r".into()))
    }

    pub fn need_d(&self) -> Result<u32, UsageError> {
        self.d.ok_or_else(|| UsageError("missing --d".into()))
    }

    pub fn need_ell(&self) -> Result<u64, UsageError> {
        self.ell.ok_or_else(|| UsageError("missing --ell".into()))
    }

    pub fn need_r_divides_d(&self) -> Result<(), UsageError> {
        if self.r_divides_d() != Some(true) {
            return Err(UsageError(format!(
                "regime: requires r | d (r = {}, d = {})",
                show(self.r),
                show(self.d)
            )));
        }
        Ok(())
    }

    pub fn need_nu(&self) -> Result<u32, UsageError> {
        self.nu.ok_or_else(|| {
            UsageError(format!("regime: requires d = p^ν + 1 (p = {}, d = {})", show(self.p), show(self.d)))
        })
    }

    pub fn need_d_divides_q_minus_1(&self) -> Result<(), UsageError> {
        if self.d_divides_q_minus_1() != Some(true) {
            return Err(UsageError(format!(
                "regime: requires d | q - 1 (d = {}, q = {})",
                show(self.d),
                show(self.q)
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "d": self.d,
            "ell": self.ell,
            "nu": self.nu,
            "regime": {
                "r_divides_d": self.r_divides_d(),
                "d_eq_p_nu_plus_1": self.d_eq_p_nu_plus_1(),
                "d_divides_q_minus_1": self.d_divides_q_minus_1(),
            },
        })
    }
}
