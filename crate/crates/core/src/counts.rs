//! Closed-form path and eigenvalue counts.
//!
//! `δ` is the number of toric solutions of one shifted system (paths per
//! column), `n·δ` the total tracked paths, and `δ̂` the total number of
//! eigenvalues of the problem.

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error("count overflows 128-bit integers")]
    Overflow,
    #[error("n must be at least 1")]
    EmptyProblem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Dense shifts with every pure power present.
    Dense,
    /// One shared monomial shift per row.
    Pyramid,
    /// Lifted rational problem with `m` rational terms.
    Repv,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Dense => "dense",
            Family::Pyramid => "pyramid",
            Family::Repv => "repv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub family: Family,
    pub n: u64,
    pub d: Option<u64>,
    pub e: Option<u64>,
    pub m: Option<u64>,
    pub delta: u128,
    pub total_paths: u128,
    pub total_eigs: Option<u128>,
}

fn pow(base: u64, exp: u64) -> Result<u128, CountError> {
    let exp = u32::try_from(exp).map_err(|_| CountError::Overflow)?;
    (base as u128).checked_pow(exp).ok_or(CountError::Overflow)
}

fn mul(a: u128, b: u128) -> Result<u128, CountError> {
    a.checked_mul(b).ok_or(CountError::Overflow)
}

/// `C(n, k)` by the multiplicative formula, exact at every step.
pub fn binomial(n: u64, k: u64) -> Result<u128, CountError> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = mul(acc, (n - i) as u128)? / (i as u128 + 1);
    }
    Ok(acc)
}

fn check_n(n: u64) -> Result<(), CountError> {
    if n == 0 {
        Err(CountError::EmptyProblem)
    } else {
        Ok(())
    }
}

/// `δ = (d+1)^n − d^n`, `δ̂ = e·n·(d+1)^{n−1}`.
pub fn dense_counts(n: u64, d: u64, e: u64) -> Result<CountReport, CountError> {
    check_n(n)?;
    let delta = pow(d + 1, n)? - pow(d, n)?;
    let total_eigs = mul(mul(e as u128, n as u128)?, pow(d + 1, n - 1)?)?;
    Ok(CountReport {
        family: Family::Dense,
        n,
        d: Some(d),
        e: Some(e),
        m: None,
        delta,
        total_paths: mul(n as u128, delta)?,
        total_eigs: Some(total_eigs),
    })
}

/// `δ = (d+1)^{n−1}`; with a z-degree `e`, also `δ̂ = e·n·(d+1)^{n−1}`.
pub fn pyramid_count(n: u64, d: u64, e: Option<u64>) -> Result<CountReport, CountError> {
    check_n(n)?;
    let delta = pow(d + 1, n - 1)?;
    let total_eigs = match e {
        Some(e) => Some(mul(mul(e as u128, n as u128)?, delta)?),
        None => None,
    };
    Ok(CountReport {
        family: Family::Pyramid,
        n,
        d: Some(d),
        e,
        m: None,
        delta,
        total_paths: mul(n as u128, delta)?,
        total_eigs,
    })
}

/// `δ = Σ_k C(n−1, k)·C(m, k)`, `δ̂ = C(n+m, m+1)`.
pub fn repv_count(n: u64, m: u64) -> Result<CountReport, CountError> {
    check_n(n)?;
    let mut delta: u128 = 0;
    for k in 0..=(n - 1).min(m) {
        delta = delta
            .checked_add(mul(binomial(n - 1, k)?, binomial(m, k)?)?)
            .ok_or(CountError::Overflow)?;
    }
    Ok(CountReport {
        family: Family::Repv,
        n,
        d: None,
        e: None,
        m: Some(m),
        delta,
        total_paths: mul(n as u128, delta)?,
        total_eigs: Some(binomial(n + m, m + 1)?),
    })
}
