//! Closed-form payoffs of the classical n-box game.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact stay/switch probabilities with `n` boxes of which the host opens `m`
/// empty ones. With two parties (host and player) `m` ranges over `0..=n-2`.
///
/// `stay = 1/n`, `switch = (n-1) / ((n-m-1) n)`.
pub fn classical_payoffs(n: u64, m: u64) -> Result<(Ratio<u64>, Ratio<u64>)> {
    if n < 2 || m > n - 2 {
        return Err(Error::InvalidBoxCount { n, m });
    }
    let stay = Ratio::new(1, n);
    let switch = Ratio::new(n - 1, (n - m - 1) * n);
    Ok((stay, switch))
}

/// Floating-point form of [`classical_payoffs`].
pub fn classical_payoffs_f64(n: u64, m: u64) -> Result<(f64, f64)> {
    let (stay, switch) = classical_payoffs(n, m)?;
    let f = |r: Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
    Ok((f(stay), f(switch)))
}
