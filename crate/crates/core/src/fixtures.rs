//! Named instances used throughout the tests and the CLI.

use crate::error::{Error, Result};
use crate::model::Instance;

/// Two types, two categories; the greedy choice `k2` is far worse than always playing `k1`.
pub fn example1() -> Instance {
    Instance::new(vec![0.5, 0.5], vec![vec![0.95, 0.1], vec![0.79, 0.81]])
        .expect("example1 is valid")
}

/// Family where the greedy policy is worse than the best policy by a factor of `d`.
///
/// `k2` is liked with probability 0.8 by both types and leaves the belief unchanged, while
/// `k1` is liked by the first type with probability `8d / (1 + 8d)` and never by the second.
pub fn prop1(d: f64) -> Instance {
    assert!(d > 0.0, "prop1 requires d > 0");
    let p = 8.0 * d / (1.0 + 8.0 * d);
    Instance::new(vec![0.5, 0.5], vec![vec![p, 0.0], vec![0.8, 0.8]]).expect("prop1 is valid")
}

/// The four 3x3 belief-walk showcase instances (`index` in 1..=4).
pub fn appendix(index: usize) -> Result<Instance> {
    let (prior, prefs) = match index {
        1 => (
            vec![0.1713, 0.4465, 0.3822],
            vec![
                vec![0.8611, 0.4591, 0.6862],
                vec![0.0969, 0.5531, 0.8604],
                vec![0.5055, 0.1430, 0.8879],
            ],
        ),
        2 => (
            vec![0.3844, 0.1197, 0.4959],
            vec![
                vec![0.6848, 0.9100, 0.5457],
                vec![0.7741, 0.8284, 0.5833],
                vec![0.1931, 0.9127, 0.5273],
            ],
        ),
        3 => (
            vec![0.2972, 0.4001, 0.3027],
            vec![
                vec![0.5492, 0.0560, 0.8878],
                vec![0.2195, 0.8576, 0.2072],
                vec![0.7674, 0.7992, 0.4051],
            ],
        ),
        4 => (
            vec![0.3755, 0.3921, 0.2324],
            vec![
                vec![0.4011, 0.8521, 0.8301],
                vec![0.7683, 0.7837, 0.8314],
                vec![0.7674, 0.7832, 0.4051],
            ],
        ),
        _ => return Err(Error::UnknownFixture(format!("appendix{index}"))),
    };
    Instance::new(prior, prefs)
}

/// Resolves `example1`, `appendix1`..`appendix4`, and `prop1(D)` / `prop1(d=D)` / `prop1:D`.
pub fn by_name(name: &str) -> Result<Instance> {
    let name = name.trim();
    if name == "example1" {
        return Ok(example1());
    }
    if let Some(rest) = name.strip_prefix("appendix") {
        return match rest.parse::<usize>() {
            Ok(i) => appendix(i),
            Err(_) => Err(Error::UnknownFixture(name.into())),
        };
    }
    if let Some(rest) = name.strip_prefix("prop1") {
        let arg = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::UnknownFixture(name.into()))?;
        let arg = arg.trim();
        let arg = arg.strip_prefix("d=").unwrap_or(arg);
        return match arg.trim().parse::<f64>() {
            Ok(d) if d > 0.0 && d.is_finite() => Ok(prop1(d)),
            _ => Err(Error::UnknownFixture(name.into())),
        };
    }
    Err(Error::UnknownFixture(name.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_lookup() {
        let e = by_name("example1").unwrap();
        assert_eq!(e.prior(), &[0.5, 0.5]);
        assert_eq!(e.row(0), &[0.95, 0.1]);
        assert_eq!(e.row(1), &[0.79, 0.81]);

        let p = by_name("prop1(d=1)").unwrap();
        assert!((p.pref(0, 0) - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(p.row(1), &[0.8, 0.8]);
        assert_eq!(by_name("prop1:1").unwrap(), p);
        assert_eq!(by_name("prop1(1)").unwrap(), p);

        let a3 = by_name("appendix3").unwrap();
        assert_eq!(a3.prior(), &[0.2972, 0.4001, 0.3027]);
        assert_eq!(a3.row(0), &[0.5492, 0.0560, 0.8878]);

        for bad in ["example2", "appendix5", "appendixx", "prop1", "prop1(-1)", "prop1(x)"] {
            assert!(matches!(by_name(bad), Err(Error::UnknownFixture(_))), "{bad}");
        }
    }
}
