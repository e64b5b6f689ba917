//! Input-state strings such as `fock:2`, `squeezed:0.5` or `negativity:0.3,2,1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

use crate::cvcore::FockMatrix;
use crate::error::{Error, Result};
use crate::state_bounds::{InputStateSpec, NegativityProfile};

#[derive(Debug, Clone)]
pub struct StateArg {
    /// The string as given (ranges expanded), used to label output rows.
    pub label: String,
    pub spec: InputStateSpec,
}

fn number(kind: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("state `{kind}` needs a number, got `{v}`")))
}

fn count(kind: &str, v: &str) -> Result<u32> {
    v.trim()
        .parse::<u32>()
        .map_err(|_| Error::Config(format!("state `{kind}` needs a non-negative integer, got `{v}`")))
}

/// JSON density matrix: either `{"re": [[…]], "im": [[…]]}` (im optional) or `{"probs": […]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    re: Option<Vec<Vec<f64>>>,
    im: Option<Vec<Vec<f64>>>,
    probs: Option<Vec<f64>>,
}

pub fn load_density_matrix(path: &Path) -> Result<FockMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let f: MatrixFile = serde_json::from_str(&text)?;
    if let Some(p) = f.probs {
        return FockMatrix::diagonal(&p);
    }
    let re = f.re.ok_or_else(|| Error::Config(format!("{}: need `re` or `probs`", path.display())))?;
    let dim = re.len();
    if re.iter().any(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch(format!("{}: `re` is not square", path.display())));
    }
    let im = f.im.unwrap_or_else(|| vec![vec![0.0; dim]; dim]);
    if im.len() != dim || im.iter().any(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch(format!("{}: `im` does not match `re`", path.display())));
    }
    FockMatrix::new(DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im[i][j])))
}

pub fn parse_state(s: &str) -> Result<StateArg> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("state `{s}` must look like kind:value, e.g. fock:2")))?;
    let kind = kind.trim().to_ascii_lowercase();
    let spec = match kind.as_str() {
        "classical" | "coherent" => InputStateSpec::Classical { nbar: number(&kind, value)? },
        "fock" => InputStateSpec::Fock { m: count(&kind, value)? },
        "spat" => InputStateSpec::Spat { q: number(&kind, value)? },
        "squeezed" | "squeezed-vacuum" => InputStateSpec::SqueezedVacuum { lambda: number(&kind, value)? },
        "energy-only" | "energy" => InputStateSpec::EnergyOnly { nbar: number(&kind, value)? },
        "known-fock" => InputStateSpec::KnownFock { rho: load_density_matrix(Path::new(value.trim()))? },
        "negativity" => {
            let parts: Vec<&str> = value.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("state `negativity` needs N,n+,n-; got `{value}`")));
            }
            let p = NegativityProfile::new(number(&kind, parts[0])?, number(&kind, parts[1])?, number(&kind, parts[2])?)?;
            InputStateSpec::FiniteNegativity { profile: p }
        }
        other => return Err(Error::Config(format!("unknown state kind `{other}`"))),
    };
    spec.validate()?;
    Ok(StateArg { label: s.trim().to_string(), spec })
}

/// Parses each entry, expanding integer ranges such as `fock:0..4` (inclusive).
pub fn expand_states(items: &[String]) -> Result<Vec<StateArg>> {
    let mut out = Vec::new();
    for item in items {
        if let Some((kind, value)) = item.split_once(':') {
            if let Some((a, b)) = value.split_once("..") {
                let (a, b) = (count(kind, a)?, count(kind, b)?);
                if a > b {
                    return Err(Error::Config(format!("empty range in `{item}`")));
                }
                for m in a..=b {
                    out.push(parse_state(&format!("{kind}:{m}"))?);
                }
                continue;
            }
        }
        out.push(parse_state(item)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        assert!(matches!(parse_state("fock:2").unwrap().spec, InputStateSpec::Fock { m: 2 }));
        assert!(matches!(parse_state("classical:0.5").unwrap().spec, InputStateSpec::Classical { .. }));
        assert!(matches!(parse_state("spat:1").unwrap().spec, InputStateSpec::Spat { .. }));
        assert!(matches!(parse_state("squeezed:0.5").unwrap().spec, InputStateSpec::SqueezedVacuum { .. }));
        assert!(matches!(parse_state("energy-only:1.0").unwrap().spec, InputStateSpec::EnergyOnly { .. }));
        assert!(matches!(parse_state("negativity:0.3,2,1").unwrap().spec, InputStateSpec::FiniteNegativity { .. }));
        assert!(parse_state("fock:-1").is_err());
        assert!(parse_state("squeezed:1.5").is_err());
        assert!(parse_state("nonsense").is_err());
        assert!(parse_state("cat:1").is_err());
    }

    #[test]
    fn expands_ranges() {
        let v = expand_states(&["fock:0..4".into(), "spat:1".into()]).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v[4].label, "fock:4");
        assert!(expand_states(&["fock:3..1".into()]).is_err());
    }

    #[test]
    fn loads_matrix_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rho.json");
        std::fs::write(&p, r#"{"re": [[0.5, 0.5], [0.5, 0.5]]}"#).unwrap();
        let rho = load_density_matrix(&p).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        std::fs::write(&p, r#"{"probs": [0.25, 0.75]}"#).unwrap();
        assert!((load_density_matrix(&p).unwrap().mean_photon_number() - 0.75).abs() < 1e-15);
        std::fs::write(&p, r#"{"re": [[1.0, 0.0]]}"#).unwrap();
        assert!(load_density_matrix(&p).is_err());
    }
}
