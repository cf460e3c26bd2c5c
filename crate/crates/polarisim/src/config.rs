//! Parameter sources, overrides and grid syntax.

use std::fs;
use std::path::Path;

use polarisim_core::{Field, SpectralGrid, SystemParams};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// On-disk parameter file. `g1_coll_cm1` may be replaced by the pair
/// `g1_cm1` + `n_molecules`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    omega_0_cm1: Option<f64>,
    omega_c_cm1: Option<f64>,
    kappa_cm1: Option<f64>,
    gamma_m_cm1: Option<f64>,
    delta_cm1: Option<f64>,
    g1_coll_cm1: Option<f64>,
    g3_ratio: Option<f64>,
    f_pu: Option<f64>,
    g1_cm1: Option<f64>,
    n_molecules: Option<f64>,
}

impl ParamFile {
    fn resolve(self) -> std::result::Result<SystemParams, String> {
        let g1_coll = match (self.g1_coll_cm1, self.g1_cm1, self.n_molecules) {
            (Some(g), None, None) => Some(g),
            (None, Some(g1), Some(n)) => {
                if !(n.is_finite() && n >= 0.0) {
                    return Err("n_molecules must be non-negative".into());
                }
                Some(SystemParams::collective_coupling(g1, n))
            }
            (None, None, None) => None,
            (Some(_), _, _) => {
                return Err("give either g1_coll_cm1 or g1_cm1 with n_molecules, not both".into())
            }
            _ => return Err("g1_cm1 and n_molecules must be given together".into()),
        };
        let values = [
            (Field::Omega0, self.omega_0_cm1),
            (Field::OmegaC, self.omega_c_cm1),
            (Field::Kappa, self.kappa_cm1),
            (Field::GammaM, self.gamma_m_cm1),
            (Field::Delta, self.delta_cm1),
            (Field::G1Coll, g1_coll),
            (Field::G3Ratio, self.g3_ratio),
            (Field::FPu, self.f_pu),
        ];
        let mut p = SystemParams::paper_defaults();
        for (field, value) in values {
            match value {
                Some(v) => p.set(field, v),
                None => return Err(format!("missing key {field}")),
            }
        }
        Ok(p)
    }
}

/// Reads a complete parameter set from a TOML file.
pub fn load_params(path: &Path) -> Result<SystemParams> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_params(&text).map_err(|message| CliError::Config {
        path: path.to_owned(),
        message,
    })
}

pub fn parse_params(text: &str) -> std::result::Result<SystemParams, String> {
    let file: ParamFile = toml::from_str(text).map_err(|e| e.message().to_owned())?;
    file.resolve()
}

/// Applies one `key=value` override.
pub fn apply_override(p: &mut SystemParams, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let field = Field::from_key(key).ok_or_else(|| {
        let known: Vec<&str> = Field::ALL.iter().map(|f| f.key()).collect();
        CliError::Usage(format!(
            "unknown parameter `{key}` (expected one of {})",
            known.join(", ")
        ))
    })?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("value for {key} is not a number: `{value}`")))?;
    p.set(field, value);
    Ok(())
}

/// Parses `MIN:MAX:STEP`.
pub fn parse_grid(text: &str) -> Result<SpectralGrid> {
    let parts: Vec<&str> = text.split(':').collect();
    let numbers: Option<Vec<f64>> = parts.iter().map(|s| s.trim().parse().ok()).collect();
    match numbers.as_deref() {
        Some(&[min, max, step]) => Ok(SpectralGrid::new(min, max, step)?),
        _ => Err(CliError::Usage(format!(
            "grid `{text}` is not MIN:MAX:STEP"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "
        omega_0_cm1 = 1983.0
        omega_c_cm1 = 1983.0
        kappa_cm1 = 11.0
        gamma_m_cm1 = 3.0
        delta_cm1 = 7.5
        g1_coll_cm1 = 19.0
        g3_ratio = -0.25
        f_pu = 0.075
    ";

    #[test]
    fn full_file() {
        assert_eq!(parse_params(FULL).unwrap(), SystemParams::paper_defaults());
    }

    #[test]
    fn molecule_count_form() {
        let text = FULL.replace("g1_coll_cm1 = 19.0", "g1_cm1 = 0.019\nn_molecules = 1e6");
        let p = parse_params(&text).unwrap();
        assert!((p.g1_coll - 19.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_or_ambiguous_files() {
        assert!(parse_params(&FULL.replace("f_pu = 0.075", ""))
            .unwrap_err()
            .contains("f_pu"));
        assert!(parse_params(&format!("{FULL}\ng1_cm1 = 1.0\nn_molecules = 4")).is_err());
        assert!(parse_params(&FULL.replace("g1_coll_cm1 = 19.0", "g1_cm1 = 1.0")).is_err());
        assert!(parse_params(&format!("{FULL}\nkappa = 3")).is_err());
    }

    #[test]
    fn overrides() {
        let mut p = SystemParams::paper_defaults();
        apply_override(&mut p, "delta_cm1=0").unwrap();
        apply_override(&mut p, " g3_ratio = 0.5 ").unwrap();
        assert_eq!((p.delta, p.g3_ratio), (0.0, 0.5));
        assert!(apply_override(&mut p, "delta").is_err());
        assert!(apply_override(&mut p, "nope=1").is_err());
        assert!(apply_override(&mut p, "delta_cm1=x").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1900:2070:0.01").unwrap().len(), 17001);
        assert!(parse_grid("1900:2070").is_err());
        assert!(matches!(parse_grid("2000:1900:1"), Err(CliError::Model(_))));
    }
}
