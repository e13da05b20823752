use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::{Component, EquilibriumProfile, Family, Profile, VelocityGrid};
use crate::error::{Error, Result};

/// Profile description read from a TOML file.
///
/// ```toml
/// family = "bi_maxwellian"
/// params = [1.0, 1.0]
/// v_max = 10.0
/// n = 4001
/// ```
///
/// `weighted_sum` takes flat `(weight, center, width)` triples; `tabulated`
/// takes `csv = "path"` relative to the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub csv: Option<PathBuf>,
    pub v_max: Option<f64>,
    pub n: Option<usize>,
}

impl ProfileConfig {
    pub fn build(&self, base_dir: &Path) -> Result<EquilibriumProfile> {
        let family = match self.family.as_str() {
            "tabulated" => {
                let rel = self
                    .csv
                    .as_ref()
                    .ok_or_else(|| Error::Config("tabulated family needs a `csv` key".into()))?;
                read_table(&base_dir.join(rel))?
            }
            name => family_from_params(name, &self.params)?,
        };
        let probe = EquilibriumProfile::from_family(family.clone())?;
        let v_max = self.v_max.unwrap_or(probe.grid().v_max());
        let n = self.n.unwrap_or(VelocityGrid::DEFAULT_NODES);
        EquilibriumProfile::on_grid(family, VelocityGrid::new(v_max, n)?)
    }
}


fn family_from_params(name: &str, params: &[f64]) -> Result<Family> {
    let need = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::Config(format!("family `{name}` takes {k} parameters, got {}", params.len())))
        }
    };
    match name {
        "maxwellian" => {
            need(2)?;
            Ok(Family::Maxwellian { center: params[0], width: params[1] })
        }
        "bi_maxwellian" | "bimax" => {
            need(2)?;
            Ok(Family::BiMaxwellian { separation: params[0], width: params[1] })
        }
        "weighted_sum" | "sum" => {
            if params.is_empty() || !params.len().is_multiple_of(3) {
                return Err(Error::Config(
                    "weighted_sum takes (weight, center, width) triples".into(),
                ));
            }
            let components = params
                .chunks(3)
                .map(|t| Component { weight: t[0], center: t[1], width: t[2] })
                .collect();
            Ok(Family::WeightedSum { components })
        }
        other => Err(Error::Config(format!("unknown profile family `{other}`"))),
    }
}

pub fn load_config(path: &Path) -> Result<EquilibriumProfile> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ProfileConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    cfg.build(path.parent().unwrap_or(Path::new(".")))
}

#[derive(Debug, Deserialize)]
struct Row {
    v: f64,
    f0: f64,
}

fn read_table(path: &Path) -> Result<Family> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["v", "f0"] {
        return Err(Error::Config(format!(
            "{}: expected header `v,f0`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut v, mut f0) = (Vec::new(), Vec::new());
    for row in rdr.deserialize() {
        let Row { v: a, f0: b } = row?;
        v.push(a);
        f0.push(b);
    }
    Ok(Family::Tabulated { v, f0 })
}

/// Two-column `v,f0` table on the default grid.
pub fn load_csv(path: &Path) -> Result<EquilibriumProfile> {
    EquilibriumProfile::from_family(read_table(path)?)
}

/// Command-line profile spec: `maxwellian:c,w`, `bimax:c,w`,
/// `sum:a,c,w;a,c,w`, `tangency:w,u` (the synthetic embedded-mode
/// profile), or a path to a `.csv` table or `.toml` config.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Family(Family),
    Tangency { width: f64, u_star: f64 },
    Csv(PathBuf),
    Config(PathBuf),
}

impl FromStr for ProfileSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, rest)) = s.split_once(':') {
            if !name.contains(['/', '\\', '.']) {
                let params = rest
                    .split([',', ';'])
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad number `{t}` in profile spec")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if name == "tangency" {
                    let [width, u_star] = params[..] else {
                        return Err(Error::Config("tangency takes 2 parameters: width, u*".into()));
                    };
                    return Ok(ProfileSpec::Tangency { width, u_star });
                }
                return Ok(ProfileSpec::Family(family_from_params(name, &params)?));
            }
        }
        let path = PathBuf::from(s);
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(ProfileSpec::Csv(path)),
            Some("toml") => Ok(ProfileSpec::Config(path)),
            _ => Err(Error::Config(format!("cannot parse profile spec `{s}`"))),
        }
    }
}

impl ProfileSpec {
    pub fn load(&self) -> Result<EquilibriumProfile> {
        match self {
            ProfileSpec::Family(f) => EquilibriumProfile::from_family(f.clone()),
            ProfileSpec::Tangency { width, u_star } => {
                crate::perturbation::make_synthetic_tangency(*width, *u_star)
            }
            ProfileSpec::Csv(p) => load_csv(p),
            ProfileSpec::Config(p) => load_config(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_family_specs() {
        let s: ProfileSpec = "maxwellian:0,1".parse().unwrap();
        assert_eq!(s, ProfileSpec::Family(Family::Maxwellian { center: 0.0, width: 1.0 }));
        let s: ProfileSpec = "bimax:0.75, 1".parse().unwrap();
        assert_eq!(s, ProfileSpec::Family(Family::BiMaxwellian { separation: 0.75, width: 1.0 }));
        let s: ProfileSpec = "sum:1,0,1;0.5,3,0.5".parse().unwrap();
        assert!(matches!(s, ProfileSpec::Family(Family::WeightedSum { ref components }) if components.len() == 2));
        assert!("maxwellian:0".parse::<ProfileSpec>().is_err());
        assert!("gauss:0,1".parse::<ProfileSpec>().is_err());
        assert_eq!("data/f.csv".parse::<ProfileSpec>().unwrap(), ProfileSpec::Csv("data/f.csv".into()));
        assert_eq!(
            "tangency:1,-2".parse::<ProfileSpec>().unwrap(),
            ProfileSpec::Tangency { width: 1.0, u_star: -2.0 }
        );
        assert!("tangency:1".parse::<ProfileSpec>().is_err());
    }
}
